"""Several isometric variables: Cuntz-Toeplitz kernels on words and their operators.

A kernel on words is Cuntz-Toeplitz when it is invariant under left
juxtaposition, ``K(t s, t s') = K(s, s')``, and vanishes on pairs where
neither word extends the other.  Such a kernel is fixed by ``s_empty`` and
one parameter ``gamma_w`` per nonempty word ``w``.  Over the graded-lex
enumeration of words, the one-variable parameters are
``gamma_{s, s a} = gamma_a`` with zeros on non-comparable pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .ncpoly import NCPoly, left_shift_matrix
from .schur_params import GammaParams1D, moment_row, moments_from_params
from .words import (
    Word,
    count_words,
    enumerate_words,
    predecessor,
    rank,
    words_of_length,
)


@dataclass
class GammaParamsCT:
    N: int
    max_len: int
    s_empty: float = 1.0
    gamma: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 1 or self.max_len < 0:
            raise ValueError("need N >= 1 and max_len >= 0")
        if self.s_empty <= 0:
            raise ValueError("s_empty must be positive")
        clean = {}
        for w, g in self.gamma.items():
            if not isinstance(w, Word):
                w = Word.parse(str(w), self.N)
            if len(w) == 0 or len(w) > self.max_len:
                raise ValueError(f"parameter word {w} outside 1..{self.max_len}")
            if abs(g) >= 1:
                raise ValueError(f"|gamma_{w}| must be < 1")
            clean[w] = complex(g)
        self.gamma = clean

    @classmethod
    def zeros(cls, N: int, max_len: int, s_empty: float = 1.0) -> "GammaParamsCT":
        return cls(N, max_len, s_empty, {})

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, max_len: int,
               radius: float = 0.5, s_empty: float = 1.0) -> "GammaParamsCT":
        words = enumerate_words(N, max_len)[1:]
        r = radius * np.sqrt(rng.uniform(size=len(words)))
        ph = np.exp(2j * np.pi * rng.uniform(size=len(words)))
        return cls(N, max_len, s_empty, dict(zip(words, r * ph)))

    def g(self, w: Word) -> complex:
        return self.gamma.get(w, 0j)

    def d(self, w: Word) -> float:
        return float(np.sqrt(1.0 - abs(self.g(w)) ** 2))

    @cached_property
    def words(self) -> list[Word]:
        return enumerate_words(self.N, self.max_len)

    def as_1d(self) -> GammaParams1D:
        """One-variable parameters over the graded-lex enumeration of words."""
        words = self.words
        M = len(words)
        g = np.zeros((M, M), dtype=complex)
        for i, s in enumerate(words):
            for a, ga in self.gamma.items():
                if len(s) + len(a) <= self.max_len and ga != 0:
                    g[i, rank(s + a)] = ga
        return GammaParams1D(np.full(M, self.s_empty), g)


@dataclass
class CTKernel:
    """Sparse storage over comparable pairs ``(s, s a)`` and ``(s a, s)``."""

    N: int
    max_len: int
    entries: dict = field(default_factory=dict)

    def __call__(self, a: Word, b: Word) -> complex:
        return self.entries.get((a, b), 0j)

    def dense(self, words: Optional[list[Word]] = None) -> np.ndarray:
        words = enumerate_words(self.N, self.max_len) if words is None else words
        index = {w: i for i, w in enumerate(words)}
        out = np.zeros((len(words), len(words)), dtype=complex)
        for (a, b), v in self.entries.items():
            if a in index and b in index:
                out[index[a], index[b]] = v
        return out

    def stationarity_residual(self) -> float:
        """Max ``|K(t s, t s') - K(s, s')|`` over all stored pairs and prefixes ``t``."""
        worst = 0.0
        for (a, b), v in self.entries.items():
            room = self.max_len - max(len(a), len(b))
            for n in range(1, room + 1):
                for t in words_of_length(self.N, n):
                    worst = max(worst, abs(self(t + a, t + b) - v))
        return worst

    def sparsity_ok(self) -> bool:
        return all(a.is_prefix_of(b) or b.is_prefix_of(a) for (a, b) in self.entries)


def ct_kernel_from_gamma(p: GammaParamsCT) -> CTKernel:
    """Kernel of a Cuntz-Toeplitz parameter family.

    Only the row ``K(empty, .)`` goes through the one-variable forward map;
    every other comparable pair follows from left invariance.
    """
    row = moment_row(p.as_1d(), 0)
    words = p.words
    K = CTKernel(p.N, p.max_len)
    for s in words:
        for a in enumerate_words(p.N, p.max_len - len(s)):
            v = row[rank(a)]
            if len(a) == 0:
                K.entries[s, s] = complex(p.s_empty)
                continue
            K.entries[s, s + a] = v
            K.entries[s + a, s] = np.conj(v)
    return K


def ct_dense_forward(p: GammaParamsCT) -> np.ndarray:
    """Full one-variable forward map on all words; slower, used as a check."""
    return moments_from_params(p.as_1d()).entries


def ct_params_from_kernel(K: CTKernel) -> GammaParamsCT:
    """Recover ``gamma_w`` from a Cuntz-Toeplitz kernel via the one-variable inverse map."""
    from .schur_params import MomentKernel1D, params_from_moments

    words = enumerate_words(K.N, K.max_len)
    p1 = params_from_moments(MomentKernel1D(K.dense(words)))
    s0 = float(p1.diag[0])
    return GammaParamsCT(K.N, K.max_len, s0,
                         {w: p1.gamma[0, i] for i, w in enumerate(words) if i > 0})


@dataclass
class WordPolyFamily:
    """Orthonormal polynomials ``phi_w`` and ``phi#_w`` as dense coefficient vectors.

    Coefficients are indexed by the graded-lex enumeration of words up to ``max_len``.
    """

    N: int
    max_len: int
    phi: dict = field(default_factory=dict)
    phisharp: dict = field(default_factory=dict)

    def poly(self, w: Word, sharp: bool = False) -> NCPoly:
        vec = (self.phisharp if sharp else self.phi)[w]
        return NCPoly.from_dense(self.N, vec)

    def matrix(self, sharp: bool = False) -> np.ndarray:
        """Columns are the coefficient vectors in graded-lex order of the index word."""
        src = self.phisharp if sharp else self.phi
        words = enumerate_words(self.N, self.max_len)
        return np.column_stack([src[w] for w in words])


def ct_ortho_recurrence(p: GammaParamsCT) -> WordPolyFamily:
    """Word-indexed two-term recurrence.

    ``phi_{k s} = (X_k phi_s - gamma_{k s} phi#_{(k s)-1}) / d_{k s}`` and
    ``phi#_{k s} = (-conj(gamma_{k s}) X_k phi_s + phi#_{(k s)-1}) / d_{k s}``,
    with ``(k s)-1`` the graded-lex predecessor of ``k s``.
    """
    N, L = p.N, p.max_len
    words = p.words
    M = len(words)
    shifts = [left_shift_matrix(N, k, L) for k in range(1, N + 1)]
    inner_size = count_words(N, L - 1) if L > 0 else 0
    fam = WordPolyFamily(N, L)
    c0 = np.zeros(M, dtype=complex)
    c0[0] = p.s_empty ** -0.5
    e = Word.empty(N)
    fam.phi[e] = c0
    fam.phisharp[e] = c0.copy()
    for w in words[1:]:
        k, s = w[0], w[1:]
        g, d = p.g(w), p.d(w)
        xphi = shifts[k - 1] @ fam.phi[s][:inner_size]
        prev = fam.phisharp[predecessor(w)]
        fam.phi[w] = (xphi - g * prev) / d
        fam.phisharp[w] = (-np.conj(g) * xphi + prev) / d
    return fam


def ct_gram(fam: WordPolyFamily, K: CTKernel) -> np.ndarray:
    """``G[a, b] = <phi_b, phi_a>`` under the kernel inner product."""
    C = fam.matrix()
    return C.conj().T @ K.dense() @ C


# --- Kolmogorov decomposition --------------------------------------------------

def _require_unit_diag(p: GammaParams1D) -> None:
    if not np.allclose(p.diag, 1.0, rtol=0, atol=1e-14):
        raise ValueError("Kolmogorov construction needs unit diagonal")


def kolmogorov_column(p: GammaParams1D, k: int, j: int) -> np.ndarray:
    """Column ``j`` of ``W_k``, supported on rows ``0..j+1``.

    Row 0 is ``d_{k,k+1} ... d_{k,k+j} gamma_{k,k+j+1}``; row ``i`` in
    ``1..j`` is ``-conj(gamma_{k,k+i}) d_{k,k+i+1} ... d_{k,k+j} gamma_{k,k+j+1}``;
    row ``j+1`` is ``d_{k,k+j+1}``.
    """
    H = p.horizon
    top = k + j + 1
    if top > H:
        raise ValueError(f"column {j} of W_{k} needs gamma up to index {top} > horizon {H}")
    g, dd = p.gamma, p.dd
    col = np.zeros(j + 2, dtype=complex)
    tail = g[k, top]
    # running product d_{k,k+i+1} ... d_{k,k+j}, built from the bottom up
    for i in range(j, 0, -1):
        col[i] = -np.conj(g[k, k + i]) * tail
        tail = tail * dd[k, k + i]
    col[0] = tail
    col[j + 1] = dd[k, top]
    return col


def kolmogorov_W(p: GammaParams1D, k: int, ncols: Optional[int] = None) -> np.ndarray:
    """Leading ``ncols`` columns of the isometry ``W_k`` (all available by default)."""
    _require_unit_diag(p)
    avail = p.horizon - k
    ncols = avail if ncols is None else ncols
    if ncols > avail:
        raise ValueError(f"W_{k} has only {avail} computable columns at horizon {p.horizon}")
    out = np.zeros((ncols + 1, ncols), dtype=complex)
    for j in range(ncols):
        out[: j + 2, j] = kolmogorov_column(p, k, j)
    return out


def kolmogorov_W_product(p: GammaParams1D, k: int, j: int) -> np.ndarray:
    """``V_{k,j}``: product of embedded Julia operators for ``gamma_{k,k+1}..gamma_{k,j}``."""
    from .schur_params import julia

    n = j - k
    out = np.eye(n + 1, dtype=complex)
    for i in range(1, n + 1):
        f = np.eye(n + 1, dtype=complex)
        f[i - 1:i + 1, i - 1:i + 1] = julia(p.gamma[k, k + i])
        out = out @ f
    return out


def kolmogorov_V(p: GammaParams1D, count: Optional[int] = None) -> list[np.ndarray]:
    """``V(m) = W_0 W_1 ... W_{m-1} e_0`` for ``m = 0..count-1``, padded to length ``horizon + 1``.

    Every vector is exact: ``V(m)`` only touches ``gamma_{k,j}`` with ``j <= m``.
    """
    _require_unit_diag(p)
    H = p.horizon
    count = H + 1 if count is None else count
    if count > H + 1:
        raise ValueError("count exceeds horizon + 1")
    out = []
    for m in range(count):
        v = np.array([1.0 + 0j])
        for k in range(m - 1, -1, -1):
            v = kolmogorov_W(p, k, len(v)) @ v
        full = np.zeros(H + 1, dtype=complex)
        full[: len(v)] = v
        out.append(full)
    return out


# --- Cuntz-Toeplitz isometries -----------------------------------------------

def cuntz_isometries(p: GammaParamsCT) -> list[np.ndarray]:
    """Truncated ``U(k)``: rows are words of length ``<= max_len``, columns words of length ``<= max_len - 1``.

    Column ``t`` of ``U(k)`` is the column of ``W_0`` indexed by ``k t``.
    """
    if abs(p.s_empty - 1.0) > 1e-14:
        raise ValueError("Cuntz construction needs s_empty == 1")
    if p.max_len < 1:
        raise ValueError("need max_len >= 1")
    W0 = kolmogorov_W(p.as_1d(), 0)
    cols = enumerate_words(p.N, p.max_len - 1)
    out = []
    for k in range(1, p.N + 1):
        head = Word((k,), p.N)
        idx = [rank(head + t) - 1 for t in cols]
        out.append(W0[:, idx])
    return out


def cuntz_residual(U: list[np.ndarray]) -> float:
    """``max_{k,l} || U(k)^* U(l) - delta_{kl} I ||_max``."""
    worst = 0.0
    for a, Ua in enumerate(U):
        for b, Ub in enumerate(U):
            target = np.eye(Ua.shape[1]) if a == b else 0.0
            worst = max(worst, float(np.max(np.abs(Ua.conj().T @ Ub - target))))
    return worst


def cuntz_condition(p: GammaParamsCT) -> float:
    """Partial product of ``d_w`` over nonempty words up to ``max_len``.

    The Cuntz relations need the infinite product to vanish; a finite
    truncation can only report how small the partial product already is.
    """
    return float(np.prod([p.d(w) for w in p.words[1:]]))


def cuntz_kolmogorov(U: list[np.ndarray], w: Word) -> np.ndarray:
    """``V(w) = U(i_1) ... U(i_k) e_empty`` for ``|w| <= max_len``."""
    M = U[0].shape[0]
    inner = U[0].shape[1]
    v = np.zeros(M, dtype=complex)
    v[0] = 1.0
    for a in reversed(w.letters):
        v = U[a - 1] @ v[:inner]
    return v


# --- matrix units ------------------------------------------------------------

def matrix_unit(n: int, i: int, j: int, dim: int = 1) -> np.ndarray:
    """``E^n_{ij} = e^n_{ij} (x) I_dim`` with 1-based indices."""
    e = np.zeros((n, n))
    e[i - 1, j - 1] = 1.0
    return np.kron(e, np.eye(dim))


def _positions(sigma: Word, s: int, reverse: bool) -> list[int]:
    k = len(sigma)
    if reverse:
        return [l for l in range(1, k + 1) if sigma[k - l] == s]
    return [l for l in range(1, k + 1) if sigma[l - 1] == s]


def matrix_unit_tuples(sigma: Word, dim_factor: int = 1) -> list[list[np.ndarray]]:
    """``2|sigma|`` operator tuples ``Z^p = (Z^p_1, ..., Z^p_N)`` on ``E_1^{2|sigma|}``.

    For ``p <= k`` the adjoint ``Z^{*p}_s`` has ``2^{-1/2} E_{r+p-1, r+p}`` for
    every position ``r`` with ``i_{k+1-r} = s``; for ``p > k`` it has
    ``2^{-1/2} E_{r+p-k, r+p-k-1}`` for every ``r`` with ``i_r = s``.
    """
    k = len(sigma)
    if k == 0:
        raise ValueError("sigma must be nonempty")
    if dim_factor < 1:
        raise ValueError("dim_factor must be positive")
    n = 2 * k
    c = 2 ** -0.5
    out = []
    for p in range(1, n + 1):
        tup = []
        for s in range(1, sigma.N + 1):
            adj = np.zeros((n * dim_factor, n * dim_factor))
            if p <= k:
                for r in _positions(sigma, s, reverse=True):
                    adj += c * matrix_unit(n, r + p - 1, r + p, dim_factor)
            else:
                for r in _positions(sigma, s, reverse=False):
                    adj += c * matrix_unit(n, r + p - k, r + p - k - 1, dim_factor)
            tup.append(adj.T.copy())
        out.append(tup)
    return out


def word_power(Z: list[np.ndarray], w: Word) -> np.ndarray:
    """``Z_w = Z_{i_1} ... Z_{i_k}``; identity for the empty word."""
    out = np.eye(Z[0].shape[0], dtype=Z[0].dtype)
    for a in w.letters:
        out = out @ Z[a - 1]
    return out


def chain_support(sigma: Word, tau: Word) -> set[int]:
    """``A_tau``: starting positions ``q`` that survive every factor of the adjoint product."""
    m = len(tau)
    out = None
    for p in range(m):
        shifted = {l - p for l in _positions(sigma, tau[m - 1 - p], reverse=True)}
        out = shifted if out is None else out & shifted
    return out or set()


@dataclass
class MatrixUnitReport:
    sigma: str
    contraction_norms: list
    adjoint_product_error: float
    vanishing_error: float
    words_checked: int
    stacked_rank: int
    full_rank: int

    @property
    def ok(self) -> bool:
        return (all(0 < c < 1 for c in self.contraction_norms)
                and self.adjoint_product_error <= 1e-14
                and self.vanishing_error <= 1e-14
                and self.stacked_rank == self.full_rank)


def verify_matrix_units(sigma: Word, dim_factor: int = 1) -> MatrixUnitReport:
    """Check contraction, the adjoint-product identities, vanishing on other words, and range."""
    k = len(sigma)
    n = 2 * k
    tuples = matrix_unit_tuples(sigma, dim_factor)
    norms = []
    adj_err = 0.0
    stack = []
    for p, Z in enumerate(tuples, start=1):
        row = sum(z @ z.T for z in Z)
        norms.append(float(np.linalg.eigvalsh(row).max()))
        got = word_power(Z, sigma).T
        if p <= k:
            want = 2 ** (-k / 2) * matrix_unit(n, p, k + p, dim_factor)
        else:
            want = 2 ** (-k / 2) * matrix_unit(n, p, p - k, dim_factor)
        adj_err = max(adj_err, float(np.max(np.abs(got - want))))
        stack.append(got)
    van_err = 0.0
    checked = 0
    for length in (k, k + 1):
        for tau in words_of_length(sigma.N, length):
            if tau == sigma:
                continue
            checked += 1
            for Z in tuples:
                van_err = max(van_err, float(np.max(np.abs(word_power(Z, tau)))))
    stacked = np.hstack(stack)
    return MatrixUnitReport(str(sigma), norms, adj_err, van_err, checked,
                            int(np.linalg.matrix_rank(stacked)), n * dim_factor)
