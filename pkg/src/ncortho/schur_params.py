"""Schur-type parametrization of positive definite kernels on a finite range.

A strictly positive definite kernel ``[s_{k,j}]`` with ``0 <= k, j <= horizon``
is in one-to-one correspondence with positive diagonal entries ``s_{k,k}``
and a triangular family of complex numbers ``gamma_{k,j}`` (``k < j``) of
modulus below one.  The off-diagonal moments are corner entries of
products of embedded Julia operators; here they are evaluated by pushing a
row vector through the lattice of elementary 2x2 rotations, level by level.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable

import numpy as np

# |gamma| at or above this bound is treated as a positivity failure
GAMMA_BOUND = 1.0 - 1e-12


class PositivityError(ValueError):
    """A kernel is not (strictly) positive definite, or a parameter left the disk."""


def julia(gamma: complex) -> np.ndarray:
    """The unitary ``[[g, d], [d, -conj(g)]]`` with ``d = sqrt(1 - |g|^2)``."""
    gamma = complex(gamma)
    if abs(gamma) >= 1:
        raise ValueError(f"|gamma| must be < 1, got {abs(gamma)}")
    d = np.sqrt(1.0 - abs(gamma) ** 2)
    return np.array([[gamma, d], [d, -gamma.conjugate()]], dtype=complex)


@dataclass
class GammaParams1D:
    """Diagonal scales and Schur-type parameters on ``{0, ..., horizon}``.

    ``gamma`` is a square complex array; only the strict upper triangle
    ``gamma[k, j]`` (``k < j``) is meaningful.
    """

    diag: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float).copy()
        n = self.diag.shape[0]
        g = np.zeros((n, n), dtype=complex)
        src = np.asarray(self.gamma, dtype=complex)
        if src.shape != (n, n):
            raise ValueError(f"gamma must be {n}x{n}, got {src.shape}")
        iu = np.triu_indices(n, 1)
        g[iu] = src[iu]
        self.gamma = g
        if np.any(self.diag <= 0):
            raise ValueError("diagonal entries must be positive")
        if n and np.max(np.abs(g), initial=0.0) >= 1:
            raise ValueError("all |gamma| must be < 1")

    @property
    def horizon(self) -> int:
        return self.diag.shape[0] - 1

    @property
    def dd(self) -> np.ndarray:
        """Array of ``d_{k,j} = sqrt(1 - |gamma_{k,j}|^2)`` (ones off the upper triangle)."""
        return np.sqrt(1.0 - np.abs(self.gamma) ** 2)

    def d(self, k: int, j: int) -> float:
        return float(np.sqrt(1.0 - abs(self.gamma[k, j]) ** 2))

    @classmethod
    def from_pairs(cls, diag, pairs: dict) -> "GammaParams1D":
        diag = np.asarray(diag, dtype=float)
        n = diag.shape[0]
        g = np.zeros((n, n), dtype=complex)
        for (k, j), v in pairs.items():
            if not 0 <= k < j < n:
                raise ValueError(f"bad parameter index ({k}, {j})")
            g[k, j] = v
        return cls(diag, g)

    @classmethod
    def zeros(cls, horizon: int) -> "GammaParams1D":
        n = horizon + 1
        return cls(np.ones(n), np.zeros((n, n), dtype=complex))

    @classmethod
    def random(cls, rng: np.random.Generator, horizon: int, radius: float = 0.9,
               diag_range: tuple[float, float] = (0.5, 2.0),
               real: bool = False) -> "GammaParams1D":
        """Parameters drawn uniformly from the disk of the given radius."""
        n = horizon + 1
        r = radius * np.sqrt(rng.uniform(size=(n, n)))
        if real:
            g = r * rng.choice([-1.0, 1.0], size=(n, n))
        else:
            g = r * np.exp(2j * np.pi * rng.uniform(size=(n, n)))
        diag = rng.uniform(*diag_range, size=n)
        return cls(diag, np.triu(g, 1))

    def pairs(self) -> Iterable[tuple[int, int]]:
        n = self.horizon + 1
        for k in range(n):
            for j in range(k + 1, n):
                yield k, j

    def shifted(self, l: int) -> "GammaParams1D":
        """Parameters of the shifted kernel ``s_{a+l, b+l}``."""
        return GammaParams1D(self.diag[l:], self.gamma[l:, l:])

    def truncated(self, horizon: int) -> "GammaParams1D":
        return GammaParams1D(self.diag[: horizon + 1], self.gamma[: horizon + 1, : horizon + 1])


@dataclass
class MomentKernel1D:
    """Hermitian moment matrix ``[s_{k,j}]`` on ``{0, ..., horizon}``."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("kernel must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
        if not np.allclose(a, a.conj().T, rtol=0, atol=1e-12 * scale):
            raise ValueError("kernel is not hermitian")
        self.entries = a

    @property
    def horizon(self) -> int:
        return self.entries.shape[0] - 1

    def __getitem__(self, idx):
        return self.entries[idx]

    def shifted(self, l: int) -> "MomentKernel1D":
        return MomentKernel1D(self.entries[l:, l:])

    def minors(self) -> np.ndarray:
        """Leading principal minors ``D_0, ..., D_horizon`` (real parts)."""
        return np.array([np.linalg.det(self.entries[: m + 1, : m + 1]).real
                         for m in range(self.horizon + 1)])

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.entries)
        except np.linalg.LinAlgError:
            return False
        return True


@dataclass
class TriangularArray:
    """Lower triangular array; column ``c_j`` is supported on rows ``>= j``."""

    entries: np.ndarray

    @property
    def horizon(self) -> int:
        return self.entries.shape[0] - 1

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def kernel(self) -> np.ndarray:
        """``K(k, j) = c_k^* c_j``."""
        return self.entries.conj().T @ self.entries


def _lattice_corner(g: np.ndarray, dd: np.ndarray, k: int, j: int) -> complex:
    """``<U_{k,j} e_1, e_1>`` for the unitary built from levels ``k..j-1``.

    The row vector ``e_1^T`` is multiplied by the level-``k`` Julia factors,
    then by ``U_{k+1,j} (+) 1``, recursively; the trailing coordinate of each
    level is never read again, so each level shortens the active range.
    """
    r = [0j] * (j - k + 1)
    r[0] = 1 + 0j
    for m in range(k, j):
        width = j - m
        for i in range(1, width + 1):
            gm = g[m, m + i]
            dm = dd[m, m + i]
            ra, rb = r[i - 1], r[i]
            r[i - 1] = ra * gm + rb * dm
            r[i] = ra * dm - rb * gm.conjugate()
    return r[0]


def normalized_moment(p: GammaParams1D, k: int, j: int) -> complex:
    """``s_{k,j} / sqrt(s_{k,k} s_{j,j})`` for ``k <= j``."""
    if k == j:
        return 1.0 + 0j
    return _lattice_corner(p.gamma, p.dd, k, j)


def moments_from_params(p: GammaParams1D) -> MomentKernel1D:
    """Moment kernel determined by the parameters."""
    n = p.horizon + 1
    g, dd = p.gamma, p.dd
    root = np.sqrt(p.diag)
    s = np.diag(p.diag).astype(complex)
    for k in range(n):
        for j in range(k + 1, n):
            s[k, j] = root[k] * root[j] * _lattice_corner(g, dd, k, j)
            s[j, k] = np.conj(s[k, j])
    return MomentKernel1D(s)


def moment_row(p: GammaParams1D, k: int = 0) -> np.ndarray:
    """Row ``[s_{k,j}]_{j >= k}`` of the moment kernel, without building the rest."""
    n = p.horizon + 1
    g, dd = p.gamma, p.dd
    root = np.sqrt(p.diag)
    out = np.empty(n - k, dtype=complex)
    out[0] = p.diag[k]
    for j in range(k + 1, n):
        out[j - k] = root[k] * root[j] * _lattice_corner(g, dd, k, j)
    return out


def unitary_product(p: GammaParams1D, k: int, j: int) -> np.ndarray:
    """Dense ``U_{k,j}`` assembled literally from embedded Julia operators.

    Slow; kept as an independent check of the lattice evaluation.
    """
    if k == j:
        return np.ones((1, 1), dtype=complex)
    n = j - k
    u = np.eye(n + 1, dtype=complex)
    for i in range(1, n + 1):
        f = np.eye(n + 1, dtype=complex)
        f[i - 1:i + 1, i - 1:i + 1] = julia(p.gamma[k, k + i])
        u = u @ f
    inner = np.eye(n + 1, dtype=complex)
    inner[:n, :n] = unitary_product(p, k + 1, j)
    return u @ inner


def gamma_coefficient(p: GammaParams1D, k: int, j: int) -> float:
    """Coefficient of ``gamma_{k,j}`` in the normalized moment ``s_{k,j}``.

    Exactly one lattice path crosses the ``(k, j)`` box, picking up
    ``d_{k,m} d_{m,j}`` for every ``k < m < j``.
    """
    dd = p.dd
    c = 1.0
    for m in range(k + 1, j):
        c *= dd[k, m] * dd[m, j]
    return c


def params_from_moments(K: MomentKernel1D, tol: float = 1e-14) -> GammaParams1D:
    """Recover the parameters of a strictly positive definite kernel.

    Moments are affine in ``gamma_{k,j}`` once all parameters of smaller
    offset are known, so the offsets are solved in increasing order.

    Raises
    ------
    PositivityError
        If ``K`` is not strictly positive definite, or if a recovered
        parameter reaches the unit circle.
    """
    s = K.entries
    n = K.horizon + 1
    diag = s.diagonal().real.copy()
    if np.any(diag <= 0) or not K.is_positive_definite():
        raise PositivityError("kernel is not strictly positive definite")
    root = np.sqrt(diag)
    g = np.zeros((n, n), dtype=complex)
    dd = np.ones((n, n))
    for off in range(1, n):
        for k in range(n - off):
            j = k + off
            target = s[k, j] / (root[k] * root[j])
            rest = _lattice_corner(g, dd, k, j)
            coef = 1.0
            for m in range(k + 1, j):
                coef *= dd[k, m] * dd[m, j]
            if coef < tol:
                raise PositivityError(
                    f"degenerate kernel: coefficient {coef:.3e} at ({k}, {j})")
            gk = (target - rest) / coef
            if abs(gk) >= GAMMA_BOUND:
                raise PositivityError(f"|gamma_{k},{j}| = {abs(gk):.15f} >= 1")
            g[k, j] = gk
            dd[k, j] = np.sqrt(1.0 - abs(gk) ** 2)
    return GammaParams1D(diag, g)


def det_principal(p: GammaParams1D, l: int, m: int) -> float:
    """``det [s_{k,j}]_{l <= k, j <= m}`` from the parameters alone.

    An empty block (``m == l - 1``) has determinant one.
    """
    if not (0 <= l <= m + 1 and m <= p.horizon):
        raise IndexError(f"block ({l}, {m}) outside horizon {p.horizon}")
    if m < l:
        return 1.0
    dd = p.dd[l:m + 1, l:m + 1]
    out = float(np.prod(p.diag[l:m + 1]))
    iu = np.triu_indices(m - l + 1, 1)
    return out * float(np.prod(dd[iu] ** 2))


def det_block(K: MomentKernel1D, l: int, m: int) -> float:
    """Direct determinant of the ``l..m`` block (one for an empty block)."""
    if m < l:
        return 1.0
    return float(np.linalg.det(K.entries[l:m + 1, l:m + 1]).real)


def fisher_hadamard(p: GammaParams1D, l: int, n: int, n2: int, m: int) -> float:
    """Product of ``d_{k,j}^2`` over ``l <= k < n <= n2 < j <= m``.

    This is the exact correction in
    ``D_{l,m} D_{n,n2} = D_{l,n2} D_{n,m} * value``.
    """
    if not (0 <= l <= n <= n2 <= m <= p.horizon):
        raise ValueError("need l <= n <= n2 <= m <= horizon")
    dd = p.dd
    out = 1.0
    for k in range(l, n):
        for j in range(n2 + 1, m + 1):
            out *= dd[k, j] ** 2
    return out


# --- symbolic lattice expansion -------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    """Signed product of symbols ``("g"|"gbar"|"d", k, j)``."""

    sign: int
    factors: tuple[tuple[str, int, int], ...]

    def times(self, kind: str, k: int, j: int, sign: int = 1) -> "Monomial":
        return Monomial(self.sign * sign, self.factors + ((kind, k, j),))

    def evaluate(self, p: GammaParams1D, shift: int = 0) -> complex:
        out = complex(self.sign)
        for kind, k, j in self.factors:
            g = p.gamma[k + shift, j + shift]
            if kind == "g":
                out *= g
            elif kind == "gbar":
                out *= g.conjugate()
            else:
                out *= np.sqrt(1.0 - abs(g) ** 2)
        return out

    def __str__(self) -> str:
        names = {"g": "g", "gbar": "conj(g)", "d": "d"}
        body = "*".join(f"{names[kind]}{k}{j}" if max(k, j) < 10 else f"{names[kind]}[{k},{j}]"
                        for kind, k, j in self.factors)
        return ("-" if self.sign < 0 else "+") + body


def lattice_expand(l: int) -> list[Monomial]:
    """Symbolic expansion of ``s_{0,l} / sqrt(s_{0,0} s_{l,l})``.

    Each returned monomial corresponds to one path through the lattice.
    """
    if l < 1:
        raise ValueError("offset must be >= 1")
    r: list[list[Monomial]] = [[] for _ in range(l + 1)]
    r[0] = [Monomial(1, ())]
    for m in range(0, l):
        width = l - m
        for i in range(1, width + 1):
            a, b = r[i - 1], r[i]
            j = m + i
            new_a = [t.times("g", m, j) for t in a] + [t.times("d", m, j) for t in b]
            new_b = [t.times("d", m, j) for t in a] + [t.times("gbar", m, j, -1) for t in b]
            r[i - 1], r[i] = new_a, new_b
    return r[0]


def catalan_count(l: int) -> int:
    return comb(2 * l, l) // (l + 1)


# --- spectral factorization ------------------------------------------------------

def _psd_cholesky(a: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Lower ``L`` with ``a = L L^*`` for positive semidefinite ``a``.

    Zero pivots (within ``rtol`` of the largest diagonal entry) leave a zero
    column, provided the rest of that column also vanishes.
    """
    n = a.shape[0]
    scale = max(float(np.max(np.abs(a.diagonal()), initial=0.0)), 1e-300)
    tol = rtol * scale
    L = np.zeros_like(a, dtype=complex)
    for j in range(n):
        v = a[j:, j] - L[j:, :j] @ L[j, :j].conj()
        piv = v[0].real
        if piv > tol:
            L[j, j] = np.sqrt(piv)
            L[j + 1:, j] = v[1:] / L[j, j]
        elif piv < -tol or np.max(np.abs(v[1:]), initial=0.0) > np.sqrt(tol * scale):
            raise PositivityError(f"kernel is not positive semidefinite (pivot {piv:.3e} at {j})")
    return L


def spectral_factor(K: MomentKernel1D) -> TriangularArray:
    """Lower triangular ``Theta`` with ``Theta^* Theta = K`` and nonnegative diagonal.

    Columns of ``Theta`` reproduce the kernel, ``K(k, j) = c_k^* c_j``; the
    diagonal entry ``Theta[k, k]`` is the distance from ``e_k`` to the span of
    the later basis vectors in the ``K`` inner product.
    """
    flipped = K.entries[::-1, ::-1]
    L = _psd_cholesky(flipped)
    theta = L.conj().T[::-1, ::-1].copy()
    return TriangularArray(theta)


def szego_class_margin(p: GammaParams1D) -> float:
    """``min_k sqrt(s_{k,k}) prod_{k < n <= horizon} d_{k,n}``."""
    dd = p.dd
    n = p.horizon + 1
    vals = [np.sqrt(p.diag[k]) * np.prod(dd[k, k + 1:]) for k in range(n)]
    return float(min(vals))
