"""Several hermitian noncommuting variables: moments, three-term recurrences, Jacobi families.

A unital functional on polynomials in ``Y_1, ..., Y_N`` (with ``Y_k^+ = Y_k``)
is given by its moments ``s_w = phi(Y_w)``.  The kernel of moments is
``s_{a,b} = s_{I(a) b}`` where ``I`` reverses a word, and the inner product
is ``<P, Q> = sum conj(Q_a) P_b s_{I(a) b}``.

Orthonormal polynomials are grouped by degree into ``P_n = [phi_w]_{|w|=n}``
(graded-lex order inside the level) and satisfy

    X_k P_n = P_{n+1} B_{n,k} + P_n A_{n,k} + P_{n-1} B_{n-1,k}^*.

Coefficient matrices below are dense: column ``b`` holds ``phi_{w_b}`` in
the monomial basis, both indexed by the graded-lex enumeration of words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from .ncpoly import NCPoly, left_shift_matrix
from .schur_params import PositivityError
from .words import Word, enumerate_words, involution, level_slices, words_of_length

# |diagonal entry| of B_n below this counts as singular
INVERTIBLE_TOL = 1e-10


# --- polynomial arithmetic -------------------------------------------------------

def nc_multiply_left(k: int, P: NCPoly) -> NCPoly:
    return P.multiply_left(k)


def nc_add(P: NCPoly, Q: NCPoly) -> NCPoly:
    return P + Q


def nc_scale(P: NCPoly, c: complex) -> NCPoly:
    return P.scale(c)


@dataclass
class HermitianMoments:
    """Moments ``s_w`` for ``|w| <= 2 max_len``; ``s_empty`` must be 1."""

    N: int
    max_len: int
    s: dict = field(default_factory=dict)

    def __post_init__(self):
        e = Word.empty(self.N)
        if abs(self.s.get(e, 0) - 1) > 1e-12:
            raise ValueError("functional must be unital: s_empty = 1")
        for w in enumerate_words(self.N, 2 * self.max_len):
            if w not in self.s:
                raise ValueError(f"missing moment for word {w}")

    def __getitem__(self, w: Word) -> complex:
        return self.s[w]

    def kernel(self, a: Word, b: Word) -> complex:
        """``s_{a,b} = phi(X_a^+ X_b) = s_{I(a) b}``."""
        return self.s[involution(a) + b]

    def gram(self, max_len: Optional[int] = None) -> np.ndarray:
        L = self.max_len if max_len is None else max_len
        words = enumerate_words(self.N, L)
        return np.array([[self.kernel(a, b) for b in words] for a in words], dtype=complex)

    def selfadjoint_residual(self) -> float:
        """``max |s_{I(w)} - conj(s_w)|``: the functional is hermitian."""
        return max(abs(self.s[involution(w)] - np.conj(v)) for w, v in self.s.items())

    def hankel_residual(self) -> float:
        """``max |s_{a s, t} - s_{s, I(a) t}|`` over in-range words."""
        words = enumerate_words(self.N, self.max_len)
        worst = 0.0
        for a in words:
            for s in words:
                if len(a) + len(s) > self.max_len:
                    continue
                for t in words:
                    if len(a) + len(t) > self.max_len:
                        continue
                    worst = max(worst, abs(self.kernel(a + s, t) - self.kernel(s, involution(a) + t)))
        return worst


def nc_inner(P: NCPoly, Q: NCPoly, m: HermitianMoments) -> complex:
    if P.degree + Q.degree > 2 * m.max_len:
        raise ValueError("degrees exceed the available moments")
    total = 0j
    for a, qa in Q.coeffs.items():
        for b, pb in P.coeffs.items():
            total += np.conj(qa) * pb * m.kernel(a, b)
    return complex(total)


# --- Jacobi families ---------------------------------------------------------------

@dataclass
class JacobiFamily:
    """Level blocks ``A[n][k]`` (``N^n x N^n``) and ``B[n][k]`` (``N^{n+1} x N^n``) for ``n < depth``.

    ``k`` is 0-based in storage.
    """

    N: int
    depth: int
    A: list = field(default_factory=list)
    B: list = field(default_factory=list)

    def __post_init__(self):
        self.A = [[np.asarray(a, dtype=complex) for a in lvl] for lvl in self.A]
        self.B = [[np.asarray(b, dtype=complex) for b in lvl] for lvl in self.B]
        self.validate()

    def validate(self, tol: float = 1e-12) -> None:
        N = self.N
        if len(self.A) != self.depth or len(self.B) != self.depth:
            raise ValueError(f"expected {self.depth} levels of A and B")
        for n in range(self.depth):
            if len(self.A[n]) != N or len(self.B[n]) != N:
                raise ValueError(f"level {n} must have {N} blocks")
            for k in range(N):
                a, b = self.A[n][k], self.B[n][k]
                if a.shape != (N ** n, N ** n) or b.shape != (N ** (n + 1), N ** n):
                    raise ValueError(f"bad block shapes at level {n}, generator {k + 1}")
                if np.max(np.abs(a - a.conj().T)) > tol * max(1.0, np.max(np.abs(a))):
                    raise ValueError(f"A[{n}][{k + 1}] is not selfadjoint")
            Bn = self.stacked_B(n)
            scale = max(1.0, float(np.max(np.abs(Bn))))
            if np.max(np.abs(np.tril(Bn, -1)), initial=0.0) > tol * scale:
                raise ValueError(f"B_{n} is not upper triangular")
            if np.min(np.abs(Bn.diagonal())) <= INVERTIBLE_TOL:
                raise ValueError(f"B_{n} is not invertible")

    def stacked_A(self, n: int) -> np.ndarray:
        return np.hstack(self.A[n])

    def stacked_B(self, n: int) -> np.ndarray:
        return np.hstack(self.B[n])

    @classmethod
    def free(cls, N: int, depth: int) -> "JacobiFamily":
        """``A = 0`` and ``B_n = I``: the free semicircular family."""
        A = [[np.zeros((N ** n, N ** n)) for _ in range(N)] for n in range(depth)]
        B = [_split(np.eye(N ** (n + 1)), N) for n in range(depth)]
        return cls(N, depth, A, B)

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, depth: int,
               diag_range: tuple[float, float] = (0.5, 1.5), scale: float = 0.5) -> "JacobiFamily":
        A, B = [], []
        for n in range(depth):
            lvl = []
            for _ in range(N):
                x = rng.normal(size=(N ** n, N ** n)) + 1j * rng.normal(size=(N ** n, N ** n))
                lvl.append(scale * (x + x.conj().T) / 2)
            A.append(lvl)
            size = N ** (n + 1)
            up = scale * (rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
            Bn = np.triu(up, 1) + np.diag(rng.uniform(*diag_range, size=size))
            B.append(_split(Bn, N))
        return cls(N, depth, A, B)


def _split(Bn: np.ndarray, N: int) -> list[np.ndarray]:
    return np.hsplit(Bn, N)


def jacobi_matrix(J: JacobiFamily, k: int, max_level: int) -> np.ndarray:
    """Block tridiagonal ``J_k`` on words of length ``<= max_level`` (``k`` is 1-based).

    Blocks beyond the stored depth are zero.
    """
    words = enumerate_words(J.N, max_level)
    sl = level_slices(words)
    out = np.zeros((len(words), len(words)), dtype=complex)
    for n in range(min(J.depth, max_level + 1)):
        out[sl[n], sl[n]] = J.A[n][k - 1]
        if n + 1 <= max_level:
            out[sl[n + 1], sl[n]] = J.B[n][k - 1]
            out[sl[n], sl[n + 1]] = J.B[n][k - 1].conj().T
    return out


def gns_moments(J: JacobiFamily, sigma: Word, max_level: Optional[int] = None) -> complex:
    """``phi(Y_sigma)`` as the ``(empty, empty)`` entry of ``J_{i_1} ... J_{i_m}``.

    Exact once ``max_level >= |sigma| / 2``: each factor moves one level at most.
    """
    m = len(sigma)
    level = m if max_level is None else max_level
    if 2 * level < m:
        raise ValueError(f"truncation level {level} too low for a word of length {m}")
    mats = [jacobi_matrix(J, k, level) for k in range(1, J.N + 1)]
    v = np.zeros(mats[0].shape[0], dtype=complex)
    v[0] = 1.0
    for a in reversed(sigma.letters):
        v = mats[a - 1] @ v
    return complex(v[0])


def all_gns_moments(J: JacobiFamily, max_len: Optional[int] = None) -> HermitianMoments:
    """Moments for every word of length ``<= 2 max_len`` (default ``max_len = depth``)."""
    L = J.depth if max_len is None else max_len
    mats = [jacobi_matrix(J, k, L) for k in range(1, J.N + 1)]
    size = mats[0].shape[0]
    e = Word.empty(J.N)
    start = np.zeros(size, dtype=complex)
    start[0] = 1.0
    vecs = {e: start}
    s = {e: 1.0 + 0j}
    for n in range(1, 2 * L + 1):
        for w in words_of_length(J.N, n):
            v = mats[w[0] - 1] @ vecs[w[1:]]
            vecs[w] = v
            s[w] = complex(v[0])
    return HermitianMoments(J.N, L, s)


# --- orthonormalization and extraction -----------------------------------------

@dataclass
class NCOrthoFamily:
    """Orthonormal polynomials as columns of an upper triangular coefficient matrix."""

    N: int
    max_len: int
    coeffs: np.ndarray

    @property
    def words(self) -> list[Word]:
        return enumerate_words(self.N, self.max_len)

    def polys(self) -> dict:
        return {w: NCPoly.from_dense(self.N, self.coeffs[:, i]) for i, w in enumerate(self.words)}

    def level(self, n: int) -> np.ndarray:
        return self.coeffs[:, level_slices(self.words)[n]]


def gram_schmidt_nc(m: HermitianMoments) -> NCOrthoFamily:
    """Orthonormalize the monomials in graded-lex order.

    The Gram matrix is factored as ``R^* R`` with ``R`` upper triangular and a
    positive diagonal; the coefficients are ``R^{-1}``, which is what
    Gram-Schmidt with positive leading coefficients produces.
    """
    G = m.gram()
    G = (G + G.conj().T) / 2
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise PositivityError("Gram matrix of the moments is not positive definite") from exc
    if np.min(np.abs(L.diagonal())) < 1e-13 * np.sqrt(np.max(np.abs(G.diagonal()))):
        raise PositivityError("Gram matrix is numerically singular")
    R = L.conj().T
    C = solve_triangular(R, np.eye(len(G), dtype=complex), lower=False)
    return NCOrthoFamily(m.N, m.max_len, C)


def _shift_blocks(N: int, L: int) -> list[np.ndarray]:
    return [left_shift_matrix(N, k, L) for k in range(1, N + 1)]


def extract_jacobi(fam: NCOrthoFamily, m: HermitianMoments, tol: float = 1e-9) -> JacobiFamily:
    """Recurrence blocks from inner products: ``A_{n,k}[a,b] = <X_k phi_b, phi_a>`` within level ``n``,
    ``B_{n,k}[a,b] = <X_k phi_b, phi_a>`` from level ``n`` to ``n+1``.

    Raises ``ArithmeticError`` when the three-term residual exceeds ``tol``.
    """
    N, L = fam.N, fam.max_len
    C = fam.coeffs
    G = m.gram(L)
    sl = level_slices(fam.words)
    inner_size = sl[L - 1].stop if L >= 1 else 0
    A, B = [], []
    for n in range(L):
        A.append([])
        B.append([])
    for k, S in enumerate(_shift_blocks(N, L)):
        XC = S @ C[:inner_size, :inner_size]
        T = C.conj().T @ G @ XC
        for n in range(L):
            a = T[sl[n], sl[n]]
            A[n].append((a + a.conj().T) / 2)
            B[n].append(T[sl[n + 1], sl[n]])
    # exact zeros below the diagonal of B_n come from the word order
    for n in range(L):
        Bn = np.hstack(B[n])
        lower = np.tril(Bn, -1)
        if np.max(np.abs(lower), initial=0.0) > tol:
            raise ArithmeticError(f"extracted B_{n} is not upper triangular")
        B[n] = _split(np.triu(Bn), N)
    J = JacobiFamily(N, L, A, B)
    res = three_term_residual(fam, J, m)
    if res > tol:
        raise ArithmeticError(f"three-term residual {res:.3e} exceeds {tol:.1e}")
    return J


def three_term_residual(fam: NCOrthoFamily, J: JacobiFamily, m: HermitianMoments) -> float:
    """Largest norm of ``X_k P_n - P_{n+1} B_{n,k} - P_n A_{n,k} - P_{n-1} B_{n-1,k}^*``."""
    N, L = fam.N, fam.max_len
    G = m.gram(L)
    sl = level_slices(fam.words)
    C = fam.coeffs
    inner_size = sl[L - 1].stop if L >= 1 else 0
    worst = 0.0
    for k, S in enumerate(_shift_blocks(N, L)):
        for n in range(J.depth):
            r = S @ C[:inner_size, sl[n]] - C[:, sl[n + 1]] @ J.B[n][k] - C[:, sl[n]] @ J.A[n][k]
            if n > 0:
                r = r - C[:, sl[n - 1]] @ J.B[n - 1][k].conj().T
            norms = np.sqrt(np.abs(np.einsum("ib,ij,jb->b", r.conj(), G, r)))
            worst = max(worst, float(norms.max()))
    return worst


def favard_reconstruct(J: JacobiFamily) -> NCOrthoFamily:
    """Run the recurrence forward from ``phi_empty = 1``.

    ``P_{n+1} = ([X_1 P_n ... X_N P_n] - P_n A_n - P_{n-1} B_{n-1}^*) B_n^{-1}``,
    where ``A_n`` and ``B_{n-1}^*`` are stacked with the same generator layout
    as ``B_n``.  Leading coefficients are then rotated to be positive.
    """
    N, D = J.N, J.depth
    words = enumerate_words(N, D)
    sl = level_slices(words)
    C = np.zeros((len(words), len(words)), dtype=complex)
    C[0, 0] = 1.0
    if D == 0:
        return NCOrthoFamily(N, 0, C)
    shifts = _shift_blocks(N, D)
    inner_size = sl[D - 1].stop if D >= 1 else 0
    for n in range(D):
        Pn = C[:inner_size, sl[n]]
        rhs = np.hstack([S @ Pn for S in shifts])
        rhs -= C[:, sl[n]] @ J.stacked_A(n)
        if n > 0:
            rhs -= C[:, sl[n - 1]] @ np.hstack([b.conj().T for b in J.B[n - 1]])
        # X B_n = rhs  <=>  B_n^T X^T = rhs^T
        nxt = solve_triangular(J.stacked_B(n), rhs.T, trans="T", lower=False).T
        lead = nxt[sl[n + 1], :].diagonal()
        nxt = nxt * (np.abs(lead) / lead)
        C[:, sl[n + 1]] = nxt
    return NCOrthoFamily(N, D, C)


@dataclass
class FavardReport:
    depth: int
    block_error: float
    coeff_error: float
    residual: float
    selfadjoint_error: float
    moments: HermitianMoments

    def ok(self, tol: float = 1e-8) -> bool:
        return max(self.block_error, self.coeff_error, self.residual) <= tol


def jacobi_distance(J1: JacobiFamily, J2: JacobiFamily) -> float:
    if (J1.N, J1.depth) != (J2.N, J2.depth):
        raise ValueError("families of different shape")
    worst = 0.0
    for n in range(J1.depth):
        for k in range(J1.N):
            worst = max(worst, float(np.max(np.abs(J1.A[n][k] - J2.A[n][k]))),
                        float(np.max(np.abs(J1.B[n][k] - J2.B[n][k]))))
    return worst


def favard_roundtrip(J: JacobiFamily) -> FavardReport:
    """Jacobi family -> moments -> orthonormal family -> Jacobi family."""
    m = all_gns_moments(J)
    fam = gram_schmidt_nc(m)
    J2 = extract_jacobi(fam, m, tol=np.inf)
    rec = favard_reconstruct(J)
    return FavardReport(
        depth=J.depth,
        block_error=jacobi_distance(J, J2),
        coeff_error=float(np.max(np.abs(fam.coeffs - rec.coeffs))),
        residual=three_term_residual(fam, J2, m),
        selfadjoint_error=m.selfadjoint_residual(),
        moments=m,
    )


def semicircle_family(depth: int) -> JacobiFamily:
    """One variable with ``a_n = 0`` and ``b_n = 1``."""
    return JacobiFamily.free(1, depth)
