"""Orthonormal polynomials in one free (non-hermitian) variable.

For a moment kernel ``s_{k,j}`` on ``{0, ..., H}`` the inner product of two
polynomials with coefficient vectors ``p`` and ``q`` is ``q^H S p``.  The
family ``phi_n(X, l)`` is orthonormal for the shifted kernel ``s_{a+l, b+l}``.
Coefficient vectors are dense, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from .schur_params import (
    GammaParams1D,
    MomentKernel1D,
    PositivityError,
    det_block,
    det_principal,
    moments_from_params,
    params_from_moments,
    spectral_factor,
    szego_class_margin,
)


@dataclass
class PolyFamily1D:
    """Table of ``phi_n(X, l)`` and ``phi#_n(X, l)`` for ``n + l <= horizon``.

    ``phisharp`` may be empty for families built without the recurrence.
    """

    horizon: int
    phi: dict = field(default_factory=dict)
    phisharp: dict = field(default_factory=dict)
    kernel: Optional[MomentKernel1D] = None

    def coeffs(self, n: int, l: int = 0) -> np.ndarray:
        return self.phi[n, l]

    def leading(self, n: int, l: int = 0) -> complex:
        return self.phi[n, l][n]

    def at_zero(self, n: int, l: int = 0, sharp: bool = False) -> complex:
        return (self.phisharp if sharp else self.phi)[n, l][0]

    def levels(self) -> list[int]:
        return sorted({l for (_, l) in self.phi})

    def degrees(self, l: int = 0) -> list[int]:
        return sorted(n for (n, ll) in self.phi if ll == l)


def inner(p: np.ndarray, q: np.ndarray, S: np.ndarray) -> complex:
    """``<p, q> = sum_{a, b} conj(q_a) p_b s_{a, b}``."""
    m = max(len(p), len(q))
    if m > S.shape[0]:
        raise ValueError("polynomial degree exceeds the moment range")
    pp = np.zeros(m, dtype=complex)
    qq = np.zeros(m, dtype=complex)
    pp[: len(p)] = p
    qq[: len(q)] = q
    return complex(qq.conj() @ S[:m, :m] @ pp)


def gram_matrix(polys: list[np.ndarray], S: np.ndarray) -> np.ndarray:
    """``G[i, j] = <phi_i, phi_j>``."""
    n = len(polys)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = inner(polys[i], polys[j], S)
    return G


def ortho_recurrence(p: GammaParams1D, n_max: Optional[int] = None, l_max: int = 0) -> PolyFamily1D:
    """Build the two-sided family from the parameters.

    ``phi_n(., l)`` needs ``phi_{n-1}(., l+1)``, so the whole triangle
    ``n + l <= n_max + l_max`` is materialized.
    """
    if n_max is None:
        n_max = p.horizon - l_max
    H = n_max + l_max
    if H > p.horizon or n_max < 0 or l_max < 0:
        raise ValueError(f"n_max + l_max = {H} exceeds horizon {p.horizon}")
    g, dd = p.gamma, p.dd
    fam = PolyFamily1D(horizon=H)
    for l in range(H + 1):
        c = np.array([p.diag[l] ** -0.5], dtype=complex)
        fam.phi[0, l] = c
        fam.phisharp[0, l] = c.copy()
    for n in range(1, H + 1):
        for l in range(H - n + 1):
            gm, dm = g[l, n + l], dd[l, n + l]
            shifted = np.concatenate(([0j], fam.phi[n - 1, l + 1]))
            sharp = np.concatenate((fam.phisharp[n - 1, l], [0j]))
            fam.phi[n, l] = (shifted - gm * sharp) / dm
            fam.phisharp[n, l] = (-gm.conjugate() * shifted + sharp) / dm
    return fam


def ortho_gram_schmidt(K: MomentKernel1D, levels: int = 1) -> PolyFamily1D:
    """Modified Gram-Schmidt on the monomials, one pass of reorthogonalization.

    With ``levels > 1`` the shifted kernels ``K^l`` for ``l < levels`` are
    orthogonalized as well.
    """
    H = K.horizon
    fam = PolyFamily1D(horizon=H, kernel=K)
    for l in range(levels):
        S = K.entries[l:, l:]
        basis: list[np.ndarray] = []
        for n in range(H - l + 1):
            v = np.zeros(n + 1, dtype=complex)
            v[n] = 1.0
            for _ in range(2):
                for b in basis:
                    v[: len(b)] -= inner(v, b, S) * b
            nrm2 = inner(v, v, S).real
            if nrm2 <= 0:
                raise PositivityError(f"Gram-Schmidt breakdown at degree {n}")
            v = v / np.sqrt(nrm2)
            # positive leading coefficient
            v = v * (abs(v[n]) / v[n])
            basis.append(v)
            fam.phi[n, l] = v
    return fam


def ortho_determinant(K: MomentKernel1D, n: int) -> np.ndarray:
    """Degree-``n`` orthonormal polynomial from the bordered determinant.

    The monomial row is appended under the first ``n`` rows of the moment
    matrix; the coefficient of ``X^m`` is the cofactor along that row,
    divided by ``sqrt(D_{n-1} D_n)``.
    """
    S = K.entries
    if n > K.horizon:
        raise ValueError("degree exceeds horizon")
    if n == 0:
        return np.array([S[0, 0].real ** -0.5], dtype=complex)
    top = S[:n, : n + 1]
    d_prev = det_block(K, 0, n - 1)
    d_cur = det_block(K, 0, n)
    if d_prev <= 0 or d_cur <= 0:
        raise PositivityError("singular leading minor")
    out = np.empty(n + 1, dtype=complex)
    for m in range(n + 1):
        minor = np.delete(top, m, axis=1)
        out[m] = (-1) ** (n + m) * np.linalg.det(minor)
    return out / np.sqrt(d_prev * d_cur)


def gamma_from_polys(fam: PolyFamily1D, route: str = "leading") -> GammaParams1D:
    """Recover ``gamma_{l, n+l}`` from a two-sided family.

    ``route="leading"`` uses the quotient of leading coefficients across
    levels ``l`` and ``l + 1``; ``route="determinant"`` uses
    ``-phi_n(0, l) sqrt(D_{l,l+n} / D_{l+1,l+n})`` and needs ``fam.kernel``.
    """
    H = fam.horizon
    diag = np.array([abs(fam.phi[0, l][0]) ** -2 for l in range(H + 1)])
    g = np.zeros((H + 1, H + 1), dtype=complex)
    if route == "determinant":
        if fam.kernel is None:
            raise ValueError("determinant route needs the moment kernel")
        K = fam.kernel
        for l in range(H):
            for n in range(1, H - l + 1):
                ratio = det_block(K, l, l + n) / det_block(K, l + 1, l + n)
                g[l, n + l] = -fam.phi[n, l][0] * np.sqrt(ratio)
    elif route == "leading":
        for l in range(H):
            for n in range(1, H - l + 1):
                lead_l = np.prod([fam.leading(m, l) for m in range(n + 1)])
                if lead_l == 0:
                    raise ValueError("zero leading coefficient")
                lead_next = np.prod([fam.leading(m, l + 1) for m in range(n)])
                g[l, n + l] = -fam.phi[n, l][0] * lead_next / lead_l
    else:
        raise ValueError(f"unknown route {route!r}")
    return GammaParams1D(diag, g)


def leading_from_determinants(K: MomentKernel1D, l: int, n: int) -> float:
    """``sqrt(D_{l,l+n-1} / D_{l,l+n})`` for ``n >= 1``."""
    return float(np.sqrt(det_block(K, l, l + n - 1) / det_block(K, l, l + n)))


def toeplitz_embed(fam: PolyFamily1D, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower triangular arrays whose ``(k, j)`` entry is ``a^j_{n, k-j}``.

    Column ``j`` carries the coefficients of ``phi_n(., j)``, so only levels
    ``j <= horizon - n`` are available and the arrays are square of that size.
    """
    T = fam.horizon - n + 1
    if T < 1:
        raise ValueError("degree exceeds the family horizon")
    phi = np.zeros((T, T), dtype=complex)
    sharp = np.zeros((T, T), dtype=complex)
    for j in range(T):
        a, b = fam.phi[n, j], fam.phisharp[n, j]
        stop = min(T, j + n + 1)
        phi[j:stop, j] = a[: stop - j]
        sharp[j:stop, j] = b[: stop - j]
    return phi, sharp


def invert_embedded(arr: np.ndarray) -> np.ndarray:
    if np.any(np.abs(arr.diagonal()) == 0):
        raise ZeroDivisionError("embedded array has a zero diagonal entry")
    return solve_triangular(arr, np.eye(arr.shape[0], dtype=complex), lower=True)


def convergence_report(p: GammaParams1D, n_max: int, window: int) -> list[tuple[int, float, float]]:
    """Windowed deviations of ``Phi_n`` from 0 and of ``(Phi#_n)^{-1}`` from the spectral factor."""
    if szego_class_margin(p) <= 1e-300:
        raise ValueError("parameters are not in the (truncated) Szego class")
    H = p.horizon
    if n_max + window - 1 > H:
        raise ValueError(f"n_max + window - 1 must not exceed the horizon {H}")
    fam = ortho_recurrence(p)
    theta = spectral_factor(moments_from_params(p)).entries[:window, :window]
    out = []
    for n in range(n_max + 1):
        phi, sharp = toeplitz_embed(fam, n)
        inv = invert_embedded(sharp)
        dev_phi = float(np.max(np.abs(phi[:window, :window])))
        dev_theta = float(np.max(np.abs(inv[:window, :window] - theta)))
        out.append((n, dev_phi, dev_theta))
    return out


def szego_ratio_sides(K: MomentKernel1D, r: int, q: int) -> tuple[float, float]:
    """``(D_{r,q} / D_{r+1,q}, 1 / |phi#_{q-r}(0, r)|^2)``."""
    if not 0 <= r <= q <= K.horizon:
        raise IndexError("need 0 <= r <= q <= horizon")
    p = params_from_moments(K)
    fam = ortho_recurrence(p.truncated(q), n_max=q - r, l_max=r)
    lhs = det_block(K, r, q) / det_block(K, r + 1, q)
    rhs = 1.0 / abs(fam.at_zero(q - r, r, sharp=True)) ** 2
    return lhs, rhs


def szego_ratio(K: MomentKernel1D, r: int, q: int, tol: float = 1e-9) -> float:
    lhs, rhs = szego_ratio_sides(K, r, q)
    if abs(lhs - rhs) > tol * max(1.0, abs(lhs)):
        raise ArithmeticError(f"ratio identity violated: {lhs} vs {rhs}")
    return lhs


def szego_first_limit(p: GammaParams1D, r: int) -> float:
    """Truncated ``g_r = s_{r,r} prod_{j >= 1} d_{r,r+j}^2``."""
    if not 0 <= r <= p.horizon:
        raise IndexError("r outside horizon")
    return float(p.diag[r] * np.prod(p.dd[r, r + 1:] ** 2))


def szego_strong_limit(p: GammaParams1D, n: int) -> tuple[float, float]:
    """``(D_{0,n} / prod_{l <= n} g_l, L)`` with ``L = prod_{k <= n < j <= H} d_{k,j}^2``.

    Both factors are truncated at the horizon; the product of the two is one
    at every finite ``n``.
    """
    if not 0 <= n <= p.horizon:
        raise IndexError("n outside horizon")
    if szego_class_margin(p) <= 1e-300:
        raise ValueError("parameters are not in the (truncated) Szego class")
    g = np.prod([szego_first_limit(p, l) for l in range(n + 1)])
    ratio = det_principal(p, 0, n) / g
    L = float(np.prod(p.dd[: n + 1, n + 1:] ** 2))
    return float(ratio), L
