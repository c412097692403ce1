"""Classical specializations: unit circle, real line, and Gegenbauer weights."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy import special

from .ortho_one_var import inner, ortho_gram_schmidt
from .schur_params import GammaParams1D, MomentKernel1D


@dataclass
class SzegoCoeffs:
    """Classical Szego (Verblunsky) coefficients ``gamma_1, gamma_2, ...``."""

    gamma_n: np.ndarray

    def __post_init__(self):
        self.gamma_n = np.asarray(self.gamma_n, dtype=complex)
        if np.any(np.abs(self.gamma_n) >= 1):
            raise ValueError("Szego coefficients must lie in the open unit disk")

    def __len__(self):
        return len(self.gamma_n)


@dataclass
class ThreeTermCoeffs:
    a: np.ndarray
    b: np.ndarray


@dataclass
class GegenbauerSpec:
    lam: float
    l: int
    n: int

    def __post_init__(self):
        if self.lam <= -0.5:
            raise ValueError("lambda must exceed -1/2")
        if self.l < 0 or self.n < 0:
            raise ValueError("l and n must be nonnegative")


def toeplitz_lift(c: SzegoCoeffs, horizon: int) -> GammaParams1D:
    """Toeplitz parameters ``gamma_{k, n+k} = gamma_n`` with unit diagonal."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if len(c) < horizon:
        raise ValueError(f"need {horizon} coefficients, got {len(c)}")
    n = horizon + 1
    g = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for j in range(k + 1, n):
            g[k, j] = c.gamma_n[j - k - 1]
    return GammaParams1D(np.ones(n), g)


def szego_recursion(c: SzegoCoeffs, n_max: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Classical recursion on the unit circle, normalized so ``phi_0 = 1``."""
    phi = [np.array([1.0 + 0j])]
    sharp = [np.array([1.0 + 0j])]
    for n in range(n_max):
        g = c.gamma_n[n]
        d = np.sqrt(1 - abs(g) ** 2)
        zphi = np.concatenate(([0j], phi[-1]))
        s = np.concatenate((sharp[-1], [0j]))
        phi.append((zphi - g * s) / d)
        sharp.append((-np.conj(g) * zphi + s) / d)
    return phi, sharp


def hankel_check(K: MomentKernel1D, tol: float = 1e-12) -> bool:
    s = K.entries
    scale = max(1.0, float(np.max(np.abs(s))))
    return bool(np.allclose(s[1:, :-1], s[:-1, 1:], rtol=0, atol=tol * scale))


def hankel_from_sequence(m: np.ndarray) -> MomentKernel1D:
    """Kernel ``s_{k,j} = m_{k+j}`` from ``2H + 1`` power moments."""
    m = np.asarray(m)
    H = (len(m) - 1) // 2
    idx = np.add.outer(np.arange(H + 1), np.arange(H + 1))
    return MomentKernel1D(m[idx])


def semicircle_moments(horizon: int) -> MomentKernel1D:
    """Moments of the semicircle law on ``[-2, 2]``: Catalan numbers at even degrees."""
    m = np.zeros(2 * horizon + 1)
    for k in range(0, 2 * horizon + 1, 2):
        m[k] = special.comb(k, k // 2, exact=True) // (k // 2 + 1)
    return hankel_from_sequence(m)


def _times_x(p: np.ndarray) -> np.ndarray:
    return np.concatenate(([0j], p))


def three_term_from_moments(K: MomentKernel1D, tol: float = 1e-10) -> ThreeTermCoeffs:
    """Recurrence coefficients ``a_n = <x phi_n, phi_n>``, ``b_n = <x phi_n, phi_{n+1}>``."""
    if not hankel_check(K):
        raise ValueError("kernel does not have the Hankel property")
    fam = ortho_gram_schmidt(K)
    S = K.entries
    H = K.horizon
    a = np.array([inner(_times_x(fam.phi[n, 0]), fam.phi[n, 0], S) for n in range(H)])
    b = np.array([inner(_times_x(fam.phi[n, 0]), fam.phi[n + 1, 0], S) for n in range(H)])
    if np.max(np.abs(a.imag), initial=0) > tol or np.max(np.abs(b.imag), initial=0) > tol:
        raise ValueError("recurrence coefficients are not real; weight is not real")
    return ThreeTermCoeffs(a.real, b.real)


def three_term_polys(c: ThreeTermCoeffs, s00: float, n_max: int) -> list[np.ndarray]:
    """Run ``x phi_n = b_n phi_{n+1} + a_n phi_n + b_{n-1} phi_{n-1}`` forward.

    Starts from ``phi_{-1} = 0`` and ``phi_0 = s00^{-1/2}``.
    """
    out = [np.array([s00 ** -0.5])]
    prev = np.zeros(1)
    for n in range(n_max):
        cur = out[-1]
        nxt = np.concatenate(([0.0], cur)) - c.a[n] * np.concatenate((cur, [0.0]))
        if n > 0:
            nxt[: len(prev)] -= c.b[n - 1] * prev
        prev = cur
        out.append(nxt / c.b[n])
    return out


# --- Gegenbauer closed forms ------------------------------------------------------

def _poch(x: float, n: int) -> float:
    return float(special.poch(x, n))


def gegenbauer_norm(lam: float, l: int, n: int) -> float:
    """``h^{lam,l}_n``: squared norm of the modified polynomial ``C^{(lam,l)}_n``."""
    if n == 0:
        return 1.0
    m, odd = divmod(n, 2)
    a = lam + l
    if a == 0:
        raise ValueError("closed form degenerates at lambda + l == 0")
    if odd:
        return (_poch(lam + 0.5, m) * _poch(a, m + 1) * a
                / (factorial(m) * _poch(l + 0.5, m + 1) * (a + 2 * m + 1)))
    return (_poch(lam + 0.5, m) * _poch(a, m) * a
            / (factorial(m) * _poch(l + 0.5, m) * (a + 2 * m)))


def shifted_mass(lam: float, l: int) -> float:
    """``int x^{2l} w(x) dx = (1/2)_l / (lam + 1)_l``."""
    return _poch(0.5, l) / _poch(lam + 1, l)


def gegenbauer_closed(spec: GegenbauerSpec) -> tuple[float, float, float]:
    """``(h, leading coefficient, phi_n(0, l))`` for degree ``spec.n``.

    Odd degrees vanish at the origin.  Degree zero is the normalized
    constant of the weight ``x^{2l} w(x)``.
    """
    lam, l, n = spec.lam, spec.l, spec.n
    if n == 0:
        c0 = shifted_mass(lam, l) ** -0.5
        return 1.0, c0, c0
    h = gegenbauer_norm(lam, l, n)
    scale = np.sqrt(_poch(lam + 1, l) / (_poch(0.5, l) * h))
    m, odd = divmod(n, 2)
    if odd:
        k = _poch(lam + l, 2 * m + 1) / (_poch(l + 0.5, m + 1) * factorial(m)) * scale
        return h, float(k), 0.0
    k = _poch(lam + l, 2 * m) / (_poch(l + 0.5, m) * factorial(m)) * scale
    prod = np.prod([(lam + l + i - 1) / i for i in range(1, m + 1)])
    phi0 = (-1) ** m * scale * prod
    return h, float(k), float(phi0)


def gegenbauer_gamma(lam: float, l: int, n: int) -> float:
    """``gamma^{lam}_{l, n+l}`` from the closed forms, via the leading-coefficient quotient."""
    if n < 1:
        raise ValueError("offset must be >= 1")
    if n % 2:
        return 0.0
    phi0 = gegenbauer_closed(GegenbauerSpec(lam, l, n))[2]
    lead_l = np.prod([gegenbauer_closed(GegenbauerSpec(lam, l, m))[1] for m in range(n + 1)])
    lead_next = np.prod([gegenbauer_closed(GegenbauerSpec(lam, l + 1, m))[1] for m in range(n)])
    return float(-phi0 * lead_next / lead_l)


# --- quadrature oracle -----------------------------------------------------------

def _theta_rule(lam: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``x = sin(theta)`` and weights for ``int f(x) w(x) dx``.

    After the substitution the weight becomes ``cos(theta)^{2 lam}``, which
    has no endpoint singularity for ``lam > -1/2``.
    """
    t, wt = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * np.pi * t
    weights = 0.5 * np.pi * wt * np.cos(theta) ** (2 * lam) / special.beta(0.5, lam + 0.5)
    return np.sin(theta), weights


def _default_nodes(max_degree: int) -> int:
    return max(2 * max_degree + 40, 120)


def weight_moments_quadrature(lam: float, l: int, degree: int, nodes: int | None = None) -> MomentKernel1D:
    """``s^l_{k,j} = int x^{k+j+2l} w(x) dx`` for ``0 <= k, j <= degree``."""
    if lam <= -0.5:
        raise ValueError("lambda must exceed -1/2")
    top = 2 * degree + 2 * l
    nodes = _default_nodes(top) if nodes is None else nodes
    if nodes < top + 2:
        raise ValueError(f"quadrature needs at least {top + 2} nodes, got {nodes}")
    x, w = _theta_rule(lam, nodes)
    m = np.array([np.sum(w * x ** (2 * l + e)) for e in range(2 * degree + 1)])
    # odd moments of a symmetric weight
    m[1::2] = 0.0
    return hankel_from_sequence(m)


def weight_mass(lam: float, nodes: int = 200) -> float:
    x, w = _theta_rule(lam, nodes)
    return float(np.sum(w))


def modified_gegenbauer_norm_quadrature(lam: float, l: int, n: int, nodes: int | None = None) -> float:
    """Norm of ``C^{(lam,l)}_n`` evaluated through Jacobi polynomials and quadrature."""
    nodes = _default_nodes(2 * n + 2 * l) if nodes is None else nodes
    x, w = _theta_rule(lam, nodes)
    m, odd = divmod(n, 2)
    if odd:
        c = (_poch(lam + l, m + 1) / _poch(l + 0.5, m + 1)
             * x * special.eval_jacobi(m, lam - 0.5, l + 0.5, 2 * x ** 2 - 1))
    else:
        c = _poch(lam + l, m) / _poch(l + 0.5, m) * special.eval_jacobi(m, lam - 0.5, l - 0.5, 2 * x ** 2 - 1)
    return float(np.sum(w * x ** (2 * l) * c ** 2) / shifted_mass(lam, l))


def gegenbauer_pipeline(lam: float, l: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Leading coefficients and values at 0 of the orthonormal family for ``x^{2l} w``.

    Quadrature moments followed by Gram-Schmidt; independent of the closed forms.
    """
    K = weight_moments_quadrature(lam, l, degree)
    fam = ortho_gram_schmidt(K)
    lead = np.array([fam.leading(n).real for n in range(degree + 1)])
    zero = np.array([fam.at_zero(n).real for n in range(degree + 1)])
    return lead, zero
