"""Szego-type reproducing kernels at finite truncation.

Three settings share one pattern: a kernel section ``S_z`` is built, the
kernel is the Gram pairing of two sections, and evaluation at a point is
pairing with the section at that point.

* sequences ``z_n`` with ``sup |z_n| < 1`` and lower triangular arrays,
  paired column by column into a diagonal;
* tuples of operators ``Z`` with ``sum Z_k Z_k^* < I`` and word-indexed
  vectors in ``l^2(words) (x) E``;
* the Siegel half-space, reached from the operator ball by a Cayley transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .words import Word, enumerate_words

# minimum-eigenvalue threshold for strict operator inequalities
STRICT_MARGIN = 1e-12


# --- sequence ball --------------------------------------------------------------

@dataclass
class PointB1:
    """Sequence ``z_0, ..., z_horizon`` strictly inside the unit disk."""

    z: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=complex)
        if self.z.ndim != 1 or len(self.z) == 0:
            raise ValueError("z must be a nonempty 1-d sequence")
        if np.max(np.abs(self.z)) >= 1:
            raise ValueError("sup |z_n| must be < 1")

    @property
    def horizon(self) -> int:
        return len(self.z) - 1

    @classmethod
    def random(cls, rng: np.random.Generator, horizon: int, radius: float = 0.9) -> "PointB1":
        r = radius * np.sqrt(rng.uniform(size=horizon + 1))
        return cls(r * np.exp(2j * np.pi * rng.uniform(size=horizon + 1)))


@dataclass
class H2Element:
    """Lower triangular array; column ``n`` is supported on rows ``>= n``."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be square")
        if np.any(np.triu(a, 1) != 0):
            raise ValueError("entries must be lower triangular")
        self.entries = a

    @property
    def horizon(self) -> int:
        return self.entries.shape[0] - 1

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=0)


def module_inner(theta: H2Element, psi: H2Element) -> np.ndarray:
    """Diagonal of the module pairing: ``c_n(psi)^* c_n(theta)`` for each ``n``."""
    if theta.horizon != psi.horizon:
        raise ValueError("horizon mismatch")
    return np.einsum("kn,kn->n", psi.entries.conj(), theta.entries)


def s_z_array(z: PointB1) -> H2Element:
    """Kernel section: ``1`` on the diagonal, ``conj(z_j ... z_{k-1})`` at ``(k, j)`` for ``k > j``."""
    n = z.horizon + 1
    out = np.zeros((n, n), dtype=complex)
    zc = z.z.conj()
    for j in range(n):
        out[j, j] = 1.0
        for k in range(j + 1, n):
            out[k, j] = out[k - 1, j] * zc[k - 1]
    return H2Element(out)


def szego_eval(z: PointB1, w: PointB1) -> np.ndarray:
    """``S(z, w)`` as the diagonal ``c_n(S_z)^* c_n(S_w)``."""
    if z.horizon != w.horizon:
        raise ValueError("horizon mismatch")
    return module_inner(s_z_array(w), s_z_array(z))


def h2_eval(theta: H2Element, z: PointB1) -> np.ndarray:
    """``Theta(z)_n = Theta_{n,n} + sum_{k>n} Theta_{k,n} z_{k-1} ... z_n``, by Horner in ``k``."""
    if theta.horizon != z.horizon:
        raise ValueError("horizon mismatch")
    a = theta.entries
    n = a.shape[0]
    out = np.zeros(n, dtype=complex)
    for col in range(n):
        acc = 0j
        for k in range(n - 1, col, -1):
            acc = (acc + a[k, col]) * z.z[k - 1]
        out[col] = a[col, col] + acc
    return out


def szego_block_kernel(points: Sequence[PointB1]) -> list[np.ndarray]:
    """Per-index matrices ``[S(z^i, z^j)_n]_{i,j}``, one per ``n``."""
    vals = np.array([[szego_eval(a, b) for b in points] for a in points])
    return [vals[:, :, n] for n in range(vals.shape[2])]


def totality_residuals(theta: H2Element, points: Sequence[PointB1]) -> list[float]:
    """Residual of projecting ``theta`` onto the span of ``S_z D`` for the first ``m`` points.

    Column ``n`` of ``theta`` is projected onto ``{c_n(S_z)}``; the reported
    number is the largest column residual.  Evidence only: the values
    decrease with ``m`` and vanish once the span is full.
    """
    cols = [s_z_array(p).entries for p in points]
    n = theta.horizon + 1
    out = []
    for m in range(1, len(points) + 1):
        worst = 0.0
        for c in range(n):
            basis = np.column_stack([S[c:, c] for S in cols[:m]])
            target = theta.entries[c:, c]
            coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
            worst = max(worst, float(np.linalg.norm(basis @ coef - target)))
        out.append(worst)
    return out


# --- operator ball ------------------------------------------------------------

@dataclass
class OperatorPoint:
    """Tuple ``(Z_1, ..., Z_N)`` of square matrices with ``sum Z_k Z_k^* < I``."""

    Z: list

    def __post_init__(self):
        self.Z = [np.asarray(z, dtype=complex) for z in self.Z]
        if not self.Z:
            raise ValueError("empty operator tuple")
        shape = self.Z[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(z.shape != shape for z in self.Z):
            raise ValueError("operators must be square and of equal size")
        if ball_margin(self.Z) <= STRICT_MARGIN:
            raise ValueError("tuple is not a strict row contraction")

    @property
    def N(self) -> int:
        return len(self.Z)

    @property
    def dim(self) -> int:
        return self.Z[0].shape[0]

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, dim: int, radius: float = 0.9) -> "OperatorPoint":
        Z = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(N)]
        row = np.hstack(Z)
        scale = radius * rng.uniform(0.1, 1.0) / np.linalg.norm(row, 2)
        return cls([scale * z for z in Z])


def ball_margin(Z: Sequence[np.ndarray]) -> float:
    """Minimum eigenvalue of ``I - sum Z_k Z_k^*``."""
    d = Z[0].shape[0]
    gap = np.eye(d) - sum(z @ z.conj().T for z in Z)
    return float(np.linalg.eigvalsh((gap + gap.conj().T) / 2).min())


def word_operator(Z: Sequence[np.ndarray], w: Word) -> np.ndarray:
    out = np.eye(Z[0].shape[0], dtype=complex)
    for a in w.letters:
        out = out @ Z[a - 1]
    return out


@dataclass
class FockSection:
    """Stacked block column ``S_Z = [(Z_w)^*]_{|w| <= max_len}`` and the word list."""

    words: list
    matrix: np.ndarray

    def eval(self, theta: np.ndarray) -> np.ndarray:
        """``Theta(Z) = S_Z^* Theta`` with ``Theta`` stacked in the same word order."""
        return self.matrix.conj().T @ theta


def fock_szego(Z: OperatorPoint, max_len: int) -> FockSection:
    words = enumerate_words(Z.N, max_len)
    blocks = [word_operator(Z.Z, w).conj().T for w in words]
    return FockSection(words, np.vstack(blocks))


def fock_eval_direct(Z: OperatorPoint, theta: dict) -> np.ndarray:
    """``sum_w Z_w Theta_w`` for a finitely supported ``theta: Word -> vector``."""
    out = np.zeros(Z.dim, dtype=complex)
    for w, v in theta.items():
        out = out + word_operator(Z.Z, w) @ np.asarray(v, dtype=complex)
    return out


def fock_kernel(Z: OperatorPoint, W: OperatorPoint, max_len: int) -> np.ndarray:
    """Truncated ``S(Z, W) = S_Z^* S_W``."""
    return fock_szego(Z, max_len).matrix.conj().T @ fock_szego(W, max_len).matrix


def fock_block_kernel(points: Sequence[OperatorPoint], max_len: int) -> np.ndarray:
    sections = np.hstack([fock_szego(p, max_len).matrix for p in points])
    return sections.conj().T @ sections


# --- Cayley transform and the Siegel half-space -------------------------------

def cayley(Z: OperatorPoint) -> list[np.ndarray]:
    """``((I+Z_N)^{-1} Z_1, ..., (I+Z_N)^{-1} Z_{N-1}, i (I+Z_N)^{-1} (I - Z_N))``."""
    I = np.eye(Z.dim)
    ZN = Z.Z[-1]
    inv = np.linalg.inv(I + ZN)
    out = [inv @ z for z in Z.Z[:-1]]
    out.append(1j * inv @ (I - ZN))
    return out


def siegel_margin(W: Sequence[np.ndarray]) -> float:
    """Minimum eigenvalue of ``(W_N - W_N^*)/(2i) - sum_{k<N} W_k W_k^*``."""
    WN = W[-1]
    d = WN.shape[0]
    gap = (WN - WN.conj().T) / 2j - sum((w @ w.conj().T for w in W[:-1]), np.zeros((d, d)))
    return float(np.linalg.eigvalsh((gap + gap.conj().T) / 2).min())


def cayley_inverse(W: Sequence[np.ndarray]) -> OperatorPoint:
    """Solve the forward formula: ``Z_N = (i - W_N)(W_N + i)^{-1}``, ``Z_k = 2i (W_N + i)^{-1} W_k``."""
    W = [np.asarray(w, dtype=complex) for w in W]
    if siegel_margin(W) <= STRICT_MARGIN:
        raise ValueError("tuple is not in the Siegel upper half-space")
    I = np.eye(W[-1].shape[0])
    inv = np.linalg.inv(W[-1] + 1j * I)
    Z = [2j * inv @ w for w in W[:-1]]
    Z.append((1j * I - W[-1]) @ inv)
    return OperatorPoint(Z)


def siegel_section(W: Sequence[np.ndarray], max_len: int) -> np.ndarray:
    """``F_W = 2 (I_words (x) (-i + W_N^*)) S_{C^{-1}(W)}``."""
    Z = cayley_inverse(W)
    S = fock_szego(Z, max_len)
    block = -1j * np.eye(Z.dim) + W[-1].conj().T
    return 2 * np.kron(np.eye(len(S.words)), block) @ S.matrix


def siegel_kernel(W: Sequence[np.ndarray], W2: Sequence[np.ndarray], max_len: int) -> np.ndarray:
    return siegel_section(W, max_len).conj().T @ siegel_section(W2, max_len)
