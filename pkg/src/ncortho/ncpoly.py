"""Polynomials in noncommuting variables ``X_1, ..., X_N``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .words import Word, enumerate_words, rank


@dataclass
class NCPoly:
    """Finitely supported map from words to coefficients: ``sum_w c_w X_w``."""

    N: int
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def constant(cls, N: int, c: complex = 1.0) -> "NCPoly":
        return cls(N, {Word.empty(N): complex(c)})

    @classmethod
    def monomial(cls, w: Word, c: complex = 1.0) -> "NCPoly":
        return cls(w.N, {w: complex(c)})

    @classmethod
    def from_dense(cls, N: int, vec: np.ndarray, tol: float = 0.0) -> "NCPoly":
        """Coefficients listed in graded-lex order of the words."""
        words = enumerate_words(N, _max_len_for(N, len(vec)))
        return cls(N, {w: complex(c) for w, c in zip(words, vec) if abs(c) > tol})

    def to_dense(self, max_len: int) -> np.ndarray:
        n = len(enumerate_words(self.N, max_len)) if max_len >= 0 else 0
        out = np.zeros(n, dtype=complex)
        for w, c in self.coeffs.items():
            if len(w) > max_len:
                raise ValueError(f"word {w} longer than {max_len}")
            out[rank(w)] += c
        return out

    @property
    def degree(self) -> int:
        live = [len(w) for w, c in self.coeffs.items() if c != 0]
        return max(live) if live else -1

    def leading(self) -> tuple[Word, complex]:
        """Largest word in graded-lex order with a nonzero coefficient."""
        live = [w for w, c in self.coeffs.items() if c != 0]
        if not live:
            raise ValueError("zero polynomial")
        w = max(live, key=Word.key)
        return w, self.coeffs[w]

    def __add__(self, other: "NCPoly") -> "NCPoly":
        if self.N != other.N:
            raise ValueError("alphabet size mismatch")
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return NCPoly(self.N, out)

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "NCPoly":
        return NCPoly(self.N, {w: c * v for w, v in self.coeffs.items()})

    def multiply_left(self, k: int) -> "NCPoly":
        """``X_k P``."""
        head = Word((k,), self.N)
        return NCPoly(self.N, {head + w: c for w, c in self.coeffs.items()})

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        out: dict = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                w = a + b
                out[w] = out.get(w, 0) + ca * cb
        return NCPoly(self.N, out)


def _max_len_for(N: int, size: int) -> int:
    L, total = 0, 1
    while total < size:
        L += 1
        total += N ** L
    if total != size:
        raise ValueError(f"{size} is not the number of words of bounded length over {N} letters")
    return L


def left_shift_matrix(N: int, k: int, max_len: int) -> np.ndarray:
    """Matrix of ``P -> X_k P`` from words of length ``<= max_len - 1`` to length ``<= max_len``."""
    src = enumerate_words(N, max_len - 1)
    dst_size = len(enumerate_words(N, max_len))
    out = np.zeros((dst_size, len(src)))
    head = Word((k,), N)
    for i, w in enumerate(src):
        out[rank(head + w), i] = 1.0
    return out

