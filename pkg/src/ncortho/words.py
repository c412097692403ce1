"""Words over the free semigroup on N generators.

Words are ordered graded-lexicographically: first by length, then
lexicographically among words of equal length.  This order has type omega,
so every word has a successor and every nonempty word a predecessor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"alphabet size must be positive, got {self.N}")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if not 1 <= a <= self.N:
                raise ValueError(f"letter {a} outside 1..{self.N}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def empty(cls, N: int) -> "Word":
        return cls((), N)

    @classmethod
    def parse(cls, text: str, N: int) -> "Word":
        """Inverse of :meth:`__str__`: ``"e"`` is the empty word."""
        text = text.strip()
        if text in ("e", ""):
            return cls((), N)
        if N > 9 or "," in text:
            return cls(tuple(int(t) for t in text.split(",")), N)
        return cls(tuple(int(c) for c in text), N)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item], self.N)
        return self.letters[item]

    def __add__(self, other: "Word") -> "Word":
        _check_same(self, other)
        return Word(self.letters + other.letters, self.N)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        if self.N <= 9:
            return "".join(str(a) for a in self.letters)
        return ",".join(str(a) for a in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, N={self.N})"

    def key(self) -> tuple:
        return (len(self.letters), self.letters)

    def __lt__(self, other: "Word") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "Word") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "Word") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "Word") -> bool:
        return compare(self, other) >= 0

    def is_prefix_of(self, other: "Word") -> bool:
        _check_same(self, other)
        return other.letters[: len(self.letters)] == self.letters


def _check_same(a: Word, b: Word) -> None:
    if a.N != b.N:
        raise ValueError(f"alphabet size mismatch: {a.N} vs {b.N}")


def compare(a: Word, b: Word) -> int:
    """Return -1, 0 or 1 according to the graded-lex order."""
    _check_same(a, b)
    ka, kb = a.key(), b.key()
    return (ka > kb) - (ka < kb)


def successor(w: Word) -> Word:
    letters = list(w.letters)
    i = len(letters) - 1
    while i >= 0 and letters[i] == w.N:
        letters[i] = 1
        i -= 1
    if i < 0:
        return Word((1,) * (len(letters) + 1), w.N)
    letters[i] += 1
    return Word(tuple(letters), w.N)


def predecessor(w: Word) -> Word:
    if not w.letters:
        raise ValueError("the empty word has no predecessor")
    letters = list(w.letters)
    i = len(letters) - 1
    while i >= 0 and letters[i] == 1:
        letters[i] = w.N
        i -= 1
    if i < 0:
        return Word((w.N,) * (len(letters) - 1), w.N)
    letters[i] -= 1
    return Word(tuple(letters), w.N)


def involution(w: Word) -> Word:
    return Word(w.letters[::-1], w.N)


def count_words(N: int, L: int) -> int:
    """Number of words of length at most ``L``."""
    if N == 1:
        return L + 1
    return (N ** (L + 1) - 1) // (N - 1)


def words_of_length(N: int, n: int) -> list[Word]:
    return [Word(t, N) for t in itertools.product(range(1, N + 1), repeat=n)]


def enumerate_words(N: int, L: int) -> list[Word]:
    """All words of length ``<= L`` in increasing graded-lex order."""
    if N < 1 or L < 0:
        raise ValueError("need N >= 1 and L >= 0")
    out: list[Word] = []
    for n in range(L + 1):
        out.extend(words_of_length(N, n))
    return out


def rank(w: Word) -> int:
    """Position of ``w`` in the graded-lex enumeration (``rank(empty) == 0``)."""
    offset = count_words(w.N, len(w) - 1) if len(w) else 0
    r = 0
    for a in w.letters:
        r = r * w.N + (a - 1)
    return offset + r


def index_set_commuting(N: int, L: int) -> list[Word]:
    """Index set for the commutation relations: nondecreasing words up to ``L``."""
    return [w for w in enumerate_words(N, L)
            if all(x <= y for x, y in zip(w.letters, w.letters[1:]))]


def index_set_anticommuting(N: int) -> list[Word]:
    """Index set for the anticommutation relations: strictly increasing words."""
    return [w for w in enumerate_words(N, N)
            if all(x < y for x, y in zip(w.letters, w.letters[1:]))]


def level_slices(words: Iterable[Word]) -> dict[int, slice]:
    """Map each length to the slice it occupies in a graded-lex ordered list."""
    out: dict[int, list[int]] = {}
    for i, w in enumerate(words):
        out.setdefault(len(w), []).append(i)
    return {n: slice(ix[0], ix[-1] + 1) for n, ix in out.items()}
