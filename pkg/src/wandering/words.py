"""Words in the free semigroup on generators ``1..d``.

The empty word is the unit and prints as ``"0"``.  Words are ordered
length-lexicographically everywhere in the package, which fixes the block
layout of every truncated space.
"""

from __future__ import annotations

import enum
import itertools
from typing import Iterable, Iterator, NamedTuple


class Word(tuple):
    """Immutable word ``a1 a2 ... ar`` stored as a tuple of 1-based letters."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        letters = tuple(int(a) for a in letters)
        for a in letters:
            if a < 1:
                raise ValueError(f"letters are 1-based, got {a}")
        return super().__new__(cls, letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Inverse of :meth:`__str__`: ``"0"`` or ``""`` is empty, commas split multi-digit letters."""
        text = text.strip()
        if text in ("", "0"):
            return cls()
        if "," in text:
            return cls(int(t) for t in text.split(","))
        return cls(int(c) for c in text)

    def length(self) -> int:
        return len(self)

    def __add__(self, other) -> "Word":
        return Word(tuple(self) + tuple(other))

    def __radd__(self, other) -> "Word":
        return Word(tuple(other) + tuple(self))

    def sort_key(self):
        return (len(self), tuple(self))

    def check_alphabet(self, d: int) -> None:
        for a in self:
            if a > d:
                raise ValueError(f"letter {a} outside 1..{d} in word {self}")

    def __str__(self) -> str:
        if not self:
            return "0"
        if max(self) > 9:
            return ",".join(str(a) for a in self)
        return "".join(str(a) for a in self)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


EMPTY = Word()


def words_of_length(d: int, r: int) -> Iterator[Word]:
    for letters in itertools.product(range(1, d + 1), repeat=r):
        yield Word(letters)


def words_up_to(d: int, N: int) -> list[Word]:
    """All words of length ``<= N`` over ``d`` letters, shorter first, then lexicographic."""
    if d < 1 or N < 0:
        raise ValueError(f"need d >= 1 and N >= 0, got d={d}, N={N}")
    out = []
    for r in range(N + 1):
        out.extend(words_of_length(d, r))
    return out


def count_words_up_to(d: int, N: int) -> int:
    return sum(d**r for r in range(N + 1))


class Prefix(enum.Enum):
    SIGMA_EXTENDS = "sigma_extends"
    OMEGA_EXTENDS = "omega_extends"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class PrefixRelation(NamedTuple):
    kind: Prefix
    rest: Word | None = None


def prefix_relation(sigma: Word, omega: Word) -> PrefixRelation:
    """Classify the pair for the multi-Toeplitz case law.

    ``SIGMA_EXTENDS`` with ``rest=a`` means ``sigma == omega + a`` with ``a``
    nonempty; ``OMEGA_EXTENDS`` is the mirror case.
    """
    sigma, omega = Word(sigma), Word(omega)
    if sigma == omega:
        return PrefixRelation(Prefix.EQUAL)
    if len(sigma) > len(omega) and sigma[: len(omega)] == omega:
        return PrefixRelation(Prefix.SIGMA_EXTENDS, Word(sigma[len(omega):]))
    if len(omega) > len(sigma) and omega[: len(sigma)] == sigma:
        return PrefixRelation(Prefix.OMEGA_EXTENDS, Word(omega[len(sigma):]))
    return PrefixRelation(Prefix.INCOMPARABLE)
