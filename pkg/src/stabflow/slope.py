"""Exact slope, rank and degree calculus for formal bundles.

A bundle is represented by its poly-stable graded data: a multiset of
declared-stable atoms, each carrying a rank, a degree and a label naming its
isomorphism class.  All arithmetic is done with :class:`fractions.Fraction`
so no floating-point value ever enters a slope comparison.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from operator import attrgetter
from typing import Iterable, Union

Rational = Fraction
_atom_key = attrgetter("key")

__all__ = [
    "Rational",
    "RankDegree",
    "StableAtom",
    "BundleSum",
    "atom",
    "bundle",
    "slope",
    "dual_rd",
    "tensor_rd",
    "hom_rd",
    "twist",
    "is_semistable",
    "is_stable",
    "moduli_dimension",
]


@dataclass(frozen=True, order=True)
class RankDegree:
    rank: int
    degree: int

    def __post_init__(self):
        if not isinstance(self.rank, int) or not isinstance(self.degree, int):
            raise TypeError("rank and degree must be integers")
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")

    @property
    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)


@dataclass(frozen=True)
class StableAtom:
    """A declared-stable summand. Equality is label plus (rank, degree)."""

    label: str
    rd: RankDegree

    def __post_init__(self):
        r, d = self.rd.rank, self.rd.degree
        g = gcd(r, d)
        object.__setattr__(self, "key", (self.label, r, d))
        # reduced (numerator, denominator): cheap to hash and compare for equality
        object.__setattr__(self, "mu_pair", (d // g, r // g))

    def __lt__(self, other):
        return self.key < other.key

    @property
    def rank(self) -> int:
        return self.rd.rank

    @property
    def degree(self) -> int:
        return self.rd.degree

    @cached_property
    def slope(self) -> Fraction:
        return self.rd.slope

    def __repr__(self):
        return f"{self.label}[{self.rank},{self.degree}]"


def atom(rank: int, degree: int, label: str | None = None) -> StableAtom:
    if label is None:
        label = f"O({degree})" if rank == 1 else f"V({rank},{degree})"
    return StableAtom(label, RankDegree(rank, degree))


@dataclass(frozen=True)
class BundleSum:
    """Non-empty multiset of stable atoms, stored in canonical sorted order."""

    atoms: tuple[StableAtom, ...] = field()

    def __post_init__(self):
        atoms = tuple(sorted(self.atoms, key=_atom_key))
        if not atoms:
            raise ValueError("a BundleSum needs at least one atom")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def _from_sorted(cls, atoms: tuple[StableAtom, ...]) -> "BundleSum":
        # caller guarantees ``atoms`` is non-empty and already in canonical order
        obj = object.__new__(cls)
        object.__setattr__(obj, "atoms", atoms)
        return obj

    @cached_property
    def rank(self) -> int:
        return sum(a.rank for a in self.atoms)

    @cached_property
    def degree(self) -> int:
        return sum(a.degree for a in self.atoms)

    @property
    def rd(self) -> RankDegree:
        return RankDegree(self.rank, self.degree)

    @cached_property
    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    def counter(self) -> Counter:
        return Counter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.atoms)) + "}"


def bundle(*atoms: Union[StableAtom, Iterable[StableAtom]]) -> BundleSum:
    """``bundle(a, b, c)`` or ``bundle([a, b, c])``."""
    if len(atoms) == 1 and not isinstance(atoms[0], StableAtom):
        atoms = tuple(atoms[0])
    return BundleSum(tuple(atoms))


def slope(x: Union[BundleSum, StableAtom, RankDegree]) -> Fraction:
    return x.slope


def dual_rd(rd: RankDegree) -> RankDegree:
    return RankDegree(rd.rank, -rd.degree)


def tensor_rd(a: RankDegree, b: RankDegree) -> RankDegree:
    return RankDegree(a.rank * b.rank, a.degree * b.rank + a.rank * b.degree)


def hom_rd(a: RankDegree, b: RankDegree) -> RankDegree:
    """(rank, degree) of Hom(a, b) = a* tensor b."""
    return tensor_rd(dual_rd(a), b)


def twist(b: BundleSum, m: int) -> BundleSum:
    """Tensor every atom with the line bundle O(m); labels record the twist."""
    if m == 0:
        return b
    return BundleSum(
        tuple(
            StableAtom(f"{a.label}({m:+d})", tensor_rd(a.rd, RankDegree(1, m)))
            for a in b.atoms
        )
    )


def is_semistable(b: BundleSum) -> bool:
    mu = b.slope
    return all(a.slope == mu for a in b.atoms)


def is_stable(b: BundleSum) -> bool:
    # atoms are declared stable; a direct sum of two or more is decomposable
    return len(b.atoms) == 1


def moduli_dimension(r: int, g: int) -> int:
    """Dimension of the moduli variety of rank-r bundles on a genus-g curve."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    if g < 2:
        raise ValueError("the dimension formula needs genus g >= 2")
    return r * r * (g - 1) + 1


def coprime(rd: RankDegree) -> bool:
    return gcd(rd.rank, rd.degree) == 1
