"""Harder-Narasimhan and Jordan-Hölder filtrations of split bundles.

Every bundle here is a :class:`~stabflow.slope.BundleSum`.  In a direct sum of
stable atoms the quotient by a sub-sum of summands is the complementary sum,
so every quotient appearing in the HN and JH theorems is again a BundleSum and
can be inspected directly.  The brute-force counterparts of the functions in
this module live in :mod:`stabflow.oracle`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Literal, NamedTuple, Sequence

from .slope import BundleSum, StableAtom, is_semistable

__all__ = [
    "Filtration",
    "HNType",
    "ShatzPolygon",
    "FiltrationCheck",
    "FiltrationStructureError",
    "NotSemistableError",
    "mu_max",
    "destabilizer",
    "hn_filtration",
    "hn_type",
    "shatz_polygon",
    "jh_filtration",
    "graded",
    "graded_of",
    "s_equivalent",
    "hom_must_vanish",
    "validate_filtration",
    "difference",
]


class FiltrationStructureError(ValueError):
    """The chain of sub-bundles is not a strictly increasing nested chain."""


class NotSemistableError(ValueError):
    pass


def difference(big: BundleSum, small: BundleSum | None) -> BundleSum:
    """Quotient big/small in the split model: the complementary multiset."""
    if small is None:
        return big
    rest = Counter(big.atoms)
    rest.subtract(small.atoms)
    if any(v < 0 for v in rest.values()):
        raise FiltrationStructureError(f"{small} is not a sub-sum of {big}")
    return BundleSum(tuple(rest.elements()))


@dataclass(frozen=True)
class Filtration:
    """Chain 0 = E_0 < E_1 < ... < E_l = total, stored without E_0."""

    steps: tuple[BundleSum, ...]
    total: BundleSum

    def __len__(self):
        return len(self.steps)

    def quotients(self) -> list[BundleSum]:
        out = []
        prev = None
        for s in self.steps:
            out.append(difference(s, prev))
            prev = s
        return out

    def quotient_data(self) -> list[tuple[int, int]]:
        """(rank, degree) of each successive quotient."""
        out = []
        r0 = d0 = 0
        for s in self.steps:
            out.append((s.rank - r0, s.degree - d0))
            r0, d0 = s.rank, s.degree
        return out

    def quotient_slopes(self) -> list[Fraction]:
        return [Fraction(d, r) for r, d in self.quotient_data()]


@dataclass(frozen=True)
class HNType:
    mu_vec: tuple[Fraction, ...]

    def __post_init__(self):
        if any(x < y for x, y in zip(self.mu_vec, self.mu_vec[1:])):
            raise ValueError("HN type must be non-increasing")

    def shifted(self, m) -> "HNType":
        return HNType(tuple(x + m for x in self.mu_vec))

    def __len__(self):
        return len(self.mu_vec)


@dataclass(frozen=True)
class ShatzPolygon:
    vertices: tuple[tuple[int, int], ...]

    def segment_slopes(self) -> list[Fraction]:
        v = self.vertices
        return [
            Fraction(y1 - y0, x1 - x0) for (x0, y0), (x1, y1) in zip(v, v[1:])
        ]

    def is_convex(self) -> bool:
        xs = [x for x, _ in self.vertices]
        if self.vertices[0] != (0, 0) or any(a >= b for a, b in zip(xs, xs[1:])):
            return False
        s = self.segment_slopes()
        return all(a > b for a, b in zip(s, s[1:]))


class FiltrationCheck(NamedTuple):
    ok: bool
    reason: str | None = None


def _cmp_pairs(p, q):
    # reduced (num, den) pairs with den > 0: compare by cross-multiplication
    return p[0] * q[1] - q[0] * p[1]


_pair_key = cmp_to_key(_cmp_pairs)


def mu_max(b: BundleSum) -> Fraction:
    """Largest slope of a sub-sum; for split bundles the largest atom slope."""
    return Fraction(*max((a.mu_pair for a in b.atoms), key=_pair_key))


def _distinct_slopes(b: BundleSum) -> list[tuple[int, int]]:
    """Distinct reduced slopes of the atoms, strictly decreasing."""
    pairs = {a.mu_pair for a in b.atoms}
    if len(pairs) == 1:
        return list(pairs)
    return sorted(pairs, key=_pair_key, reverse=True)


def destabilizer(b: BundleSum) -> BundleSum:
    """Maximal-rank sub-sum of maximal slope (all atoms of slope mu_max)."""
    top = _distinct_slopes(b)[0]
    return BundleSum._from_sorted(tuple(a for a in b.atoms if a.mu_pair == top))


def hn_filtration(b: BundleSum) -> Filtration:
    """Steps are the sub-sums of atoms with slope at least each distinct slope."""
    slopes = _distinct_slopes(b)
    if len(slopes) == 1:
        return Filtration((b,), b)
    steps = []
    allowed: set[tuple[int, int]] = set()
    for mu in slopes[:-1]:
        allowed.add(mu)
        # filtering keeps the canonical order of b.atoms
        steps.append(BundleSum._from_sorted(tuple(a for a in b.atoms if a.mu_pair in allowed)))
    steps.append(b)
    return Filtration(tuple(steps), b)


def hn_type(b: BundleSum) -> HNType:
    vec: list[Fraction] = []
    for r, d in hn_filtration(b).quotient_data():
        vec.extend([Fraction(d, r)] * r)
    return HNType(tuple(vec))


def shatz_polygon(b: BundleSum) -> ShatzPolygon:
    verts = [(0, 0)]
    for s in hn_filtration(b).steps:
        verts.append((s.rank, s.degree))
    return ShatzPolygon(tuple(verts))


def _require_semistable(*bs: BundleSum):
    for b in bs:
        if not is_semistable(b):
            raise NotSemistableError(f"bundle {b} is not semi-stable")


def jh_filtration(
    b: BundleSum, order: Sequence[StableAtom] | None = None
) -> Filtration:
    """One atom per step, in label order unless ``order`` gives another one.

    ``order`` must be a rearrangement of ``b.atoms``; any such order yields a
    Jordan-Hölder filtration of a semi-stable split bundle.
    """
    _require_semistable(b)
    atoms = b.atoms if order is None else tuple(order)
    if Counter(atoms) != Counter(b.atoms):
        raise ValueError("order must be a permutation of the bundle's atoms")
    steps = tuple(BundleSum(atoms[: i + 1]) for i in range(len(atoms)))
    return Filtration(steps, b)


def graded_of(f: Filtration) -> BundleSum:
    """Direct sum of the successive quotients of ``f``."""
    return BundleSum(tuple(a for q in f.quotients() for a in q.atoms))


def graded(b: BundleSum) -> BundleSum:
    return graded_of(jh_filtration(b))


def s_equivalent(b1: BundleSum, b2: BundleSum) -> bool:
    _require_semistable(b1, b2)
    return graded(b1) == graded(b2)


def hom_must_vanish(src: BundleSum, dst: BundleSum) -> bool:
    """Sufficient condition for Hom(src, dst) = 0.

    Holds when ``src`` is semi-stable and its slope exceeds every sub-bundle
    slope of ``dst``.  A False result does not assert that a non-zero map
    exists.
    """
    return is_semistable(src) and src.slope > mu_max(dst)


def _check_structure(f: Filtration):
    if not f.steps:
        raise FiltrationStructureError("filtration has no steps")
    if f.steps[-1] != f.total:
        raise FiltrationStructureError("last step does not equal the total bundle")
    prev = None
    for i, s in enumerate(f.steps, 1):
        if prev is not None:
            rest = Counter(s.atoms)
            rest.subtract(prev.atoms)
            if any(v < 0 for v in rest.values()):
                raise FiltrationStructureError(f"step {i - 1} is not contained in step {i}")
            if len(s) == len(prev):
                raise FiltrationStructureError(f"inclusion of step {i - 1} in step {i} is not strict")
        prev = s


def validate_filtration(f: Filtration, kind: Literal["HN", "JH"]) -> FiltrationCheck:
    """Check the defining conditions of an HN or JH filtration.

    Structural defects raise :class:`FiltrationStructureError`; violated
    conditions are returned as ``FiltrationCheck(False, reason)`` naming the
    first failing clause.
    """
    _check_structure(f)
    quotients = f.quotients()
    if kind == "HN":
        for i, q in enumerate(quotients, 1):
            if not is_semistable(q):
                return FiltrationCheck(False, f"quotient {i} not semi-stable")
        slopes = [q.slope for q in quotients]
        if any(x <= y for x, y in zip(slopes, slopes[1:])):
            return FiltrationCheck(False, "slopes not decreasing")
        return FiltrationCheck(True)
    if kind == "JH":
        mu = f.total.slope
        for i, q in enumerate(quotients, 1):
            if len(q) != 1:
                return FiltrationCheck(False, f"quotient {i} is not stable")
        for i, q in enumerate(quotients, 1):
            if q.slope != mu:
                return FiltrationCheck(False, "quotient slope ≠ total slope")
        return FiltrationCheck(True)
    raise ValueError(f"unknown filtration kind {kind!r}")
