from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stabflow.slope import (
    BundleSum,
    RankDegree,
    atom,
    bundle,
    dual_rd,
    hom_rd,
    is_semistable,
    is_stable,
    moduli_dimension,
    slope,
    tensor_rd,
    twist,
)
from strategies import atoms, bundles

rds = st.builds(RankDegree, st.integers(1, 5), st.integers(-10, 10))


def test_slope_examples():
    assert slope(atom(2, 3)) == Fraction(3, 2)
    assert slope(atom(1, 0)) == 0
    assert slope(bundle(atom(1, 2), atom(1, -1))) == Fraction(1, 2)


def test_rank_zero_rejected():
    with pytest.raises(ValueError):
        atom(0, 1)
    with pytest.raises(ValueError):
        BundleSum(())


@pytest.mark.parametrize("rd, expected", [((2, 3), (2, -3)), ((1, 0), (1, 0)), ((5, -4), (5, 4))])
def test_dual(rd, expected):
    assert dual_rd(RankDegree(*rd)) == RankDegree(*expected)


def test_tensor_and_hom_examples():
    assert tensor_rd(RankDegree(2, 1), RankDegree(3, 2)) == RankDegree(6, 7)
    assert tensor_rd(RankDegree(1, 1), RankDegree(1, -1)) == RankDegree(1, 0)
    assert hom_rd(RankDegree(2, 1), RankDegree(3, 2)) == RankDegree(6, 1)
    assert hom_rd(RankDegree(1, 2), RankDegree(1, 5)) == RankDegree(1, 3)


@given(rds, rds)
def test_slope_of_tensor_adds(a, b):
    assert tensor_rd(a, b).slope == a.slope + b.slope
    assert hom_rd(a, b).slope == b.slope - a.slope


@given(rds)
def test_tensor_unit_and_self_hom(a):
    assert tensor_rd(a, RankDegree(1, 0)) == a
    assert hom_rd(a, a) == RankDegree(a.rank**2, 0)


@given(rds, rds)
def test_extension_slope_trichotomy(sub, quo):
    # for 0 -> E' -> E -> E'' -> 0, mu(E') < mu(E) iff mu(E') < mu(E'')
    tot = RankDegree(sub.rank + quo.rank, sub.degree + quo.degree)
    assert (sub.slope < tot.slope) == (sub.slope < quo.slope)
    assert (sub.slope == tot.slope) == (sub.slope == quo.slope)
    assert (sub.slope > tot.slope) == (sub.slope > quo.slope)


def test_semistability_examples():
    assert is_semistable(bundle(atom(1, 1), atom(1, 1)))
    assert not is_semistable(bundle(atom(1, 2), atom(1, 0)))
    assert is_semistable(bundle(atom(3, -2)))


def test_stability_examples():
    assert is_stable(bundle(atom(2, 1)))
    assert not is_stable(bundle(atom(1, 1), atom(1, 1)))
    assert not is_stable(bundle(atom(1, 2), atom(1, 0)))


@pytest.mark.parametrize("r, g, dim", [(2, 2, 5), (1, 3, 3), (3, 2, 10)])
def test_moduli_dimension(r, g, dim):
    assert moduli_dimension(r, g) == dim


def test_moduli_dimension_needs_genus_two():
    with pytest.raises(ValueError):
        moduli_dimension(2, 1)


@given(bundles())
def test_rank_degree_additive(b):
    assert b.rank == sum(a.rank for a in b.atoms)
    assert b.degree == sum(a.degree for a in b.atoms)
    assert b.slope.denominator > 0
    assert Fraction(b.degree, b.rank) == b.slope


@given(bundles(), st.integers(-5, 5))
def test_twist_shifts_slope(b, m):
    t = twist(b, m)
    assert t.slope == b.slope + m
    assert is_semistable(t) == is_semistable(b)


@given(st.lists(atoms(), min_size=1, max_size=5), st.randoms())
def test_bundle_is_a_multiset(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert BundleSum(tuple(xs)) == BundleSum(tuple(ys))


def test_atom_equality_uses_label_and_data():
    assert atom(1, 1, "a") == atom(1, 1, "a")
    assert atom(1, 1, "a") != atom(1, 1, "b")
    assert atom(1, 1, "a") != atom(1, 2, "a")
