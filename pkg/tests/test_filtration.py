import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stabflow import filtration as F
from stabflow.oracle import exhaustive_destabilizer, exhaustive_hn_steps, exhaustive_mu_max, sweep_filtrations
from stabflow.slope import BundleSum, atom, bundle, is_semistable, twist
from strategies import bundles, semistable_bundles

O = lambda d, label=None: atom(1, d, label)  # noqa: E731
E4 = bundle(O(2), O(0), O(0), O(-1))


def test_mu_max_examples():
    assert F.mu_max(E4) == 2
    assert F.mu_max(bundle(atom(2, 1))) == Fraction(1, 2)
    assert F.mu_max(bundle(atom(1, 1), atom(1, 1))) == 1


def test_destabilizer_examples():
    assert F.destabilizer(E4) == bundle(O(2))
    ss = bundle(atom(1, 1), atom(1, 1))
    assert F.destabilizer(ss) == ss
    assert F.destabilizer(bundle(atom(1, 1), atom(1, 1), atom(1, 0))) == ss


def test_hn_examples():
    f = F.hn_filtration(E4)
    assert f.steps == (bundle(O(2)), bundle(O(2), O(0), O(0)), E4)
    assert f.quotient_slopes() == [2, 0, -1]
    g = F.hn_filtration(bundle(atom(2, 1), atom(1, 3)))
    assert g.steps == (bundle(atom(1, 3)), bundle(atom(2, 1), atom(1, 3)))
    assert g.quotient_slopes() == [3, Fraction(1, 2)]
    assert len(F.hn_filtration(bundle(atom(1, 1), atom(1, 1)))) == 1


def test_hn_type_examples():
    assert F.hn_type(E4).mu_vec == (2, 0, 0, -1)
    assert F.hn_type(bundle(atom(2, 1))).mu_vec == (Fraction(1, 2),) * 2
    assert F.hn_type(bundle(atom(3, 2))).mu_vec == (Fraction(2, 3),) * 3


def test_shatz_examples():
    assert F.shatz_polygon(E4).vertices == ((0, 0), (1, 2), (3, 2), (4, 1))
    assert F.shatz_polygon(bundle(atom(2, 1))).vertices == ((0, 0), (2, 1))
    assert F.shatz_polygon(bundle(atom(1, 5))).vertices == ((0, 0), (1, 5))


def test_jh_examples():
    two = bundle(atom(1, 1, "a"), atom(1, 1, "b"))
    assert len(F.jh_filtration(two)) == 2
    assert len(F.jh_filtration(bundle(atom(2, 1)))) == 1
    with pytest.raises(F.NotSemistableError):
        F.jh_filtration(bundle(O(2), O(0)))


def test_graded_and_s_equivalence_examples():
    a, b = atom(1, 1, "a"), atom(1, 1, "b")
    assert F.graded(bundle(a, b)) == F.graded(bundle(b, a)) == bundle(a, b)
    assert F.graded(bundle(atom(2, 1))) == bundle(atom(2, 1))
    assert F.s_equivalent(bundle(a, b), bundle(b, a))
    assert not F.s_equivalent(bundle(a, a), bundle(a, b))
    with pytest.raises(F.NotSemistableError):
        F.s_equivalent(E4, E4)


def test_hom_vanishing_examples():
    assert F.hom_must_vanish(bundle(atom(1, 1)), bundle(atom(1, 0)))
    assert not F.hom_must_vanish(bundle(atom(1, 1, "a")), bundle(atom(1, 1, "b")))
    assert F.hom_must_vanish(bundle(atom(1, 2), atom(1, 2)), bundle(O(1), O(-3)))


def test_validate_examples():
    assert F.validate_filtration(F.hn_filtration(E4), "HN").ok
    reversed_chain = F.Filtration((bundle(O(-1)), bundle(O(-1), O(0), O(0)), E4), E4)
    assert F.validate_filtration(reversed_chain, "HN") == (False, "slopes not decreasing")
    b = bundle(O(2), O(0))
    jh = F.Filtration((bundle(O(2)), b), b)
    assert F.validate_filtration(jh, "JH") == (False, "quotient slope ≠ total slope")


def test_validate_structural_errors_are_distinct():
    not_nested = F.Filtration((bundle(O(5)), E4), E4)
    with pytest.raises(F.FiltrationStructureError):
        F.validate_filtration(not_nested, "HN")
    repeated = F.Filtration((bundle(O(2)), bundle(O(2)), E4), E4)
    with pytest.raises(F.FiltrationStructureError):
        F.validate_filtration(repeated, "HN")
    wrong_end = F.Filtration((bundle(O(2)),), E4)
    with pytest.raises(F.FiltrationStructureError):
        F.validate_filtration(wrong_end, "HN")


def test_hn_quotient_not_semistable_diagnostic():
    # merge the first two HN pieces: the quotient O(2)+O(0)+O(0) is unstable
    chain = F.Filtration((bundle(O(2), O(0), O(0)), E4), E4)
    assert F.validate_filtration(chain, "HN") == (False, "quotient 1 not semi-stable")


# ---------------------------------------------------------------- properties


@given(bundles())
def test_agrees_with_exhaustive_oracle(b):
    assert F.mu_max(b) == exhaustive_mu_max(b)
    assert F.destabilizer(b) == exhaustive_destabilizer(b)
    assert list(F.hn_filtration(b).steps) == exhaustive_hn_steps(b)


@given(bundles())
def test_hn_is_valid_and_convex(b):
    f = F.hn_filtration(b)
    assert F.validate_filtration(f, "HN").ok
    slopes = f.quotient_slopes()
    assert all(x > y for x, y in zip(slopes, slopes[1:]))
    assert sum(r for r, _ in f.quotient_data()) == b.rank
    assert sum(d for _, d in f.quotient_data()) == b.degree
    assert (len(f) == 1) == is_semistable(b)
    assert F.shatz_polygon(b).is_convex()
    assert F.shatz_polygon(b).vertices[-1] == (b.rank, b.degree)


@given(bundles())
def test_hn_type_multiplicities(b):
    vec = F.hn_type(b).mu_vec
    assert len(vec) == b.rank
    assert sum(vec) == b.degree
    for (r, d) in F.hn_filtration(b).quotient_data():
        assert vec.count(Fraction(d, r)) == r


@given(bundles(), st.integers(-4, 4))
def test_twist_shifts_hn_type(b, m):
    assert F.hn_type(twist(b, m)) == F.hn_type(b).shifted(m)


@given(bundles())
def test_mu_max_bounds(b):
    assert F.mu_max(b) >= b.slope
    assert F.destabilizer(b).slope == F.mu_max(b)


@given(semistable_bundles(), st.randoms())
def test_jh_graded_independent_of_order(b, rnd):
    order = list(b.atoms)
    rnd.shuffle(order)
    f = F.jh_filtration(b, order)
    assert F.validate_filtration(f, "JH").ok
    assert F.graded_of(f) == F.graded(b)
    assert len(f) == len(b)


@given(semistable_bundles(), semistable_bundles())
def test_s_equivalent_pairs_share_rank_and_degree(b1, b2):
    if F.s_equivalent(b1, b2):
        assert b1.rd == b2.rd


@given(semistable_bundles(), bundles())
def test_hom_vanishing_is_a_slope_inequality(src, dst):
    assert F.hom_must_vanish(src, dst) == (src.slope > exhaustive_mu_max(dst))


def test_small_sweep():
    rep = sweep_filtrations(max_atoms=3, max_rank=2, max_abs_degree=2)
    assert rep.ok and rep.instances > 0
