import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelforge.exact_arith import TowerForm
from borelforge.thick_family import family_of
from borelforge.tree import Branch
from borelforge.verifier import (
    CombinationSpec,
    InvalidInstance,
    Lemma1Instance,
    RangeTooLow,
    claim2_check,
    in_window,
    lemma1_check,
    lemma1_fuzz,
    r_and_l,
    random_lemma1_instance,
    smallest_window,
    verify_tree,
)

T = TowerForm.tower


def brute_sum(inst):
    """The combination evaluated with plain integers (all indices <= 12)."""
    return sum(lam * TowerForm.coerce(x).expand(unlimited=True)
               for lam, x in zip(inst.lambdas, inst.points))


# -- coefficient windows ----------------------------------------------------------

def test_window_edges():
    assert in_window(Fraction(1, 2), 2) and in_window(-2, 2)
    assert not in_window(Fraction(1, 3), 2)
    assert not in_window(Fraction(5, 2), 2)
    assert in_window(1, 1) and in_window(-1, 1)
    assert not in_window(Fraction(1, 2), 1)
    assert smallest_window([2, -2], 6) == 2
    assert smallest_window([Fraction(1, 10)], 6) is None


# -- separation lemma ----------------------------------------------------------------

def test_separation_on_a_hand_built_instance():
    # 2**256 - 7 lies in the family owning index 8
    j = family_of(8)
    inst = Lemma1Instance(2, (j, family_of(1)), (Fraction(1), Fraction(-2)), (T(8) - 7, Fraction(4)))
    res = lemma1_check(inst)
    assert res.holds
    assert res.witness == T(8) - 15


@pytest.mark.parametrize("inst,clause", [
    (Lemma1Instance(1, (0, 1), (1, 1), (4, 14)), "n <= m"),
    (Lemma1Instance(2, (0, 0), (1, 1), (4, 4)), "distinct sets"),
    (Lemma1Instance(2, (0,), (Fraction(1, 3),), (T(7),)), "lambda range"),
    (Lemma1Instance(2, (1,), (1,), (T(7),)), "x_i in T_i"),
    (Lemma1Instance(2, (0,), (1,), (4,)), "not inside [-Xi_m, Xi_m]"),
])
def test_separation_rejects_invalid_instances(inst, clause):
    with pytest.raises(InvalidInstance) as err:
        lemma1_check(inst)
    assert err.value.clause == clause


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 3))
def test_separation_agrees_with_integer_oracle(seed, m_max):
    inst = random_lemma1_instance(random.Random(seed), m_max, 12)
    res = lemma1_check(inst)
    total = brute_sum(inst)
    assert res.witness.expand(unlimited=True) == total
    assert res.holds == (abs(total) >= inst.m + 1)
    assert res.holds


def test_fuzz_is_seeded():
    a = lemma1_fuzz(50, 3, 12, seed=7)
    b = lemma1_fuzz(50, 3, 12, seed=7)
    assert a.ok and a.lines() == b.lines()


def test_fuzz_guardrails():
    with pytest.raises(ValueError):
        lemma1_fuzz(1, 7, 12, 0)


# -- linear combinations -------------------------------------------------------------

def test_r_and_l_examples():
    assert r_and_l([Branch()]) == (0, 0)
    assert r_and_l([Branch(), Branch([1])]) == (1, 4)
    assert r_and_l([Branch(), Branch([0, 1])]) == (2, 7)
    with pytest.raises(ValueError):
        r_and_l([Branch(), Branch([0])])


def test_combination_bound_two_branches():
    spec = CombinationSpec.build(2, [[0], [1]], [2, -2])
    report = claim2_check(spec, range(260, 300))
    assert report.threshold == 259
    assert report.ok
    with pytest.raises(RangeTooLow):
        claim2_check(spec, [259])


def test_combination_validation():
    with pytest.raises(ValueError):
        CombinationSpec.build(1, [[0], [1]], [1, 1])
    with pytest.raises(ValueError):
        CombinationSpec.build(2, [[0]], [Fraction(1, 3)])


@settings(max_examples=20, deadline=None)
@given(st.lists(st.lists(st.integers(0, 3), max_size=2), min_size=1, max_size=2, unique_by=lambda s: Branch(s).stem),
       st.lists(st.sampled_from([1, -1, Fraction(3, 2), Fraction(-3, 2), 2, -2]), min_size=2, max_size=2),
       st.integers(1, 40))
def test_combination_bound_past_threshold(stems, lambdas, offset):
    spec = CombinationSpec.build(2, stems, lambdas[:len(stems)])
    k = spec.threshold() + offset
    assert claim2_check(spec, [k]).ok


# -- tree conditions -------------------------------------------------------------------

def test_verify_small_tree():
    report = verify_tree(2, 4)
    assert report.ok, report.violations
    assert report.separation_pairs == 5 * 6
    assert report.density_targets > 0
