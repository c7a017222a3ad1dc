from __future__ import annotations

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from germtower.qz import (
    CyclicTower,
    Irrational,
    QZRational,
    SubgroupCase,
    classify_subgroup,
    cyclic_generator,
    cyclic_subgroup,
    delta_sequence,
    neighborhood_intersection_check,
    qz_add,
    qz_neg,
    qz_order,
    subgroup_closure,
    tower_decompose,
)

Q = QZRational.of


def test_arithmetic_examples():
    assert qz_add(Q("1/2"), Q("1/2")) == QZRational(0, 1)
    assert qz_add(Q("1/2"), Q("1/3")) == QZRational(5, 6)
    assert qz_order(Q("3/7")) == 7
    assert qz_neg(Q("1/3")) == Q("2/3")
    assert QZRational(-1, 4) == Q("3/4")
    assert QZRational(4, 8) == QZRational(1, 2)


def test_generator_examples():
    assert cyclic_generator([Q("1/2"), Q("1/3")]) == QZRational(1, 6)
    assert subgroup_closure([Q("1/2"), Q("1/3")]) == cyclic_subgroup(QZRational(1, 6))
    assert cyclic_generator([Q(0)]) == QZRational(0, 1)
    assert cyclic_generator([Q("3/8")]) == QZRational(1, 8)


rationals = st.builds(lambda q, p: QZRational(p, q), st.integers(1, 30), st.integers(0, 29))


@settings(max_examples=100, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=6))
def test_closure_equals_cyclic(xs):
    gen = cyclic_generator(xs)
    assert subgroup_closure(xs) == cyclic_subgroup(gen)
    for perm in itertools.islice(itertools.permutations(xs), 6):
        assert cyclic_generator(perm) == gen
    assert cyclic_generator([gen]) == gen


def test_tower_decompose_examples():
    t = tower_decompose([Q(Fraction(1, 2**k)) for k in range(1, 10)], 3)
    assert t.qs == (2, 4, 8) and t.ratios == (2, 2)
    assert tower_decompose([Q("1/2"), Q("1/3"), Q("1/5")], 5).qs == (2, 6, 30)
    assert tower_decompose([Q("1/2")] * 3, 3).qs == (2,)


@settings(max_examples=50, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=8))
def test_tower_decompose_invariants(xs):
    if all(x.p == 0 for x in xs):
        return
    t = tower_decompose(xs, 10)
    for a, b in zip(t.qs, t.qs[1:]):
        assert b % a == 0 and b // a >= 2


def test_tower_rejects_bad_chain():
    with pytest.raises(ValueError):
        CyclicTower((2, 3))
    with pytest.raises(ValueError):
        CyclicTower((2, 2))


def test_delta_examples():
    assert delta_sequence(CyclicTower((2, 4, 8))) == [Fraction(1, 12), Fraction(1, 24)]
    assert delta_sequence(CyclicTower((2, 6))) == [Fraction(1, 18)]
    t = CyclicTower((3, 6, 30, 60))
    assert all(d < Fraction(1, 2 * q) for d, q in zip(delta_sequence(t), t.qs[1:]))


def test_intersection_examples():
    start = time.perf_counter()
    assert neighborhood_intersection_check(CyclicTower((2, 4, 8, 16)), 1, 10**4).holds
    assert neighborhood_intersection_check(CyclicTower((2, 6, 18, 54)), 2, 10**4).holds
    assert time.perf_counter() - start < 30
    with pytest.warns(UserWarning):
        rep = neighborhood_intersection_check(CyclicTower((2,)), 1, 100)
    assert rep.holds and rep.vacuous


def test_intersection_inflated_delta_fails():
    rep = neighborhood_intersection_check(CyclicTower((2, 4, 8, 16)), 1, 10**3, factor=Fraction(1))
    assert not rep.holds and rep.uncertified


def test_finite_reading_has_stray_points():
    # 1/49 survives the three available levels of the 2^n tower and is
    # excluded only by a later level; the tail certificate accounts for it.
    rep = neighborhood_intersection_check(CyclicTower((2, 4, 8, 16)), 1, 60)
    assert rep.strays > 0 and rep.holds and rep.max_tail_levels >= 1


def test_intersection_random_towers():
    rng = np.random.default_rng(0)
    for _ in range(10):
        qs = [int(rng.integers(2, 4))]
        for _ in range(3):
            qs.append(qs[-1] * int(rng.integers(2, 4)))
        assert neighborhood_intersection_check(CyclicTower(tuple(qs)), 1, 2000).holds


def test_classify_subgroup():
    assert classify_subgroup([Q(0), Q("1/3"), Q("2/3")], True) is SubgroupCase.FINITE
    assert classify_subgroup([Q(Fraction(1, 2**k)) for k in range(6)], False) is SubgroupCase.INFINITE_TORSION
    assert classify_subgroup([Irrational("golden", (math.sqrt(5) - 1) / 2)], False) is SubgroupCase.IRRATIONAL


def test_json():
    assert Q("2/6").to_json() == {"p": 1, "q": 3}
    assert QZRational.from_json({"p": 5, "q": 6}) == QZRational(5, 6)
    assert CyclicTower.from_json({"qs": [2, 4]}).qs == (2, 4)
