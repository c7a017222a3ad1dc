from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from germtower.errors import GermError, NotInvertible, OrderMismatch
from germtower.gaussian import GaussianRational as G
from germtower.jets import (
    GermTag,
    JetSeries,
    abs_jet,
    classify,
    commutes_to_order,
    compose,
    distance,
    identity,
    invert,
    is_identity,
    iterate,
    linear,
    recognize_rational,
    relative_distance,
    rigid_rotation,
    rotation_number,
)
from oracles import majorant_compose, random_exact_germ, random_germ, sympy_compose


def test_rejects_order_zero():
    with pytest.raises(GermError):
        JetSeries([], order=0)


def test_compose_linear_left():
    lam = 0.3 + 0.4j
    out = compose(linear(lam, 2), JetSeries([1, 1]))
    assert np.allclose(out.coeffs, [lam, lam])


def test_compose_identity_right():
    f = JetSeries([1, 1])
    assert compose(f, identity(2)) == f


def test_compose_square_matches_expansion():
    f = JetSeries([1, 1], order=3)
    assert np.allclose(compose(f, f).coeffs, [1, 2, 2])
    assert [complex(c) for c in sympy_compose(f, f)] == [1, 2, 2]


def test_compose_exact():
    f = JetSeries([G(1), G(1)], order=3, exact=True)
    assert compose(f, f).coeffs == (G(1), G(2), G(2))


def test_compose_order_mismatch():
    with pytest.raises(OrderMismatch):
        compose(JetSeries([1], order=2), JetSeries([1], order=3))


def test_invert_examples():
    lam = 2 - 1j
    assert np.allclose(invert(linear(lam, 4)).coeffs, [1 / lam, 0, 0, 0])
    f = JetSeries([G(1), G(1)], order=3, exact=True)
    assert invert(f).coeffs == (G(1), G(-1), G(2))
    assert is_identity(compose(f, invert(f)))
    assert invert(identity(5)) == identity(5)


def test_invert_rejects_zero_multiplier():
    with pytest.raises(NotInvertible):
        invert(JetSeries([0, 1]))
    with pytest.raises(NotInvertible):
        invert(JetSeries([1e-13, 1]))


def test_iterate_examples():
    assert is_identity(iterate(rigid_rotation(1, 2, 5), 2))
    f = JetSeries([1, 1], order=3)
    assert np.allclose(iterate(f, 2).coeffs, [1, 2, 2])
    assert iterate(f, 1) == f
    assert iterate(f, 0) == identity(3)
    assert distance(iterate(f, -1), invert(f)) < 1e-15


def test_rotation_number_examples():
    assert rotation_number(linear(cmath.exp(2j * math.pi / 3), 1)) == pytest.approx(1 / 3)
    rho = rotation_number(linear(2, 1))
    assert rho.real == 0
    assert rho.imag == pytest.approx(-math.log(2) / (2 * math.pi))
    assert rotation_number(identity(1)) == 0


def test_classify_examples():
    assert classify(JetSeries([0.5, 1])).tag is GermTag.ATTRACTING
    assert classify(JetSeries([2, 1])).tag is GermTag.REPELLING
    c = classify(JetSeries([-1], order=4))
    assert c.tag is GermTag.PARABOLIC_DEGENERATE and c.rotation == Fraction(1, 2)
    c = classify(JetSeries([1, 1]))
    assert c.tag is GermTag.PARABOLIC_NONDEGENERATE and c.rotation == 0
    golden = (math.sqrt(5) - 1) / 2
    assert classify(JetSeries([cmath.exp(2j * math.pi * golden), 1])).tag is GermTag.INDIFFERENT_IRRATIONAL
    c = classify(JetSeries([cmath.exp(2j * math.pi / 3)], order=6))
    assert c.tag is GermTag.PARABOLIC_DEGENERATE and c.rotation == Fraction(1, 3)


def test_classify_exact():
    # z^2 is non-resonant for multiplier i, so f^4 = id to order 2; z^5 is resonant
    assert classify(JetSeries([G(0, 1), G(1)], exact=True)).tag is GermTag.PARABOLIC_DEGENERATE
    assert classify(JetSeries([G(0, 1), 0, 0, 0, G(1)], exact=True)).tag is GermTag.PARABOLIC_NONDEGENERATE
    assert classify(JetSeries([G(0, 1)], order=3, exact=True)).rotation == Fraction(1, 4)
    # 3/5 + 4/5 i has modulus 1 but is not a root of unity
    assert classify(JetSeries([G(Fraction(3, 5), Fraction(4, 5)), G(1)], exact=True)).tag is GermTag.INDIFFERENT_IRRATIONAL
    assert classify(JetSeries([G(Fraction(1, 2))], exact=True)).tag is GermTag.ATTRACTING


def test_classify_undetermined_for_liouville_like_angle():
    alpha = 1 / 3 + 1e-11  # near 1/3, not certifiable in double precision
    c = classify(JetSeries([cmath.exp(2j * math.pi * alpha), 1]), tau_unit=1e-15)
    assert c.tag in (GermTag.UNDETERMINED, GermTag.PARABOLIC_NONDEGENERATE)
    assert recognize_rational(alpha, tol=1e-15)[0] is None


def test_classify_iterated_rotation_is_identity_class():
    for p, q in ((1, 2), (1, 3), (2, 5), (3, 7)):
        c = classify(iterate(rigid_rotation(p, q, 6), q))
        assert c.tag is GermTag.PARABOLIC_DEGENERATE and c.rotation == 0


def test_commutes_examples():
    assert commutes_to_order(linear(2, 3), linear(3j, 3)).residual == 0
    f = JetSeries([1, 1], order=6)
    assert commutes_to_order(f, iterate(f, 2)).residual == 0
    # equal through z^3; the commutator first shows at z^4
    g = JetSeries([1, 2], order=3)
    assert commutes_to_order(JetSeries([1, 1], order=3), g).residual == 0
    res = commutes_to_order(JetSeries([1, 1], order=4), JetSeries([1, 2], order=4))
    assert not res.commutes and res.residual == pytest.approx(2)


def test_json_round_trip_float_and_exact():
    f = random_germ(np.random.default_rng(1), 7)
    assert JetSeries.from_json(f.to_json()) == f
    g = JetSeries([G(1), G(Fraction(-1, 3), 2)], exact=True)
    doc = g.to_json()
    assert doc["coeffs"][1] == ["-1/3", "2"]
    assert JetSeries.from_json(doc) == g


germ_orders = st.integers(min_value=2, max_value=12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), germ_orders)
def test_group_laws_exact(seed, order):
    rng = np.random.default_rng(seed)
    f, g, h = (random_exact_germ(rng, order) for _ in range(3))
    assert compose(f, compose(g, h)) == compose(compose(f, g), h)
    assert is_identity(compose(f, invert(f))) and is_identity(compose(invert(f), f))
    assert iterate(f, 3) == compose(iterate(f, 1), iterate(f, 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 16), st.integers(1, 15))
def test_truncation_coherence(seed, order, m):
    m = min(m, order)
    rng = np.random.default_rng(seed)
    f, g = random_germ(rng, order), random_germ(rng, order)
    a = compose(f.truncate(m), g.truncate(m))
    b = compose(f, g).truncate(m)
    assert distance(a, b) <= 1e-12
    fe, ge = random_exact_germ(rng, order), random_exact_germ(rng, order)
    assert compose(fe.truncate(m), ge.truncate(m)) == compose(fe, ge).truncate(m)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rotation_number_homomorphism(seed):
    rng = np.random.default_rng(seed)
    f, g = random_germ(rng, 5), random_germ(rng, 5)
    lhs = rotation_number(compose(f, g))
    rhs = rotation_number(f) + rotation_number(g)
    d = lhs - rhs
    assert abs(d.real - round(d.real)) <= 1e-10 and abs(d.imag) <= 1e-10


def test_float_group_laws_relative_residual():
    rng = np.random.default_rng(7)
    for _ in range(20):
        f, g, h = (random_germ(rng, 16) for _ in range(3))
        lhs, rhs = compose(f, compose(g, h)), compose(compose(f, g), h)
        scale = majorant_compose(majorant_compose(f, g), h)
        assert relative_distance(lhs, rhs, scale) <= 1e-10
        fi = invert(f)
        assert relative_distance(compose(f, fi), identity(16), majorant_compose(f, fi)) <= 1e-10


def test_abs_jet_moduli():
    assert np.allclose(abs_jet(JetSeries([3 + 4j, -2])).coeffs, [5, 2])
