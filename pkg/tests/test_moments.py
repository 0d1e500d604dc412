import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnch.errors import DomainError, ParamError
from gnch.moments import (PRESETS, GnchParams, MomentSystem, SpectralMode, a_value, mode_weight,
                          moment, moment_derivative_residual, moment_dot, moment_poly,
                          moment_sequence, phi_value)
from gnch.numeric import Poly

from conftest import rationals

MIXED = PRESETS["mixed"]
ONE = SpectralMode(Fraction(1))


def integrate_a(lam, r, a0, t, steps=2000):
    """RK4 on a' = -1 / (lam exp(r a)); an oracle independent of the closed form."""
    f = lambda a: -1.0 / (lam * math.exp(r * a))
    a, h = a0, t / steps
    for _ in range(steps):
        k1 = f(a)
        k2 = f(a + h / 2 * k1)
        k3 = f(a + h / 2 * k2)
        k4 = f(a + h * k3)
        a += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return a


def test_a_value_examples():
    assert a_value(ONE, MIXED, 0) == 0
    assert a_value(ONE, PRESETS["ch"], 2) == -2
    assert a_value(ONE, MIXED, 0.1) == pytest.approx(0.25 * math.log(0.6), abs=1e-15)


@pytest.mark.parametrize("lam,r,a0,t", [(1.0, 4.0, 0.0, 0.1), (-1.0, 4.0, 0.0, 0.5),
                                        (2.0, 1.0, 0.3, 0.7), (0.5, -2.0, -0.1, 0.2)])
def test_a_value_matches_ode_integration(lam, r, a0, t):
    md = SpectralMode(lam, a0)
    assert a_value(md, GnchParams(r, 1.0), t) == pytest.approx(integrate_a(lam, r, a0, t), abs=1e-10)


def test_a_value_leaves_reals():
    with pytest.raises(DomainError):
        a_value(ONE, MIXED, 0.25)


def test_phi_examples():
    assert phi_value(ONE, MIXED, 0, "exact") == 1
    assert phi_value(ONE, MIXED, Fraction(1, 4), "exact") == 0
    assert phi_value(SpectralMode(Fraction(-1)), MIXED, Fraction(1, 2), "exact") == 3
    with pytest.raises(ParamError):
        phi_value(ONE, PRESETS["ch"], 0)


def test_phi_is_exp_r_a_where_real():
    md = SpectralMode(2.0, 0.3)
    p = GnchParams(1.5, 0.0)
    for t in (0.0, 0.2, 0.9):
        assert phi_value(md, p, t) == pytest.approx(math.exp(1.5 * a_value(md, p, t)), rel=1e-14)


def test_moment_examples():
    sys = MomentSystem.from_preset("mixed", [1])
    assert moment(sys, 0, 0, "exact") == Fraction(3, 2)
    assert moment(sys, -1, 0, "exact") == -1
    for t in (Fraction(0), Fraction(1, 3), Fraction(-2, 5)):
        assert moment(sys, 1, t, "exact") == -(1 - 4 * t) ** 3
    assert moment_poly(sys, 1) == -(Poly([1, -4]) ** 3)


def test_moment_law_examples():
    sys = MomentSystem.from_preset("mixed", [1])
    for t in (Fraction(0), Fraction(1, 7), Fraction(3, 2)):
        assert moment_derivative_residual(sys, 0, t, "exact") == 0
        assert moment_derivative_residual(sys, 1, t, "exact") == 0
        assert moment_dot(sys, 0, t, "exact") == -8 * (1 - 4 * t)
        assert moment_dot(sys, 1, t, "exact") == 12 * (1 - 4 * t) ** 2
    ch = MomentSystem.from_preset("ch", [1.0, -2.5], [0.2, 0.0])
    for t in (0.0, 0.4, 1.3):
        assert abs(moment_derivative_residual(ch, 2, t)) <= 1e-12 * abs(moment(ch, 1, t))


def test_moment_law_non_integer_exponent_float():
    sys = MomentSystem.build(1.0, 0.3, [1.5, -0.5], [0.1, 0.0])
    for k in range(0, 5):
        for t in (0.0, 0.2):
            scale = abs(moment_dot(sys, k, t)) + 1
            assert abs(moment_derivative_residual(sys, k, t)) <= 1e-12 * scale


def test_moment_dot_matches_finite_difference():
    sys = MomentSystem.build(1.0, 0.3, [1.5, -0.5], [0.1, 0.0])
    h = 1e-5
    for k in range(-1, 4):
        fd = (moment(sys, k, 0.2 + h) - moment(sys, k, 0.2 - h)) / (2 * h)
        assert moment_dot(sys, k, 0.2) == pytest.approx(fd, rel=1e-8, abs=1e-8)


def test_poly_regime_agrees_with_pointwise():
    rng = random.Random(11)
    sys = MomentSystem.from_preset("mixed", [Fraction(1), Fraction(-1), Fraction(3, 2)])
    noniso = MomentSystem.from_preset("noniso", [Fraction(2), Fraction(-1, 3)])
    for s_ in (sys, noniso):
        polys = {k: moment_poly(s_, k) for k in range(-1, 6)}
        for _ in range(50):
            t = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
            for k, p in polys.items():
                assert moment(s_, k, t, "exact") == p(t)


def test_poly_degree_per_mode():
    sys = MomentSystem.from_preset("mixed", [Fraction(2)])
    for k in range(0, 5):
        assert moment_poly(sys, k).degree == k + 2


def test_offset_only_at_k0():
    sys = MomentSystem.from_preset("mixed", [Fraction(1), Fraction(-1)])
    t = Fraction(1, 3)
    weights = sum(mode_weight(md, sys.params, 0, t, "exact") for md in sys.modes)
    assert moment(sys, 0, t, "exact") - Fraction(1, 2) == weights


@given(st.lists(rationals().filter(bool), min_size=1, max_size=4, unique=True), rationals(),
       st.sampled_from(["mixed", "noniso"]))
def test_sequence_matches_single_moments(lams, t, preset):
    sys = MomentSystem.from_preset(preset, lams)
    try:
        seq = moment_sequence(sys, -1, 6, t, "exact")
    except DomainError:
        return
    assert seq == [moment(sys, k, t, "exact") for k in range(-1, 7)]
    fseq = moment_sequence(sys, -1, 6, float(t), "float")
    for a, b in zip(fseq, seq):
        assert a == pytest.approx(float(b), rel=1e-12, abs=1e-12)


def test_exact_mode_preconditions():
    with pytest.raises(ParamError):
        moment(MomentSystem.build(3, 1, [1]), 0, 0, "exact")
    with pytest.raises(ParamError):
        moment(MomentSystem.from_preset("mixed", [1], [Fraction(1, 2)]), 0, 0, "exact")
    with pytest.raises(ParamError):
        moment(MomentSystem.from_preset("ch", [1]), 0, 1, "exact")
    assert moment(MomentSystem.from_preset("ch", [1]), 0, 0, "exact") == Fraction(3, 2)


def test_negative_base_non_integer_power():
    sys = MomentSystem.build(1.0, 0.3, [1.0])
    with pytest.raises(DomainError):
        moment(sys, 0, 2.0)


def test_system_validation():
    with pytest.raises(ParamError):
        MomentSystem.from_preset("mixed", [1, 1])
    with pytest.raises(ParamError):
        MomentSystem.from_preset("mixed", [])
    with pytest.raises(ParamError):
        SpectralMode(0)
    with pytest.raises(ParamError):
        GnchParams(float("nan"), 1)
    with pytest.raises(ParamError):
        MomentSystem.from_preset("kdv", [1])
    with pytest.raises(ParamError):
        GnchParams(Fraction(3), Fraction(1)).polynomial_offset()


def test_json_round_trip():
    sys = MomentSystem.from_preset("mixed", [Fraction(1), Fraction(-1, 3)], [0, Fraction(2, 5)])
    text = sys.to_json("exact")
    assert '"-1/3"' in text and '"2/5"' in text
    assert MomentSystem.from_json(text) == sys
    back = MomentSystem.from_json(sys.to_json("float"))
    assert [float(m.lam) for m in back.modes] == [1.0, -1 / 3]
    with pytest.raises(ParamError):
        MomentSystem.from_json('{"r": 1}')
