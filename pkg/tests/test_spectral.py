import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnch.errors import BranchCrossingError, ConvergenceError, TurningPointError
from gnch.moments import MomentSystem, phi_value
from gnch.numeric import Poly
from gnch.peakon import StringConfig, string_config
from conftest import rationals
from gnch.spectral import (DriftReport, _simplest_between, characteristic_polynomial, drift_fit,
                           exact_real_roots, string_eigenvalues)

ONE = MomentSystem.from_preset("mixed", [1])


def configs(max_n=4):
    def build(n):
        ys = st.lists(st.integers(-19, 19), min_size=n, max_size=n, unique=True).map(
            lambda v: tuple(Fraction(a, 20) for a in sorted(v)))
        gs = st.lists(st.builds(Fraction, st.integers(-9, 9).filter(bool), st.integers(1, 4)),
                      min_size=n, max_size=n).map(tuple)
        return st.builds(lambda y, g: StringConfig(0, y, g), ys, gs)
    return st.integers(1, max_n).flatmap(build)


def test_one_mass_polynomial():
    y, g = Fraction(1, 3), Fraction(-9, 4)
    p = characteristic_polynomial(StringConfig(0, (y,), (g,)))
    assert p == Poly([2, g * (1 - y * y)])
    m = g * (1 - y * y)
    assert string_eigenvalues(StringConfig(0, (y,), (g,))) == [-2 / m]


def test_free_string():
    p = characteristic_polynomial(StringConfig(0, (), ()))
    assert p == Poly.const(2)
    assert string_eigenvalues(StringConfig(0, (), ())) == []


@given(configs())
def test_value_at_zero_is_two(cfg):
    p = characteristic_polynomial(cfg)
    assert p(0) == 2 and p.degree == cfg.n


@pytest.mark.parametrize("t", ["0", "1/2", "3/8", "-1", "7/3"])
def test_mixed_one_peak_root(t):
    t = Fraction(t)
    cfg = string_config(ONE, t, "exact")
    assert string_eigenvalues(cfg) == [1 - 4 * t]
    assert string_eigenvalues(string_config(ONE, float(t)))[0] == pytest.approx(float(1 - 4 * t), abs=1e-12)


def test_ch_is_isospectral():
    sys = MomentSystem.from_preset("ch", [1.0, 2.0, 3.5], [0.0, 0.3, -0.2])
    ref = string_eigenvalues(string_config(sys, 0.0))
    for t in (0.3, 0.7):
        for a, b in zip(string_eigenvalues(string_config(sys, t)), ref):
            assert a == pytest.approx(b, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(configs().filter(lambda c: len({g > 0 for g in c.g}) == 1))
def test_sign_definite_masses_give_simple_real_roots(cfg):
    roots = string_eigenvalues(cfg)
    assert len(roots) == cfg.n
    assert all(b > a for a, b in zip(roots, roots[1:]))
    fl = string_eigenvalues(StringConfig(0, tuple(map(float, cfg.y)), tuple(map(float, cfg.g))))
    for a, b in zip(fl, roots):
        assert a == pytest.approx(float(b), rel=1e-9, abs=1e-9)


def test_round_trip_against_modes():
    rng = random.Random(4)
    for preset in ("mixed", "noniso"):
        for _ in range(10):
            n = rng.randint(1, 3)
            lams = rng.sample([0.5, 1.0, 1.5, 2.0, 3.0, -0.7, -1.2, -2.5], n)
            a0s = [rng.uniform(-0.2, 0.2) for _ in range(n)]
            sys = MomentSystem.from_preset(preset, lams, a0s)
            t = rng.uniform(-0.1, 0.1)
            cfg = string_config(sys, t)
            # y_j within 1e-3 of the ends loses digits to cancellation in 1 - Delta^2/Delta^0
            if not cfg.valid or min(1 - abs(y) for y in cfg.y) < 1e-3:
                continue
            want = sorted(float(md.lam) * phi_value(md, sys.params, t) for md in sys.modes)
            for a, b in zip(string_eigenvalues(cfg), want):
                assert a == pytest.approx(b, abs=1e-9)


def test_exact_two_peak_eigenvalues():
    sys = MomentSystem.from_preset("mixed", [1, -1])
    assert string_eigenvalues(string_config(sys, Fraction(1, 2), "exact")) == [-3, -1]


def test_root_count_mismatch():
    collided = StringConfig(0, (Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    with pytest.raises(ConvergenceError):
        string_eigenvalues(collided)
    crossed = StringConfig(0, (0.5, -0.5), (-4.0, 1.0))
    with pytest.raises(ConvergenceError):
        string_eigenvalues(crossed)


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        characteristic_polynomial(StringConfig(0, (), (), False, "x"))


def test_exact_roots_rational_and_irrational():
    z = Poly([0, 1])
    p = (z - 1) * (z - Fraction(1, 3)) * (z + 2)
    assert exact_real_roots(p) == [-2, Fraction(1, 3), 1]
    roots = exact_real_roots(z * z - 2)
    assert [float(r) for r in roots] == pytest.approx([-math.sqrt(2), math.sqrt(2)], abs=1e-15)
    assert exact_real_roots(z * z + 1) == []
    assert exact_real_roots((z - 1) ** 2 * (z + 1)) == [-1, 1]


@given(rationals(-60, 60, 40), rationals(-60, 60, 40))
def test_simplest_between_lies_in_interval(a, b):
    q = _simplest_between(a, b)
    lo, hi = min(a, b), max(a, b)
    assert lo <= q <= hi
    assert all(not (lo <= Fraction(n, d) <= hi) for d in range(1, q.denominator)
               for n in range(math.floor(lo * d), math.ceil(hi * d) + 1))


def test_drift_examples():
    rep = drift_fit(ONE, [0.4, 0.5, 0.6])
    (b,) = rep.branches
    assert b.slope == pytest.approx(-4, abs=1e-8) and b.residual <= 1e-12
    assert b.intercept == pytest.approx(1, abs=1e-8) and rep.expected_slope == -4
    rep = drift_fit(MomentSystem.from_preset("noniso", [1]), [0.1, 0.2, 0.3])
    assert rep.branches[0].slope == pytest.approx(-1, abs=1e-8)
    rep = drift_fit(MomentSystem.from_preset("ch", [1, 3]), [0.0, 0.5, 1.0])
    assert all(abs(b.slope) <= 1e-10 for b in rep.branches)


def test_drift_intercepts_with_offsets():
    sys = MomentSystem.from_preset("noniso", [1.0, 2.0], [0.2, -0.1])
    rep = drift_fit(sys, [0.0, 0.05, 0.1, 0.15])
    want = sorted(float(md.lam) * math.exp(float(md.a0)) for md in sys.modes)
    for b, w in zip(rep.branches, want):
        assert b.intercept == pytest.approx(w, abs=1e-9) and b.slope == pytest.approx(-1, abs=1e-8)


def test_drift_errors():
    with pytest.raises(ValueError):
        drift_fit(ONE, [0.4, 0.5])
    with pytest.raises(TurningPointError):
        drift_fit(ONE, [0.2, 0.25, 0.3])
    close = MomentSystem.from_preset("mixed", [Fraction(1), 1 + Fraction(1, 10 ** 12)])
    with pytest.raises(BranchCrossingError):
        drift_fit(close, [Fraction(1, 2), Fraction(3, 5), Fraction(7, 10)], mode="exact")


def test_drift_report_json():
    rep = drift_fit(ONE, [0.4, 0.5, 0.6])
    doc = json.loads(rep.to_json())
    assert set(doc) == {"branches", "expected_slope"}
    assert set(doc["branches"][0]) == {"slope", "intercept", "residual"}
    back = DriftReport.from_json(rep.to_json())
    assert back.branches == rep.branches and back.expected_slope == rep.expected_slope
