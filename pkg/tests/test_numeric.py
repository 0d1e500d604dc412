import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnch.numeric import (Poly, check_mode, det, format_scalar, poly_det, poly_diff, to_exact,
                          to_scalar)

from conftest import cofactor_det, rationals

T = Poly([0, 1])


def matrices(n_max=4):
    return st.integers(0, n_max).flatmap(
        lambda n: st.lists(st.lists(rationals(), min_size=n, max_size=n), min_size=n, max_size=n))


def test_det_empty_is_one():
    assert det([]) == 1


def test_det_two_by_two():
    assert det([[1, 2], [3, 4]]) == -2
    assert det([[1.0, 2.0], [3.0, 4.0]]) == pytest.approx(-2.0)


def test_det_vandermonde_nodes_123():
    m = [[Fraction(x) ** p for p in range(3)] for x in (1, 2, 3)]
    assert cofactor_det(m) == 2
    assert det(m) == 2


def test_det_singular_returns_zero():
    assert det([[1, 2], [2, 4]]) == 0
    assert det([[0.0, 0.0], [1.0, 2.0]]) == 0.0


def test_det_needs_pivoting():
    assert det([[0, 1], [1, 0]]) == -1
    assert det([[0, 0, 1], [0, 1, 0], [1, 0, 0]]) == -1


def test_det_rejects_non_square():
    with pytest.raises(ValueError):
        det([[1, 2]])


@given(matrices())
def test_det_matches_cofactor_expansion(m):
    assert det(m) == cofactor_det(m)


@given(matrices(), st.data())
def test_row_swap_negates(m, data):
    n = len(m)
    if n < 2:
        return
    i, j = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    swapped = [list(r) for r in m]
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert det(swapped) == -det(m)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(rationals(), min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(rationals(), min_size=n, max_size=n), min_size=n, max_size=n))))
def test_det_multiplicative(pair):
    a, b = pair
    n = len(a)
    ab = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert det(ab) == det(a) * det(b)


@given(matrices())
def test_float_det_close_to_exact(m):
    exact = det(m)
    approx = det([[float(x) for x in r] for r in m])
    scale = max([1.0] + [abs(float(x)) for r in m for x in r]) ** max(len(m), 1)
    assert abs(approx - float(exact)) <= 1e-9 * scale


def test_poly_det_examples():
    assert poly_det([]) == Poly.const(1)
    assert poly_det([[T, 1], [1, T]]) == T * T - 1
    assert poly_det([[1 - 4 * T]]) == Poly([1, -4])


def test_poly_det_evaluates_like_det():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 4)
        m = [[Poly([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(rng.randint(0, 3))])
              for _ in range(n)] for _ in range(n)]
        t0 = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        assert poly_det(m)(t0) == det([[p(t0) for p in row] for row in m])


def test_poly_diff_examples():
    p = (1 - 4 * T) ** 2
    assert p == Poly([1, -8, 16])
    assert poly_diff(p) == Poly([-8, 32])
    assert poly_diff(Poly.const(7)) == Poly()
    assert poly_diff(-(1 - 4 * T) ** 3) == 12 * (1 - 4 * T) ** 2


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(-2, 2))
def test_poly_diff_matches_central_difference(coeffs, t0):
    p = Poly(coeffs)
    h = 1e-4
    fd = (p(t0 + h) - p(t0 - h)) / (2 * h)
    bound = 1e-5 * (1 + sum(abs(c) * i ** 3 * 3 ** i for i, c in enumerate(coeffs)))
    assert abs(poly_diff(p)(t0) - fd) <= bound


def test_poly_normalisation_and_degree():
    assert Poly([1, 0, 0]).coeffs == (1,)
    assert Poly([0, 0]).degree == -math.inf
    assert not Poly([0])
    assert (T ** 3).degree == 3


def test_poly_division():
    a = (T - 1) * (T + 2) + 5
    q, r = divmod(a, T - 1)
    assert q == T + 2 and r == Poly.const(5)
    assert ((T - 1) * (T + 3)).exact_div(T + 3) == T - 1
    with pytest.raises(ArithmeticError):
        (T * T + 1).exact_div(T)
    with pytest.raises(ZeroDivisionError):
        divmod(T, Poly())


def test_poly_is_immutable():
    with pytest.raises(AttributeError):
        T.coeffs = (1,)


def test_scalar_conversions():
    assert to_exact(0.1) == Fraction(1, 10)
    assert to_exact("3/4") == Fraction(3, 4)
    assert to_scalar("1/4", "float") == 0.25
    assert format_scalar(Fraction(-2, 6)) == "-1/3"
    assert format_scalar(0.5) == "0.5"
    with pytest.raises(ValueError):
        check_mode("double")
    with pytest.raises(ValueError):
        to_exact(float("inf"))


@given(rationals())
def test_exact_values_lowest_terms(q):
    v = to_exact(q)
    assert math.gcd(v.numerator, v.denominator) == 1 and v.denominator > 0
