"""Scalar fields, dense determinants and univariate polynomials.

Two scalar fields are supported: exact rationals (``fractions.Fraction``) and
64-bit floats.  Code elsewhere in the package selects between them with a
``mode`` string, either ``"exact"`` or ``"float"``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence, Union


Scalar = Union[Fraction, float]
MODES = ("exact", "float")


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown scalar mode {mode!r}; expected one of {MODES}")
    return mode


def to_exact(value) -> Fraction:
    """Convert ``value`` to a Fraction.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the nearest binary fraction.  Strings of the form
    ``"p/q"`` are accepted.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot represent {value!r} exactly")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def to_float(value) -> float:
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def to_scalar(value, mode: str) -> Scalar:
    return to_exact(value) if check_mode(mode) == "exact" else to_float(value)


def format_scalar(value) -> str:
    """Locale-independent text form: ``p/q`` for rationals, shortest repr for floats."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


class Poly:
    """Dense univariate polynomial ``sum(c[i] * t**i)``.

    Coefficients are normalised so the last one is nonzero; the zero
    polynomial has an empty coefficient tuple and degree ``-inf``.
    Instances are immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, value) -> "Poly":
        return cls([value])

    @classmethod
    def monomial(cls, coeff, power: int) -> "Poly":
        return cls([0] * power + [coeff])

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"

    def _lift(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other) -> "Poly":
        a, b = self.coeffs, self._lift(other).coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other) -> tuple["Poly", "Poly"]:
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quot = [0] * (dq + 1)
        lead = other.coeffs[-1]
        if isinstance(lead, int):
            lead = Fraction(lead)  # keep int/int division exact
        for i in range(dq, -1, -1):
            q = rem[i + len(other.coeffs) - 1] / lead
            quot[i] = q
            if q:
                for j, c in enumerate(other.coeffs):
                    rem[i + j] -= q * c
        return Poly(quot), Poly(rem[: len(other.coeffs) - 1])

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def diff(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def map(self, f: Callable) -> "Poly":
        return Poly([f(c) for c in self.coeffs])


def poly_diff(p: Poly) -> Poly:
    """Termwise derivative."""
    return p.diff()


def _bareiss(rows: Sequence[Sequence], zero, one, divide: Callable):
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = one
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return zero
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = divide(pivot * row_i[j] - aik * row_k[j], prev)
        prev = pivot
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def _float_det(rows: Sequence[Sequence]) -> float:
    a = [[float(x) for x in r] for r in rows]
    n = len(a)
    d = 1.0
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[p][k] == 0.0:
            return 0.0
        if p != k:
            a[k], a[p] = a[p], a[k]
            d = -d
        pivot = a[k][k]
        d *= pivot
        row_k = a[k]
        for i in range(k + 1, n):
            f = a[i][k] / pivot
            if f:
                row_i = a[i]
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
    return d


def det(m: Sequence[Sequence]):
    """Determinant of a square matrix given as a sequence of rows.

    Exact entries (int/Fraction) go through fraction-free Bareiss
    elimination; float entries use Gaussian elimination with partial pivoting.
    Polynomial entries are delegated to :func:`poly_det`.  The 0x0
    determinant is 1.
    """
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    entries = [x for r in m for x in r]
    if all(isinstance(x, float) for x in entries):
        return _float_det(m)
    if any(isinstance(x, Poly) for x in entries):
        return poly_det(m)
    if all(is_exact(x) for x in entries):
        rows = [[Fraction(x) for x in r] for r in m]
        return _bareiss(rows, Fraction(0), Fraction(1), lambda a, b: a / b)
    return _float_det(m)


def poly_det(m: Sequence[Sequence]) -> Poly:
    """Exact determinant of a matrix of polynomials via fraction-free elimination."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("matrix is not square")
    if n == 0:
        return Poly.const(1)
    rows = [[x if isinstance(x, Poly) else Poly.const(x) for x in r] for r in m]
    return _bareiss(rows, Poly(), Poly.const(1), Poly.exact_div)
