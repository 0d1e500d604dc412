"""Hankel determinants Delta_k^l, skip-column determinants G_k^l and identity residuals.

``Delta_k^l = det(B[i+j+l])`` for i, j < k.  ``G_k^l`` has first column
``B[l..l+k-1]`` and then columns starting at ``B[l+2], B[l+3], ..., B[l+k]``
(the column starting at ``B[l+1]`` is skipped).  Conventions:
``Delta_0^l = 1``, ``Delta_k^l = 0`` for k < 0 and ``G_k^l = 0`` for k <= 0.

Every ``check_*`` function returns a list of :class:`Residual`; identities
are written with denominators cleared wherever that keeps them polynomial,
so a residual of exactly zero is the pass condition in exact arithmetic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import SingularError
from .moments import (MomentSystem, mode_weight, moment_dot, moment_ode_rhs,
                      moment_poly, moment_sequence, phi_value)
from .numeric import Poly, det, format_scalar, is_exact, to_scalar

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ElementSeq:
    """Entries ``B_k`` for ``k_min <= k <= k_max``; anything else is an IndexError."""

    k_min: int
    values: tuple

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.values) - 1

    def __getitem__(self, k: int):
        if not self.k_min <= k <= self.k_max:
            raise IndexError(f"element B_{k} outside available range [{self.k_min}, {self.k_max}]")
        return self.values[k - self.k_min]

    def with_value(self, k: int, value) -> "ElementSeq":
        vals = list(self.values)
        vals[k - self.k_min] = value
        return ElementSeq(self.k_min, tuple(vals))

    @classmethod
    def from_function(cls, f: Callable[[int], object], k_min: int, k_max: int) -> "ElementSeq":
        return cls(k_min, tuple(f(k) for k in range(k_min, k_max + 1)))

    @classmethod
    def from_modes(cls, b: Sequence, mu: Sequence, k_min: int, k_max: int,
                   offset=None) -> "ElementSeq":
        """``B_k = sum_j b_j mu_j**k``, plus ``offset`` at k = 0 when given (the mu_0 = 0 mode)."""
        def f(k):
            total = sum((bj * mj ** k for bj, mj in zip(b, mu)), Fraction(0))
            if offset is not None and k == 0:
                total += offset
            return total
        return cls.from_function(f, k_min, k_max)

    @classmethod
    def from_moments(cls, sys: MomentSystem, t, k_max: int, k_min: int = -1,
                     mode: str = "float") -> "ElementSeq":
        return cls(k_min, tuple(moment_sequence(sys, k_min, k_max, t, mode)))

    @classmethod
    def from_moment_polys(cls, sys: MomentSystem, k_max: int, k_min: int = -1) -> "ElementSeq":
        return cls.from_function(lambda k: moment_poly(sys, k), k_min, k_max)


class HankelTable:
    """Memoised Delta_k^l and G_k^l over one element sequence (a single-time snapshot)."""

    def __init__(self, source: ElementSeq):
        self.source = source
        sample = source.values[0] if source.values else Fraction(0)
        if isinstance(sample, Poly):
            self.zero, self.one = Poly(), Poly.const(1)
        elif all(is_exact(v) for v in source.values):
            self.zero, self.one = Fraction(0), Fraction(1)
        else:
            self.zero, self.one = 0.0, 1.0
        self._delta: dict[tuple[int, int], object] = {}
        self._gee: dict[tuple[int, int], object] = {}

    def delta(self, k: int, l: int):
        if k < 0:
            return self.zero
        if k == 0:
            return self.one
        key = (k, l)
        if key not in self._delta:
            B = self.source
            self._delta[key] = det([[B[i + j + l] for j in range(k)] for i in range(k)])
        return self._delta[key]

    def gee(self, k: int, l: int):
        if k <= 0:
            return self.zero
        key = (k, l)
        if key not in self._gee:
            B = self.source
            cols = [0] + list(range(2, k + 1))
            self._gee[key] = det([[B[l + i + c] for c in cols] for i in range(k)])
        return self._gee[key]


def delta(tbl: HankelTable, k: int, l: int):
    return tbl.delta(k, l)


def gee(tbl: HankelTable, k: int, l: int):
    return tbl.gee(k, l)


@dataclass(frozen=True)
class Residual:
    identity: str
    k: int
    l: int | None
    residual: object

    @property
    def is_zero(self) -> bool:
        return not self.residual

    @property
    def magnitude(self) -> float:
        if isinstance(self.residual, Poly):
            return max((abs(float(c)) for c in self.residual.coeffs), default=0.0)
        return abs(float(self.residual))

    def to_dict(self) -> dict:
        r = self.residual
        if isinstance(r, Poly):
            value = "0(exact)" if not r else [format_scalar(c) for c in r.coeffs]
        elif is_exact(r):
            value = "0(exact)" if r == 0 else format_scalar(r)
        else:
            value = float(r)
        return {"identity": self.identity, "k": self.k, "l": self.l, "residual": value}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _prod(values: Iterable, start):
    out = start
    for v in values:
        out = out * v
    return out


def _vandermonde_sq(mu: Sequence):
    return _prod(((mu[j] - mu[i]) ** 2 for i in range(len(mu)) for j in range(i + 1, len(mu))),
                 Fraction(1))


def check_vandermonde(els: ElementSeq, b: Sequence, mu: Sequence, l: int) -> list[Residual]:
    """Hankel determinants of ``B_k = sum b_j mu_j**k``: product formula at k = N, zero above."""
    tbl = HankelTable(els)
    n = len(b)
    product = _prod((bi * mi ** l for bi, mi in zip(b, mu)), Fraction(1)) * _vandermonde_sq(mu)
    out = [Residual("vandermonde_product", n, l, tbl.delta(n, l) - product)]
    for k in (n + 1, n + 2):
        out.append(Residual("vandermonde_rank", k, l, tbl.delta(k, l)))
    return out


def check_offset_identities(els: ElementSeq, b: Sequence, mu: Sequence,
                            ls: Sequence[int] = (1, 2)) -> list[Residual]:
    """Relations for ``B_k = 1/2 [k=0] + sum_{j>=1} b_j mu_j**k`` (the zero mode carries b_0 = 1/2)."""
    tbl = HankelTable(els)
    n = len(b)
    vsq = _vandermonde_sq(mu)
    out = [Residual("offset_product_l0", n, 0,
                    tbl.delta(n, 0) - HALF * tbl.delta(n - 1, 2) - _prod(b, Fraction(1)) * vsq)]
    for l in ls:
        product = _prod((bi * mi ** l for bi, mi in zip(b, mu)), Fraction(1)) * vsq
        out.append(Residual("offset_product", n, l, tbl.delta(n, l) - product))
    for k in (n + 1, n + 2):
        out.append(Residual("offset_rank_l0", k, 0, tbl.delta(k, 0) - HALF * tbl.delta(k - 1, 2)))
    for k in (n + 1, n + 2):
        for l in ls:
            out.append(Residual("offset_rank", k, l, tbl.delta(k, l)))
    # det(B*_{i+j-1}) of size N+1 expands to this; the quarter term is Delta_{N-1}^3
    out.append(Residual("offset_skip", n, -1,
                        tbl.delta(n + 1, -1) + tbl.gee(n, 0) - QUARTER * tbl.delta(n - 1, 3)))
    return out


def check_bilinear(tbl: HankelTable, k: int, l: int) -> list[Residual]:
    """The four Jacobi-type bilinear relations; they hold for any element sequence."""
    D, G = tbl.delta, tbl.gee
    return [
        Residual("jacobi_1", k, l,
                 D(k + 2, l - 1) * D(k, l + 1) - (D(k + 1, l - 1) * D(k + 1, l + 1) - D(k + 1, l) ** 2)),
        Residual("jacobi_2", k, l,
                 D(k + 1, l - 1) * D(k, l + 1) - (G(k + 1, l - 1) * D(k, l) - G(k, l - 1) * D(k + 1, l))),
        Residual("jacobi_3", k, l,
                 D(k + 1, l) * G(k, l) - (D(k, l + 1) * G(k + 1, l - 1) - D(k + 1, l - 1) * D(k, l + 2))),
        Residual("jacobi_4", k, l,
                 D(k + 2, l - 1) * D(k, l + 2) - (D(k + 1, l + 1) * G(k + 1, l - 1) - D(k + 1, l) * G(k + 1, l))),
    ]


def _ratio(num, den, what: str):
    if not den:
        raise SingularError(f"vanishing denominator {what}")
    return num / den


def check_sums(tbl: HankelTable, n: int, k: int) -> list[Residual]:
    """Telescoping sums over ``l`` with denominators ``Delta_{l+1}^1 Delta_l^1``.

    Raises SingularError if one of those denominators vanishes.
    """
    if not 0 <= k <= n - 1:
        raise ValueError("telescoping sums need 0 <= k <= N-1")
    D, G = tbl.delta, tbl.gee

    def den(l):
        return _ratio(1, D(l + 1, 1) * D(l, 1), f"Delta_{l + 1}^1 Delta_{l}^1")

    upper = range(k + 1, n)
    s1 = sum((D(l + 1, 0) ** 2 * den(l) for l in upper), tbl.zero)
    s2 = sum((D(l + 1, 0) * D(l, 2) * den(l) for l in upper), tbl.zero)
    s3 = sum((D(l, 2) ** 2 * den(l) for l in upper), tbl.zero)
    s4 = sum((D(l, 2) ** 2 * den(l) for l in range(0, k + 1)), tbl.zero)
    dn = D(n, 1)
    dk = D(k + 1, 1)
    return [
        Residual("telescope_1", k, n, s1 - (_ratio(D(k + 2, -1), dk, "Delta_{k+1}^1")
                                            - _ratio(D(n + 1, -1), dn, "Delta_N^1"))),
        Residual("telescope_2", k, n, s2 - (_ratio(G(n, 0), dn, "Delta_N^1")
                                            - _ratio(G(k + 1, 0), dk, "Delta_{k+1}^1"))),
        Residual("telescope_3", k, n, s3 - (_ratio(D(n - 1, 3), dn, "Delta_N^1")
                                            - _ratio(D(k, 3), dk, "Delta_{k+1}^1"))),
        Residual("telescope_4", k, n, s4 - _ratio(D(k, 3), dk, "Delta_{k+1}^1")),
    ]


def check_combined(tbl: HankelTable, k: int) -> list[Residual]:
    """Two multi-term relations obtained by eliminating G_k^{-1}, G_k^0, G_k^1.

    The first is multiplied through by ``Delta_{k+1}^1`` so it is defined for
    every element sequence.
    """
    D, G = tbl.delta, tbl.gee
    lhs1 = ((G(k + 1, -1) + G(k, 1)) * D(k, 2) - G(k, 1) * D(k + 1, 0)) * D(k + 1, 1)
    rhs1 = (D(k, 2) ** 2 * (D(k + 2, -1) + G(k + 1, 0))
            + (D(k + 1, 0) ** 2 - D(k + 1, 0) * D(k, 2)) * D(k, 3))
    lhs2 = (2 * D(k + 1, 1) * D(k, 1) * (2 * G(k + 1, -1) + 2 * G(k, 1))
            - D(k + 1, 0) * ((2 * G(k + 1, 0) - D(k, 3)) * D(k, 1)
                             + D(k + 1, 1) * (2 * G(k, 0) - D(k - 1, 3))))
    rhs2 = (D(k, 1) * D(k, 2) * (4 * D(k + 2, -1) + 4 * G(k + 1, 0) - D(k, 3))
            - D(k + 1, 1) * D(k - 1, 3) * (2 * D(k + 1, 0) - D(k, 2))
            + (D(k + 1, 0) - D(k, 2)) * (2 * D(k + 1, 0) * D(k, 2) - D(k, 2) ** 2))
    return [Residual("combined_1", k, None, lhs1 - rhs1),
            Residual("combined_2", k, None, lhs2 - rhs2)]


def _derivative_rhs(tbl: HankelTable, r, s, k: int, l: int):
    D, G = tbl.delta, tbl.gee
    if l == 0:
        return (r + 2 * s) * G(k, -1) + (2 * r + 2 * s) * G(k - 1, 1)
    if l == 1:
        return (2 * r + 2 * s) * G(k, 0) - (r + s) * D(k - 1, 3)
    return (r * (l + 1) + 2 * s) * G(k, l - 1)


def _det_dot(values: ElementSeq, dots: ElementSeq, k: int, l: int):
    """d/dt of a k x k Hankel determinant: sum over columns of the column-differentiated determinant."""
    if k <= 0:
        return 0
    total = 0
    for c in range(k):
        total = total + det([[(dots if j == c else values)[i + j + l] for j in range(k)]
                             for i in range(k)])
    return total


def check_delta_derivatives(sys: MomentSystem, k: int, l: int, t=None,
                            mode: str = "exact") -> list[Residual]:
    """Residual of the determinant derivative formulas for Delta_k^l.

    With ``t=None`` the moments are exact polynomials in t and the residual is
    a polynomial that must vanish identically.  With a time ``t`` the check is
    pointwise: the determinant derivative comes from column-wise
    differentiation with analytic moment derivatives.
    """
    name = {0: "derivative_l0", 1: "derivative_l1"}.get(l, "derivative_l")
    k_max = l + 2 * k
    if t is None:
        tbl = HankelTable(ElementSeq.from_moment_polys(sys, k_max))
        r, s = (to_scalar(v, "exact") for v in (sys.params.r, sys.params.s))
        lhs = tbl.delta(k, l)
        lhs = lhs.diff() if isinstance(lhs, Poly) else Poly()
        return [Residual(name, k, l, lhs - _derivative_rhs(tbl, r, s, k, l))]
    values = ElementSeq.from_moments(sys, t, k_max, mode=mode)
    dots = ElementSeq.from_function(lambda q: moment_dot(sys, q, t, mode), -1, k_max)
    tbl = HankelTable(values)
    r, s = (to_scalar(v, mode) for v in (sys.params.r, sys.params.s))
    return [Residual(name, k, l, _det_dot(values, dots, k, l) - _derivative_rhs(tbl, r, s, k, l))]


def check_moment_law(sys: MomentSystem, k: int, t=None) -> Residual:
    """The moment ODE as an exact polynomial identity (t=None) or pointwise."""
    if t is None:
        r, s = (to_scalar(v, "exact") for v in (sys.params.r, sys.params.s))
        lhs = moment_poly(sys, k).diff()
        if k == 1:
            rhs = moment_poly(sys, 0) * (2 * r + 2 * s) - (r + s)
        else:
            rhs = moment_poly(sys, k - 1) * (r * (k + 1) + 2 * s)
        return Residual("moment_law", k, None, lhs - rhs)
    mode = "exact" if is_exact(t) else "float"
    return Residual("moment_law", k, None,
                    moment_dot(sys, k, t, mode) - moment_ode_rhs(sys, k, t, mode))


def substituted_modes(sys: MomentSystem, t, mode: str = "float") -> tuple[list, list]:
    """Weights and nodes ``(exp((r+2s) a_j), -lambda_j exp(r a_j))`` making the moments a power sum.

    Uses ``exp(r a_j) = phi_j`` and ``exp((r+2s) a_j) = phi_j**(1 + 2s/r)`` for r != 0.
    """
    b, mu = [], []
    for md in sys.modes:
        lam = to_scalar(md.lam, mode)
        b.append(mode_weight(md, sys.params, 0, t, mode))
        mu.append(-lam if sys.params.r == 0 else -lam * phi_value(md, sys.params, t, mode))
    return b, mu
