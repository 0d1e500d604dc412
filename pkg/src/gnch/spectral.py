"""Forward discrete-string eigenvalue problem and the drift of its spectrum in time.

The string ``f'' = z g f`` on (-1, 1) with ``f(-1) = f(1) = 0`` and point
masses g_j at y_j is solved by shooting from ``f(-1) = 0, f'(-1) = 1``:
f is linear between masses and its slope jumps by ``z g_j f(y_j)`` at each
mass.  ``P(z) = f(1)`` is a degree-N polynomial with ``P(0) = 2``; its roots
are the eigenvalues.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BranchCrossingError, ConvergenceError, TurningPointError
from .moments import MomentSystem
from .numeric import Poly, is_exact
from .peakon import StringConfig, string_config

REAL_TOL = 1e-8
POLISH_TOL = 1e-10
CROSSING_GAP = 1e-9


def characteristic_polynomial(cfg: StringConfig) -> Poly:
    """Coefficients of P(z) = f(1) by transfer through the masses (exact for rational configs)."""
    if not cfg.valid:
        raise ValueError(f"invalid config: {cfg.reason}")
    exact = all(is_exact(v) for v in (*cfg.y, *cfg.g))
    one = Fraction(1) if exact else 1.0
    z = Poly([0, one])
    value, slope = Poly(), Poly.const(one)
    prev = -one
    for yj, gj in zip(cfg.y, cfg.g):
        value = value + slope * (yj - prev)
        slope = slope + z * value * gj
        prev = yj
    return value + slope * (one - prev)


def _sign_changes(chain: Sequence[Poly], x) -> int:
    signs = [v for v in (p(x) for p in chain) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a < 0) != (b < 0))


def sturm_chain(p: Poly) -> list[Poly]:
    chain = [p, p.diff()]
    while chain[-1].degree > 0:
        rem = -(chain[-2] % chain[-1])
        if not rem:
            break
        chain.append(rem)
    return chain


def _simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Rational with the smallest denominator in the closed interval [a, b]."""
    if a > b:
        a, b = b, a
    if a <= 0 <= b:
        return Fraction(0)
    if b < 0:
        return -_simplest_between(-b, -a)
    fl = math.floor(a)
    if fl == a or fl + 1 <= b:
        return Fraction(fl if fl == a else fl + 1)
    return fl + 1 / _simplest_between(1 / (b - fl), 1 / (a - fl))


def _refine(p: Poly, chain: list[Poly], lo: Fraction, hi: Fraction, max_iter: int = 400):
    """Exactly one root lies in (lo, hi]; return it as a Fraction if rational, else a float."""
    for _ in range(max_iter):
        q = _simplest_between(lo, hi)
        if lo < q <= hi and p(q) == 0:
            return q
        if p(hi) == 0:
            return hi
        mid = (lo + hi) / 2
        if _sign_changes(chain, lo) - _sign_changes(chain, mid) == 1:
            hi = mid
        else:
            lo = mid
        if hi - lo < Fraction(1, 2 ** 70) * (1 + abs(hi)):
            break
    return float((lo + hi) / 2)


def exact_real_roots(p: Poly) -> list:
    """All distinct real roots of a rational polynomial, isolated with a Sturm chain."""
    if p.degree < 1:
        return []
    chain = sturm_chain(p)
    bound = 1 + max(abs(Fraction(c) / p.lead) for c in p.coeffs[:-1])
    lo, hi = -Fraction(bound), Fraction(bound)
    stack = [(lo, hi)]
    roots = []
    while stack:
        a, b = stack.pop()
        count = _sign_changes(chain, a) - _sign_changes(chain, b)
        if count == 0:
            continue
        if count == 1:
            roots.append(_refine(p, chain, a, b))
            continue
        mid = (a + b) / 2
        stack.extend([(a, mid), (mid, b)])
    return sorted(roots)


def _polish(p: Poly, dp: Poly, z: float) -> float:
    for _ in range(8):
        val = p(z)
        if abs(val) <= POLISH_TOL * max(1.0, max(abs(c) * abs(z) ** i for i, c in enumerate(p.coeffs))):
            break
        d = dp(z)
        if d == 0:
            break
        z -= val / d
    return z


def string_eigenvalues(cfg: StringConfig) -> list:
    """Sorted eigenvalues; exact rationals where the config is exact and the roots are rational."""
    p = characteristic_polynomial(cfg)
    n = cfg.n
    if all(is_exact(c) for c in p.coeffs):
        roots = exact_real_roots(p)
    else:
        coeffs = [float(c) for c in reversed(p.coeffs)]
        raw = np.roots(coeffs) if len(coeffs) > 1 else np.array([])
        scale = np.abs(raw) + 1
        real = sorted(float(z.real) for z, sc in zip(raw, scale) if abs(z.imag) <= REAL_TOL * sc)
        dp = p.diff()
        roots = sorted(_polish(p, dp, z) for z in real)
    if len(roots) != n:
        raise ConvergenceError(f"expected {n} real eigenvalues, found {len(roots)}")
    return roots


@dataclass(frozen=True)
class Branch:
    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True)
class DriftReport:
    branches: tuple
    expected_slope: float
    times: tuple = ()
    eigenvalues: tuple = field(default=(), repr=False)

    def max_slope_error(self) -> float:
        return max(abs(b.slope - self.expected_slope) for b in self.branches)

    def to_dict(self) -> dict:
        return {"branches": [{"slope": b.slope, "intercept": b.intercept, "residual": b.residual}
                             for b in self.branches],
                "expected_slope": self.expected_slope}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DriftReport":
        doc = json.loads(text)
        return cls(tuple(Branch(b["slope"], b["intercept"], b["residual"]) for b in doc["branches"]),
                   doc["expected_slope"])


def drift_fit(sys: MomentSystem, times: Sequence, mode: str = "float") -> DriftReport:
    """Least-squares affine fit of each sorted eigenvalue branch over ``times``."""
    if len(times) < 3:
        raise ValueError("drift fit needs at least three sample times")
    samples = []
    for t in times:
        cfg = string_config(sys, t, mode)
        if not cfg.valid:
            raise TurningPointError(f"string config invalid at t={t}: {cfg.reason}",
                                    float(t), float(t))
        ev = [float(v) for v in string_eigenvalues(cfg)]
        if any(b - a < CROSSING_GAP for a, b in zip(ev, ev[1:])):
            raise BranchCrossingError(f"eigenvalue branches within {CROSSING_GAP} at t={t}")
        samples.append(ev)
    ts = np.array([float(t) for t in times])
    vals = np.array(samples)
    branches = []
    for col in vals.T:
        slope, intercept = np.polyfit(ts, col, 1)
        resid = float(np.max(np.abs(col - (slope * ts + intercept))))
        branches.append(Branch(float(slope), float(intercept), resid))
    return DriftReport(tuple(branches), 0.0 - float(sys.params.r), tuple(float(t) for t in times),
                       tuple(tuple(row) for row in samples))
