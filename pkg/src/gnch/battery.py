"""Seeded randomized battery over the determinant identities, in exact rationals."""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import SingularError
from .hankel import (ElementSeq, HankelTable, HALF, Residual, check_bilinear, check_combined,
                     check_delta_derivatives, check_moment_law, check_offset_identities,
                     check_sums, check_vandermonde)
from .moments import MomentSystem
from .numeric import format_scalar

# identity name -> group, in report order
GROUPS = {
    "vandermonde_product": "power_sum", "vandermonde_rank": "power_sum",
    "offset_product_l0": "offset", "offset_product": "offset", "offset_rank_l0": "offset",
    "offset_rank": "offset", "offset_skip": "offset",
    "jacobi_1": "bilinear", "jacobi_2": "bilinear", "jacobi_3": "bilinear", "jacobi_4": "bilinear",
    "telescope_1": "sums", "telescope_2": "sums", "telescope_3": "sums", "telescope_4": "sums",
    "combined_1": "combined", "combined_2": "combined",
    "derivative_l0": "derivative", "derivative_l1": "derivative", "derivative_l": "derivative",
    "moment_law": "derivative",
}


@dataclass
class BatteryResult:
    trials: int
    passed: Counter = field(default_factory=Counter)
    total: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def lines(self) -> list[str]:
        names = [n for n in GROUPS if self.total[n] or self.skipped[n]]
        return [f"{n}: {self.passed[n]}/{self.total[n]} passed"
                + (f" ({self.skipped[n]} skipped, singular)" if self.skipped[n] else "")
                for n in names]


def _rational(rng: random.Random, lo: int = -9, hi: int = 9, den: int = 5) -> Fraction:
    while True:
        v = Fraction(rng.randint(lo, hi), rng.randint(1, den))
        if v:
            return v


def _distinct(rng: random.Random, n: int) -> list[Fraction]:
    out: list[Fraction] = []
    while len(out) < n:
        v = _rational(rng)
        if v not in out:
            out.append(v)
    return out


def _record(res: BatteryResult, checks: list[Residual], elements: ElementSeq) -> None:
    for c in checks:
        res.total[c.identity] += 1
        if c.is_zero:
            res.passed[c.identity] += 1
        elif res.failure is None:
            res.failure = {**c.to_dict(),
                           "elements": {str(k): format_scalar(elements[k])
                                        for k in range(elements.k_min, elements.k_max + 1)}}


def run_battery(trials: int = 200, max_n: int = 5, seed: int = 0, max_k: int = 4,
                perturb: Callable[[ElementSeq], ElementSeq] | None = None,
                derivatives: bool = True) -> BatteryResult:
    """Run ``trials`` random instances with N <= max_n and k <= max_k.

    ``perturb`` is applied to every generated element sequence before the
    checks run; it exists so a corrupted sequence can be fed through as a
    negative control.
    """
    if trials < 1 or max_n < 1:
        raise ValueError("trials and max_n must be positive")
    rng = random.Random(seed)
    res = BatteryResult(trials)
    hook = perturb or (lambda e: e)
    for _ in range(trials):
        n = rng.randint(1, max_n)
        b = [_rational(rng) for _ in range(n)]
        mu = _distinct(rng, n)
        k_top = 2 * max(n, max_k) + 12

        plain = hook(ElementSeq.from_modes(b, mu, 0, k_top))
        l = rng.randint(0, 2)
        _record(res, check_vandermonde(plain, b, mu, l), plain)

        shifted = hook(ElementSeq.from_modes(b, mu, -1, k_top, offset=HALF))
        _record(res, check_offset_identities(shifted, b, mu), shifted)

        tbl = HankelTable(shifted)
        k = rng.randint(0, max_k)
        _record(res, check_bilinear(tbl, k, rng.randint(0, 2)), shifted)
        _record(res, check_combined(tbl, k), shifted)
        try:
            _record(res, check_sums(tbl, n, rng.randint(0, n - 1)), shifted)
        except SingularError:
            for name in ("telescope_1", "telescope_2", "telescope_3", "telescope_4"):
                res.skipped[name] += 1

        if derivatives and n <= 3:
            lams = _distinct(rng, n)
            sys = MomentSystem.from_preset("mixed", lams)
            t = _rational(rng, -4, 4, 8)
            kd = rng.randint(1, n + 1)
            seq = ElementSeq.from_moments(sys, t, 2 * kd + 3, mode="exact")
            _record(res, check_delta_derivatives(sys, kd, rng.randint(0, 3), t=t), seq)
            _record(res, [check_moment_law(sys, rng.randint(0, 2 * n), t=t)], seq)
    return res


def failure_json(res: BatteryResult) -> str:
    return json.dumps(res.failure, sort_keys=True)
