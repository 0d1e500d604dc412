"""Peakon reconstruction from Hankel determinants, and functionals of the wave profile.

The profile is ``u(x) = 1/2 * sum_j m_j exp(-2|x - x_j|)``.  Positions and
amplitudes come from the string variables

    y_j = 1 - Delta_{N-j}^2 / Delta_{N-j+1}^0
    g_j = (Delta_{N-j+1}^0)**2 / (Delta_{N-j+1}^1 Delta_{N-j}^1)

through ``x_j = atanh(y_j)`` and ``m_j = g_j (1 - y_j**2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .hankel import ElementSeq, HankelTable
from .moments import MomentSystem
from .numeric import check_mode, format_scalar, is_exact

# float-mode validity thresholds
DENOM_RTOL = 1e-13
ORDER_SLACK = 1e-12


@dataclass(frozen=True)
class StringConfig:
    t: object
    y: tuple
    g: tuple
    valid: bool = True
    reason: str = ""

    @property
    def n(self) -> int:
        return len(self.y)

    def position_ratio(self, j: int):
        """``(1 + y_j) / (1 - y_j)``, so that ``x_j = log(ratio) / 2`` (0-based j)."""
        return (1 + self.y[j]) / (1 - self.y[j])

    @property
    def masses(self) -> tuple:
        return tuple(gj * (1 - yj * yj) for yj, gj in zip(self.y, self.g))


@dataclass(frozen=True)
class PeakonState:
    t: object
    x: tuple
    m: tuple
    valid: bool = True
    reason: str = ""

    @property
    def n(self) -> int:
        return len(self.x)

    def to_dict(self) -> dict:
        return {"t": _jsonable(self.t), "x": [_jsonable(v) for v in self.x],
                "m": [_jsonable(v) for v in self.m], "valid": self.valid, "reason": self.reason}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "PeakonState":
        def back(v):
            return Fraction(v) if isinstance(v, str) else v
        return cls(back(doc["t"]), tuple(back(v) for v in doc["x"]), tuple(back(v) for v in doc["m"]),
                   doc.get("valid", True), doc.get("reason", ""))

    @classmethod
    def from_json(cls, text: str) -> "PeakonState":
        return cls.from_dict(json.loads(text))


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_scalar(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _nonzero(den, num, exact: bool) -> bool:
    if exact:
        return den != 0
    return abs(den) > DENOM_RTOL * abs(num) and den != 0


def string_config(sys: MomentSystem, t, mode: str = "float") -> StringConfig:
    """String variables (y_j, g_j) at time t; degeneracies are reported, not raised."""
    check_mode(mode)
    n = sys.n
    exact = mode == "exact"
    tbl = HankelTable(ElementSeq.from_moments(sys, t, 2 * n, k_min=0, mode=mode))
    D = tbl.delta
    ys, gs = [], []
    for j in range(1, n + 1):
        k = n - j
        d0 = D(k + 1, 0)
        if not _nonzero(d0, D(k, 2), exact):
            return StringConfig(t, (), (), False, f"Delta_{k + 1}^0 vanishes (y_{j})")
        den = D(k + 1, 1) * D(k, 1)
        if not _nonzero(den, d0 * d0, exact):
            return StringConfig(t, (), (), False, f"Delta_{k + 1}^1 Delta_{k}^1 vanishes (g_{j})")
        ys.append(1 - D(k, 2) / d0)
        gs.append(d0 * d0 / den)
    slack = 0 if exact else ORDER_SLACK
    bounds = [-1] + ys + [1]
    for a, b in zip(bounds, bounds[1:]):
        if not b - a > slack:
            return StringConfig(t, tuple(ys), tuple(gs), False,
                                "ordering -1 < y_1 < ... < y_N < 1 fails")
    if not exact and not all(math.isfinite(v) and v != 0 for v in gs):
        return StringConfig(t, tuple(ys), tuple(gs), False, "non-finite or zero weight g")
    return StringConfig(t, tuple(ys), tuple(gs))


def state_from_string(cfg: StringConfig) -> PeakonState:
    if not cfg.valid:
        return PeakonState(cfg.t, (), (), False, cfg.reason)
    x = tuple(0.5 * math.log(cfg.position_ratio(j)) for j in range(cfg.n))
    m = cfg.masses
    if any(b <= a for a, b in zip(x, x[1:])):
        return PeakonState(cfg.t, x, m, False, "positions not strictly increasing")
    return PeakonState(cfg.t, x, m)


def string_from_state(state: PeakonState) -> StringConfig:
    """Inverse Liouville map ``y = tanh x``, ``g = m / (1 - y**2)`` (float)."""
    y = tuple(math.tanh(float(v)) for v in state.x)
    g = tuple(float(mj) / (1 - yj * yj) for mj, yj in zip(state.m, y))
    return StringConfig(state.t, y, g, state.valid, state.reason)


def peakon_state(sys: MomentSystem, t, mode: str = "float") -> PeakonState:
    """Positions and amplitudes at time t.  In exact mode ``m`` is exact and ``x`` is a float."""
    return state_from_string(string_config(sys, t, mode))


def eval_u(state: PeakonState, x: float) -> float:
    return 0.5 * sum(float(mj) * math.exp(-2.0 * abs(x - xj)) for xj, mj in zip(state.x, state.m))


def u_at_peaks(state: PeakonState) -> list[float]:
    return [eval_u(state, xj) for xj in state.x]


def u_x_sides(state: PeakonState, j: int) -> tuple[Fraction, Fraction]:
    """Left and right slopes of u at x_j (0-based j), computed in exact arithmetic.

    The exponential weights are float, but once converted to Fractions the
    two one-sided sums differ exactly by the self term, so the jump is
    exactly ``-2 m_j``.
    """
    _check_index(state, j)
    xj = state.x[j]
    common = Fraction(0)
    for i, (xi, mi) in enumerate(zip(state.x, state.m)):
        if i == j:
            continue
        w = Fraction(float(mi)) * Fraction(math.exp(-2.0 * abs(xj - xi)))
        # d/dx of m e^{-2|x-xi|}/2 is -m e^{..} right of xi and +m e^{..} left of it
        common += -w if i < j else w
    mj = Fraction(state.m[j]) if is_exact(state.m[j]) else Fraction(float(state.m[j]))
    return common + mj, common - mj


def u_x_jump(state: PeakonState, j: int) -> Fraction:
    left, right = u_x_sides(state, j)
    return right - left


def u_x_average(state: PeakonState, j: int) -> float:
    """Mean of the one-sided derivatives of u at x_j (0-based j)."""
    _check_index(state, j)
    xj = state.x[j]
    total = 0.0
    for i, (xi, mi) in enumerate(zip(state.x, state.m)):
        if i < j:
            total -= float(mi) * math.exp(2.0 * (xi - xj))
        elif i > j:
            total += float(mi) * math.exp(2.0 * (xj - xi))
    return total


def tail_integral(state: PeakonState, j: int) -> float:
    """Integral of u from x_j to +infinity (0-based j)."""
    _check_index(state, j)
    xj = state.x[j]
    total = 0.0
    for i, (xi, mi) in enumerate(zip(state.x, state.m)):
        mi = float(mi)
        if i < j:
            total += 0.25 * mi * math.exp(2.0 * (xi - xj))
        else:
            total += 0.5 * mi - 0.25 * mi * math.exp(2.0 * (xj - xi))
    return total


def hamiltonian(state: PeakonState) -> float:
    m = [float(v) for v in state.m]
    return 0.25 * sum(m[a] * m[b] * math.exp(-2.0 * abs(state.x[a] - state.x[b]))
                      for a in range(len(m)) for b in range(len(m)))


def sample_profile(state: PeakonState, xs: Sequence[float]) -> list[tuple[float, float]]:
    return [(x, eval_u(state, x)) for x in xs]


def _check_index(state: PeakonState, j: int) -> None:
    if not 0 <= j < state.n:
        raise IndexError(f"peak index {j} out of range for N={state.n}")
