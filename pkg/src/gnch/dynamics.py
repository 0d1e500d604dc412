"""Peakon ODE systems and a fixed-step RK4 cross-check against the closed form.

Physical variables evolve by

    x_j' = (s + r) u(x_j) - r * int_{x_j}^inf u dx
    m_j' = -[(s + r) <u_x(x_j)> + r u(x_j)] m_j

and the string variables (y_j = tanh x_j, g_j = m_j / (1 - y_j**2)) by the
equivalent y/g system in :func:`rhs_yg`.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import TurningPointError
from .moments import GnchParams, MomentSystem
from .peakon import PeakonState, StringConfig, hamiltonian, peakon_state

LOCALIZE_TOL = 1e-11
# largest accepted per-step change, relative to 1 + |value|
MAX_STEP_CHANGE = 0.1
# stricter bound while closing in on a singular time, so RK4 stays accurate there
LOCALIZE_STEP_CHANGE = 0.01


@dataclass(frozen=True)
class OdeSettings:
    t0: float
    t1: float
    n_steps: int = 4096

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("step count must be positive")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.n_steps


@dataclass
class Trajectory:
    kind: str  # "xm" or "yg"
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)

    def to_csv(self) -> str:
        n = self.states[0].n if self.states else 0
        a, b = ("x", "m") if self.kind == "xm" else ("y", "g")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"{a}{i + 1}" for i in range(n)] + [f"{b}{i + 1}" for i in range(n)])
        for t, st in zip(self.times, self.states):
            first, second = (st.x, st.m) if self.kind == "xm" else (st.y, st.g)
            w.writerow([repr(float(t))] + [repr(float(v)) for v in (*first, *second)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        n = (len(header) - 1) // 2
        kind = "xm" if header[1].startswith("x") else "yg"
        traj = cls(kind)
        for row in body:
            t, vals = float(row[0]), [float(v) for v in row[1:]]
            st = (PeakonState(t, tuple(vals[:n]), tuple(vals[n:])) if kind == "xm"
                  else StringConfig(t, tuple(vals[:n]), tuple(vals[n:])))
            traj.times.append(t)
            traj.states.append(st)
        return traj


def rhs_xm(params: GnchParams, state: PeakonState) -> tuple[list[float], list[float]]:
    """Velocities and amplitude rates; same sums as eval_u, u_x_average and tail_integral, fused."""
    if not state.valid:
        raise ValueError(f"invalid state: {state.reason}")
    r, s = float(params.r), float(params.s)
    x = [float(v) for v in state.x]
    m = [float(v) for v in state.m]
    n = len(x)
    xdot, mdot = [], []
    for j in range(n):
        u = avg = 0.0
        tail = 0.0
        for i in range(n):
            w = m[i] * math.exp(-2.0 * abs(x[i] - x[j]))
            u += w
            if i < j:
                avg -= w
                tail += 0.25 * w
            else:
                if i > j:
                    avg += w
                tail += 0.5 * m[i] - 0.25 * w
        u *= 0.5
        xdot.append((s + r) * u - r * tail)
        mdot.append(-((s + r) * avg + r * u) * m[j])
    return xdot, mdot


def rhs_yg(params: GnchParams, cfg: StringConfig) -> tuple[list[float], list[float]]:
    """String-variable system.

    The second sum in y_j' carries the prefactor ``(3r/4 + s/2)(1 + y_j)**2``
    with the free index j.
    """
    if not cfg.valid:
        raise ValueError(f"invalid config: {cfg.reason}")
    r, s = float(params.r), float(params.s)
    y = [float(v) for v in cfg.y]
    g = [float(v) for v in cfg.g]
    n = len(y)
    left = [g[i] * (1 + y[i]) ** 2 for i in range(n)]
    right = [g[i] * (1 - y[i]) ** 2 for i in range(n)]
    mass = [g[i] * (1 - y[i] ** 2) for i in range(n)]
    ydot, gdot = [], []
    for j in range(n):
        below = sum(left[:j])
        yj, gj = y[j], g[j]
        ydot.append((r / 4 + s / 2) * (1 - yj) ** 2 * below
                    + (3 * r / 4 + s / 2) * (1 + yj) ** 2 * sum(right[j:])
                    - r / 2 * (1 - yj * yj) * sum(mass[j:]))
        gdot.append((r / 2 + s) * gj * (1 - yj) * below
                    - (3 * r / 2 + s) * gj * (1 + yj) * sum(right[j + 1:])
                    - r * gj * yj * sum(mass[j + 1:])
                    + (r / 2 + s) * gj ** 2 * yj * (1 - yj * yj)
                    - r / 2 * gj ** 2 * (1 - yj * yj))
    return ydot, gdot


def _rk4_step(f: Callable, t: float, z: list[float], h: float) -> list[float]:
    k1 = f(t, z)
    k2 = f(t + h / 2, [a + h / 2 * b for a, b in zip(z, k1)])
    k3 = f(t + h / 2, [a + h / 2 * b for a, b in zip(z, k2)])
    k4 = f(t + h, [a + h * b for a, b in zip(z, k3)])
    return [a + h / 6 * (p + 2 * q + 2 * w + v) for a, p, q, w, v in zip(z, k1, k2, k3, k4)]


def _system(params: GnchParams, kind: str, n: int):
    if kind == "xm":
        def f(t, z):
            xd, md = rhs_xm(params, PeakonState(t, tuple(z[:n]), tuple(z[n:])))
            return xd + md

        def ok(old, new):
            x, m = new[:n], new[n:]
            if any(b <= a for a, b in zip(x, x[1:])):
                return False
            # amplitudes never change sign along a solution; a flip means a blow-up was crossed
            return all(mo * mn > 0 for mo, mn in zip(old[n:], m))
    else:
        def f(t, z):
            yd, gd = rhs_yg(params, StringConfig(t, tuple(z[:n]), tuple(z[n:])))
            return yd + gd

        def ok(old, new):
            bounds = [-1.0] + new[:n] + [1.0]
            if any(b <= a for a, b in zip(bounds, bounds[1:])):
                return False
            return all(go * gn > 0 for go, gn in zip(old[n:], new[n:]))
    return f, ok


def _accept(ok: Callable, old: list[float], new: list[float], limit: float = MAX_STEP_CHANGE) -> bool:
    if not all(math.isfinite(v) for v in new):
        return False
    if any(abs(b - a) > limit * (1 + abs(a)) for a, b in zip(old, new)):
        return False
    return ok(old, new)


def _make(kind: str, t: float, z: list[float], n: int):
    if kind == "xm":
        return PeakonState(t, tuple(z[:n]), tuple(z[n:]))
    return StringConfig(t, tuple(z[:n]), tuple(z[n:]))


def integrate(params: GnchParams, initial: PeakonState | StringConfig,
              settings: OdeSettings) -> Trajectory:
    """Classical RK4 with a fixed step, sampled at every step.

    A step that produces a non-finite value, a jump larger than half the
    magnitude, broken ordering or an amplitude sign flip triggers
    localisation: the step is halved from the last accepted state until the
    singular time is pinned to ~1e-11, then TurningPointError is raised.
    """
    if not initial.valid:
        raise ValueError(f"initial state is invalid: {initial.reason}")
    kind = "xm" if isinstance(initial, PeakonState) else "yg"
    n = initial.n
    z = ([float(v) for v in initial.x] + [float(v) for v in initial.m] if kind == "xm"
         else [float(v) for v in initial.y] + [float(v) for v in initial.g])
    f, ok = _system(params, kind, n)
    t0, h = float(settings.t0), settings.h
    traj = Trajectory(kind, [t0], [_make(kind, t0, z, n)])
    t = t0
    for i in range(1, settings.n_steps + 1):
        t_next = t0 + i * h
        new = _safe_step(f, t, z, t_next - t)
        if new is None or not _accept(ok, z, new):
            new = _localize(f, ok, t, z, t_next)
        t, z = t_next, new
        traj.times.append(t)
        traj.states.append(_make(kind, t, z, n))
    return traj


def _safe_step(f, t, z, h):
    try:
        return _rk4_step(f, t, z, h)
    except (OverflowError, ZeroDivisionError, ValueError):
        return None


def _localize(f, ok, t: float, z: list[float], t_end: float) -> list[float]:
    h = t_end - t
    while abs(h) > LOCALIZE_TOL:
        last = abs(t_end - t) <= abs(h)
        if last:
            h = t_end - t
        new = _safe_step(f, t, z, h)
        if new is not None and _accept(ok, z, new, LOCALIZE_STEP_CHANGE):
            if last:
                return new
            t, z = t + h, new
        else:
            h /= 2
    raise TurningPointError(f"turning point near t={t:.12g}", t_singular=t + h, t_last_valid=t)


@dataclass(frozen=True)
class DeviationReport:
    max_dev_x: float
    max_dev_m: float
    n_steps: int
    t_range: tuple[float, float]
    max_h_drift: float | None = None

    @property
    def max_dev(self) -> float:
        return max(self.max_dev_x, self.max_dev_m)

    def to_dict(self) -> dict:
        d = {"max_dev_x": self.max_dev_x, "max_dev_m": self.max_dev_m,
             "n_steps": self.n_steps, "t_range": list(self.t_range)}
        if self.max_h_drift is not None:
            d["max_h_drift"] = self.max_h_drift
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def hamiltonian_drift(traj: Trajectory) -> float:
    """Largest relative change of H along an x/m trajectory."""
    h0 = hamiltonian(traj.states[0])
    return max(_rel(hamiltonian(st), h0) for st in traj.states)


def compare_closed_form(sys: MomentSystem, settings: OdeSettings,
                        trajectory: list | None = None) -> DeviationReport:
    """Integrate from the closed-form state at t0 and measure relative deviation at every step.

    If ``trajectory`` is a list, the computed Trajectory is appended to it.
    """
    start = peakon_state(sys, settings.t0)
    if not start.valid:
        raise TurningPointError(f"closed form invalid at t0: {start.reason}",
                                float(settings.t0), float(settings.t0))
    traj = integrate(sys.params, start, settings)
    if trajectory is not None:
        trajectory.append(traj)
    dx = dm = 0.0
    for t, st in zip(traj.times, traj.states):
        ref = peakon_state(sys, t)
        if not ref.valid:
            raise TurningPointError(f"closed form invalid at t={t}: {ref.reason}", t, t)
        dx = max(dx, max(_rel(a, b) for a, b in zip(st.x, ref.x)))
        dm = max(dm, max(_rel(a, float(b)) for a, b in zip(st.m, ref.m)))
    drift = hamiltonian_drift(traj) if sys.params.r == 0 else None
    return DeviationReport(dx, dm, settings.n_steps,
                           (float(settings.t0), float(settings.t1)), drift)
