"""Equation parameters and the closed-form moment sequence A_k(t).

Each spectral mode j carries a nonzero constant ``lambda`` and an initial
value ``a0``.  For r != 0 the mode is evolved through
``phi_j(t) = exp(r*a0) - r*t/lambda``, which is affine in t and stays
meaningful after it changes sign.  Moments are then

    A_k(t) = [k == 0] / 2 + sum_j (-lambda_j)**k * W_j(t, k)

with ``W_j = phi_j**(k + 1 + 2s/r)`` (r != 0) or ``W_j = exp(2 s a_j(t))``
(r == 0).  The ``1/2`` at k = 0 is the contribution of the zero mode.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import DomainError, ParamError
from .numeric import Poly, Scalar, check_mode, format_scalar, to_exact, to_scalar

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class GnchParams:
    r: Fraction | float
    s: Fraction | float

    def __post_init__(self):
        for name in ("r", "s"):
            v = getattr(self, name)
            if isinstance(v, complex) or not math.isfinite(float(v)):
                raise ParamError(f"{name} must be a finite real, got {v!r}")

    @cached_property
    def _exponent(self) -> Fraction | None:
        if self.r == 0:
            return None
        return to_exact(self.s) * 2 / to_exact(self.r)

    def weight_exponent(self) -> Fraction | None:
        """``2s/r`` as an exact rational, or None when r == 0."""
        return self._exponent

    def polynomial_offset(self) -> int:
        """Integer ``2s/r`` for the exact (polynomial) regime; ParamError otherwise."""
        e = self.weight_exponent()
        if e is None or e.denominator != 1:
            raise ParamError(
                f"exact mode needs r != 0 and 2s/r integral (r={self.r}, s={self.s})")
        return int(e)


PRESETS: dict[str, GnchParams] = {
    "ch": GnchParams(Fraction(0), Fraction(1)),
    "noniso": GnchParams(Fraction(1), Fraction(0)),
    "mixed": GnchParams(Fraction(4), Fraction(2)),
}


@dataclass(frozen=True)
class SpectralMode:
    lam: Fraction | float
    a0: Fraction | float = 0

    def __post_init__(self):
        if self.lam == 0:
            raise ParamError("spectral constant lambda must be nonzero")


@dataclass(frozen=True)
class MomentSystem:
    params: GnchParams
    modes: tuple[SpectralMode, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ParamError("a moment system needs at least one mode")
        lams = [to_exact(m.lam) if not isinstance(m.lam, float) else m.lam for m in self.modes]
        if len(set(lams)) != len(lams):
            raise ParamError("spectral constants must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.modes)

    @classmethod
    def from_preset(cls, name: str, lams: Sequence, a0s: Sequence | None = None) -> "MomentSystem":
        try:
            params = PRESETS[name]
        except KeyError:
            raise ParamError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
        return cls.build(params.r, params.s, lams, a0s)

    @classmethod
    def build(cls, r, s, lams: Sequence, a0s: Sequence | None = None) -> "MomentSystem":
        if a0s is None:
            a0s = [0] * len(lams)
        if len(a0s) != len(lams):
            raise ParamError("lambda and a0 lists differ in length")
        return cls(GnchParams(_num(r), _num(s)),
                   tuple(SpectralMode(_num(l), _num(a)) for l, a in zip(lams, a0s)))

    def to_json(self, mode: str = "float") -> str:
        conv = (lambda v: format_scalar(to_exact(v))) if mode == "exact" else float
        doc = {"r": conv(self.params.r), "s": conv(self.params.s),
               "modes": [{"lambda": conv(m.lam), "a0": conv(m.a0)} for m in self.modes]}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "MomentSystem":
        doc = json.loads(text)
        try:
            modes = doc["modes"]
            return cls.build(doc["r"], doc["s"],
                             [m["lambda"] for m in modes], [m.get("a0", 0) for m in modes])
        except (KeyError, TypeError) as exc:
            raise ParamError(f"malformed moment-system document: {exc}") from None


def _num(v):
    """Keep ints/rationals exact and floats as floats; parse ``p/q`` strings."""
    if isinstance(v, str):
        return to_exact(v)
    if isinstance(v, int):
        return Fraction(v)
    return v


def _exp_initial(mode_: SpectralMode, r, mode: str):
    """``exp(r*a0)`` in the requested field; exact only when the exponent is 0."""
    x = to_scalar(r, mode) * to_scalar(mode_.a0, mode)
    if mode == "exact":
        if x != 0:
            raise ParamError("exact mode needs exp(r*a0) rational; use a0 = 0")
        return Fraction(1)
    return math.exp(x)


def phi_value(mode_: SpectralMode, params: GnchParams, t, mode: str = "float") -> Scalar:
    """Affine continuation ``exp(r*a0) - r*t/lambda`` of ``exp(r*a_j(t))``."""
    check_mode(mode)
    if params.r == 0:
        raise ParamError("phi is only defined for r != 0")
    r, lam, t = (to_scalar(v, mode) for v in (params.r, mode_.lam, t))
    return _exp_initial(mode_, params.r, mode) - r * t / lam


def a_value(mode_: SpectralMode, params: GnchParams, t) -> float:
    """a_j(t) solving ``a' = -1 / (lambda * exp(r*a))`` with ``a(0) = a0``."""
    r, lam, t, a0 = (float(v) for v in (params.r, mode_.lam, t, mode_.a0))
    if r == 0:
        return a0 - t / lam
    arg = math.exp(r * a0) - r * t / lam
    if arg <= 0:
        raise DomainError(f"a_j leaves the reals at t={t} (exp(r a) = {arg})")
    return math.log(arg) / r


def mode_weight(mode_: SpectralMode, params: GnchParams, k: int, t, mode: str) -> Scalar:
    if params.r == 0:
        x = 2 * to_scalar(params.s, mode) * (to_scalar(mode_.a0, mode)
                                             - to_scalar(t, mode) / to_scalar(mode_.lam, mode))
        if mode == "exact":
            if x != 0:
                raise ParamError("exact mode with r = 0 needs exp(2 s a_j(t)) = 1")
            return Fraction(1)
        return math.exp(x)
    phi = phi_value(mode_, params, t, mode)
    e = k + 1 + params.weight_exponent()
    if mode == "exact":
        if e.denominator != 1:
            raise ParamError(f"exact mode needs 2s/r integral (exponent {e})")
        if phi == 0 and e < 0:
            raise DomainError("zero phi raised to a negative power")
        return phi ** int(e)
    if e.denominator == 1:
        if phi == 0 and e < 0:
            raise DomainError("zero phi raised to a negative power")
        return phi ** int(e)
    if phi <= 0:
        raise DomainError(f"phi = {phi} raised to non-integer power {e}")
    return phi ** float(e)


def moment(sys: MomentSystem, k: int, t, mode: str = "float") -> Scalar:
    """A_k(t) for k >= -1; the zero mode contributes 1/2 at k = 0 only."""
    check_mode(mode)
    if k < -1:
        raise ValueError("moments are defined for k >= -1")
    total = HALF if k == 0 else Fraction(0)
    total = to_scalar(total, mode)
    for md in sys.modes:
        total += (-to_scalar(md.lam, mode)) ** k * mode_weight(md, sys.params, k, t, mode)
    return total


def moment_sequence(sys: MomentSystem, k_min: int, k_max: int, t,
                    mode: str = "float") -> list[Scalar]:
    """``[A_k(t) for k in k_min..k_max]``, equal to repeated :func:`moment` calls but batched."""
    check_mode(mode)
    if k_min < -1:
        raise ValueError("moments are defined for k >= -1")
    p = sys.params
    t = to_scalar(t, mode)
    out = [to_scalar(HALF if k == 0 else 0, mode) for k in range(k_min, k_max + 1)]
    for md in sys.modes:
        neg_lam = -to_scalar(md.lam, mode)
        if p.r == 0:
            w = mode_weight(md, p, 0, t, mode)
            for i, k in enumerate(range(k_min, k_max + 1)):
                out[i] += neg_lam ** k * w
            continue
        c = p.weight_exponent()
        if c.denominator == 1 and c >= -1:
            # (-lam)^k phi^(k+1+c) = phi^(1+c) * (-lam*phi)^k
            phi = _exp_initial(md, p.r, mode) - to_scalar(p.r, mode) * t / -neg_lam
            if phi == 0 and k_min < -1 - c:
                raise DomainError("zero phi raised to a negative power")
            base = phi ** int(1 + c)
            ratio = neg_lam * phi
            for i, k in enumerate(range(k_min, k_max + 1)):
                if phi == 0:
                    out[i] += neg_lam ** k * phi ** int(k + 1 + c)
                else:
                    out[i] += base * ratio ** k
        else:
            for i, k in enumerate(range(k_min, k_max + 1)):
                out[i] += neg_lam ** k * mode_weight(md, p, k, t, mode)
    return out


def moment_dot(sys: MomentSystem, k: int, t, mode: str = "float") -> Scalar:
    """Analytic d/dt of the closed-form A_k(t) (chain rule on each mode weight)."""
    check_mode(mode)
    if k < -1:
        raise ValueError("moments are defined for k >= -1")
    p = sys.params
    total = to_scalar(0, mode)
    for md in sys.modes:
        lam = to_scalar(md.lam, mode)
        coef = (-lam) ** k
        if p.r == 0:
            # dW/dt = 2 s a' W with a' = -1/lambda
            total += coef * (-2 * to_scalar(p.s, mode) / lam) * mode_weight(md, p, k, t, mode)
        else:
            e = k + 1 + p.weight_exponent()
            phi = phi_value(md, p, t, mode)
            dphi = -to_scalar(p.r, mode) / lam
            if e == 0:
                continue
            if mode == "exact" or e.denominator == 1:
                total += coef * int(e) * phi ** (int(e) - 1) * dphi
            else:
                if phi <= 0:
                    raise DomainError(f"phi = {phi} raised to non-integer power {e}")
                total += coef * float(e) * phi ** float(e - 1) * dphi
    return total


def moment_ode_rhs(sys: MomentSystem, k: int, t, mode: str = "float") -> Scalar:
    """Right-hand side of the moment law: c_k A_{k-1}, with the k = 1 correction."""
    r, s = to_scalar(sys.params.r, mode), to_scalar(sys.params.s, mode)
    if k == 1:
        return (2 * r + 2 * s) * moment(sys, 0, t, mode) - (r + s)
    return (r * (k + 1) + 2 * s) * moment(sys, k - 1, t, mode)


def moment_derivative_residual(sys: MomentSystem, k: int, t, mode: str = "float") -> Scalar:
    """``A_k'(t) - rhs(t)``; exactly zero in exact mode, ~1e-16 relative in float."""
    if k < 0:
        raise ValueError("the moment law is stated for k >= 0")
    return moment_dot(sys, k, t, mode) - moment_ode_rhs(sys, k, t, mode)


def moment_poly(sys: MomentSystem, k: int) -> Poly:
    """A_k as an exact polynomial in t (requires r != 0 and integral 2s/r >= 0)."""
    p = sys.params
    offset = p.polynomial_offset()
    e = k + 1 + offset
    if e < 0:
        raise ParamError(f"moment A_{k} is not polynomial (exponent {e})")
    r = to_exact(p.r)
    total = Poly.const(HALF) if k == 0 else Poly()
    for md in sys.modes:
        lam = to_exact(md.lam)
        phi = Poly([_exp_initial(md, p.r, "exact"), -r / lam])
        total = total + (phi ** e) * ((-lam) ** k)
    return total
