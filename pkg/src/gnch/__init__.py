"""Multipeakon solutions of a two-parameter Camassa-Holm generalisation.

Closed-form peakons from Hankel determinants of moment sequences, exact
checks of the determinant identities behind them, an RK4 cross-check of the
peakon ODEs and the affine drift of the string spectrum.
"""
from .errors import (BranchCrossingError, ConvergenceError, DomainError, GnchError, ParamError,
                     SingularError, TurningPointError)
from .moments import PRESETS, GnchParams, MomentSystem, SpectralMode, moment
from .peakon import PeakonState, StringConfig, eval_u, peakon_state, string_config
from .dynamics import OdeSettings, compare_closed_form, integrate
from .spectral import characteristic_polynomial, drift_fit, string_eigenvalues

__all__ = [
    "BranchCrossingError", "ConvergenceError", "DomainError", "GnchError", "ParamError",
    "SingularError", "TurningPointError", "PRESETS", "GnchParams", "MomentSystem", "SpectralMode",
    "moment", "PeakonState", "StringConfig", "eval_u", "peakon_state", "string_config",
    "OdeSettings", "compare_closed_form", "integrate", "characteristic_polynomial", "drift_fit",
    "string_eigenvalues",
]
__version__ = "0.1.0"
