"""Diagnostics: weak-l2 growth, TV decay, beta-mixing and correlation curves, and reports."""

from gchains.diagnostics.weak_l2 import PWeakL2Result, WeakL2Curve, p_weak_l2_curve, weak_l2_curve
from gchains.diagnostics.mixing import (
    BetaMixingCurve,
    TVDecayCurve,
    beta_mixing_curve,
    decay_fits,
    tv_decay_curve,
)
from gchains.diagnostics.correlations import CorrelationCurve, correlation_curve, dobrushin_profile
from gchains.diagnostics.report import DiagnosticsReport, load_report

__all__ = [
    'WeakL2Curve',
    'PWeakL2Result',
    'weak_l2_curve',
    'p_weak_l2_curve',
    'TVDecayCurve',
    'BetaMixingCurve',
    'tv_decay_curve',
    'beta_mixing_curve',
    'decay_fits',
    'CorrelationCurve',
    'correlation_curve',
    'dobrushin_profile',
    'DiagnosticsReport',
    'load_report',
]
