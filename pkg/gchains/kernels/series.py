"""Convergence classification of nonnegative series from finitely many terms."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from gchains.config import Config
from gchains.kernels.numerics import compensated_cumsum, loglog_slope

CONVERGENT = 'convergent'
DIVERGENT = 'divergent'
INCONCLUSIVE = 'inconclusive'

_CERTIFIED_REASONS = (
    'analytic certificate',
    'finite remainder bound',
    'infinite remainder with growing partial sums',
)


@dataclass
class SeriesClassification:
    """Partial sums S_N, an optional certified remainder bound, and a verdict."""
    horizons: np.ndarray
    partial_sums: np.ndarray
    verdict: str
    analytic_tail_bound: Optional[float] = None
    evidence: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        """True when the verdict rests on an analytic bound rather than a slope fit."""
        return self.evidence.get('reason') in _CERTIFIED_REASONS

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1]) if self.partial_sums.size else 0.0

    def to_dict(self) -> dict:
        return {
            'verdict': self.verdict,
            'total': self.total,
            'analytic_tail_bound': self.analytic_tail_bound,
            'evidence': self.evidence,
        }


def classify_series(terms, horizons=None, tail_bound: Optional[float] = None,
                    certified: Optional[str] = None, evidence: Optional[dict] = None) -> SeriesClassification:
    """Classify sum(terms).

    `tail_bound` is a certified bound on the remainder after the last term
    (math.inf when the remainder is known to be infinite). `certified`
    forces a verdict established analytically by the caller.
    Without certification: convergent when the log-log slope of the partial
    sums over the last decade is below Config.CONVERGENT_SLOPE, divergent
    when it exceeds Config.DIVERGENT_SLOPE, inconclusive in between.
    """
    terms = np.asarray(terms, dtype=float)
    if horizons is None:
        horizons = np.arange(1, terms.size + 1)
    horizons = np.asarray(horizons)
    partial = compensated_cumsum(terms)
    info = dict(evidence or {})
    nonneg = bool(np.all(terms >= 0))
    info['nonnegative_terms'] = nonneg

    fit = loglog_slope(horizons, partial) if partial.size else None
    slope = fit['slope'] if fit else 0.0
    info['growth_slope'] = slope
    if tail_bound is not None:
        info['remainder_bound'] = tail_bound

    if certified is not None:
        verdict = certified
        info['reason'] = 'analytic certificate'
    elif tail_bound is not None and math.isfinite(tail_bound):
        verdict = CONVERGENT
        info['reason'] = 'finite remainder bound'
    elif tail_bound is not None and math.isinf(tail_bound) and nonneg and slope > 0:
        verdict = DIVERGENT
        info['reason'] = 'infinite remainder with growing partial sums'
    elif partial.size == 0 or (nonneg and not np.any(partial > 0)):
        verdict = CONVERGENT
        info['reason'] = 'all terms vanish'
    elif slope < Config.CONVERGENT_SLOPE:
        verdict = CONVERGENT
        info['reason'] = f'growth slope below {Config.CONVERGENT_SLOPE}'
    elif slope > Config.DIVERGENT_SLOPE:
        verdict = DIVERGENT
        info['reason'] = f'growth slope above {Config.DIVERGENT_SLOPE}'
    else:
        verdict = INCONCLUSIVE
        info['reason'] = 'growth slope between thresholds'

    return SeriesClassification(
        horizons=horizons,
        partial_sums=partial,
        verdict=verdict,
        analytic_tail_bound=tail_bound,
        evidence=info,
    )


def classify_growth(horizons, partial_sums, evidence: Optional[dict] = None) -> SeriesClassification:
    """Classify observed partial sums (e.g. median D_N) by their log-log slope over the last decade.

    convergent (bounded) below Config.CONVERGENT_SLOPE, divergent above
    Config.DIVERGENT_SLOPE when the sums never decrease, inconclusive otherwise.
    """
    horizons = np.asarray(horizons)
    partial = np.asarray(partial_sums, dtype=float)
    info = dict(evidence or {})
    fit = loglog_slope(horizons, partial) if partial.size else None
    slope = fit['slope'] if fit else 0.0
    info['growth_slope'] = slope
    if fit:
        info['slope_stderr'] = fit['stderr']
    monotone = bool(np.all(np.diff(partial) >= -Config.PROB_TOL))
    info['monotone'] = monotone

    if partial.size == 0 or not np.any(partial > 0):
        verdict, info['reason'] = CONVERGENT, 'all terms vanish'
    elif slope < Config.CONVERGENT_SLOPE:
        verdict, info['reason'] = CONVERGENT, f'growth slope below {Config.CONVERGENT_SLOPE}'
    elif slope > Config.DIVERGENT_SLOPE and monotone:
        verdict, info['reason'] = DIVERGENT, f'growth slope above {Config.DIVERGENT_SLOPE}'
    else:
        verdict, info['reason'] = INCONCLUSIVE, 'growth slope between thresholds'
    return SeriesClassification(horizons=horizons, partial_sums=partial, verdict=verdict, evidence=info)
