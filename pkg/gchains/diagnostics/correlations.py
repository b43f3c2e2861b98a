"""Stationary correlations gamma_j = E[xi_0 xi_j] - E[xi_0]^2 of the +1/-1 process."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.signal import fftconvolve
from scipy.special import zeta

from gchains.config import Config
from gchains.errors import HorizonError, ModelError
from gchains.kernels.base import Kernel, SearchBudget
from gchains.kernels.criteria import oscillation_sup
from gchains.kernels.numerics import compensated_cumsum, loglog_slope
from gchains.kernels.past import Past
from gchains.kernels.series import classify_growth
from gchains.models.autoregressive import ARKernel
from gchains.models.finite_memory import FiniteMemoryKernel
from gchains.oracle.markov import markov_correlations
from gchains.sim.chain import default_burn_in, sample_chains
from gchains.sim.rng import NS_CORRELATION

logger = logging.getLogger(__name__)

GAMMA_COLUMNS = ['j', 'gamma', 'stderr', 'ciLow', 'ciHigh', 'corrected', 'rawPartialSum',
                 'correctedPartialSum', 'exactGamma']
MAX_PROFILE_WINDOW = 64


def autocovariance(xi: np.ndarray, j_max: int, mean: float) -> np.ndarray:
    """(rows, j_max+1) lag-j sample autocovariances of each row around `mean`."""
    L = xi.shape[1]
    x = xi - mean
    full = fftconvolve(x, x[:, ::-1], mode='full', axes=1)
    lags = np.arange(j_max + 1)
    return full[:, L - 1 + lags] / (L - lags)


def batch_autocovariances(xi: np.ndarray, j_max: int, batches: int, mean: float) -> np.ndarray:
    """Autocovariances of `batches` contiguous blocks of every row, stacked as independent units."""
    size = xi.shape[1] // batches
    if size <= j_max:
        raise HorizonError(f"batches of {size} steps cannot resolve lag {j_max}")
    blocks = xi[:, :size * batches].reshape(xi.shape[0] * batches, size)
    return autocovariance(blocks, j_max, mean)


def _default_batches(replicas: int, sample_length: int, j_max: int) -> int:
    if replicas >= 20:
        return 1
    return max(1, min(20, sample_length // (4 * (j_max + 1))))


def dobrushin_profile(kernel: Kernel, j_max: int, window: Optional[int] = None,
                      search: Optional[SearchBudget] = None) -> pd.DataFrame:
    """Shape of the two-point bound A(j) from the one-sided interdependence matrix.

    alpha[i, l] = osc_{i-l} (sup form) for l < i on M + j_max + 1 sites,
    D = (I - alpha)^-1 - I, A(j) = D[M+j, M] + sum_{l <= M} D[M+j, l] D[M, l].
    """
    M = min(window or j_max, MAX_PROFILE_WINDOW)
    n = M + j_max + 1
    osc = np.zeros(n)
    for k in range(1, n):
        osc[k] = oscillation_sup(kernel, k, search).value
    lag = np.subtract.outer(np.arange(n), np.arange(n))
    alpha = np.where(lag > 0, osc[np.clip(lag, 0, n - 1)], 0.0)
    eye = np.eye(n)
    D = linalg.solve_triangular(eye - alpha, eye, lower=True) - eye
    j = np.arange(j_max + 1)
    profile = D[M + j, M] + D[M + j, :M + 1] @ D[M, :M + 1]
    return pd.DataFrame({'j': j, 'profile': profile})


def ar_correlation_bound(kernel: ARKernel, gamma: np.ndarray) -> dict:
    """Summable-correlation bound on sum_n sum_{j,k>n} beta_j beta_k gamma_{j-k}.

    C = gamma_0 + 2 sum |gamma_j| times sum_n n beta_n^2 (Hurwitz zeta for the
    power tail), next to the direct quadratic form over lags <= j_max.
    """
    params = kernel.params
    j_max = gamma.size - 1
    C = float(gamma[0] + 2.0 * np.abs(gamma[1:]).sum())
    head = np.asarray(params.prefix)
    weighted = math.fsum(np.arange(1, head.size + 1) * head ** 2) if head.size else 0.0
    if params.tail is not None and params.tail.c != 0:
        s2 = 2.0 * params.tail.exponent - 1.0
        weighted += params.tail.c ** 2 * float(zeta(s2, params.tail.start_index)) if s2 > 1.0 else math.inf
    beta = params.beta(np.arange(1, j_max + 1))
    idx = np.arange(1, j_max + 1)
    # each pair (j, k) is counted once per n < min(j, k)
    quad = float(beta @ (linalg.toeplitz(gamma[:j_max]) * np.minimum.outer(idx, idx)) @ beta) if j_max else 0.0
    return {
        'correlation_sum': C,
        'beta_weighted_sum': weighted,
        'bound': C * weighted if math.isfinite(weighted) else math.inf,
        'quadratic_form': quad,
        'lags': j_max,
    }


@dataclass
class CorrelationCurve:
    frame: pd.DataFrame
    decay_fit: Optional[dict]
    summability: dict
    profile: Optional[pd.DataFrame] = None
    profile_fit: Optional[dict] = None
    ar_bound: Optional[dict] = None
    burn_in: int = 0
    sample_length: int = 0
    units: int = 0
    caveats: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            'decay_fit': self.decay_fit,
            'summability': self.summability,
            'profile_fit': self.profile_fit,
            'ar_bound': self.ar_bound,
            'burn_in': self.burn_in,
            'sample_length': self.sample_length,
            'batch_units': self.units,
            'caveats': self.caveats,
        }


def _power_fit(j: np.ndarray, values: np.ndarray) -> Optional[dict]:
    fit = loglog_slope(1 + j, np.abs(values), lo_fraction=0.0)
    if fit is None:
        return None
    return {'exponent': -fit['slope'], 'prefactor': math.exp(fit['intercept']),
            'stderr': fit['stderr'], 'points': fit['points']}


def correlation_curve(kernel: Kernel, j_max: int, sample_length: int, replicas: int, root_seed: int,
                      burn_in: Optional[int] = None, tail: Optional[Past] = None,
                      workers: Optional[int] = None, batches: Optional[int] = None,
                      profile: bool = True, search: Optional[SearchBudget] = None) -> CorrelationCurve:
    """gamma_j for j <= j_max from `replicas` runs of `sample_length` steps after burn-in.

    Confidence intervals come from batch means over (replica, block) units.
    """
    if not kernel.alphabet.is_spin:
        raise ModelError("correlation curves need the binary +1/-1 alphabet")
    if j_max < 1 or sample_length <= j_max:
        raise HorizonError(f"need 1 <= j_max < sample_length, got j_max={j_max}, length={sample_length}")
    capped = False
    if burn_in is None:
        burn_in, capped = default_burn_in(kernel)
    tail = tail or Past(kernel.alphabet, (), (0,))

    symbols = sample_chains(kernel, tail, burn_in + sample_length - 1, replicas, root_seed, workers,
                            namespace=NS_CORRELATION)
    xi = kernel.alphabet.values()[symbols[:, burn_in:]]
    mean = float(xi.mean())
    gamma = autocovariance(xi, j_max, mean).mean(axis=0)

    batches = batches or _default_batches(replicas, sample_length, j_max)
    units = batch_autocovariances(xi, j_max, batches, mean)
    count = units.shape[0]
    stderr = units.std(axis=0, ddof=1) / math.sqrt(count) if count > 1 else np.full(j_max + 1, math.nan)
    band = Config.SIGMA_BAND * stderr

    j = np.arange(j_max + 1)
    corrected = np.maximum(np.abs(gamma) - np.nan_to_num(band, nan=0.0), 0.0)
    raw_partial = np.concatenate([[0.0], compensated_cumsum(np.abs(gamma[1:]))])
    corrected_partial = np.concatenate([[0.0], compensated_cumsum(corrected[1:])])
    exact = np.full(j_max + 1, math.nan)
    if isinstance(kernel, FiniteMemoryKernel):
        exact = markov_correlations(kernel, j_max)

    frame = pd.DataFrame({
        'j': j, 'gamma': gamma, 'stderr': stderr, 'ciLow': gamma - band, 'ciHigh': gamma + band,
        'corrected': corrected, 'rawPartialSum': raw_partial, 'correctedPartialSum': corrected_partial,
        'exactGamma': exact,
    }, columns=GAMMA_COLUMNS)

    growth = classify_growth(j[1:], corrected_partial[1:], evidence={'statistic': 'noise-corrected'})
    raw_growth = classify_growth(j[1:], raw_partial[1:], evidence={'statistic': 'raw'})
    summability = {
        'verdict': growth.verdict,
        'corrected': growth.to_dict(),
        'raw': raw_growth.to_dict(),
    }

    curve = CorrelationCurve(frame, _power_fit(j[1:], gamma[1:]), summability,
                             burn_in=burn_in, sample_length=sample_length, units=count)
    if capped:
        curve.caveats.append(f"memory scale capped at {Config.MAX_MEMORY_SCALE} when choosing burn-in")
    if count < 2:
        curve.caveats.append("a single batch unit: no confidence intervals")
    if profile:
        curve.profile = dobrushin_profile(kernel, j_max, search=search)
        curve.profile_fit = _power_fit(j[1:], curve.profile['profile'].to_numpy()[1:])
    if isinstance(kernel, ARKernel):
        curve.ar_bound = ar_correlation_bound(kernel, gamma)
    logger.info("[correlations] %d lags from %d x %d steps: summability %s",
                j_max, replicas, sample_length, growth.verdict)
    return curve
