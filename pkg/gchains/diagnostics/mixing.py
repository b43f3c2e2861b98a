"""Total-variation decay between two g-chains and beta-mixing proxies.

The supremum over F_[n, inf) is bracketed by window surrogates on [n, n+w-1]:
an exact window TV from the oracle where the budget allows, a Monte Carlo
histogram TV, and the coupling tail P(Theta > n) as an upper bound.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats
from scipy.optimize import isotonic_regression

from gchains.config import Config
from gchains.errors import HorizonError
from gchains.kernels.base import Kernel
from gchains.kernels.numerics import half_l1, loglog_slope
from gchains.kernels.past import Past
from gchains.coupling.greedy import coupling_time_tail
from gchains.models.finite_memory import FiniteMemoryKernel
from gchains.oracle.enumeration import exact_window_law
from gchains.oracle.markov import exact_pair_beta, second_eigenvalue, transition_matrix
from gchains.sim.chain import default_burn_in, sample_chains, sample_stationary_pasts
from gchains.sim.rng import NS_BETA, NS_TV

logger = logging.getLogger(__name__)

TV_COLUMNS = ['n', 'exact', 'mcTv', 'mcNoise', 'mcLower', 'mcSingle',
              'couplingTail', 'couplingCiLow', 'couplingCiHigh', 'couplingSigma', 'censored']
BETA_COLUMNS = ['n', 'beta', 'stderr', 'betaIsotonic', 'exactPairs', 'exactBeta']


def _check_window(size: int, horizons: Sequence[int], width: int) -> list:
    horizons = sorted({int(n) for n in horizons})
    if not horizons or horizons[0] < 0:
        raise HorizonError("window offsets n must be >= 0")
    if width < 1:
        raise HorizonError(f"window width must be >= 1, got {width}")
    if size ** width > Config.MAX_HISTOGRAM_CELLS:
        raise HorizonError(f"|S|^w = {size ** width} exceeds {Config.MAX_HISTOGRAM_CELLS} histogram cells")
    return horizons


def window_codes(symbols: np.ndarray, size: int, n: int, width: int) -> np.ndarray:
    """Lexicographic cell index of symbols[:, n : n+width], first coordinate most significant."""
    codes = np.zeros(symbols.shape[0], dtype=np.int64)
    for i in range(width):
        codes = codes * size + symbols[:, n + i]
    return codes


def window_histogram(symbols: np.ndarray, size: int, n: int, width: int) -> np.ndarray:
    codes = window_codes(symbols, size, n, width)
    return np.bincount(codes, minlength=size ** width) / symbols.shape[0]


def histogram_tv(xs: np.ndarray, ys: np.ndarray, size: int, n: int, width: int) -> tuple:
    """(TV of the empirical window laws, noise half-width from the per-cell standard errors)."""
    px = window_histogram(xs, size, n, width)
    py = window_histogram(ys, size, n, width)
    var = px * (1 - px) / xs.shape[0] + py * (1 - py) / ys.shape[0]
    return half_l1(px, py), 0.5 * math.fsum(np.sqrt(var))


def _exact_windows(kernel: Kernel, past: Past, horizons: list, width: int, budget: int) -> Optional[list]:
    """Exact window laws for every offset from one enumeration, or None when over budget."""
    depth = horizons[-1] + width
    if kernel.alphabet.size ** depth > budget:
        return None
    full = exact_window_law(kernel, past, 0, depth - 1, budget)
    return [full.marginal(n, n + width - 1).probs for n in horizons]


@dataclass
class TVDecayCurve:
    past_x: Past
    past_y: Past
    width: int
    frame: pd.DataFrame
    degraded: bool = False
    ordering_violations: int = 0
    coupling_horizon: int = 0

    def summary(self) -> dict:
        return {
            'past_x': self.past_x.describe(),
            'past_y': self.past_y.describe(),
            'width': self.width,
            'exact_available': not self.degraded,
            'degraded': self.degraded,
            'ordering_violations': self.ordering_violations,
            'coupling_horizon': self.coupling_horizon,
        }


def tv_decay_curve(kernel: Kernel, past_x: Past, past_y: Past, horizons: Sequence[int], width: int,
                   replicas: int, root_seed: int, workers: Optional[int] = None,
                   budget: Optional[int] = None) -> TVDecayCurve:
    """Three TV curves over offsets n for the window [n, n+width-1].

    The Monte Carlo chains from both pasts share their streams, so equal
    pasts give identical samples and a zero curve.
    """
    size = kernel.alphabet.size
    horizons = _check_window(size, horizons, width)
    budget = budget or Config.ORACLE_BUDGET
    last = horizons[-1] + width - 1

    exact_x = _exact_windows(kernel, past_x, horizons, width, budget)
    exact_y = _exact_windows(kernel, past_y, horizons, width, budget) if exact_x is not None else None
    degraded = exact_y is None
    if degraded:
        logger.warning("[mixing] S^%d paths exceed the oracle budget %d, exact curve dropped",
                       last + 1, budget)

    xs = sample_chains(kernel, past_x, last, replicas, root_seed, workers, namespace=NS_TV)
    ys = sample_chains(kernel, past_y, last, replicas, root_seed, workers, namespace=NS_TV)

    T = 2 * (horizons[-1] + width)
    tail = coupling_time_tail(kernel, past_x, past_y, horizons, T, replicas, root_seed, workers=workers)

    rows = []
    violations = 0
    for i, n in enumerate(horizons):
        mc, noise = histogram_tv(xs, ys, size, n, width)
        single, _ = histogram_tv(xs, ys, size, n, 1)
        t = tail.iloc[i]
        sigma = math.sqrt(t['tailEstimate'] * (1 - t['tailEstimate']) / replicas)
        ceiling = max(t['ciHigh'], t['tailEstimate'] + Config.SIGMA_BAND * sigma)
        exact = half_l1(exact_x[i], exact_y[i]) if not degraded else math.nan
        mc_lower = max(mc - noise, 0.0)
        if (not degraded and exact > ceiling) or mc_lower > ceiling:
            violations += 1
        rows.append({
            'n': n, 'exact': exact, 'mcTv': mc, 'mcNoise': noise, 'mcLower': mc_lower, 'mcSingle': single,
            'couplingTail': t['tailEstimate'], 'couplingCiLow': t['ciLow'], 'couplingCiHigh': t['ciHigh'],
            'couplingSigma': sigma, 'censored': t['censored'],
        })
    if violations:
        logger.warning("[mixing] %d offsets where a lower curve exceeds the coupling bound", violations)
    return TVDecayCurve(past_x, past_y, width, pd.DataFrame(rows, columns=TV_COLUMNS), degraded, violations, T)


def decay_fits(horizons, values) -> dict:
    """Power-law and geometric fits of a decaying curve (positive values only)."""
    n = np.asarray(horizons, dtype=float)
    y = np.asarray(values, dtype=float)
    fits = {'power': None, 'geometric': None}
    power = loglog_slope(n, y, lo_fraction=0.0)
    if power:
        fits['power'] = {'exponent': -power['slope'], 'prefactor': math.exp(power['intercept']),
                         'stderr': power['stderr'], 'points': power['points']}
    mask = y > 0
    if mask.sum() >= 2 and np.ptp(n[mask]) > 0:
        fit = stats.linregress(n[mask], np.log(y[mask]))
        fits['geometric'] = {'rate': math.exp(fit.slope), 'prefactor': math.exp(fit.intercept),
                             'stderr': float(fit.stderr), 'points': int(mask.sum())}
    return fits


@dataclass
class BetaMixingCurve:
    width: int
    pairs: int
    frame: pd.DataFrame
    fits: dict
    burn_in: int
    suffix_length: int
    burn_in_capped: bool = False
    spectral_rate: Optional[float] = None
    caveats: list = field(default_factory=list)

    @property
    def relative_drop(self) -> float:
        """1 - beta(last) / beta(first) on the isotonic curve."""
        iso = self.frame['betaIsotonic'].to_numpy()
        return 1.0 - iso[-1] / iso[0] if iso[0] > 0 else 0.0

    def summary(self) -> dict:
        return {
            'width': self.width,
            'pairs': self.pairs,
            'exact_pairs': int(self.frame['exactPairs'].iloc[0]) if len(self.frame) else 0,
            'fits': self.fits,
            'relative_drop': self.relative_drop,
            'burn_in': self.burn_in,
            'suffix_length': self.suffix_length,
            'burn_in_capped': self.burn_in_capped,
            'spectral_rate': self.spectral_rate,
            'caveats': self.caveats,
        }


def _pair_tv(kernel: Kernel, px: Past, py: Past, horizons: list, width: int, replicas: int,
             root_seed: int, offset: int, budget: int, workers: Optional[int]) -> tuple:
    """(window TV per offset, exact?) for one past pair."""
    laws_x = _exact_windows(kernel, px, horizons, width, budget)
    if laws_x is not None:
        laws_y = _exact_windows(kernel, py, horizons, width, budget)
        return np.array([half_l1(a, b) for a, b in zip(laws_x, laws_y)]), True
    last = horizons[-1] + width - 1
    xs, ys = (sample_chains(kernel, past, last, replicas, root_seed, workers, namespace=NS_BETA,
                            stream_offset=offset) for past in (px, py))
    size = kernel.alphabet.size
    return np.array([histogram_tv(xs, ys, size, n, width)[0] for n in horizons]), False


def beta_mixing_curve(kernel: Kernel, horizons: Sequence[int], width: int, pairs: int, root_seed: int,
                      tail: Optional[Past] = None, burn_in: Optional[int] = None,
                      suffix_length: Optional[int] = None, replicas: int = 1000,
                      workers: Optional[int] = None, budget: Optional[int] = None) -> BetaMixingCurve:
    """beta(n) proxy: mean window TV between P^x and P^y over stationary past pairs (x, y)."""
    size = kernel.alphabet.size
    horizons = _check_window(size, horizons, width)
    if pairs < 1:
        raise HorizonError(f"need at least one past pair, got {pairs}")
    budget = budget or Config.PAIR_ORACLE_BUDGET
    capped = False
    if burn_in is None:
        burn_in, capped = default_burn_in(kernel)
    suffix_length = burn_in if suffix_length is None else suffix_length
    tail = tail or Past(kernel.alphabet, (), (0,))

    pasts = sample_stationary_pasts(kernel, burn_in, suffix_length, tail, 2 * pairs, root_seed, workers)
    values = np.empty((pairs, len(horizons)))
    exact_pairs = 0
    for p in range(pairs):
        values[p], exact = _pair_tv(kernel, pasts[2 * p], pasts[2 * p + 1], horizons, width, replicas,
                                    root_seed, p * replicas, budget, workers)
        exact_pairs += int(exact)

    beta = values.mean(axis=0)
    stderr = values.std(axis=0, ddof=1) / math.sqrt(pairs) if pairs > 1 else np.zeros(len(horizons))
    iso = isotonic_regression(beta, weights=None, increasing=False).x

    exact_beta = np.full(len(horizons), math.nan)
    spectral = None
    if isinstance(kernel, FiniteMemoryKernel) and kernel.contexts ** 2 <= Config.PAIR_ORACLE_BUDGET:
        exact_beta = np.array([exact_pair_beta(kernel, n, width) for n in horizons])
        spectral = second_eigenvalue(transition_matrix(kernel))

    frame = pd.DataFrame({'n': horizons, 'beta': beta, 'stderr': stderr, 'betaIsotonic': iso,
                          'exactPairs': exact_pairs, 'exactBeta': exact_beta}, columns=BETA_COLUMNS)
    caveats = [f"window surrogate [n, n+{width - 1}] for the future sigma-algebra",
               f"stationary pasts approximated by {burn_in} burn-in steps, suffix length {suffix_length}"]
    if capped:
        caveats.append(f"memory scale capped at {Config.MAX_MEMORY_SCALE} when choosing burn-in")
    if exact_pairs < pairs:
        caveats.append(f"{pairs - exact_pairs} pairs estimated from {replicas} replicas (histogram bias)")
    logger.info("[mixing] beta curve over %d pairs (%d exact), width %d", pairs, exact_pairs, width)
    return BetaMixingCurve(width, pairs, frame, decay_fits(horizons, iso), burn_in, suffix_length,
                           capped, spectral, caveats)
