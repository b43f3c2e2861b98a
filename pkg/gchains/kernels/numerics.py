"""Small numerical helpers shared by kernels, oracles and diagnostics."""

import math
from typing import Optional

import numpy as np
from scipy import stats

_CUMSUM_BLOCK = 4096


def compensated_cumsum(values) -> np.ndarray:
    """Cumulative sums with exactly rounded block offsets.

    Each block is summed with numpy, and block totals are accumulated with
    math.fsum, so drift does not grow with the number of blocks.
    """
    x = np.asarray(values, dtype=float).ravel()
    out = np.empty_like(x)
    totals = []
    for start in range(0, x.size, _CUMSUM_BLOCK):
        block = x[start:start + _CUMSUM_BLOCK]
        offset = math.fsum(totals)
        out[start:start + block.size] = offset + np.cumsum(block)
        totals.append(math.fsum(block))
    return out


class KahanAccumulator:
    """Row-wise compensated running sums (one accumulator per replica)."""

    def __init__(self, rows: int):
        self.total = np.zeros(rows)
        self._carry = np.zeros(rows)

    def add(self, values: np.ndarray):
        y = values - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t


def inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Draw one symbol per row by inverse CDF in canonical symbol order."""
    cdf = np.cumsum(probs, axis=1)
    return (u[:, None] >= cdf[:, :-1]).sum(axis=1).astype(np.int64)


def all_words(size: int, length: int) -> np.ndarray:
    """Every word of S^length as rows, lexicographic with column 0 most significant."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    codes = np.arange(size ** length, dtype=np.int64)
    powers = size ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % size


def word_labels(alphabet, words: np.ndarray) -> list:
    return [','.join(alphabet.label(int(s)) for s in row) for row in words]


def half_l1(p: np.ndarray, q: np.ndarray) -> float:
    """sup_B |P[B] - Q[B]| for two probability vectors."""
    return 0.5 * math.fsum(np.abs(np.asarray(p) - np.asarray(q)))


def log_spaced(n_max: int, count: int = 40, start: int = 1) -> np.ndarray:
    """Distinct log-spaced integers in [start, n_max], always containing n_max."""
    if n_max < start:
        return np.array([n_max], dtype=np.int64)
    grid = np.unique(np.geomspace(start, n_max, count).round().astype(np.int64))
    if grid[-1] != n_max:
        grid = np.append(grid, n_max)
    return grid


def loglog_slope(x, y, lo_fraction: float = 0.1) -> Optional[dict]:
    """Least-squares slope of log y against log x over the last decade [x_max/10, x_max].

    Returns None when fewer than two usable points exist.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        return None
    mask = (x >= lo_fraction * x.max()) & (x > 0) & (y > 0)
    if mask.sum() < 2:
        return None
    fit = stats.linregress(np.log(x[mask]), np.log(y[mask]))
    return {
        'slope': float(fit.slope),
        'intercept': float(fit.intercept),
        'stderr': float(fit.stderr),
        'points': int(mask.sum()),
    }


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple:
    if trials == 0:
        return (0.0, 1.0)
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(
        confidence_level=confidence, method='wilson')
    return (float(ci.low), float(ci.high))
