"""Monte Carlo weak-l2 partial sums D_N along simulated histories.

D_N(omega; x, y) = sum_{n <= N} sum_a (g(a | omega_0^n x) - g(a | omega_0^n y))^2
with omega drawn from the chain started at x. Every step also checks the
Hellinger sandwich 4 gamma d_n <= increment <= 4 (1 - gamma) d_n.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from gchains.config import Config
from gchains.errors import HorizonError
from gchains.kernels.base import Kernel
from gchains.kernels.numerics import KahanAccumulator, inverse_cdf, log_spaced
from gchains.kernels.past import Past
from gchains.kernels.series import CONVERGENT, DIVERGENT, INCONCLUSIVE, SeriesClassification, classify_growth
from gchains.sim.chain import sample_stationary_pasts
from gchains.sim.replicas import chunk_ranges, run_chunks
from gchains.sim.rng import NS_PAST, NS_WEAK_L2, UniformBlocks, streams

logger = logging.getLogger(__name__)

MIN_REPLICAS = 100
QUANTILES = (0.1, 0.5, 0.9)


@dataclass
class WeakL2Curve:
    past_x: Past
    past_y: Past
    horizons: np.ndarray
    partial_sums: np.ndarray  # (replicas, len(horizons))
    classification: SeriesClassification
    quantile_verdicts: dict
    sandwich_violations: int = 0
    steps_checked: int = 0
    bound_violations: int = 0

    @property
    def verdict(self) -> str:
        return self.classification.verdict

    @property
    def bounded(self) -> bool:
        return self.verdict == CONVERGENT

    def quantile(self, q: float) -> np.ndarray:
        return np.quantile(self.partial_sums, q, axis=0)

    def mean(self) -> np.ndarray:
        return self.partial_sums.mean(axis=0)

    def stderr(self) -> np.ndarray:
        R = self.partial_sums.shape[0]
        return self.partial_sums.std(axis=0, ddof=1) / np.sqrt(R) if R > 1 else np.zeros(len(self.horizons))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'N': self.horizons, 'mean': self.mean(), 'stderr': self.stderr()})
        for q in QUANTILES:
            frame[f"q{int(round(q * 100)):02d}"] = self.quantile(q)
        return frame

    def summary(self) -> dict:
        return {
            'past_x': self.past_x.describe(),
            'past_y': self.past_y.describe(),
            'replicas': int(self.partial_sums.shape[0]),
            'verdict': self.verdict,
            'classification': self.classification.to_dict(),
            'quantile_verdicts': self.quantile_verdicts,
            'sandwich_violations': self.sandwich_violations,
            'steps_checked': self.steps_checked,
            'bound_violations': self.bound_violations,
        }


def _weak_l2_chunk(kernel: Kernel, past_x: Past, past_y: Past, N: int, horizons: np.ndarray,
                   root_seed: int, namespace: int, start: int, stop: int) -> tuple:
    rows = stop - start
    blocks = UniformBlocks(streams(root_seed, namespace, range(start, stop)))
    state = kernel.start_shared([past_x, past_y], rows)
    gamma = kernel.non_null_bound
    total = KahanAccumulator(rows)
    out = np.empty((rows, len(horizons)))
    record = {int(n): i for i, n in enumerate(horizons)}
    violations = 0
    over = 0
    laws = state.probs_all()
    for n in range(N + 1):
        state.push(inverse_cdf(laws[0], blocks.next()[:, 0]))
        laws = state.probs_all()
        gx, gy = laws[0], laws[1]
        inc = ((gx - gy) ** 2).sum(axis=1)
        d = ((np.sqrt(gx) - np.sqrt(gy)) ** 2).sum(axis=1)
        bad = (4.0 * gamma * d - inc > Config.PROB_TOL) | (inc - 4.0 * (1.0 - gamma) * d > Config.PROB_TOL)
        violations += int(bad.sum())
        total.add(inc)
        if n in record:
            out[:, record[n]] = total.total
            # sum_a (p - q)^2 <= 2 per step
            over += int(np.sum(total.total > 2.0 * (n + 1) + Config.PROB_TOL))
    return out, violations, rows * (N + 1), over


def weak_l2_curve(kernel: Kernel, past_x: Past, past_y: Past, N: int, replicas: int, root_seed: int,
                  workers: Optional[int] = None, namespace: int = NS_WEAK_L2, stream_offset: int = 0,
                  horizons=None) -> WeakL2Curve:
    """D_N at log-spaced N in [1, N] for `replicas` histories from past_x.

    Verdict from the median curve: bounded when its log-log slope over the
    last decade is below 0.05, divergent above 0.2, inconclusive between.
    """
    if N < 1:
        raise HorizonError(f"weak-l2 horizon N must be >= 1, got {N}")
    if replicas < MIN_REPLICAS:
        raise HorizonError(f"weak-l2 curves need at least {MIN_REPLICAS} replicas, got {replicas}")
    horizons = log_spaced(N) if horizons is None else np.unique(np.asarray(horizons, dtype=np.int64))
    if horizons[0] < 0 or horizons[-1] > N:
        raise HorizonError(f"weak-l2 horizons must lie in [0, {N}]")

    chunks = [(kernel, past_x, past_y, N, horizons, root_seed, namespace, stream_offset + a, stream_offset + b)
              for a, b in chunk_ranges(replicas)]
    parts = run_chunks(_weak_l2_chunk, chunks, workers)
    sums = np.concatenate([p[0] for p in parts])
    violations = sum(p[1] for p in parts)
    steps = sum(p[2] for p in parts)
    over = sum(p[3] for p in parts)

    quantile_verdicts = {}
    for q in QUANTILES:
        quantile_verdicts[f"q{int(round(q * 100)):02d}"] = classify_growth(
            horizons, np.quantile(sums, q, axis=0)).verdict
    classification = classify_growth(horizons, np.median(sums, axis=0), evidence={'statistic': 'median'})
    if violations:
        logger.warning("[weak-l2] %d Hellinger sandwich violations in %d steps", violations, steps)
    logger.info("[weak-l2] %s vs %s, N=%d, %d replicas: %s",
                past_x.describe(), past_y.describe(), N, replicas, classification.verdict)
    return WeakL2Curve(past_x, past_y, horizons, sums, classification, quantile_verdicts,
                       violations, steps, over)


@dataclass
class PWeakL2Result:
    """weak-l2 curves over independent pairs of approximately stationary pasts."""
    curves: list
    burn_in: int
    suffix_length: int
    burn_in_capped: bool = False
    caveats: list = field(default_factory=list)

    def verdict_counts(self) -> dict:
        counts = {CONVERGENT: 0, DIVERGENT: 0, INCONCLUSIVE: 0}
        for c in self.curves:
            counts[c.verdict] += 1
        return counts

    @property
    def bounded_fraction(self) -> float:
        return self.verdict_counts()[CONVERGENT] / len(self.curves) if self.curves else 0.0

    def to_frame(self) -> pd.DataFrame:
        frames = []
        for i, c in enumerate(self.curves):
            frame = c.to_frame()
            frame.insert(0, 'pair', i)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    def summary(self) -> dict:
        return {
            'pairs': len(self.curves),
            'verdict_counts': self.verdict_counts(),
            'bounded_fraction': self.bounded_fraction,
            'burn_in': self.burn_in,
            'suffix_length': self.suffix_length,
            'burn_in_capped': self.burn_in_capped,
            'caveats': self.caveats,
            'pair_verdicts': [c.verdict for c in self.curves],
        }


def p_weak_l2_curve(kernel: Kernel, tail: Past, burn_in: int, suffix_length: int, pairs: int, N: int,
                    replicas: int, root_seed: int, workers: Optional[int] = None,
                    burn_in_capped: bool = False) -> PWeakL2Result:
    """Draw `pairs` independent stationary past pairs and run weak_l2_curve on each."""
    if pairs < 1:
        raise HorizonError(f"need at least one past pair, got {pairs}")
    pasts = sample_stationary_pasts(kernel, burn_in, suffix_length, tail, 2 * pairs, root_seed,
                                    workers, namespace=NS_PAST)
    curves = [weak_l2_curve(kernel, pasts[2 * i], pasts[2 * i + 1], N, replicas, root_seed, workers,
                            stream_offset=i * replicas)
              for i in range(pairs)]
    caveats = [f"stationary pasts approximated by {burn_in} burn-in steps, suffix length {suffix_length}"]
    if burn_in_capped:
        caveats.append(f"memory scale capped at {Config.MAX_MEMORY_SCALE} when choosing burn-in")
    if any(c.verdict == DIVERGENT for c in curves):
        caveats.append("some stationary pairs diverge: stationary-past approximations may be past dependent")
    return PWeakL2Result(curves, burn_in, suffix_length, burn_in_capped, caveats)
