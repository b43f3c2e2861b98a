"""Greedy maximal coupling of two g-chains started from different pasts.

At every step the two conditional laws are coupled maximally: with
probability sum_a min(pX(a), pY(a)) both chains emit the same symbol,
otherwise each draws from its own normalised residual. Marginals stay
exact, so each coordinate is a g-chain from its own past.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from gchains.config import Config
from gchains.errors import HorizonError, ModelError
from gchains.kernels.base import Kernel
from gchains.kernels.numerics import wilson_interval
from gchains.kernels.past import Past
from gchains.sim.replicas import chunk_ranges, run_chunks
from gchains.sim.rng import NS_COUPLING, RngStream, UniformBlocks, streams

logger = logging.getLogger(__name__)


def _check_laws(p: np.ndarray, name: str):
    if np.any(p < -Config.INPUT_TOL) or np.any(np.abs(p.sum(axis=-1) - 1.0) > Config.INPUT_TOL):
        raise ModelError(f"{name} is not a probability vector within {Config.INPUT_TOL}")


def _pick(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse CDF of unnormalised weights; zero-mass picks fall back to the last positive cell."""
    cdf = np.cumsum(weights, axis=1)
    idx = np.minimum((u[:, None] >= cdf).sum(axis=1), weights.shape[1] - 1)
    rows = np.arange(weights.shape[0])
    empty = weights[rows, idx] <= 0
    if np.any(empty):
        positive = weights[empty] > 0
        last = weights.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1)
        idx[empty] = last
    return idx


def greedy_couple(pX: np.ndarray, pY: np.ndarray, u: np.ndarray) -> tuple:
    """Couple rows of pX and pY (rows, |S|) with uniforms u (rows, 2).

    u[:, 0] chooses between the shared mass [0, w) and the residuals and
    picks the shared or X-residual symbol; u[:, 1] picks the Y-residual symbol.
    """
    pX = np.atleast_2d(np.asarray(pX, dtype=float))
    pY = np.atleast_2d(np.asarray(pY, dtype=float))
    _check_laws(pX, 'pX')
    _check_laws(pY, 'pY')
    overlap = np.minimum(pX, pY)
    w = overlap.sum(axis=1)
    u1, u2 = u[:, 0], u[:, 1]
    shared = u1 < w
    resid = np.maximum(1.0 - w, 0.0)

    a = _pick(pX - overlap, u1 - w)
    b = _pick(pY - overlap, u2 * resid)
    if np.any(shared):
        same = _pick(overlap[shared], u1[shared])
        a[shared] = same
        b[shared] = same
    return a.astype(np.int64), b.astype(np.int64)


def greedy_couple_step(pX, pY, rng: RngStream) -> tuple:
    """(a, b) with a ~ pX, b ~ pY and P(a == b) = sum_a min(pX(a), pY(a))."""
    a, b = greedy_couple(pX, pY, rng.uniforms((1, 2)))
    return int(a[0]), int(b[0])


@dataclass
class CoupledTrajectory:
    past_x: Past
    past_y: Past
    symbols_x: np.ndarray
    symbols_y: np.ndarray
    window: int

    @property
    def horizon(self) -> int:
        return len(self.symbols_x) - 1

    @property
    def last_disagreement(self) -> int:
        """max{t <= T : omega_t != omega'_t}, or -1."""
        return int(last_disagreements(self.symbols_x[None, :], self.symbols_y[None, :])[0])

    @property
    def coupling_time(self) -> int:
        """Observed surrogate of the coupling time: last disagreement + 1."""
        return self.last_disagreement + 1

    @property
    def coupled_at_horizon(self) -> bool:
        """No disagreement in the trailing window of W steps."""
        return self.last_disagreement <= self.horizon - self.window


def last_disagreements(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    differ = x != y
    T1 = x.shape[1]
    last = T1 - 1 - np.argmax(differ[:, ::-1], axis=1)
    return np.where(differ.any(axis=1), last, -1)


def default_window(T: int) -> int:
    return max(1, int(T * Config.COUPLING_WINDOW_FRACTION))


def run_coupled(kernel: Kernel, past_x: Past, past_y: Past, steps: int, blocks: UniformBlocks) -> tuple:
    """(rows, steps) symbol arrays of the two coupled chains."""
    rows = len(blocks.streams)
    sx, sy = kernel.start(past_x, rows), kernel.start(past_y, rows)
    xs = np.empty((rows, steps), dtype=np.int8)
    ys = np.empty((rows, steps), dtype=np.int8)
    for t in range(steps):
        a, b = greedy_couple(sx.probs(), sy.probs(), blocks.next())
        sx.push(a)
        sy.push(b)
        xs[:, t] = a
        ys[:, t] = b
    return xs, ys


def couple_chains(kernel: Kernel, past_x: Past, past_y: Past, T: int, rng: RngStream,
                  window: Optional[int] = None) -> CoupledTrajectory:
    if T < 1:
        raise HorizonError(f"coupling horizon T must be >= 1, got {T}")
    xs, ys = run_coupled(kernel, past_x, past_y, T + 1, UniformBlocks([rng], width=2))
    return CoupledTrajectory(past_x, past_y, xs[0], ys[0], window or default_window(T))


def _coupled_chunk(kernel: Kernel, past_x: Past, past_y: Past, T: int, root_seed: int, namespace: int,
                   start: int, stop: int) -> tuple:
    blocks = UniformBlocks(streams(root_seed, namespace, range(start, stop)), width=2)
    return run_coupled(kernel, past_x, past_y, T + 1, blocks)


def couple_replicas(kernel: Kernel, past_x: Past, past_y: Past, T: int, replicas: int, root_seed: int,
                    workers: Optional[int] = None, namespace: int = NS_COUPLING) -> tuple:
    """(X, Y) arrays of shape (replicas, T+1); replica i uses stream i of `namespace`."""
    if T < 1:
        raise HorizonError(f"coupling horizon T must be >= 1, got {T}")
    chunks = [(kernel, past_x, past_y, T, root_seed, namespace, a, b) for a, b in chunk_ranges(replicas)]
    parts = run_chunks(_coupled_chunk, chunks, workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def coupling_time_tail(kernel: Kernel, past_x: Past, past_y: Past, horizons: Sequence[int], T: int,
                       replicas: int, root_seed: int, window: Optional[int] = None,
                       workers: Optional[int] = None) -> pd.DataFrame:
    """Estimate of P(Theta > n) per n: the fraction of replicas disagreeing somewhere in [n, T].

    Disagreements after T are unobserved; `censored` is the fraction of
    replicas still disagreeing inside the trailing window of W steps.
    """
    horizons = sorted(int(n) for n in horizons)
    W = window or default_window(T)
    if not horizons or horizons[0] < 0 or horizons[-1] + W > T:
        raise HorizonError(f"coupling horizons need 0 <= n and max(n) + W <= T (W={W}, T={T})")
    xs, ys = couple_replicas(kernel, past_x, past_y, T, replicas, root_seed, workers)
    last = last_disagreements(xs, ys)
    censored = float(np.mean(last > T - W))
    rows = []
    for n in horizons:
        hits = int(np.sum(last >= n))
        lo, hi = wilson_interval(hits, replicas)
        rows.append({'n': n, 'tailEstimate': hits / replicas, 'ciLow': lo, 'ciHigh': hi,
                     'replicas': replicas, 'censored': censored})
    logger.info("[coupling] %s vs %s: %d replicas, censored fraction %.4g",
                past_x.describe(), past_y.describe(), replicas, censored)
    return pd.DataFrame(rows, columns=['n', 'tailEstimate', 'ciLow', 'ciHigh', 'replicas', 'censored'])
