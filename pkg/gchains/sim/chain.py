"""Forward simulation of g-chains from fixed or approximately stationary pasts."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from gchains.config import Config
from gchains.errors import HorizonError
from gchains.kernels.base import ChainState, Kernel
from gchains.kernels.numerics import inverse_cdf
from gchains.kernels.past import Past
from gchains.sim.replicas import chunk_ranges, run_chunks
from gchains.sim.rng import NS_CHAIN, NS_PAST, RngStream, UniformBlocks, streams

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """omega_0 .. omega_T (symbol indices) emitted after `origin`."""
    origin: Past
    symbols: np.ndarray
    model_ref: str

    @property
    def horizon(self) -> int:
        return len(self.symbols) - 1

    def labels(self) -> list:
        return [self.origin.alphabet.label(int(s)) for s in self.symbols]

    def past_after(self) -> Past:
        """The past seen after the last emitted symbol."""
        return self.origin.push(self.symbols)


def run_state(state: ChainState, steps: int, uniforms: UniformBlocks) -> np.ndarray:
    """Advance `state` by `steps` inverse-CDF draws; returns (rows, steps) symbols."""
    out = np.empty((state.rows, steps), dtype=np.int8)
    for t in range(steps):
        symbols = inverse_cdf(state.probs(), uniforms.next()[:, 0])
        state.push(symbols)
        out[:, t] = symbols
    return out


def _check_horizon(T: int):
    if T < 0:
        raise HorizonError(f"horizon T must be >= 0, got {T}")


def sample_chain(kernel: Kernel, past: Past, T: int, rng: RngStream) -> Trajectory:
    """One trajectory of T+1 symbols; identical to row `rng.stream_id` of sample_chains."""
    _check_horizon(T)
    symbols = run_state(kernel.start(past, 1), T + 1, UniformBlocks([rng]))
    return Trajectory(past, symbols[0], kernel.identity())


def _chain_chunk(kernel: Kernel, past: Past, T: int, root_seed: int, namespace: int,
                 start: int, stop: int) -> np.ndarray:
    blocks = UniformBlocks(streams(root_seed, namespace, range(start, stop)))
    return run_state(kernel.start(past, stop - start), T + 1, blocks)


def sample_chains(kernel: Kernel, past: Past, T: int, replicas: int, root_seed: int,
                  workers: Optional[int] = None, namespace: int = NS_CHAIN,
                  stream_offset: int = 0) -> np.ndarray:
    """(replicas, T+1) symbol indices; row i uses stream stream_offset + i of `namespace`."""
    _check_horizon(T)
    chunks = [(kernel, past, T, root_seed, namespace, stream_offset + a, stream_offset + b)
              for a, b in chunk_ranges(replicas)]
    out = np.concatenate(run_chunks(_chain_chunk, chunks, workers))
    logger.info("[sim] %d chains of length %d from %s", replicas, T + 1, past.describe())
    return out


def default_burn_in(kernel: Kernel) -> tuple:
    """(B, capped): 10 x memory scale, with the scale capped at Config.MAX_MEMORY_SCALE."""
    scale = kernel.memory_scale()
    capped = scale > Config.MAX_MEMORY_SCALE
    return Config.BURN_IN_FACTOR * min(scale, Config.MAX_MEMORY_SCALE), capped


def _stack_past(tail: Past, run: np.ndarray, L: int) -> Past:
    last = run[-L:] if L else run[:0]
    return Past(tail.alphabet, tuple(int(s) for s in last[::-1]) + tail.suffix, tail.tail)


def _check_burn_in(burn_in: int, L: int):
    if L < 0:
        raise HorizonError(f"suffix length must be >= 0, got {L}")
    if burn_in < L:
        raise HorizonError(f"burn-in {burn_in} is shorter than the suffix length {L}")


def sample_stationary_past(kernel: Kernel, burn_in: int, L: int, tail: Past, rng: RngStream) -> Past:
    """Run B steps from `tail` and keep the last L symbols as the new suffix on top of it."""
    _check_burn_in(burn_in, L)
    run = run_state(kernel.start(tail, 1), burn_in, UniformBlocks([rng]))[0]
    return _stack_past(tail, run, L)


def _past_chunk(kernel: Kernel, tail: Past, burn_in: int, L: int, root_seed: int, namespace: int,
                start: int, stop: int) -> list:
    blocks = UniformBlocks(streams(root_seed, namespace, range(start, stop)))
    runs = run_state(kernel.start(tail, stop - start), burn_in, blocks)
    return [_stack_past(tail, row, L) for row in runs]


def sample_stationary_pasts(kernel: Kernel, burn_in: int, L: int, tail: Past, count: int, root_seed: int,
                            workers: Optional[int] = None, namespace: int = NS_PAST) -> list:
    """`count` independent approximately stationary pasts (stream i of `namespace` for past i)."""
    _check_burn_in(burn_in, L)
    chunks = [(kernel, tail, burn_in, L, root_seed, namespace, a, b) for a, b in chunk_ranges(count)]
    pasts = [p for part in run_chunks(_past_chunk, chunks, workers) for p in part]
    logger.info("[sim] sampled %d stationary pasts (burn-in %d, suffix %d)", count, burn_in, L)
    return pasts


def trajectories_frame(symbols: np.ndarray) -> pd.DataFrame:
    """One row per replica: replica, t0 .. tT as integer symbol indices."""
    frame = pd.DataFrame(symbols.astype(np.int64), columns=[f"t{t}" for t in range(symbols.shape[1])])
    frame.insert(0, 'replica', np.arange(symbols.shape[0]))
    return frame


def write_trajectories(path, symbols: np.ndarray):
    trajectories_frame(symbols).to_csv(path, index=False)
