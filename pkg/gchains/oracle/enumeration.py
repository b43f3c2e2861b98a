"""Exact window laws and pair expectations by full path enumeration.

The prefix tree is expanded breadth first: level t holds every history
omega_0 .. omega_{t-1} as one row of a vectorised chain state, so each
prefix is evaluated once and its probability is reused by all of its
extensions. Rows stay in lexicographic order (omega_0 most significant).
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from gchains.config import Config
from gchains.errors import BudgetExceededError, HorizonError
from gchains.kernels.base import Kernel
from gchains.kernels.numerics import all_words, half_l1, word_labels
from gchains.kernels.past import Past

logger = logging.getLogger(__name__)


@dataclass
class WindowLaw:
    """Law of (omega_t0 .. omega_t1) under P^past, lexicographic over S^(t1-t0+1)."""
    past: Past
    t0: int
    t1: int
    probs: np.ndarray
    evaluations: int = 0
    wall_time: float = 0.0

    @property
    def width(self) -> int:
        return self.t1 - self.t0 + 1

    def marginal(self, t0: int, t1: int) -> 'WindowLaw':
        """Law of a sub-window [t0, t1] inside [self.t0, self.t1]."""
        if not self.t0 <= t0 <= t1 <= self.t1:
            raise HorizonError(f"[{t0}, {t1}] is not inside [{self.t0}, {self.t1}]")
        S = self.past.alphabet.size
        cube = self.probs.reshape((S ** (t0 - self.t0), S ** (t1 - t0 + 1), S ** (self.t1 - t1)))
        return WindowLaw(self.past, t0, t1, cube.sum(axis=(0, 2)), self.evaluations, self.wall_time)

    def words(self) -> np.ndarray:
        return all_words(self.past.alphabet.size, self.width)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'configuration': word_labels(self.past.alphabet, self.words()),
            'probability': self.probs,
        })


@dataclass
class OracleResult:
    value: float
    curve: np.ndarray = field(default_factory=lambda: np.zeros(0))
    evaluations: int = 0
    wall_time: float = 0.0
    sandwich_violations: int = 0

    def to_dict(self) -> dict:
        return {
            'value': self.value,
            'curve': self.curve.tolist(),
            'evaluations': self.evaluations,
            'wall_time': self.wall_time,
            'sandwich_violations': self.sandwich_violations,
        }


def _walk(kernel: Kernel, pasts: Sequence[Past], depth: int, budget: Optional[int], what: str,
          visit: Optional[Callable] = None, laws_at_end: bool = False) -> tuple:
    """Expand all histories of length `depth` under pasts[0].

    visit(t, laws, weight) sees the (n_pasts, S^t, |S|) conditional laws at
    every level t < depth (and t == depth when `laws_at_end`) next to the
    path probabilities of the level. Returns (weights over S^depth, evaluations).
    """
    budget = budget or Config.ORACLE_BUDGET
    S = kernel.alphabet.size
    needed = S ** depth
    if needed > budget:
        raise BudgetExceededError(needed, budget, what)
    state = kernel.start_shared(list(pasts), 1)
    weight = np.ones(1)
    evaluations = 0
    for t in range(depth + 1):
        if t == depth and not laws_at_end:
            break
        laws = state.probs_all()
        evaluations += laws.shape[0] * laws.shape[1]
        if visit is not None:
            visit(t, laws, weight)
        if t == depth:
            break
        weight = (weight[:, None] * laws[0]).ravel()
        rows = state.rows
        state = state.repeat(S)
        state.push(np.tile(np.arange(S), rows))
    return weight, evaluations


def _check_window(t0: int, t1: int):
    if not 0 <= t0 <= t1:
        raise HorizonError(f"window needs 0 <= t0 <= t1, got [{t0}, {t1}]")


def exact_window_law(kernel: Kernel, past: Past, t0: int, t1: int, budget: Optional[int] = None) -> WindowLaw:
    """Enumerate omega_0 .. omega_t1 and marginalise onto [t0, t1]."""
    _check_window(t0, t1)
    started = time.perf_counter()
    weight, evaluations = _walk(kernel, [past], t1 + 1, budget, 'window law')
    full = WindowLaw(past, 0, t1, weight, evaluations)
    law = full.marginal(t0, t1) if t0 else full
    law.wall_time = time.perf_counter() - started
    logger.debug("[oracle] window [%d, %d] from %s: %d evaluations", t0, t1, past.describe(), evaluations)
    return law


def exact_window_tv(kernel: Kernel, past_x: Past, past_y: Past, t0: int, t1: int,
                    budget: Optional[int] = None) -> OracleResult:
    """sup_B |P^x[B] - P^y[B]| over events of the window: half the L1 distance of the laws."""
    started = time.perf_counter()
    law_x = exact_window_law(kernel, past_x, t0, t1, budget)
    law_y = exact_window_law(kernel, past_y, t0, t1, budget)
    return OracleResult(
        value=half_l1(law_x.probs, law_y.probs),
        evaluations=law_x.evaluations + law_y.evaluations,
        wall_time=time.perf_counter() - started,
    )


def _pair_expectations(kernel: Kernel, past_x: Past, past_y: Past, N: int, budget: Optional[int]) -> tuple:
    """Per-n expectations under P^x of the squared-difference and Hellinger increments.

    Increment n compares g(. | omega_0 .. omega_n x) with g(. | omega_0 .. omega_n y).
    """
    if N < 0:
        raise HorizonError(f"N must be >= 0, got {N}")
    gamma = kernel.non_null_bound
    squared = np.zeros(N + 1)
    hellinger = np.zeros(N + 1)
    violations = [0]

    def visit(t, laws, weight):
        if t == 0:
            return
        gx, gy = laws[0], laws[1]
        inc = ((gx - gy) ** 2).sum(axis=1)
        d = ((np.sqrt(gx) - np.sqrt(gy)) ** 2).sum(axis=1)
        low = 4.0 * gamma * d - inc > Config.PROB_TOL
        high = inc - 4.0 * (1.0 - gamma) * d > Config.PROB_TOL
        violations[0] += int(np.sum(low | high))
        squared[t - 1] = math.fsum(weight * inc)
        hellinger[t - 1] = math.fsum(weight * d)

    _, evaluations = _walk(kernel, [past_x, past_y], N + 1, budget, 'pair expectation',
                           visit=visit, laws_at_end=True)
    return squared, hellinger, evaluations, violations[0]


def exact_weak_l2_expectation(kernel: Kernel, past_x: Past, past_y: Past, N: int,
                              budget: Optional[int] = None) -> OracleResult:
    """E_{P^x}[D_N] with D_N = sum_{n<=N} sum_a (g(a | omega_0^n x) - g(a | omega_0^n y))^2.

    `curve` holds the expected increment of every n.
    """
    started = time.perf_counter()
    squared, _, evaluations, violations = _pair_expectations(kernel, past_x, past_y, N, budget)
    return OracleResult(math.fsum(squared), squared, evaluations, time.perf_counter() - started, violations)


def exact_hellinger_increments(kernel: Kernel, past_x: Past, past_y: Past, N: int,
                               budget: Optional[int] = None) -> OracleResult:
    """n -> E_{P^x}[d_n], d_n = sum_a (sqrt g(a | omega_0^n x) - sqrt g(a | omega_0^n y))^2.

    `sandwich_violations` counts enumerated histories where
    4 gamma d_n <= increment <= 4 (1 - gamma) d_n fails beyond 1e-12.
    """
    started = time.perf_counter()
    _, hellinger, evaluations, violations = _pair_expectations(kernel, past_x, past_y, N, budget)
    return OracleResult(math.fsum(hellinger), hellinger, evaluations, time.perf_counter() - started, violations)
