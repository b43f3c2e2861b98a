"""Finite-memory kernels: g(a | x) depends on x_{-1} .. x_{-k} only.

Context codes put the oldest symbol x_{-k} in the most significant digit,
so table rows follow `all_words(|S|, k)` read as chronological words.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from gchains.config import Config
from gchains.errors import ModelError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.base import EXACT, ChainState, Estimate, Kernel, SearchBudget
from gchains.kernels.criteria import probs_after
from gchains.kernels.numerics import all_words
from gchains.kernels.past import Past

logger = logging.getLogger(__name__)


class FiniteMemoryKernel(Kernel):
    family = 'finite-memory'

    def __init__(self, alphabet: Alphabet, order: int, table, non_null_bound: Optional[float] = None):
        if order < 0:
            raise ModelError(f"finite-memory order must be >= 0, got {order}")
        S = alphabet.size
        table = np.array(table, dtype=float)
        if table.shape != (S ** order, S):
            raise ModelError(f"finite-memory table must have shape {(S ** order, S)}, got {table.shape}")
        if np.any(table < 0) or np.any(np.abs(table.sum(axis=1) - 1.0) > Config.PROB_TOL):
            raise ModelError("finite-memory table rows must be probability vectors")
        floor = float(table.min())
        if non_null_bound is None:
            non_null_bound = floor
        elif non_null_bound > floor + Config.PROB_TOL:
            raise ModelError(f"declared non-null bound {non_null_bound} exceeds the smallest entry {floor}")
        super().__init__(alphabet, non_null_bound, monotone=order == 0)
        self.order = order
        self.table = table
        self.table.setflags(write=False)
        self._weights = S ** np.arange(order, dtype=np.int64)

    @classmethod
    def iid(cls, probs: Sequence, alphabet: Optional[Alphabet] = None) -> 'FiniteMemoryKernel':
        """Order-0 kernel emitting i.i.d. symbols with law `probs`."""
        alphabet = alphabet or Alphabet.spins()
        return cls(alphabet, 0, np.asarray(probs, dtype=float)[None, :])

    @property
    def contexts(self) -> int:
        return self.table.shape[0]

    def to_spec(self) -> dict:
        if self.order == 0:
            return {'family': 'iid', 'probs': self.table[0].tolist(), 'alphabet': self.alphabet.to_dict()}
        return {
            'family': 'finite-memory',
            'order': self.order,
            'table': self.table.tolist(),
            'non_null_bound': self.non_null_bound,
            'alphabet': self.alphabet.to_dict(),
        }

    def context(self, past: Past) -> int:
        """Table row of a past: x_{-1} is the least significant digit."""
        return int(past.window(self.order) @ self._weights)

    def probs(self, past: Past) -> np.ndarray:
        return self.table[self.context(past)].copy()

    def start(self, past: Past, rows: int = 1) -> 'FiniteMemoryState':
        return FiniteMemoryState(self, np.full(rows, self.context(past), dtype=np.int64))

    def memory_scale(self) -> int:
        return max(self.order, 1)

    def _lag_groups(self, lag: int) -> np.ndarray:
        """Group label per context: contexts with equal labels differ only at `lag`."""
        codes = np.arange(self.contexts, dtype=np.int64)
        S = self.alphabet.size
        digit = (codes // S ** (lag - 1)) % S
        return codes - digit * S ** (lag - 1)

    def _spread_per_symbol(self, groups: np.ndarray) -> np.ndarray:
        """max over groups of (max - min) of the table inside each group, per symbol."""
        best = np.zeros(self.alphabet.size)
        for g in np.unique(groups):
            rows = self.table[groups == g]
            best = np.maximum(best, rows.max(axis=0) - rows.min(axis=0))
        return best

    def variation_closed_form(self, k: int, search: SearchBudget) -> Optional[Estimate]:
        if k >= self.order:
            return Estimate(0.0, EXACT)
        # contexts sharing their last k symbols share the k least significant digits
        groups = np.arange(self.contexts, dtype=np.int64) % self.alphabet.size ** k
        return Estimate(float(self._spread_per_symbol(groups).max()), EXACT)

    def oscillation_closed_form(self, k: int) -> Optional[Estimate]:
        if k > self.order:
            return Estimate(0.0, EXACT)
        return Estimate(math.fsum(self._spread_per_symbol(self._lag_groups(k))), EXACT)

    def oscillation_sup_closed_form(self, k: int) -> Optional[Estimate]:
        if k > self.order:
            return Estimate(0.0, EXACT)
        return Estimate(float(self._spread_per_symbol(self._lag_groups(k)).max()), EXACT)

    def dobrushin_tail(self, k_max: int) -> Optional[float]:
        return math.fsum(self.oscillation_sup_closed_form(k).value for k in range(k_max + 1, self.order + 1))

    def ell2_tail(self, k_max: int) -> Optional[float]:
        search = SearchBudget()
        return math.fsum(self.variation_closed_form(k, search).value ** 2
                         for k in range(k_max + 1, self.order))


class FiniteMemoryState(ChainState):
    """Context code per row."""

    def __init__(self, kernel: FiniteMemoryKernel, codes: np.ndarray):
        self.kernel = kernel
        self.codes = codes
        self.rows = codes.size
        self.t = 0

    def probs(self) -> np.ndarray:
        return self.kernel.table[self.codes]

    def push(self, symbols: np.ndarray):
        S = self.kernel.alphabet.size
        self.codes = (self.codes * S + np.asarray(symbols, dtype=np.int64)) % self.kernel.contexts
        self.t += 1

    def repeat(self, k: int) -> 'FiniteMemoryState':
        other = FiniteMemoryState(self.kernel, np.repeat(self.codes, k))
        other.t = self.t
        return other


def freeze(kernel: Kernel, order: int, beyond: Past) -> FiniteMemoryKernel:
    """Order-k table g(a | w beyond) for every word w of length k.

    For any past x, |g(a | x) - table(a | x_{-1..-k})| <= var_k(g).
    """
    words = all_words(kernel.alphabet.size, order)
    table = probs_after(kernel, beyond, words)
    logger.info("[models] froze %s at order %d beyond %s", kernel.describe(), order, beyond.describe())
    return FiniteMemoryKernel(kernel.alphabet, order, table, non_null_bound=min(kernel.non_null_bound,
                                                                                float(table.min())))
