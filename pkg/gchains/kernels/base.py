"""Kernel abstraction and the vectorised chain states used to run kernels forward."""

import hashlib
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from gchains.config import Config
from gchains.errors import HorizonError, ModelError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.past import Past

EXACT = 'exact'
LOWER_BOUND = 'lower_bound'
UPPER_BOUND = 'upper_bound'


@dataclass(frozen=True)
class Estimate:
    """A numeric value and what it is known to be relative to the true quantity."""
    value: float
    kind: str = EXACT
    evaluations: int = 0

    @property
    def exact(self) -> bool:
        return self.kind == EXACT

    def to_dict(self) -> dict:
        return {'value': self.value, 'kind': self.kind, 'evaluations': self.evaluations}


@dataclass(frozen=True)
class SearchBudget:
    """How suprema over prefixes and pasts are approximated.

    Prefixes of length k are enumerated exhaustively when |S|^k <= size,
    otherwise `size` random prefixes are drawn. Monotone kernels use the
    constant extremal pasts; other kernels use `pasts` random eventually
    periodic pasts (suffix up to `max_suffix`, period up to `max_period`).
    """
    size: int = field(default_factory=lambda: Config.SEARCH_BUDGET)
    pasts: int = 16
    seed: int = 0
    max_suffix: int = 12
    max_period: int = 4

    def __post_init__(self):
        if self.size < 1:
            raise HorizonError(f"search budget must be positive, got {self.size}")
        if self.pasts < 1:
            raise HorizonError(f"search needs at least one random past, got {self.pasts}")

    def exhaustive(self, alphabet_size: int, k: int) -> bool:
        return alphabet_size ** k <= self.size

    def rng(self, *key) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(key)))


class ChainState(ABC):
    """Histories of `rows` chains started from one past, advanced together."""

    rows: int
    t: int

    @abstractmethod
    def probs(self) -> np.ndarray:
        """(rows, |S|) conditional laws of the next symbol."""

    @abstractmethod
    def push(self, symbols: np.ndarray) -> None:
        """Append one symbol index per row."""

    @abstractmethod
    def repeat(self, k: int) -> 'ChainState':
        """New state where row i becomes rows i*k .. i*k+k-1."""


class HistoryBuffer:
    """Growable (rows, t) symbol history backed by a Past for earlier lags."""

    def __init__(self, past: Past, rows: int, capacity: int = 64):
        self.past = past
        self.rows = rows
        self.t = 0
        self._data = np.zeros((rows, max(capacity, 1)), dtype=np.int8)

    def append(self, symbols: np.ndarray):
        if self.t == self._data.shape[1]:
            grown = np.zeros((self.rows, 2 * self._data.shape[1]), dtype=np.int8)
            grown[:, :self.t] = self._data[:, :self.t]
            self._data = grown
        self._data[:, self.t] = symbols
        self.t += 1

    def lag(self, k: int) -> np.ndarray:
        """Symbol index at lag k >= 1 before the next emission, per row."""
        if k <= self.t:
            return self._data[:, self.t - k].astype(np.int64)
        return np.full(self.rows, self.past.lookup(k - self.t), dtype=np.int64)

    def view(self) -> np.ndarray:
        return self._data[:, :self.t]

    def repeat(self, k: int) -> 'HistoryBuffer':
        other = HistoryBuffer(self.past, self.rows * k, capacity=self._data.shape[1])
        other._data = np.repeat(self._data, k, axis=0)
        other.t = self.t
        return other


class GenericState(ChainState):
    """Fallback state: evaluates `kernel.probs` on the pushed past of every row."""

    def __init__(self, kernel: 'Kernel', past: Past, rows: int):
        self.kernel = kernel
        self.rows = rows
        self.history = HistoryBuffer(past, rows)

    @property
    def t(self) -> int:
        return self.history.t

    def probs(self) -> np.ndarray:
        out = np.empty((self.rows, self.kernel.alphabet.size))
        seen = {}
        hist = self.history.view()
        for i in range(self.rows):
            key = hist[i].tobytes()
            if key not in seen:
                seen[key] = self.kernel.probs(self.history.past.push(hist[i]))
            out[i] = seen[key]
        return out

    def push(self, symbols: np.ndarray):
        self.history.append(symbols)

    def repeat(self, k: int) -> 'GenericState':
        other = GenericState(self.kernel, self.history.past, self.rows * k)
        other.history = self.history.repeat(k)
        return other


class SharedState:
    """One simulated history evaluated under several pasts."""

    def __init__(self, states: Sequence[ChainState]):
        self.states = list(states)
        self.rows = self.states[0].rows

    @property
    def t(self) -> int:
        return self.states[0].t

    def probs_all(self) -> np.ndarray:
        """(n_pasts, rows, |S|) conditional laws."""
        return np.stack([s.probs() for s in self.states])

    def push(self, symbols: np.ndarray):
        for s in self.states:
            s.push(symbols)

    def repeat(self, k: int) -> 'SharedState':
        return SharedState([s.repeat(k) for s in self.states])


class Kernel(ABC):
    """A probability kernel g(a | past) on a finite alphabet.

    Subclasses provide `probs` and `to_spec`; families with structure
    override `start` with a vectorised state and the closed-form hooks.
    """

    family = 'abstract'

    def __init__(self, alphabet: Alphabet, non_null_bound: float, monotone: bool = False):
        if not 0.0 <= non_null_bound < 1.0:
            raise ModelError(f"non-null bound must lie in [0, 1), got {non_null_bound}")
        self.alphabet = alphabet
        self.non_null_bound = float(non_null_bound)
        self.monotone = monotone

    @abstractmethod
    def probs(self, past: Past) -> np.ndarray:
        """Vector of g(a | past) over the alphabet in canonical order."""

    @abstractmethod
    def to_spec(self) -> dict:
        """Parameter document that rebuilds this kernel (see models.schema)."""

    @property
    def strongly_non_null(self) -> bool:
        """False for degenerate kernels (some g(a | past) = 0), which only support simulation."""
        return self.non_null_bound > 0.0

    def eval(self, a, past: Past) -> float:
        return float(self.probs(past)[self.alphabet.index(a)])

    def start(self, past: Past, rows: int = 1) -> ChainState:
        return GenericState(self, past, rows)

    def start_shared(self, pasts: Sequence[Past], rows: int = 1) -> SharedState:
        return SharedState([self.start(p, rows) for p in pasts])

    def identity(self) -> str:
        blob = json.dumps(self.to_spec(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def memory_scale(self) -> int:
        """Lag beyond which the past is treated as forgotten when choosing burn-in."""
        return Config.MAX_MEMORY_SCALE

    def extremal_pasts(self) -> list:
        return [Past.constant(self.alphabet, s) for s in self.alphabet.symbols]

    # Closed-form hooks. None means "no closed form, search numerically".

    def variation_closed_form(self, k: int, search: SearchBudget) -> Optional[Estimate]:
        return None

    def oscillation_closed_form(self, k: int) -> Optional[Estimate]:
        return None

    def oscillation_sup_closed_form(self, k: int) -> Optional[Estimate]:
        """osc_k with the sum over output symbols replaced by a max."""
        return None

    def dobrushin_tail(self, k_max: int) -> Optional[float]:
        """Bound on sum_{k > k_max} osc_k in sup-over-a form, when known."""
        return None

    def ell2_tail(self, k_max: int) -> Optional[float]:
        """Bound on sum_{k > k_max} var_k^2, when known."""
        return None

    def l2_certificate(self, n_max: int) -> Optional[tuple]:
        """(lower, upper) bound series certifying the ell^2 verdict, when the family has them."""
        return None

    def describe(self) -> str:
        return f"{self.family}[{self.identity()}]"
