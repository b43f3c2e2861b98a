"""Binary autoregressive kernels g(a | x) = phi(a * (sum_n beta_n x_{-n} + delta)).

The coefficient sequence is an explicit prefix beta_1 .. beta_{m0-1} followed
by an optional power-law tail beta_j = c / j^s for j >= m0 (long-range Ising
chains). Sums of the tail over arithmetic progressions have the closed form
c p^{-s} zeta(s, a/p), so fields over periodic past tails are computed
without truncation.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from cachetools import LRUCache
from scipy.signal import fftconvolve
from scipy.special import zeta

from gchains.config import Config
from gchains.errors import ModelError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.base import EXACT, LOWER_BOUND, UPPER_BOUND, ChainState, Estimate, Kernel, SearchBudget
from gchains.kernels.numerics import all_words
from gchains.kernels.past import Past
from gchains.kernels.series import CONVERGENT, DIVERGENT, classify_series
from gchains.models.links import Link, Logit

logger = logging.getLogger(__name__)

MEMORY_TAIL_TOL = 1e-6
NEAR_FIELD_CHUNK = 1 << 16


@dataclass(frozen=True)
class PowerTail:
    """beta_j = c / j^exponent for j >= start_index."""
    c: float
    exponent: float
    start_index: int = 1

    def __post_init__(self):
        if not self.exponent > 1.0:
            raise ModelError(f"beta tail exponent must exceed 1, got {self.exponent}")
        if self.start_index < 1:
            raise ModelError(f"beta tail start_index must be >= 1, got {self.start_index}")
        object.__setattr__(self, 'c', float(self.c))
        object.__setattr__(self, 'exponent', float(self.exponent))
        object.__setattr__(self, 'start_index', int(self.start_index))

    def to_spec(self) -> dict:
        return {'c': self.c, 'exponent': self.exponent, 'start_index': self.start_index}


@dataclass(frozen=True)
class ARParams:
    link: Link = Logit()
    prefix: tuple = ()
    tail: Optional[PowerTail] = None
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(float(b) for b in self.prefix))
        object.__setattr__(self, 'delta', float(self.delta))
        if self.tail is not None and len(self.prefix) > self.tail.start_index - 1:
            raise ModelError(
                f"beta prefix has {len(self.prefix)} terms but the tail starts at index {self.tail.start_index}")
        if not all(math.isfinite(b) for b in self.prefix):
            raise ModelError("beta prefix contains non-finite values")

    @classmethod
    def with_total(cls, total: float, exponent: float, start_index: int = 1, prefix: Sequence = (),
                   link: Link = Logit(), delta: float = 0.0) -> 'ARParams':
        """Power-law tail with c chosen so that sum_j beta_j == total."""
        head = math.fsum(prefix)
        c = (total - head) / float(zeta(exponent, start_index))
        return cls(link=link, prefix=tuple(prefix), tail=PowerTail(c, exponent, start_index), delta=delta)

    @property
    def monotone(self) -> bool:
        return all(b >= 0 for b in self.prefix) and (self.tail is None or self.tail.c >= 0)

    @property
    def attractive(self) -> bool:
        return self.monotone and self.delta >= 0

    @property
    def support(self) -> Optional[int]:
        """Last index with a possibly nonzero coefficient, None for infinite tails."""
        if self.tail is not None and self.tail.c != 0:
            return None
        nonzero = [i + 1 for i, b in enumerate(self.prefix) if b != 0]
        return nonzero[-1] if nonzero else 0

    def beta(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=np.int64)
        out = np.zeros(j.shape)
        head = np.asarray(self.prefix)
        in_head = (j >= 1) & (j <= head.size)
        out[in_head] = head[j[in_head] - 1]
        if self.tail is not None:
            in_tail = j >= self.tail.start_index
            out[in_tail] = self.tail.c / j[in_tail].astype(float) ** self.tail.exponent
        return out

    def tail_sum(self, n, absolute: bool = False) -> np.ndarray:
        """tau_n = sum_{k > n} beta_k (or |beta_k|), vectorised over n >= 0."""
        n = np.asarray(n, dtype=np.int64)
        head = np.abs(self.prefix) if absolute else np.asarray(self.prefix)
        rev = np.concatenate([np.cumsum(head[::-1])[::-1], [0.0]]) if head.size else np.zeros(1)
        out = rev[np.minimum(n, head.size)]
        if self.tail is not None:
            c = abs(self.tail.c) if absolute else self.tail.c
            first = np.maximum(n + 1, self.tail.start_index).astype(float)
            out = out + c * zeta(self.tail.exponent, first)
        return out

    def abs_total(self) -> float:
        return float(self.tail_sum(0, absolute=True))

    def field_radius(self) -> float:
        return self.abs_total() + abs(self.delta)

    def progression_sums(self, a: np.ndarray, period: int) -> np.ndarray:
        """sum_{i >= 0} beta_{a + i*period} for each a >= 1."""
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape)
        for j, b in enumerate(self.prefix, start=1):
            if b != 0:
                out += np.where((a <= j) & ((j - a) % period == 0), b, 0.0)
        if self.tail is not None:
            m0 = self.tail.start_index
            first = np.where(a >= m0, a, a + period * (-((a - m0) // period)))
            s = self.tail.exponent
            out += self.tail.c * period ** (-s) * zeta(s, first / period)
        return out

    def memory_scale(self) -> int:
        """Smallest n with sum_{k > n} |beta_k| <= 1e-6 (integral-test bound for the tail)."""
        support = self.support
        if support is not None:
            return max(support, 1)
        s = self.tail.exponent
        log_n = math.log(abs(self.tail.c) / ((s - 1.0) * MEMORY_TAIL_TOL)) / (s - 1.0)
        n = math.exp(min(log_n, math.log(1e15)))
        return int(max(math.ceil(n), self.tail.start_index, len(self.prefix), 1))

    def to_spec(self) -> dict:
        beta = {'prefix': list(self.prefix)}
        if self.tail is not None:
            beta['tail'] = self.tail.to_spec()
        return {
            'family': 'autoregressive',
            'link': self.link.to_spec(),
            'beta': beta,
            'delta': self.delta,
        }


def _spin_columns(alphabet: Alphabet, p_plus: np.ndarray) -> np.ndarray:
    plus = alphabet.index(1.0)
    out = np.empty(p_plus.shape + (2,))
    out[..., plus] = p_plus
    out[..., 1 - plus] = 1.0 - p_plus
    return out


class ARKernel(Kernel):
    """Autoregressive kernel over the +1/-1 alphabet.

    The kernel is immutable as a function of its parameters. `_beta` (the
    coefficient table) and `_field_cache` (past-field blocks keyed by past)
    are memo tables filled on demand; they never change a returned value.
    The field cache is dropped on pickling.
    """
    family = 'autoregressive'

    def __init__(self, params: ARParams, alphabet: Optional[Alphabet] = None):
        alphabet = alphabet or Alphabet.spins()
        if not alphabet.is_spin:
            raise ModelError("autoregressive kernels need the binary +1/-1 alphabet")
        self.params = params
        radius = params.field_radius()
        # probabilities stay inside [phi(-R), phi(R)]
        gamma = float(params.link(-radius))
        super().__init__(alphabet, gamma, monotone=params.monotone)
        self.radius = radius
        self.gamma_phi = params.link.bilipschitz_constant(radius)
        self._values = alphabet.values()
        self._field_cache = LRUCache(maxsize=Config.CACHE_SIZE)
        self._beta = np.zeros(1)

    def __getstate__(self):
        state = self.__dict__.copy()
        state['_field_cache'] = LRUCache(maxsize=Config.CACHE_SIZE)
        return state

    def to_spec(self) -> dict:
        spec = self.params.to_spec()
        spec['alphabet'] = self.alphabet.to_dict()
        return spec

    def beta_array(self, length: int) -> np.ndarray:
        """beta_0 .. beta_{length-1} with beta_0 = 0."""
        if self._beta.size < length:
            size = max(length, 2 * self._beta.size)
            self._beta = self.params.beta(np.arange(size))
            self._beta[0] = 0.0
        return self._beta[:length]

    def past_field_block(self, past: Past, block: int) -> np.ndarray:
        """sum_k beta_{t+k} x_{-k} for t in [block*B, (block+1)*B)."""
        key = (past, block)
        cached = self._field_cache.get(key)
        if cached is not None:
            return cached
        B = Config.CONV_BLOCK
        t = np.arange(block * B, (block + 1) * B)
        field = np.zeros(B)
        L = len(past.suffix)
        if L:
            x = self._values[list(past.suffix)]
            betas = self.beta_array(t[-1] + L + 1)[t[0] + 1:]
            # betas[i] = beta_{t0 + 1 + i}; field(t) = sum_{k=1..L} beta_{t+k} x_{-k}
            field += fftconvolve(betas, x[::-1], mode='valid') if L > 64 else \
                np.array([betas[i:i + L] @ x for i in range(B)])
        p = len(past.tail)
        x_tail = self._values[list(past.tail)]
        for r in range(p):
            field += x_tail[r] * self.params.progression_sums(t + L + 1 + r, p)
        self._field_cache[key] = field
        return field

    def past_field(self, past: Past, t: int) -> float:
        B = Config.CONV_BLOCK
        return float(self.past_field_block(past, t // B)[t % B])

    def field(self, past: Past) -> tuple:
        """(h, half_width): the field sum_n beta_n x_{-n} + delta and its certified error."""
        return self.params.delta + self.past_field(past, 0), Config.TAIL_TOL

    def probs(self, past: Past) -> np.ndarray:
        h, _ = self.field(past)
        return _spin_columns(self.alphabet, self.params.link(np.array(h)))

    def eval_interval(self, a, past: Past) -> tuple:
        """(value, low, high): g(a | past) and the interval from the field's truncation half-width."""
        h, half_width = self.field(past)
        sign = self._values[self.alphabet.index(a)]
        link = self.params.link
        ends = link(sign * np.array([h - half_width, h + half_width]))
        return float(link(np.array(sign * h))), float(ends.min()), float(ends.max())

    def start(self, past: Past, rows: int = 1) -> 'ARState':
        return ARState(self, [past], rows)

    def start_shared(self, pasts: Sequence[Past], rows: int = 1) -> 'ARState':
        return ARState(self, list(pasts), rows)

    def memory_scale(self) -> int:
        return self.params.memory_scale()

    # Closed forms

    def variation_closed_form(self, k: int, search: SearchBudget) -> Optional[Estimate]:
        if not self.params.monotone:
            return None
        tau = float(self.params.tail_sum(k))
        beta = self.params.beta(np.arange(1, k + 1))
        if search.exhaustive(2, k):
            words, kind = all_words(2, k), EXACT
        else:
            rng = search.rng(2, k)
            greedy = _greedy_prefix(beta, self.params.delta, self.alphabet.index(1.0))
            words = np.vstack([rng.integers(0, 2, size=(search.size, k)), greedy])
            kind = LOWER_BOUND
        # columns are chronological, so lag n sits in column k - n
        h = self.params.delta + self._values[words][:, ::-1] @ beta if k else np.full(1, self.params.delta)
        phi = self.params.link
        value = float(np.max(phi(h + tau) - phi(h - tau)))
        return Estimate(value, kind, evaluations=2 * len(h))

    def oscillation_closed_form(self, k: int) -> Optional[Estimate]:
        b = abs(float(self.params.beta(k)))
        return Estimate(2.0 * self.params.link.max_increment(b), UPPER_BOUND if b else EXACT)

    def oscillation_sup_closed_form(self, k: int) -> Optional[Estimate]:
        b = abs(float(self.params.beta(k)))
        return Estimate(self.params.link.max_increment(b), UPPER_BOUND if b else EXACT)

    def dobrushin_tail(self, k_max: int) -> Optional[float]:
        _, hi = self.params.link.slope_bounds(self.radius)
        return 2.0 * hi * float(self.params.tail_sum(k_max, absolute=True))

    def l2_certificate(self, n_max: int) -> Optional[tuple]:
        return ar_l2_bounds(self.params, n_max, lower=self.params.monotone)


def _greedy_prefix(beta: np.ndarray, delta: float, plus: int) -> np.ndarray:
    """Prefix steering the field towards 0, largest coefficients first."""
    k = beta.size
    signs = np.zeros(k)
    h = delta
    for n in np.argsort(-np.abs(beta), kind='stable'):
        s = -1.0 if h * np.sign(beta[n]) > 0 else 1.0
        signs[n] = s
        h += s * beta[n]
    # lag n+1 sits in column k-1-n
    return np.where(signs[::-1] > 0, plus, 1 - plus)[None, :]


class ARState(ChainState):
    """Autoregressive chains sharing one history across one or more pasts.

    The history part of the field uses a blocked convolution: contributions
    from symbols before the current block come from one FFT per block, the
    rest from a direct dot product.

    Far-field blocks are stored once per distinct history and addressed
    through `_far_row`, so `repeat` never copies them. Before the first
    block boundary there is a single zero block.
    """

    def __init__(self, kernel: ARKernel, pasts: list, rows: int):
        self.kernel = kernel
        self.pasts = pasts
        self.rows = rows
        self.t = 0
        self._hist = np.zeros((rows, 64), dtype=np.int8)
        self._far = np.zeros((1, Config.CONV_BLOCK))
        self._far_row = np.zeros(rows, dtype=np.intp)
        self._block_start = 0

    def _history_field(self) -> np.ndarray:
        lag = self.t - self._block_start
        far = self._far[self._far_row, lag]
        if not lag:
            return far
        beta = self.kernel.beta_array(lag + 1)[lag:0:-1]
        chunk = NEAR_FIELD_CHUNK
        for lo in range(0, self.rows, chunk):
            far[lo:lo + chunk] += self._hist[lo:lo + chunk, self._block_start:self.t].astype(float) @ beta
        return far

    def probs_all(self) -> np.ndarray:
        shared = self._history_field() + self.kernel.params.delta
        link = self.kernel.params.link
        out = np.empty((len(self.pasts), self.rows, 2))
        for i, past in enumerate(self.pasts):
            out[i] = _spin_columns(self.kernel.alphabet, link(shared + self.kernel.past_field(past, self.t)))
        return out

    def probs(self) -> np.ndarray:
        return self.probs_all()[0]

    def push(self, symbols: np.ndarray):
        if self.t == self._hist.shape[1]:
            grown = np.zeros((self.rows, 2 * self._hist.shape[1]), dtype=np.int8)
            grown[:, :self.t] = self._hist[:, :self.t]
            self._hist = grown
        self._hist[:, self.t] = self.kernel._values[symbols]
        self.t += 1
        if self.t - self._block_start == Config.CONV_BLOCK:
            self._refresh_far()

    def _refresh_far(self):
        B = Config.CONV_BLOCK
        t0 = self.t
        beta = self.kernel.beta_array(t0 + B)
        conv = fftconvolve(self._hist[:, :t0].astype(float), beta[None, :], mode='full', axes=1)
        self._far = conv[:, t0:t0 + B].copy()
        self._far_row = np.arange(self.rows, dtype=np.intp)
        self._block_start = t0

    def repeat(self, k: int) -> 'ARState':
        other = ARState.__new__(ARState)
        other.kernel = self.kernel
        other.pasts = self.pasts
        other.rows = self.rows * k
        # one spare column for the next push
        other._hist = np.repeat(self._hist[:, :self.t + 1], k, axis=0)
        other._far = self._far
        other._far_row = np.repeat(self._far_row, k)
        other.t = self.t
        other._block_start = self._block_start
        return other


def ar_eval(params: ARParams, a, past: Past) -> float:
    """g(a | past) for the autoregressive kernel with these parameters."""
    return ARKernel(params, past.alphabet).eval(a, past)


def ar_eval_interval(params: ARParams, a, past: Past) -> tuple:
    """(value, low, high) with the truncation error of the field folded into [low, high]."""
    return ARKernel(params, past.alphabet).eval_interval(a, past)


def ar_l2_bounds(params: ARParams, n_max: int, lower: bool = True) -> tuple:
    """Bound series for sum_n var_n^2 through tau_n = sum_{k>n} |beta_k|.

    lower: (1/gamma_phi^2) sum tau_n^2 (needs nonnegative beta);
    upper: gamma_phi^2 sum tau_n^2. Power-law tails are certified with the
    integral test: the remainder is finite iff 2(s - 1) > 1.
    """
    if lower and not params.monotone:
        raise ModelError("lower bound series needs nonnegative beta coefficients")
    gamma = params.link.bilipschitz_constant(params.field_radius())
    support = params.support
    tail = params.tail
    horizon = max(n_max, len(params.prefix), tail.start_index if tail is not None else 0, 1)
    n = np.arange(1, horizon + 1)
    terms = params.tail_sum(n, absolute=True) ** 2

    certified = None
    evidence = {'gamma_phi': gamma}
    if support is not None:
        remainder = 0.0
    else:
        s = tail.exponent
        evidence['exponent'] = s
        if 2.0 * (s - 1.0) > 1.0:
            remainder = (abs(tail.c) / (s - 1.0)) ** 2 * horizon ** (3.0 - 2.0 * s) / (2.0 * s - 3.0)
            certified = CONVERGENT
        else:
            remainder = math.inf
            certified = DIVERGENT

    evidence['raw_total'] = math.fsum(terms)
    upper = classify_series(gamma ** 2 * terms, horizons=n,
                            tail_bound=gamma ** 2 * remainder, certified=certified,
                            evidence={**evidence, 'prefactor': gamma ** 2})
    low = None
    if lower:
        low = classify_series(terms / gamma ** 2, horizons=n,
                              tail_bound=remainder / gamma ** 2, certified=certified,
                              evidence={**evidence, 'prefactor': 1.0 / gamma ** 2})
    logger.info("[models] ar l2 bounds: horizon %d, verdict %s", horizon, upper.verdict)
    return low, upper
