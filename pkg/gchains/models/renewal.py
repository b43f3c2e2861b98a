"""Renewal kernels: g(+1 | x) = q_r with r the number of -1 symbols since the last +1.

r = 0 when x_{-1} = +1; a past without any +1 uses q_inf. The sequence q is
an explicit prefix q_0 .. q_{L-1} followed by q_i = q_inf + A/(i+1)^p
('power'), q_inf + A rho^i ('geometric'), or q_inf (no decay).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import zeta

from gchains.config import Config
from gchains.errors import ModelError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.base import EXACT, ChainState, Estimate, Kernel, SearchBudget
from gchains.kernels.past import Past

logger = logging.getLogger(__name__)

POWER = 'power'
GEOMETRIC = 'geometric'
MEMORY_EXCESS_TOL = 1e-6


@dataclass(frozen=True)
class RenewalParams:
    q_limit: float
    prefix: tuple = ()
    decay: Optional[str] = None
    amplitude: float = 0.0
    rate: float = 1.0  # exponent p for 'power', ratio rho for 'geometric'

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(float(q) for q in self.prefix))
        object.__setattr__(self, 'q_limit', float(self.q_limit))
        if self.decay not in (None, POWER, GEOMETRIC):
            raise ModelError(f"renewal: unknown decay {self.decay!r} (power, geometric)")
        if not 0.0 < self.q_limit < 1.0:
            raise ModelError(f"renewal: q_inf must lie in (0, 1), got {self.q_limit}")
        if self.decay is not None and self.amplitude < 0:
            raise ModelError("renewal: decay amplitude must be nonnegative")
        if self.decay == POWER and self.rate <= 0:
            raise ModelError(f"renewal: power decay exponent must be positive, got {self.rate}")
        if self.decay == GEOMETRIC and not 0.0 < self.rate < 1.0:
            raise ModelError(f"renewal: geometric ratio must lie in (0, 1), got {self.rate}")

        head = list(self.prefix) + [self.q(len(self.prefix))]
        # q_i = 1 is allowed (absorbing +1) but leaves the kernel degenerate
        if any(not 0.0 < q <= 1.0 for q in head):
            raise ModelError("renewal: every q_i must lie in (0, 1]")
        if any(b > a for a, b in zip(head, head[1:])) or head[-1] < self.q_limit:
            raise ModelError("renewal: q must be nonincreasing towards q_inf")

    @classmethod
    def power(cls, q_limit: float, amplitude: float, exponent: float = 1.0, prefix=()) -> 'RenewalParams':
        return cls(q_limit=q_limit, prefix=tuple(prefix), decay=POWER, amplitude=amplitude, rate=exponent)

    def excess(self, i) -> np.ndarray:
        """q_i - q_inf, computed without cancellation for tail indices."""
        i = np.asarray(i, dtype=np.int64)
        L = len(self.prefix)
        out = np.zeros(i.shape)
        if L:
            head = np.asarray(self.prefix) - self.q_limit
            in_head = i < L
            out[in_head] = head[i[in_head]]
        in_tail = i >= L
        if self.decay == POWER:
            out[in_tail] = self.amplitude / (i[in_tail] + 1.0) ** self.rate
        elif self.decay == GEOMETRIC:
            out[in_tail] = self.amplitude * self.rate ** i[in_tail].astype(float)
        return out

    def q(self, i):
        value = self.q_limit + self.excess(i)
        return float(value) if np.ndim(value) == 0 else value

    @property
    def q0(self) -> float:
        return self.q(0)

    def excess_sum(self, start: int, power: int = 1) -> float:
        """sum_{i >= start} (q_i - q_inf)^power; math.inf when it diverges."""
        L = len(self.prefix)
        head = math.fsum(self.excess(np.arange(start, L)) ** power) if start < L else 0.0
        j0 = max(start, L)
        if self.decay == POWER:
            s = self.rate * power
            if s <= 1.0:
                return math.inf
            return head + self.amplitude ** power * float(zeta(s, j0 + 1.0))
        if self.decay == GEOMETRIC:
            r = self.rate ** power
            return head + self.amplitude ** power * r ** j0 / (1.0 - r)
        return head

    def memory_scale(self) -> int:
        """First index where q_i - q_inf drops to 1e-6."""
        L = len(self.prefix)
        if self.decay is None or self.amplitude == 0:
            return max(L, 1)
        if self.decay == POWER:
            log_n = math.log(self.amplitude / MEMORY_EXCESS_TOL) / self.rate
        else:
            steps = math.log(max(self.amplitude / MEMORY_EXCESS_TOL, 1.0)) / -math.log(self.rate)
            log_n = math.log(max(steps, 1.0))
        n = math.exp(min(log_n, math.log(Config.MAX_MEMORY_SCALE)))
        return int(max(math.ceil(n), L, 1))

    def to_spec(self) -> dict:
        q = {'limit': self.q_limit, 'prefix': list(self.prefix)}
        if self.decay == POWER:
            q['decay'] = {'form': POWER, 'amplitude': self.amplitude, 'exponent': self.rate}
        elif self.decay == GEOMETRIC:
            q['decay'] = {'form': GEOMETRIC, 'amplitude': self.amplitude, 'ratio': self.rate}
        return {'family': 'renewal', 'q': q}


class RenewalKernel(Kernel):
    family = 'renewal'

    def __init__(self, params: RenewalParams, alphabet: Optional[Alphabet] = None):
        alphabet = alphabet or Alphabet.spins()
        if not alphabet.is_spin:
            raise ModelError("renewal kernels need the binary +1/-1 alphabet")
        self.params = params
        super().__init__(alphabet, min(params.q_limit, 1.0 - params.q0), monotone=True)
        self._plus = alphabet.index(1.0)

    def to_spec(self) -> dict:
        spec = self.params.to_spec()
        spec['alphabet'] = self.alphabet.to_dict()
        return spec

    def renewal_index(self, past: Past) -> int:
        """r(past): -1 symbols since the last +1, or -1 when the past holds no +1."""
        if self._plus in past.suffix:
            return past.suffix.index(self._plus)
        if self._plus in past.tail:
            return len(past.suffix) + past.tail.index(self._plus)
        return -1

    def _columns(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r)
        p_plus = np.where(r >= 0, self.params.q(np.maximum(r, 0)), self.params.q_limit)
        out = np.empty(p_plus.shape + (2,))
        out[..., self._plus] = p_plus
        out[..., 1 - self._plus] = 1.0 - p_plus
        return out

    def probs(self, past: Past) -> np.ndarray:
        return self._columns(self.renewal_index(past))

    def start(self, past: Past, rows: int = 1) -> 'RenewalState':
        return RenewalState(self, np.full(rows, self.renewal_index(past), dtype=np.int64))

    def memory_scale(self) -> int:
        return self.params.memory_scale()

    def variation_closed_form(self, k: int, search: SearchBudget) -> Optional[Estimate]:
        return Estimate(float(self.params.excess(k)), EXACT)

    def oscillation_closed_form(self, k: int) -> Optional[Estimate]:
        return Estimate(2.0 * float(self.params.excess(k - 1)), EXACT)

    def oscillation_sup_closed_form(self, k: int) -> Optional[Estimate]:
        return Estimate(float(self.params.excess(k - 1)), EXACT)

    def dobrushin_tail(self, k_max: int) -> Optional[float]:
        # sum_{k > K} (q_{k-1} - q_inf)
        return self.params.excess_sum(k_max)

    def ell2_tail(self, k_max: int) -> Optional[float]:
        return self.params.excess_sum(k_max + 1, power=2)


class RenewalState(ChainState):
    """Only the renewal index of each row is needed to continue the chain."""

    def __init__(self, kernel: RenewalKernel, r: np.ndarray):
        self.kernel = kernel
        self.r = r
        self.rows = r.size
        self.t = 0

    def probs(self) -> np.ndarray:
        return self.kernel._columns(self.r)

    def push(self, symbols: np.ndarray):
        renewed = np.asarray(symbols) == self.kernel._plus
        self.r = np.where(renewed, 0, np.where(self.r >= 0, self.r + 1, -1))
        self.t += 1

    def repeat(self, k: int) -> 'RenewalState':
        other = RenewalState(self.kernel, np.repeat(self.r, k))
        other.t = self.t
        return other


def renewal_eval(params: RenewalParams, a, past: Past) -> float:
    """g(a | past) for the renewal kernel with these parameters."""
    return RenewalKernel(params, past.alphabet).eval(a, past)
