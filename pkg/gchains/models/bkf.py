"""BKF mixtures: g(a | x) = sum_j lambda_j psi(a * mean(x_{-1} .. x_{-m_j}))."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gchains.config import Config
from gchains.errors import ModelError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.base import EXACT, ChainState, Estimate, HistoryBuffer, Kernel, SearchBudget
from gchains.kernels.past import Past
from gchains.kernels.series import CONVERGENT, DIVERGENT, classify_series
from gchains.models.links import LinearPsi, Psi, StepPsi, TabulatedPsi

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeometricGenerator:
    """Infinite family m_j = m_1 * m_ratio^(j-1), lambda_j proportional to lambda_ratio^j."""
    m_ratio: float
    lambda_ratio: float

    def __post_init__(self):
        if self.m_ratio <= 1.0:
            raise ModelError(f"generator m_ratio must exceed 1, got {self.m_ratio}")
        if not 0.0 < self.lambda_ratio < 1.0:
            raise ModelError(f"generator lambda_ratio must lie in (0, 1), got {self.lambda_ratio}")

    @property
    def series_ratio(self) -> float:
        """Ratio of consecutive terms m_n (sum_{k>=n} lambda_k)^2."""
        return self.m_ratio * self.lambda_ratio ** 2

    def to_spec(self) -> dict:
        return {'m_ratio': self.m_ratio, 'lambda_ratio': self.lambda_ratio}


@dataclass(frozen=True)
class BKFParams:
    m: tuple
    weights: tuple
    psi: Psi
    r0: Optional[float] = None
    generator: Optional[GeometricGenerator] = None

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, 'm', m)
        object.__setattr__(self, 'weights', weights)
        if not m or len(m) != len(weights):
            raise ModelError("bkf: m and weights must be nonempty and of equal length")
        if any(v <= 0 or v % 2 == 0 for v in m):
            raise ModelError(f"bkf: block sizes must be positive odd integers, got {m}")
        if any(b <= a for a, b in zip(m, m[1:])):
            raise ModelError(f"bkf: block sizes must be strictly increasing, got {m}")
        if any(w <= 0 for w in weights):
            raise ModelError("bkf: weights must be positive")
        if abs(math.fsum(weights) - 1.0) > Config.WEIGHT_TOL:
            raise ModelError(f"bkf: weights sum to {math.fsum(weights)!r}, not 1")
        if self.r0 is not None and not 0.0 <= self.r0 < 1.0:
            raise ModelError(f"bkf: r0 must lie in [0, 1), got {self.r0}")

    @classmethod
    def geometric(cls, m1: int, m_ratio: int, lambda_ratio: float, blocks: int, psi: Psi,
                  r0: Optional[float] = None) -> 'BKFParams':
        """Finite truncation of a geometric family, weights renormalised over `blocks` terms."""
        m = tuple(int(m1 * m_ratio ** j) for j in range(blocks))
        raw = [lambda_ratio ** (j + 1) for j in range(blocks)]
        total = math.fsum(raw)
        weights = [w / total for w in raw]
        # push the rounding residue onto the largest weight
        weights[0] += 1.0 - math.fsum(weights)
        return cls(m=m, weights=tuple(weights), psi=psi, r0=r0,
                   generator=GeometricGenerator(float(m_ratio), float(lambda_ratio)))

    @property
    def eps(self) -> float:
        return self.psi.eps

    def is_lacunary(self, r0: Optional[float] = None) -> bool:
        """psi(r0) > psi(-r0) and m_{j+1} >= 4/(1 - r0) m_j for every j."""
        r0 = self.r0 if r0 is None else r0
        if r0 is None:
            return False
        if not float(self.psi(r0)) > float(self.psi(-r0)):
            return False
        ratio = 4.0 / (1.0 - r0)
        m = list(self.m)
        if self.generator is not None:
            m.append(m[-1] * self.generator.m_ratio)
        return all(b >= ratio * a for a, b in zip(m, m[1:]))

    def to_spec(self) -> dict:
        spec = {
            'family': 'bkf',
            'm': list(self.m),
            'weights': list(self.weights),
            'psi': self.psi.to_spec(),
        }
        if self.r0 is not None:
            spec['r0'] = self.r0
        if self.generator is not None:
            spec['generator'] = self.generator.to_spec()
        return spec


class BKFKernel(Kernel):
    family = 'bkf'

    def __init__(self, params: BKFParams, alphabet: Optional[Alphabet] = None):
        alphabet = alphabet or Alphabet.spins()
        if not alphabet.is_spin:
            raise ModelError("bkf kernels need the binary +1/-1 alphabet")
        self.params = params
        super().__init__(alphabet, params.eps, monotone=True)
        self._values = alphabet.values()
        self._m = np.asarray(params.m)
        self._weights = np.asarray(params.weights)
        self._plus = alphabet.index(1.0)

    def to_spec(self) -> dict:
        spec = self.params.to_spec()
        spec['alphabet'] = self.alphabet.to_dict()
        return spec

    def _mix(self, sums: np.ndarray) -> np.ndarray:
        means = sums / self._m
        p_plus = self.params.psi(means) @ self._weights
        out = np.empty(p_plus.shape + (2,))
        out[..., self._plus] = p_plus
        out[..., 1 - self._plus] = 1.0 - p_plus
        return out

    def window_sums(self, past: Past) -> np.ndarray:
        """sum of x_{-1} .. x_{-m_j} for every block j."""
        csum = np.cumsum(self._values[past.window(int(self._m[-1]))])
        return csum[self._m - 1]

    def probs(self, past: Past) -> np.ndarray:
        return self._mix(self.window_sums(past))

    def start(self, past: Past, rows: int = 1) -> 'BKFState':
        return BKFState(self, past, rows)

    def memory_scale(self) -> int:
        return int(self._m[-1])

    def variation_closed_form(self, k: int, search: SearchBudget) -> Optional[Estimate]:
        if k >= self._m[-1]:
            return Estimate(0.0, EXACT)
        return None

    def _flip_weights(self, k: int) -> Optional[np.ndarray]:
        """Per-block change of psi caused by one flip inside the window, or None."""
        eps = self.params.eps
        psi = self.params.psi
        if isinstance(psi, LinearPsi):
            return (1.0 - 2.0 * eps) / self._m
        if isinstance(psi, StepPsi):
            # every window containing lag k can sit at sum +/-1 simultaneously
            return np.full(self._m.size, 1.0 - 2.0 * eps)
        return None

    def oscillation_closed_form(self, k: int) -> Optional[Estimate]:
        sup = self.oscillation_sup_closed_form(k)
        return None if sup is None else Estimate(2.0 * sup.value, sup.kind)

    def oscillation_sup_closed_form(self, k: int) -> Optional[Estimate]:
        if k > self._m[-1]:
            return Estimate(0.0, EXACT)
        jump = self._flip_weights(k)
        if jump is None:
            return None
        covered = self._m >= k
        return Estimate(math.fsum(self._weights[covered] * jump[covered]), EXACT)

    def dobrushin_tail(self, k_max: int) -> Optional[float]:
        jump = self._flip_weights(k_max)
        if jump is None:
            psi = self.params.psi
            slope = psi.max_slope() if isinstance(psi, TabulatedPsi) else 0.5
            jump = np.minimum(2.0 * slope / self._m, 1.0 - 2.0 * self.params.eps)
        # number of lags k > k_max inside window j
        count = np.maximum(self._m - k_max, 0)
        return math.fsum(self._weights * jump * count)

    def ell2_tail(self, k_max: int) -> Optional[float]:
        return 0.0 if k_max >= self._m[-1] - 1 else None

    def l2_certificate(self, n_max: int) -> Optional[tuple]:
        return bkf_l2_bounds(self.params, n_max, lower=self.params.is_lacunary())


class BKFState(ChainState):
    """Running window sums over the last m_j symbols of every block."""

    def __init__(self, kernel: BKFKernel, past: Past, rows: int):
        self.kernel = kernel
        self.rows = rows
        self.history = HistoryBuffer(past, rows)
        self.sums = np.tile(kernel.window_sums(past), (rows, 1))

    @property
    def t(self) -> int:
        return self.history.t

    def probs(self) -> np.ndarray:
        return self.kernel._mix(self.sums)

    def push(self, symbols: np.ndarray):
        values = self.kernel._values
        entering = values[symbols]
        for j, m in enumerate(self.kernel.params.m):
            self.sums[:, j] += entering - values[self.history.lag(m)]
        self.history.append(symbols)

    def repeat(self, k: int) -> 'BKFState':
        other = BKFState.__new__(BKFState)
        other.kernel = self.kernel
        other.rows = self.rows * k
        other.history = self.history.repeat(k)
        other.sums = np.repeat(self.sums, k, axis=0)
        return other


def bkf_eval(params: BKFParams, a, past: Past) -> float:
    """g(a | past) for the BKF mixture with these parameters."""
    return BKFKernel(params, past.alphabet).eval(a, past)


def _bound_terms(params: BKFParams, n_max: int) -> tuple:
    """Terms m_n (sum_{k>=n} lambda_k)^2, horizons, and the certified remainder."""
    gen = params.generator
    if gen is None:
        weights = np.asarray(params.weights)
        tails = np.cumsum(weights[::-1])[::-1]
        terms = np.asarray(params.m, dtype=float) * tails ** 2
        return terms, np.arange(1, terms.size + 1), 0.0, None
    n = np.arange(1, max(n_max, 2) + 1)
    q = gen.series_ratio
    # normalised infinite family: sum_{k>=n} lambda_k = lambda_ratio^(n-1)
    terms = params.m[0] * q ** (n - 1.0)
    if q < 1.0:
        return terms, n, params.m[0] * q ** n[-1] / (1.0 - q), CONVERGENT
    return terms, n, math.inf, DIVERGENT


def bkf_l2_bounds(params: BKFParams, n_max: int, lower: bool = True) -> tuple:
    """Bound series for sum_n var_n^2 of the BKF mixture.

    upper: (1 - eps)^2 sum_{n>=1} m_n (sum_{k>=n} lambda_k)^2
    lower: (1 - r0)/4 (psi(r0) - psi(-r0))^2 sum_{n>=2} of the same terms,
    valid for lacunary block sizes. With a geometric generator the series
    follow the infinite family and are certified by the ratio
    m_ratio * lambda_ratio^2; without one they are finite sums.
    """
    if lower and not params.is_lacunary():
        raise ModelError("bkf: lower bound series needs lacunary block sizes and r0")
    terms, horizons, remainder, certified = _bound_terms(params, n_max)
    evidence = {'raw_total': math.fsum(terms)}
    if params.generator is not None:
        evidence['series_ratio'] = params.generator.series_ratio

    up_factor = (1.0 - params.eps) ** 2
    upper = classify_series(up_factor * terms, horizons=horizons, tail_bound=up_factor * remainder,
                            certified=certified, evidence={**evidence, 'prefactor': up_factor})
    low = None
    if lower:
        r0 = params.r0
        low_factor = (1.0 - r0) / 4.0 * float(params.psi(r0) - params.psi(-r0)) ** 2
        low_terms = low_factor * terms
        low_terms[0] = 0.0
        low = classify_series(low_terms, horizons=horizons, tail_bound=low_factor * remainder,
                              certified=certified, evidence={**evidence, 'prefactor': low_factor})
    logger.info("[models] bkf l2 bounds: %d terms, verdict %s", terms.size, upper.verdict)
    return low, upper
