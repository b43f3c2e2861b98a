"""Variation, oscillation, Dobrushin and ell^2 evaluators shared by every kernel family."""

import logging
import math
from typing import Optional

import numpy as np

from gchains.config import Config
from gchains.errors import HorizonError
from gchains.kernels.base import EXACT, LOWER_BOUND, UPPER_BOUND, Estimate, Kernel, SearchBudget
from gchains.kernels.numerics import all_words
from gchains.kernels.past import Past
from gchains.kernels.series import CONVERGENT, DIVERGENT, SeriesClassification, classify_series

logger = logging.getLogger(__name__)

SATISFIED = 'satisfied'
VIOLATED = 'violated'


def _prefixes(size: int, k: int, search: SearchBudget, rng: np.random.Generator) -> tuple:
    """Prefix words (rows, chronological columns) and whether they are exhaustive."""
    if search.exhaustive(size, k):
        return all_words(size, k), True
    return rng.integers(0, size, size=(search.size, k)), False


def search_pasts(kernel: Kernel, search: SearchBudget, rng: np.random.Generator) -> list:
    """Constant pasts plus `search.pasts` random eventually periodic ones."""
    size = kernel.alphabet.size
    pasts = kernel.extremal_pasts()
    for _ in range(search.pasts):
        length = int(rng.integers(0, search.max_suffix + 1))
        period = int(rng.integers(1, search.max_period + 1))
        pasts.append(Past(kernel.alphabet, rng.integers(0, size, length), rng.integers(0, size, period)))
    return list(dict.fromkeys(pasts))


def probs_after(kernel: Kernel, past: Past, prefixes: np.ndarray) -> np.ndarray:
    """(rows, |S|) laws of the next symbol after each chronological prefix row."""
    state = kernel.start(past, prefixes.shape[0])
    for col in range(prefixes.shape[1]):
        state.push(prefixes[:, col])
    return state.probs()


def _check_k(k: int, minimum: int):
    if k < minimum:
        raise HorizonError(f"lag must be >= {minimum}, got {k}")


def variation_rate(kernel: Kernel, k: int, search: Optional[SearchBudget] = None) -> Estimate:
    """var_k(g): largest change of g when two pasts share their last k symbols.

    Families with a closed form answer directly. Otherwise the supremum is
    searched over prefixes and pasts; the result is exact only for monotone
    kernels with an exhaustive prefix search, a lower bound otherwise.
    """
    search = search or SearchBudget()
    _check_k(k, 0)
    closed = kernel.variation_closed_form(k, search)
    if closed is not None:
        return closed

    rng = search.rng(0, k)
    prefixes, exhaustive = _prefixes(kernel.alphabet.size, k, search, rng)
    pasts = kernel.extremal_pasts() if kernel.monotone else search_pasts(kernel, search, rng)
    laws = np.stack([probs_after(kernel, p, prefixes) for p in pasts])
    spread = laws.max(axis=0) - laws.min(axis=0)
    kind = EXACT if (kernel.monotone and exhaustive) else LOWER_BOUND
    return Estimate(float(spread.max()), kind, evaluations=laws.shape[0] * laws.shape[1])


def _oscillation_search(kernel: Kernel, k: int, search: SearchBudget) -> tuple:
    size = kernel.alphabet.size
    rng = search.rng(1, k)
    prefixes, _ = _prefixes(size, k - 1, search, rng)
    best = np.zeros(size)
    evaluations = 0
    for cont in search_pasts(kernel, search, rng):
        laws = np.stack([probs_after(kernel, cont.push([b]), prefixes) for b in range(size)])
        spread = laws.max(axis=0) - laws.min(axis=0)
        best = np.maximum(best, spread.max(axis=0))
        evaluations += laws.shape[0] * laws.shape[1]
    return (Estimate(math.fsum(best), LOWER_BOUND, evaluations),
            Estimate(float(best.max()), LOWER_BOUND, evaluations))


def oscillation(kernel: Kernel, k: int, search: Optional[SearchBudget] = None) -> Estimate:
    """osc_k(g) = sum_a sup |g(a w) - g(a w')| over pasts w, w' differing only at lag k."""
    search = search or SearchBudget()
    _check_k(k, 1)
    closed = kernel.oscillation_closed_form(k)
    if closed is not None:
        return closed
    return _oscillation_search(kernel, k, search)[0]


def oscillation_sup(kernel: Kernel, k: int, search: Optional[SearchBudget] = None) -> Estimate:
    """osc_k with a max over output symbols instead of a sum (half the summed value when binary)."""
    search = search or SearchBudget()
    _check_k(k, 1)
    closed = kernel.oscillation_sup_closed_form(k)
    if closed is not None:
        return closed
    if kernel.alphabet.size == 2:
        summed = oscillation(kernel, k, search)
        return Estimate(summed.value / 2.0, summed.kind, summed.evaluations)
    return _oscillation_search(kernel, k, search)[1]


def variation_profile(kernel: Kernel, k_max: int, search: Optional[SearchBudget] = None) -> list:
    """var_1 .. var_kMax. An exact flag survives only while the sequence is nonincreasing."""
    search = search or SearchBudget()
    profile = []
    previous = None
    for k in range(1, k_max + 1):
        est = variation_rate(kernel, k, search)
        if est.exact and previous is not None and est.value > previous + Config.PROB_TOL:
            logger.warning("[criteria] var_%d exceeds var_%d for %s; exact flag dropped",
                           k, k - 1, kernel.describe())
            est = Estimate(est.value, LOWER_BOUND, est.evaluations)
        previous = est.value
        profile.append(est)
    return profile


def dobrushin_sum(kernel: Kernel, k_max: int, search: Optional[SearchBudget] = None,
                  normalization: str = 'sup') -> SeriesClassification:
    """Partial sums of osc_k and the one-sided Dobrushin verdict (sum < 1).

    Both the summed-over-symbols and the sup-over-symbols totals are
    reported; `normalization` picks the one compared against 1.
    """
    search = search or SearchBudget()
    _check_k(k_max, 1)
    if normalization not in ('sup', 'sum'):
        raise HorizonError(f"normalization must be 'sup' or 'sum', got {normalization!r}")

    summed = [oscillation(kernel, k, search) for k in range(1, k_max + 1)]
    if kernel.alphabet.size == 2:
        sup = [Estimate(e.value / 2.0, e.kind, 0) for e in summed]
    else:
        sup = [oscillation_sup(kernel, k, search) for k in range(1, k_max + 1)]
    chosen = sup if normalization == 'sup' else summed
    kinds = {e.kind for e in chosen}

    tail = kernel.dobrushin_tail(k_max)
    if tail is not None and normalization == 'sum':
        tail = tail * kernel.alphabet.size
    upper_ok = kinds <= {EXACT, UPPER_BOUND}
    lower_ok = kinds <= {EXACT, LOWER_BOUND}

    values = np.array([e.value for e in chosen])
    partial_total = math.fsum(values)
    if tail is not None and upper_ok and partial_total + tail < 1.0:
        condition = SATISFIED
    elif lower_ok and partial_total >= 1.0:
        condition = VIOLATED
    else:
        condition = 'inconclusive'

    evidence = {
        'dobrushin': condition,
        'normalization': normalization,
        'summed_total': math.fsum(e.value for e in summed),
        'sup_total': math.fsum(e.value for e in sup),
        'kinds': sorted(kinds),
        'evaluations': sum(e.evaluations for e in summed) + sum(e.evaluations for e in sup),
    }
    logger.info("[criteria] dobrushin %s: partial %.6g tail %s -> %s",
                kernel.describe(), partial_total, tail, condition)
    return classify_series(values, tail_bound=tail if upper_ok else None, evidence=evidence)


def ell2_criterion(kernel: Kernel, k_max: int, search: Optional[SearchBudget] = None) -> SeriesClassification:
    """Partial sums of var_k^2 with family bound series used as certificates when available."""
    search = search or SearchBudget()
    _check_k(k_max, 1)
    profile = variation_profile(kernel, k_max, search)
    terms = np.array([e.value for e in profile]) ** 2
    kinds = {e.kind for e in profile}

    tail = kernel.ell2_tail(k_max) if kinds == {EXACT} else None
    certified = None
    evidence = {'kinds': sorted(kinds), 'evaluations': sum(e.evaluations for e in profile)}
    bounds = kernel.l2_certificate(k_max)
    if bounds is not None:
        lower, upper = bounds
        if upper is not None:
            evidence['upper_bound_series'] = upper.to_dict()
            if upper.verdict == CONVERGENT and upper.certified:
                certified = CONVERGENT
        if lower is not None:
            evidence['lower_bound_series'] = lower.to_dict()
            if certified is None and lower.verdict == DIVERGENT and lower.certified:
                certified = DIVERGENT
    return classify_series(terms, tail_bound=tail, certified=certified, evidence=evidence)
