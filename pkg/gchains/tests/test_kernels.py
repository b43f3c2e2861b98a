"""Tests for alphabets, pasts, numerics, series verdicts and the shared criteria."""

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from gchains.errors import HorizonError, ModelError
from gchains.kernels import (
    CONVERGENT,
    DIVERGENT,
    EXACT,
    LOWER_BOUND,
    Alphabet,
    Past,
    SearchBudget,
    classify_growth,
    classify_series,
    dobrushin_sum,
    ell2_criterion,
    oscillation,
    oscillation_sup,
    variation_profile,
    variation_rate,
)
from gchains.kernels.criteria import probs_after
from gchains.kernels.numerics import (
    all_words,
    compensated_cumsum,
    half_l1,
    inverse_cdf,
    log_spaced,
    loglog_slope,
    wilson_interval,
)
from gchains.models import CustomKernel, FiniteMemoryKernel, RenewalKernel, RenewalParams


SPINS = Alphabet.spins()

# Order-2 table; row code = x_{-1} + 2 x_{-2} with +1 -> 0, -1 -> 1
ORDER2_TABLE = [
    [0.9, 0.1],
    [0.6, 0.4],
    [0.3, 0.7],
    [0.2, 0.8],
]

MARKOV_TABLE = [[0.8, 0.2], [0.3, 0.7]]


def order2_fn(past):
    code = past.lookup(1) + 2 * past.lookup(2)
    return np.asarray(ORDER2_TABLE[code])


def renewal_kernel():
    return RenewalKernel(RenewalParams.power(0.5, 0.3, 1.0))


class TestAlphabet:
    """Test canonical symbol indexing."""

    def test_spin_order(self):
        """+1 comes first in the binary alphabet."""
        assert SPINS.index('+1') == 0
        assert SPINS.index('-1') == 1
        assert SPINS.index(1) == 0
        assert SPINS.index(-1.0) == 1
        assert SPINS.is_spin

    def test_rejects_duplicates(self):
        """Duplicate symbols are a model error."""
        with pytest.raises(ModelError):
            Alphabet(('a', 'a'))

    def test_rejects_single_symbol(self):
        """An alphabet needs two symbols."""
        with pytest.raises(ModelError):
            Alphabet(('a',))

    def test_unknown_symbol(self):
        """Unknown labels raise."""
        with pytest.raises(ModelError):
            SPINS.index('0')


class TestPast:
    """Test eventually periodic pasts."""

    def test_canonical_form(self):
        """Equal sequences compare equal whatever the input representation."""
        assert Past(SPINS, (0, 0), (0,)) == Past.constant(SPINS, '+1')
        assert Past(SPINS, (), (0, 1, 0, 1)) == Past(SPINS, (), (0, 1))
        assert Past(SPINS, (1, 0), (1, 0)).period == 2

    def test_lookup_and_window(self):
        """x_{-k} follows the suffix and then the repeating tail."""
        past = Past.from_symbols(SPINS, ['+1'], ['-1', '+1'])
        assert past.lookup(1) == 0
        assert past.lookup(2) == 1
        assert past.lookup(3) == 0
        assert past.lookup(4) == 1
        assert past.window(4).tolist() == [0, 1, 0, 1]

    def test_push_is_chronological(self):
        """The last pushed symbol becomes x_{-1}."""
        past = Past.constant(SPINS, '-1').push([0, 0, 1])
        assert past.lookup(1) == 1
        assert past.lookup(2) == 0
        assert past.lookup(3) == 0
        assert past.lookup(4) == 1

    def test_describe(self):
        """Readable form: suffix in brackets then the tail period."""
        assert Past.constant(SPINS, '+1').describe() == '(+1)*'
        assert Past.from_symbols(SPINS, ['+1'], ['-1']).describe() == '[+1](-1)*'

    def test_rejects_empty_tail(self):
        """A past needs a period of at least one."""
        with pytest.raises(ModelError):
            Past(SPINS, (0,), ())

    def test_rejects_bad_lag(self):
        """Lags start at 1."""
        with pytest.raises(ModelError):
            Past.constant(SPINS, '+1').lookup(0)


class TestNumerics:
    """Test shared numeric helpers."""

    def test_all_words_order(self):
        """Words are lexicographic with column 0 most significant."""
        assert all_words(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
        assert all_words(3, 0).shape == (1, 0)

    def test_log_spaced(self):
        """Grid is increasing, unique and ends at n_max."""
        grid = log_spaced(1000)
        assert grid[0] == 1
        assert grid[-1] == 1000
        assert np.all(np.diff(grid) > 0)

    def test_compensated_cumsum(self):
        """Long sums of small terms stay exact."""
        sums = compensated_cumsum(np.full(100000, 0.1))
        assert sums[-1] == pytest.approx(10000.0, abs=1e-9)

    def test_half_l1(self):
        """TV of disjoint point masses is 1."""
        assert half_l1([1.0, 0.0], [0.0, 1.0]) == 1.0
        assert half_l1([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_inverse_cdf(self):
        """Uniforms map to symbols by cumulative law in canonical order."""
        probs = np.tile([0.3, 0.7], (3, 1))
        assert inverse_cdf(probs, np.array([0.1, 0.3, 0.9])).tolist() == [0, 1, 1]

    def test_loglog_slope(self):
        """Slope of a pure power law."""
        x = np.arange(1, 101)
        fit = loglog_slope(x, x ** 2.0)
        assert fit['slope'] == pytest.approx(2.0)

    def test_wilson_interval(self):
        """Interval contains the proportion; empty samples give [0, 1]."""
        lo, hi = wilson_interval(30, 100)
        assert lo < 0.3 < hi
        assert wilson_interval(0, 0) == (0.0, 1.0)


class TestSeries:
    """Test series and growth verdicts."""

    def test_certified_by_remainder(self):
        """A finite remainder bound certifies convergence."""
        k = np.arange(1, 101)
        result = classify_series(1.0 / k ** 2, tail_bound=1.0 / 100)
        assert result.verdict == CONVERGENT
        assert result.certified

    def test_divergent_by_slope(self):
        """Linearly growing partial sums diverge."""
        result = classify_series(np.ones(200))
        assert result.verdict == DIVERGENT
        assert not result.certified

    def test_vanishing_terms(self):
        """All-zero series converge."""
        assert classify_series(np.zeros(10)).verdict == CONVERGENT

    def test_growth_flat(self):
        """Flat observed sums are bounded."""
        n = np.arange(1, 101)
        assert classify_growth(n, np.full(100, 3.0)).verdict == CONVERGENT

    def test_growth_linear(self):
        """Linear observed sums diverge."""
        n = np.arange(1, 101)
        assert classify_growth(n, 0.5 * n).verdict == DIVERGENT


class TestCriteria:
    """Test variation, oscillation and the two summability criteria."""

    def test_renewal_variation_closed_form(self):
        """var_k = q_k - q_inf exactly for renewal kernels."""
        kernel = renewal_kernel()
        for k in (1, 5, 20):
            est = variation_rate(kernel, k)
            assert est.kind == EXACT
            assert est.value == pytest.approx(0.3 / (k + 1))

    def test_renewal_oscillation(self):
        """osc_k sums the flip effect over both symbols."""
        kernel = renewal_kernel()
        assert oscillation(kernel, 3).value == pytest.approx(2 * 0.3 / 3)
        assert oscillation_sup(kernel, 3).value == pytest.approx(0.3 / 3)

    def test_renewal_dobrushin_violated(self):
        """Harmonic oscillations exceed one."""
        result = dobrushin_sum(renewal_kernel(), 50)
        assert result.evidence['dobrushin'] == 'violated'

    def test_markov_dobrushin_satisfied(self):
        """A single lag with oscillation 1/2 satisfies the criterion."""
        kernel = FiniteMemoryKernel(SPINS, 1, MARKOV_TABLE)
        result = dobrushin_sum(kernel, 5)
        assert result.evidence['dobrushin'] == 'satisfied'
        assert result.evidence['sup_total'] == pytest.approx(0.5)

    def test_markov_ell2_convergent(self):
        """Finite memory gives a finite ell2 sum."""
        kernel = FiniteMemoryKernel(SPINS, 1, MARKOV_TABLE)
        assert ell2_criterion(kernel, 8).verdict == CONVERGENT

    def test_search_matches_closed_form(self):
        """Searching over pasts recovers the table answer as a lower bound."""
        custom = CustomKernel(order2_fn, SPINS, non_null_bound=0.1)
        table = FiniteMemoryKernel(SPINS, 2, ORDER2_TABLE)
        search = SearchBudget(size=64, pasts=4, seed=3)

        est = variation_rate(custom, 1, search)
        assert est.kind == LOWER_BOUND
        assert est.value == pytest.approx(variation_rate(table, 1).value)
        assert est.value == pytest.approx(0.6)

        assert oscillation(custom, 2, search).value == pytest.approx(oscillation(table, 2).value)
        assert oscillation(custom, 2, search).value == pytest.approx(1.2)

    def test_variation_profile_length(self):
        """One estimate per lag."""
        profile = variation_profile(renewal_kernel(), 7)
        assert len(profile) == 7
        assert all(e.exact for e in profile)

    def test_probs_after_prefix(self):
        """Prefix rows are read chronologically."""
        kernel = FiniteMemoryKernel(SPINS, 2, ORDER2_TABLE)
        laws = probs_after(kernel, Past.constant(SPINS, '-1'), np.array([[0, 1], [1, 0]]))
        # x_{-1} = -1, x_{-2} = +1 is code 1; x_{-1} = +1, x_{-2} = -1 is code 2
        assert laws[0].tolist() == ORDER2_TABLE[1]
        assert laws[1].tolist() == ORDER2_TABLE[2]

    def test_bad_horizons(self):
        """Lags below the minimum raise."""
        with pytest.raises(HorizonError):
            oscillation(renewal_kernel(), 0)
        with pytest.raises(HorizonError):
            dobrushin_sum(renewal_kernel(), 5, normalization='max')

    def test_search_budget_validation(self):
        """Budgets must be positive."""
        with pytest.raises(HorizonError):
            SearchBudget(size=0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
