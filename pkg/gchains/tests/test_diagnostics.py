"""Tests for weak-l2 curves, TV and beta-mixing curves, correlations and reports."""

import json
import math

import numpy as np
import pandas as pd
import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from gchains.config import Config
from gchains.diagnostics import (
    DiagnosticsReport,
    beta_mixing_curve,
    correlation_curve,
    decay_fits,
    dobrushin_profile,
    load_report,
    p_weak_l2_curve,
    tv_decay_curve,
    weak_l2_curve,
)
from gchains.diagnostics.correlations import ar_correlation_bound, autocovariance
from gchains.diagnostics.report import to_jsonable
from gchains.errors import HorizonError, ModelError
from gchains.kernels import CONVERGENT, DIVERGENT, Alphabet, Past, dobrushin_sum, ell2_criterion
from gchains.models import (
    ARKernel,
    ARParams,
    BKFKernel,
    BKFParams,
    FiniteMemoryKernel,
    LinearPsi,
    RenewalKernel,
    RenewalParams,
)
from gchains.oracle import exact_hellinger_increments, exact_weak_l2_expectation


SPINS = Alphabet.spins()
PLUS = Past.constant(SPINS, '+1')
MINUS = Past.constant(SPINS, '-1')
MARKOV = FiniteMemoryKernel(SPINS, 1, [[0.8, 0.2], [0.3, 0.7]])
ORDER2 = FiniteMemoryKernel(SPINS, 2, [[0.9, 0.1], [0.6, 0.4], [0.3, 0.7], [0.2, 0.8]])
RENEWAL = RenewalKernel(RenewalParams.power(0.5, 0.3, 1.0))
AR_CONVERGENT = ARKernel(ARParams.with_total(0.9, 1.8))
AR_DIVERGENT = ARKernel(ARParams.with_total(0.9, 1.3))
BKF = BKFKernel(BKFParams.geometric(1, 5, 0.5, 4, LinearPsi(0.1), r0=0.1))
SANDWICH_KERNELS = [AR_CONVERGENT, AR_DIVERGENT, BKF, RENEWAL, ORDER2]
SANDWICH_IDS = ["ar-1.8", "ar-1.3", "bkf", "renewal", "order2"]
SEED = 7


class TestWeakL2:
    """Test Monte Carlo weak-l2 partial sums."""

    def test_markov_is_zero(self):
        """Order 1 forgets the past at once: D_N = 0 and the verdict is bounded."""
        curve = weak_l2_curve(MARKOV, PLUS, MINUS, 50, 100, SEED)
        assert np.all(curve.partial_sums == 0.0)
        assert curve.verdict == CONVERGENT
        assert curve.bounded

    def test_order2_matches_oracle(self):
        """Mean D_N agrees with the exact expectation 0.68."""
        curve = weak_l2_curve(ORDER2, PLUS, MINUS, 20, 400, SEED)
        mean = curve.mean()[-1]
        stderr = curve.stderr()[-1]
        assert abs(mean - 0.68) <= Config.SIGMA_BAND * stderr + 1e-12
        assert curve.sandwich_violations == 0
        assert curve.bound_violations == 0
        assert curve.steps_checked == 400 * 21

    def test_renewal_bounded(self):
        """Renewal chains from pasts that differ before the last +1 merge at the next +1."""
        x = Past.from_symbols(SPINS, ['+1'], ['-1'])
        y = Past.from_symbols(SPINS, ['-1', '+1'], ['-1'])
        curve = weak_l2_curve(RENEWAL, x, y, 400, 100, SEED)
        assert curve.verdict == CONVERGENT
        assert curve.sandwich_violations == 0

    def test_deterministic(self, monkeypatch):
        """Same seed, same sums, whatever the chunking."""
        a = weak_l2_curve(ORDER2, PLUS, MINUS, 10, 100, SEED)
        monkeypatch.setattr(Config, 'REPLICA_CHUNK', 7)
        b = weak_l2_curve(ORDER2, PLUS, MINUS, 10, 100, SEED)
        assert np.array_equal(a.partial_sums, b.partial_sums)

    def test_frame_columns(self):
        """Curve frame holds mean, stderr and quantiles per horizon."""
        frame = weak_l2_curve(ORDER2, PLUS, MINUS, 10, 100, SEED, horizons=[1, 5, 10]).to_frame()
        assert list(frame.columns) == ['N', 'mean', 'stderr', 'q10', 'q50', 'q90']
        assert frame['N'].tolist() == [1, 5, 10]

    def test_replica_floor(self):
        """Fewer than 100 replicas is refused."""
        with pytest.raises(HorizonError):
            weak_l2_curve(MARKOV, PLUS, MINUS, 10, 99, SEED)
        with pytest.raises(HorizonError):
            weak_l2_curve(MARKOV, PLUS, MINUS, 0, 100, SEED)

    def test_stationary_pairs(self):
        """One curve per stationary pair; every pair is bounded for order 1."""
        result = p_weak_l2_curve(MARKOV, MINUS, 20, 1, 3, 10, 100, SEED)
        assert len(result.curves) == 3
        assert result.bounded_fraction == 1.0
        frame = result.to_frame()
        assert sorted(frame['pair'].unique().tolist()) == [0, 1, 2]
        assert result.summary()['pair_verdicts'] == [CONVERGENT] * 3


class TestAutoregressiveDichotomy:
    """Test weak-l2 growth on both sides of the ell2 threshold."""

    def test_mean_matches_oracle(self):
        """Mean D_18 agrees with the enumerated expectation."""
        exact = exact_weak_l2_expectation(AR_CONVERGENT, PLUS, MINUS, 18)
        curve = weak_l2_curve(AR_CONVERGENT, PLUS, MINUS, 18, 2000, SEED, horizons=[18])
        assert exact.sandwich_violations == 0
        assert abs(curve.mean()[-1] - exact.value) <= Config.SIGMA_BAND * curve.stderr()[-1] + Config.ORACLE_TOL

    def test_growth_dichotomy(self):
        """Exponent 1.8 gives bounded sums, exponent 1.3 a median slope above 0.2."""
        bounded = weak_l2_curve(AR_CONVERGENT, PLUS, MINUS, 5000, 100, SEED)
        growing = weak_l2_curve(AR_DIVERGENT, PLUS, MINUS, 5000, 100, SEED)
        assert bounded.verdict == CONVERGENT
        assert growing.verdict == DIVERGENT
        assert growing.classification.evidence['growth_slope'] >= 0.2

    def test_dobrushin_regime(self):
        """Exponent 1.3 satisfies Dobrushin with a finite tail and has summable squares."""
        dobrushin = dobrushin_sum(AR_DIVERGENT, 128)
        assert dobrushin.evidence['dobrushin'] == 'satisfied'
        assert math.isfinite(dobrushin.analytic_tail_bound)
        assert ell2_criterion(AR_DIVERGENT, 128).verdict == CONVERGENT

    @pytest.mark.slow
    def test_growth_dichotomy_full(self):
        """N = 10^5 with 500 replicas."""
        bounded = weak_l2_curve(AR_CONVERGENT, PLUS, MINUS, 100000, 500, SEED)
        growing = weak_l2_curve(AR_DIVERGENT, PLUS, MINUS, 100000, 500, SEED)
        assert bounded.verdict == CONVERGENT
        assert growing.verdict == DIVERGENT
        assert growing.classification.evidence['growth_slope'] >= 0.2


class TestHellingerSandwich:
    """Test 4 gamma d_n <= increment <= 4 (1 - gamma) d_n on every family."""

    @pytest.mark.parametrize('kernel', SANDWICH_KERNELS, ids=SANDWICH_IDS)
    def test_simulated_steps(self, kernel):
        """No violation on 10^5 simulated steps."""
        curve = weak_l2_curve(kernel, PLUS, MINUS, 999, 100, SEED)
        assert curve.steps_checked == 100000
        assert curve.sandwich_violations == 0
        assert curve.bound_violations == 0

    @pytest.mark.slow
    @pytest.mark.parametrize('kernel', SANDWICH_KERNELS, ids=SANDWICH_IDS)
    def test_simulated_steps_full(self, kernel):
        """No violation on 10^6 simulated steps."""
        curve = weak_l2_curve(kernel, PLUS, MINUS, 9999, 100, SEED)
        assert curve.steps_checked == 1000000
        assert curve.sandwich_violations == 0

    @pytest.mark.parametrize('kernel', SANDWICH_KERNELS, ids=SANDWICH_IDS)
    def test_enumerated_histories(self, kernel):
        """No violation on any history of length 11."""
        assert exact_hellinger_increments(kernel, PLUS, MINUS, 10).sandwich_violations == 0


class TestTVDecay:
    """Test TV decay curves."""

    def test_markov_exact_curve(self):
        """Exact window TV is 0.5^(n+1) and lies under the coupling bound."""
        curve = tv_decay_curve(MARKOV, PLUS, MINUS, [0, 1, 2, 3, 4], 2, 2000, SEED)
        frame = curve.frame
        np.testing.assert_allclose(frame['exact'], 0.5 ** (frame['n'] + 1), atol=1e-12)
        assert not curve.degraded
        assert curve.ordering_violations == 0
        assert np.all(np.abs(frame['mcTv'] - frame['exact']) <= frame['mcNoise'] * Config.SIGMA_BAND + 0.01)

    def test_equal_pasts_zero(self):
        """Shared streams make equal pasts give identical samples."""
        frame = tv_decay_curve(RENEWAL, PLUS, PLUS, [0, 2], 2, 200, SEED).frame
        assert frame['mcTv'].tolist() == [0.0, 0.0]
        assert frame['exact'].tolist() == [0.0, 0.0]
        assert frame['couplingTail'].tolist() == [0.0, 0.0]

    def test_degraded_without_budget(self):
        """Over-budget exact curves are dropped, not fatal."""
        curve = tv_decay_curve(MARKOV, PLUS, MINUS, [0, 4], 2, 200, SEED, budget=8)
        assert curve.degraded
        assert curve.frame['exact'].isna().all()
        assert curve.summary()['exact_available'] is False

    def test_columns(self):
        """Frame columns are fixed."""
        frame = tv_decay_curve(MARKOV, PLUS, MINUS, [1], 1, 100, SEED).frame
        assert list(frame.columns) == ['n', 'exact', 'mcTv', 'mcNoise', 'mcLower', 'mcSingle', 'couplingTail',
                                       'couplingCiLow', 'couplingCiHigh', 'couplingSigma', 'censored']

    def test_histogram_cap(self):
        """|S|^w above the histogram cap is refused."""
        with pytest.raises(HorizonError):
            tv_decay_curve(MARKOV, PLUS, MINUS, [0], 13, 100, SEED)

    def test_autoregressive_bracketing(self):
        """Exact window TV sits under the coupling tail and shrinks with n."""
        curve = tv_decay_curve(AR_CONVERGENT, PLUS, MINUS, [0, 2, 4, 8], 4, 4000, SEED)
        frame = curve.frame
        assert not curve.degraded
        ceiling = np.maximum(frame['couplingCiHigh'], frame['couplingTail'] + Config.SIGMA_BAND * frame['couplingSigma'])
        assert np.all(frame['exact'] <= ceiling)
        assert frame['exact'].iloc[-1] < frame['exact'].iloc[0]

    @pytest.mark.slow
    def test_autoregressive_bracketing_full(self):
        """Offsets up to 16 with w = 4: bracketed everywhere and at least halved."""
        curve = tv_decay_curve(AR_CONVERGENT, PLUS, MINUS, [0, 1, 2, 4, 8, 12, 16], 4, 20000, SEED)
        frame = curve.frame
        assert not curve.degraded
        ceiling = np.maximum(frame['couplingCiHigh'], frame['couplingTail'] + Config.SIGMA_BAND * frame['couplingSigma'])
        assert np.all(frame['exact'] <= ceiling)
        assert frame['exact'].iloc[-1] <= 0.5 * frame['exact'].iloc[0]

    def test_decay_fits(self):
        """Geometric data gives its ratio back."""
        n = np.arange(1, 9)
        fits = decay_fits(n, 0.3 * 0.5 ** n)
        assert fits['geometric']['rate'] == pytest.approx(0.5)
        assert fits['power']['exponent'] > 0

    def test_decay_fits_empty(self):
        """No positive values, no fits."""
        assert decay_fits([1, 2], [0.0, 0.0]) == {'power': None, 'geometric': None}


class TestBetaMixing:
    """Test beta-mixing curves."""

    def test_markov_exact_pairs(self):
        """Pairs are enumerated exactly and the matrix answer is attached."""
        curve = beta_mixing_curve(MARKOV, [1, 2, 4], 2, 16, SEED, burn_in=30, suffix_length=1)
        frame = curve.frame
        assert frame['exactPairs'].iloc[0] == 16
        assert curve.spectral_rate == pytest.approx(0.5)
        np.testing.assert_allclose(frame['exactBeta'], [0.12, 0.06, 0.015], atol=1e-12)
        assert np.all(np.diff(frame['betaIsotonic']) <= 0)
        assert list(frame.columns) == ['n', 'beta', 'stderr', 'betaIsotonic', 'exactPairs', 'exactBeta']

    def test_pair_values(self):
        """Each pair contributes 0 (same context) or 0.5^(n+1) (different contexts)."""
        curve = beta_mixing_curve(MARKOV, [1], 1, 8, SEED, burn_in=10, suffix_length=1)
        beta = curve.frame['beta'].iloc[0]
        assert 0.0 <= beta <= 0.25
        assert (beta / 0.25 * 8) == pytest.approx(round(beta / 0.25 * 8))

    def test_monte_carlo_pairs(self):
        """Over-budget pairs fall back to histograms and say so."""
        curve = beta_mixing_curve(MARKOV, [1, 3], 1, 2, SEED, burn_in=10, suffix_length=1, replicas=300,
                                  budget=2)
        assert curve.frame['exactPairs'].iloc[0] == 0
        assert any('histogram' in c for c in curve.caveats)

    def test_default_burn_in(self):
        """Burn-in defaults to ten memory scales."""
        curve = beta_mixing_curve(MARKOV, [1], 1, 2, SEED)
        assert curve.burn_in == 10
        assert curve.suffix_length == 10


class TestCorrelations:
    """Test correlation curves and the interdependence profile."""

    def test_autocovariance(self):
        """Alternating spins have lag-1 covariance -1."""
        xi = np.tile([1.0, -1.0], (2, 50))
        cov = autocovariance(xi, 2, 0.0)
        np.testing.assert_allclose(cov[:, 0], 1.0)
        np.testing.assert_allclose(cov[:, 1], -1.0)
        np.testing.assert_allclose(cov[:, 2], 1.0)

    def test_markov_correlations(self):
        """Estimates sit near 0.96 * 0.5^j and the exact column is filled."""
        curve = correlation_curve(MARKOV, 8, 2000, 20, SEED, burn_in=50)
        frame = curve.frame
        np.testing.assert_allclose(frame['exactGamma'], 0.96 * 0.5 ** np.arange(9), atol=1e-12)
        assert abs(frame['gamma'].iloc[0] - 0.96) < 0.05
        assert abs(frame['gamma'].iloc[1] - 0.48) < 0.05
        assert curve.units == 20
        assert list(frame.columns) == ['j', 'gamma', 'stderr', 'ciLow', 'ciHigh', 'corrected', 'rawPartialSum',
                                       'correctedPartialSum', 'exactGamma']

    def test_batches_for_few_replicas(self):
        """Few replicas are split into batches for the intervals."""
        curve = correlation_curve(MARKOV, 4, 2000, 2, SEED, burn_in=50, profile=False)
        assert curve.units == 2 * 20
        assert curve.profile is None

    def test_profile_markov(self):
        """One-lag interdependence gives a profile halving per lag."""
        profile = dobrushin_profile(MARKOV, 8)['profile'].to_numpy()
        np.testing.assert_allclose(profile[3:] / profile[2:-1], 0.5, rtol=1e-9)

    def test_ar_bound(self):
        """Correlation sum times sum n beta_n^2, next to the direct quadratic form."""
        kernel = ARKernel(ARParams(prefix=(0.3,)))
        bound = ar_correlation_bound(kernel, np.array([1.0, 0.5]))
        assert bound['correlation_sum'] == pytest.approx(2.0)
        assert bound['beta_weighted_sum'] == pytest.approx(0.09)
        assert bound['bound'] == pytest.approx(0.18)
        assert bound['quadratic_form'] == pytest.approx(0.09)

    def test_requires_spins(self):
        """Correlations are defined for the +1/-1 process."""
        kernel = FiniteMemoryKernel.iid([0.2, 0.3, 0.5], Alphabet(('a', 'b', 'c')))
        with pytest.raises(ModelError):
            correlation_curve(kernel, 4, 100, 20, SEED)

    def test_lag_below_length(self):
        """j_max must be below the sample length."""
        with pytest.raises(HorizonError):
            correlation_curve(MARKOV, 10, 10, 20, SEED)


class TestReport:
    """Test report payloads and files."""

    def make_report(self):
        report = DiagnosticsReport(name='unit', kind='tv-decay', anchor='test', config={'a': 1},
                                   model={'family': 'iid'}, root_seed=5)
        report.verdicts['tv'] = 'decaying'
        report.results['tv'] = {'value': math.nan, 'limit': math.inf, 'count': np.int64(3)}
        report.add_curve('tv', pd.DataFrame({'n': [0, 1], 'value': [0.5, 1 / 3]}))
        return report

    def test_to_jsonable(self):
        """Non-finite floats become null; numpy scalars become plain numbers."""
        out = to_jsonable({'x': np.float64(math.nan), 'y': [np.int32(2), math.inf], 'z': np.bool_(True)})
        assert out == {'x': None, 'y': [2, None], 'z': True}

    def test_payload_has_no_clock(self):
        """Timings and worker counts live in the metadata only."""
        report = self.make_report()
        report.stamp(pd.Timestamp.now(tz='UTC').to_pydatetime(), 4, 1.5)
        payload = report.payload()
        assert 'metadata' not in payload
        assert 'workers' not in json.dumps(payload)
        assert payload['results']['tv']['value'] is None
        assert report.metadata['workers'] == 4

    def test_write_and_load(self, tmp_path):
        """report.json plus one CSV per curve with round-trip floats."""
        report = self.make_report()
        target = report.write(str(tmp_path))
        document = load_report(os.path.join(target, 'report.json'))
        assert document['payload']['name'] == 'unit'
        assert document['payload']['schema_version'] == Config.SCHEMA_VERSION
        frame = pd.read_csv(os.path.join(target, 'tv.csv'))
        assert frame['value'].iloc[1] == 1 / 3

    def test_inconclusive(self):
        """Any inconclusive verdict marks the report."""
        report = self.make_report()
        assert not report.inconclusive
        report.verdicts['other'] = 'inconclusive'
        assert report.inconclusive


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
