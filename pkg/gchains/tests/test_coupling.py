"""Tests for the greedy maximal coupling and coupling-time tails."""

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from gchains.config import Config
from gchains.coupling import couple_chains, couple_replicas, coupling_time_tail, greedy_couple, greedy_couple_step
from gchains.diagnostics.mixing import window_histogram
from gchains.errors import HorizonError, ModelError
from gchains.kernels import Alphabet, Past
from gchains.kernels.numerics import half_l1
from gchains.models import ARKernel, ARParams, FiniteMemoryKernel, RenewalKernel, RenewalParams
from gchains.oracle import exact_window_law
from gchains.sim import RngStream


SPINS = Alphabet.spins()
PLUS = Past.constant(SPINS, '+1')
MINUS = Past.constant(SPINS, '-1')
MARKOV = FiniteMemoryKernel(SPINS, 1, [[0.8, 0.2], [0.3, 0.7]])
AUTOREGRESSIVE = ARKernel(ARParams.with_total(0.9, 1.8))
RENEWAL = RenewalKernel(RenewalParams.power(0.5, 0.3, 1.0))
SEED = 99


def uniforms(rows, seed=0):
    return np.random.default_rng(seed).random((rows, 2))


class TestGreedyCouple:
    """Test one coupled draw."""

    def test_marginals_and_agreement(self):
        """Each side keeps its law; agreement has probability sum_a min(pX, pY)."""
        rows = 200000
        pX = np.tile([0.7, 0.3], (rows, 1))
        pY = np.tile([0.4, 0.6], (rows, 1))
        a, b = greedy_couple(pX, pY, uniforms(rows))
        tol = 4 * np.sqrt(0.25 / rows)
        assert abs(np.mean(a == 0) - 0.7) < tol
        assert abs(np.mean(b == 0) - 0.4) < tol
        assert abs(np.mean(a == b) - 0.7) < tol

    def test_three_symbols(self):
        """Residual draws stay on the residual support."""
        rows = 100000
        pX = np.tile([0.5, 0.5, 0.0], (rows, 1))
        pY = np.tile([0.0, 0.5, 0.5], (rows, 1))
        a, b = greedy_couple(pX, pY, uniforms(rows, 1))
        assert np.all(a != 2)
        assert np.all(b != 0)
        assert np.all((a == b) == (a == 1))

    def test_equal_laws_always_agree(self):
        """Identical laws are coupled perfectly."""
        p = np.tile([0.2, 0.8], (1000, 1))
        a, b = greedy_couple(p, p, uniforms(1000))
        assert np.array_equal(a, b)

    def test_rejects_bad_law(self):
        """Inputs must be probability vectors."""
        with pytest.raises(ModelError):
            greedy_couple([[0.5, 0.6]], [[0.5, 0.5]], uniforms(1))

    def test_step(self):
        """Single-draw helper returns plain symbols."""
        a, b = greedy_couple_step([1.0, 0.0], [0.0, 1.0], RngStream(SEED, 0))
        assert (a, b) == (0, 1)


class TestCoupledChains:
    """Test coupled trajectories."""

    def test_equal_pasts_never_disagree(self):
        """Chains from the same past coincide."""
        traj = couple_chains(MARKOV, PLUS, PLUS, 20, RngStream(SEED, 0))
        assert traj.last_disagreement == -1
        assert traj.coupling_time == 0
        assert traj.coupled_at_horizon

    def test_marginal_is_chain(self):
        """The X coordinate has the law of the chain from its own past."""
        xs, ys = couple_replicas(MARKOV, PLUS, MINUS, 1, 20000, SEED)
        tol = 4 * np.sqrt(0.25 / 20000)
        assert abs(np.mean(xs[:, 0] == 0) - 0.8) < tol
        assert abs(np.mean(ys[:, 0] == 0) - 0.3) < tol

    def test_deterministic(self):
        """Same seed, same coupled replicas."""
        a = couple_replicas(MARKOV, PLUS, MINUS, 10, 32, SEED)
        b = couple_replicas(MARKOV, PLUS, MINUS, 10, 32, SEED)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_short_horizon(self):
        """Coupling needs T >= 1."""
        with pytest.raises(HorizonError):
            couple_chains(MARKOV, PLUS, MINUS, 0, RngStream(SEED, 0))


class TestCouplingTail:
    """Test P(Theta > n) estimates."""

    def test_markov_tail(self):
        """Order-1 chains stay apart with probability 1/2 per step: P(Theta > n) = 2^-(n+1)."""
        frame = coupling_time_tail(MARKOV, PLUS, MINUS, [0, 1, 2, 3], 16, 20000, SEED)
        expected = 0.5 ** (np.arange(4) + 1)
        sigma = np.sqrt(expected * (1 - expected) / 20000)
        assert np.all(np.abs(frame['tailEstimate'].to_numpy() - expected) < 4 * sigma)
        assert np.all(frame['ciLow'] <= frame['tailEstimate'])
        assert np.all(frame['tailEstimate'] <= frame['ciHigh'])

    def test_iid_tail_is_zero(self):
        """Kernels without memory couple at once."""
        kernel = FiniteMemoryKernel.iid([0.4, 0.6])
        frame = coupling_time_tail(kernel, PLUS, MINUS, [0, 2], 8, 500, SEED)
        assert frame['tailEstimate'].tolist() == [0.0, 0.0]
        assert frame['censored'].iloc[0] == 0.0

    def test_tail_nonincreasing(self):
        """P(Theta > n) does not increase in n."""
        frame = coupling_time_tail(MARKOV, PLUS, MINUS, [0, 1, 2, 4, 6], 12, 1000, SEED)
        assert np.all(np.diff(frame['tailEstimate'].to_numpy()) <= 0)

    def test_window_must_fit(self):
        """max(n) + W must not pass T."""
        with pytest.raises(HorizonError):
            coupling_time_tail(MARKOV, PLUS, MINUS, [0, 8], 8, 100, SEED)


class TestCouplingMarginals:
    """Test coupled coordinates against exact window laws."""

    @pytest.mark.parametrize('kernel', [AUTOREGRESSIVE, RENEWAL], ids=['autoregressive', 'renewal'])
    @pytest.mark.parametrize('replicas', [20000, pytest.param(100000, marks=pytest.mark.slow)])
    def test_marginals_match_window_law(self, kernel, replicas, monkeypatch):
        """Each coordinate on [0, 10] has the exact law of the chain from its own past."""
        monkeypatch.setattr(Config, 'REPLICA_CHUNK', 4096)
        xs, ys = couple_replicas(kernel, PLUS, MINUS, 10, replicas, SEED)
        for symbols, past in ((xs, PLUS), (ys, MINUS)):
            law = exact_window_law(kernel, past, 0, 10)
            for t in range(11):
                p = law.marginal(t, t).probs[0]
                sigma = math.sqrt(p * (1 - p) / replicas)
                assert abs(np.mean(symbols[:, t] == 0) - p) <= 4 * sigma
            # E[TV] <= noise, and TV moves by at most 1/replicas per sample
            noise = 0.5 * math.fsum(np.sqrt(law.probs * (1 - law.probs) / replicas))
            assert half_l1(window_histogram(symbols, 2, 0, 11), law.probs) <= noise + 0.02

    @pytest.mark.parametrize('kernel', [AUTOREGRESSIVE, RENEWAL], ids=['autoregressive', 'renewal'])
    def test_one_step_agreement(self, kernel, monkeypatch):
        """First symbols agree with probability 1 minus half the L1 distance of the two laws."""
        monkeypatch.setattr(Config, 'REPLICA_CHUNK', 4096)
        replicas = 20000
        xs, ys = couple_replicas(kernel, PLUS, MINUS, 1, replicas, SEED)
        expected = 1.0 - half_l1(kernel.probs(PLUS), kernel.probs(MINUS))
        sigma = math.sqrt(expected * (1 - expected) / replicas)
        assert abs(np.mean(xs[:, 0] == ys[:, 0]) - expected) <= 4 * sigma

    def test_renewal_agreement_value(self):
        """q_0 = 0.8 against q_inf = 0.5 leaves 0.7 of shared mass."""
        assert 1.0 - half_l1(RENEWAL.probs(PLUS), RENEWAL.probs(MINUS)) == pytest.approx(0.7)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
