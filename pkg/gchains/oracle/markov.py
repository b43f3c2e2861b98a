"""Matrix oracles for finite-memory kernels: transition matrices on S^k, window laws
from matrix powers, stationary laws, exact mixing coefficients and correlations."""

import logging

import numpy as np
from scipy import linalg

from gchains.config import Config
from gchains.errors import HorizonError, ModelError
from gchains.kernels.numerics import half_l1
from gchains.kernels.past import Past
from gchains.models.finite_memory import FiniteMemoryKernel

logger = logging.getLogger(__name__)

POWER_ITERATIONS = 100000


def _check_kernel(kernel):
    if not isinstance(kernel, FiniteMemoryKernel):
        raise ModelError(f"matrix oracles need a finite-memory kernel, got {kernel.family}")


def symbol_matrices(kernel: FiniteMemoryKernel) -> np.ndarray:
    """(|S|, C, C) with [a, c, c'] = P(emit a and move from context c to c')."""
    _check_kernel(kernel)
    S, C = kernel.alphabet.size, kernel.contexts
    out = np.zeros((S, C, C))
    codes = np.arange(C)
    for a in range(S):
        out[a, codes, (codes * S + a) % C] = kernel.table[:, a]
    return out


def transition_matrix(kernel: FiniteMemoryKernel) -> np.ndarray:
    """Row-stochastic matrix of the context chain on S^k."""
    return symbol_matrices(kernel).sum(axis=0)


def _power_iteration(P: np.ndarray) -> np.ndarray:
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(POWER_ITERATIONS):
        nxt = pi @ P
        if np.max(np.abs(nxt - pi)) < Config.PROB_TOL:
            return nxt
        pi = nxt
    logger.warning("[oracle] power iteration did not settle within %d steps", POWER_ITERATIONS)
    return pi


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Left eigenvector for eigenvalue 1, with power iteration as the fallback."""
    values, vectors = linalg.eig(P.T)
    i = int(np.argmin(np.abs(values - 1.0)))
    pi = np.real(vectors[:, i])
    pi = pi / pi.sum()
    if np.all(pi > -Config.PROB_TOL) and np.max(np.abs(pi @ P - pi)) < Config.ORACLE_TOL:
        return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()
    logger.info("[oracle] eigen-solve unreliable, using power iteration")
    return _power_iteration(P)


def second_eigenvalue(P: np.ndarray) -> float:
    """Modulus of the second largest eigenvalue (geometric mixing rate)."""
    moduli = np.sort(np.abs(linalg.eigvals(P)))[::-1]
    return float(moduli[1]) if moduli.size > 1 else 0.0


def _window_from(kernel: FiniteMemoryKernel, start: np.ndarray, t0: int, width: int) -> np.ndarray:
    """Window law on [t0, t0+width-1] from an initial context distribution."""
    mats = symbol_matrices(kernel)
    v = start @ np.linalg.matrix_power(mats.sum(axis=0), t0)
    acc = v[None, :]
    for _ in range(width):
        acc = np.einsum('wc,acd->wad', acc, mats).reshape(-1, kernel.contexts)
    return acc.sum(axis=1)


def markov_window_law(kernel: FiniteMemoryKernel, past: Past, t0: int, t1: int) -> np.ndarray:
    """Law of (omega_t0 .. omega_t1) from matrix products, lexicographic over S^(t1-t0+1)."""
    _check_kernel(kernel)
    if not 0 <= t0 <= t1:
        raise HorizonError(f"window needs 0 <= t0 <= t1, got [{t0}, {t1}]")
    start = np.zeros(kernel.contexts)
    start[kernel.context(past)] = 1.0
    return _window_from(kernel, start, t0, t1 - t0 + 1)


def stationary_window_law(kernel: FiniteMemoryKernel, width: int) -> np.ndarray:
    """Law of a width-symbol window under the stationary chain."""
    pi = stationary_distribution(transition_matrix(kernel))
    return _window_from(kernel, pi, 0, width)


def _context_laws(kernel: FiniteMemoryKernel, n: int, width: int) -> np.ndarray:
    """Window law on [n, n+width-1] conditioned on each starting context."""
    return np.stack([_window_from(kernel, np.eye(kernel.contexts)[c], n, width)
                     for c in range(kernel.contexts)])


def exact_markov_beta(kernel: FiniteMemoryKernel, n: int, width: int) -> float:
    """E_pi[sup_B |P[B | past] - P[B]|] over events of the window [n, n+width-1]."""
    pi = stationary_distribution(transition_matrix(kernel))
    stationary = stationary_window_law(kernel, width)
    laws = _context_laws(kernel, n, width)
    return float(sum(pi[c] * half_l1(laws[c], stationary) for c in range(kernel.contexts)))


def exact_pair_beta(kernel: FiniteMemoryKernel, n: int, width: int) -> float:
    """E_{pi x pi}[sup_B |P^x[B] - P^y[B]|] over events of the window [n, n+width-1]."""
    pi = stationary_distribution(transition_matrix(kernel))
    laws = _context_laws(kernel, n, width)
    C = kernel.contexts
    return float(sum(pi[c] * pi[d] * half_l1(laws[c], laws[d]) for c in range(C) for d in range(C)))


def markov_correlations(kernel: FiniteMemoryKernel, j_max: int) -> np.ndarray:
    """gamma_j = E[xi_0 xi_j] - E[xi_0]^2 under the stationary law, j = 0 .. j_max."""
    _check_kernel(kernel)
    S = kernel.alphabet.size
    if kernel.order == 0:
        # contexts must remember the newest symbol
        kernel = FiniteMemoryKernel(kernel.alphabet, 1, np.tile(kernel.table, (S, 1)))
    values = kernel.alphabet.values()
    P = transition_matrix(kernel)
    pi = stationary_distribution(P)
    # xi of a context is the value of its newest symbol
    f = values[np.arange(kernel.contexts) % S]
    mean = float(pi @ f)
    out = np.empty(j_max + 1)
    g = f.copy()
    for j in range(j_max + 1):
        out[j] = float(pi @ (f * g)) - mean ** 2
        g = P @ g
    return out
