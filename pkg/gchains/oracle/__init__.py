from gchains.oracle.enumeration import (
    OracleResult,
    WindowLaw,
    exact_hellinger_increments,
    exact_weak_l2_expectation,
    exact_window_law,
    exact_window_tv,
)
from gchains.oracle.markov import (
    exact_markov_beta,
    exact_pair_beta,
    markov_correlations,
    markov_window_law,
    stationary_distribution,
    transition_matrix,
)
