import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Library and runner configuration."""

    # Output
    OUTPUT_DIR = os.getenv('GCHAINS_OUTPUT_DIR', './gchains-output')

    # Parallelism
    WORKERS = int(os.getenv('GCHAINS_WORKERS', 1))
    # Replicas per work unit. Chunking never changes results (one stream per replica)
    REPLICA_CHUNK = int(os.getenv('GCHAINS_REPLICA_CHUNK', 64))

    # Budgets
    ORACLE_BUDGET = int(os.getenv('GCHAINS_ORACLE_BUDGET', 2 ** 24))
    # exact window TV per stationary past pair in beta-mixing curves
    PAIR_ORACLE_BUDGET = int(os.getenv('GCHAINS_PAIR_ORACLE_BUDGET', 2 ** 16))
    SEARCH_BUDGET = int(os.getenv('GCHAINS_SEARCH_BUDGET', 4096))
    MAX_MEMORY_SCALE = int(os.getenv('GCHAINS_MAX_MEMORY_SCALE', 100000))

    # Logging
    LOG_LEVEL = os.getenv('GCHAINS_LOG_LEVEL', 'INFO')

    # LRU size for kernel tail-sum caches
    CACHE_SIZE = int(os.getenv('GCHAINS_CACHE_SIZE', 4096))

    # Report schema
    SCHEMA_VERSION = 1

    # Numerical tolerances
    PROB_TOL = 1e-12          # normalisation / non-nullness / sandwich checks
    ORACLE_TOL = 1e-10        # oracle self-consistency
    WEIGHT_TOL = 1e-15        # BKF mixture weights
    INPUT_TOL = 1e-10         # distributions handed to the coupler
    TAIL_TOL = 1e-12          # certified truncation of AR field sums

    # Series / growth verdicts (log-log slope of partial sums over the last decade)
    CONVERGENT_SLOPE = 0.05
    DIVERGENT_SLOPE = 0.2

    # Simulation defaults
    BURN_IN_FACTOR = 10
    COUPLING_WINDOW_FRACTION = 0.25
    SIGMA_BAND = 4.0
    MAX_HISTOGRAM_CELLS = 4096
    CONV_BLOCK = 512

    @classmethod
    def validate(cls):
        """Validate environment-provided settings."""
        bad = []
        if cls.WORKERS < 1:
            bad.append('GCHAINS_WORKERS')
        if cls.REPLICA_CHUNK < 1:
            bad.append('GCHAINS_REPLICA_CHUNK')
        if cls.ORACLE_BUDGET < 1:
            bad.append('GCHAINS_ORACLE_BUDGET')
        if cls.PAIR_ORACLE_BUDGET < 1:
            bad.append('GCHAINS_PAIR_ORACLE_BUDGET')
        if cls.SEARCH_BUDGET < 1:
            bad.append('GCHAINS_SEARCH_BUDGET')
        if cls.MAX_MEMORY_SCALE < 1:
            bad.append('GCHAINS_MAX_MEMORY_SCALE')
        if cls.CACHE_SIZE < 1:
            bad.append('GCHAINS_CACHE_SIZE')

        if bad:
            raise ValueError(f"Invalid environment variables: {', '.join(bad)}")
