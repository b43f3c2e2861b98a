"""Services for parsing and running diagnostics experiments."""

from gchains.services.experiments import (
    KINDS,
    Experiment,
    ExperimentConfig,
    exit_code,
    load_config_file,
    oracle_checks,
    parse_config,
    past_from_spec,
    run_experiment,
)
from gchains.presets import list_presets, load_preset

__all__ = [
    'KINDS',
    'Experiment',
    'ExperimentConfig',
    'parse_config',
    'load_config_file',
    'past_from_spec',
    'run_experiment',
    'exit_code',
    'oracle_checks',
    'list_presets',
    'load_preset',
]
