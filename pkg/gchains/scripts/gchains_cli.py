#!/usr/bin/env python3
"""
Run g-chain diagnostics experiments from presets or config files.

Usage:
    python -m gchains.scripts.gchains_cli list-presets
    python -m gchains.scripts.gchains_cli list-presets --json
    python -m gchains.scripts.gchains_cli run --preset corollary6-ising --workers 8
    python -m gchains.scripts.gchains_cli run --config my-experiment.yaml --out results --strict
    python -m gchains.scripts.gchains_cli validate-config my-experiment.yaml
    python -m gchains.scripts.gchains_cli oracle-check --preset markov-oracle

Exit codes: 0 success, 1 errors (bad config, budget exceeded, failed oracle
check, usage), 2 inconclusive verdicts under --strict.
"""

import argparse
import json
import logging
import sys

# Add parent directory to path for imports when running as script
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from gchains.config import Config
from gchains.errors import GChainsError
from gchains.presets import list_presets, load_preset
from gchains.services.experiments import load_config_file, oracle_checks, parse_config, run_experiment

logger = logging.getLogger(__name__)

CSV_HELP = """\
Every report directory <out>/<name>/ holds report.json and one CSV per curve,
named <label>.csv or <label>-<part>.csv. Floats use 17 significant digits.
  weak-l2        N, mean, stderr, q10, q50, q90
  p-weak-l2      pair, N, mean, stderr, q10, q50, q90
  tv-decay       n, exact, mcTv, mcNoise, mcLower, mcSingle, couplingTail,
                 couplingCiLow, couplingCiHigh, couplingSigma, censored
  coupling-tail  n, tailEstimate, ciLow, ciHigh, replicas, censored
  beta-mixing    n, beta, stderr, betaIsotonic, exactPairs, exactBeta
  correlations   j, gamma, stderr, ciLow, ciHigh, corrected, rawPartialSum,
                 correctedPartialSum, exactGamma (+ <label>-profile: j, profile)
  criteria-scan  k, variation, variationKind, oscillation, oscillationSup,
                 dobrushinPartialSum, ell2PartialSum
  oracle-check   <label>-window-law: configuration, probability
                 <label>-increments: n, squared, hellinger
See docs/csv_columns.md for definitions."""


class UsageParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(
        prog='gchains',
        description='Simulation and diagnostics for chains with complete connections.',
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    verbs = parser.add_subparsers(dest='verb', required=True, parser_class=UsageParser)

    run = verbs.add_parser('run', help='Run an experiment config or preset',
                           epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', help='YAML/JSON experiment config')
    source.add_argument('--preset', help='Preset name (see list-presets)')
    run.add_argument('--out', help=f"Output directory (default {Config.OUTPUT_DIR})")
    run.add_argument('--workers', type=int, help='Worker processes (results do not depend on it)')
    run.add_argument('--seed', type=int, help='Override the root seed (echoed in the report)')
    run.add_argument('--replicas', type=int, help='Override replicas of every experiment (echoed in the report)')
    run.add_argument('--strict', action='store_true', help='Exit 2 when any verdict is inconclusive')

    catalog = verbs.add_parser('list-presets', help='List presets')
    catalog.add_argument('--json', action='store_true', help='Machine-readable catalog')

    validate = verbs.add_parser('validate-config', help='Check a config file without running it')
    validate.add_argument('file', help='YAML/JSON experiment config')

    oracle = verbs.add_parser('oracle-check', help='Run the exact-oracle self checks of a config or preset')
    source = oracle.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', help='YAML/JSON experiment config')
    source.add_argument('--preset', help='Preset name (see list-presets)')
    oracle.add_argument('--out', help=f"Output directory (default {Config.OUTPUT_DIR})")
    return parser


def load_config(args, overrides: dict):
    if args.preset:
        return parse_config(load_preset(args.preset), overrides)
    return load_config_file(args.config, overrides)


def print_summary(report, target: str, code: int):
    print(f"\n{report.name}")
    for key, verdict in sorted(report.verdicts.items()):
        print(f"  {key:<32} {verdict}")
    for caveat in report.caveats:
        print(f"  caveat: {caveat}")
    if target:
        print(f"  written to {target}")
    print(f"  exit code {code}")


def cmd_run(args) -> int:
    overrides = {'seed': args.seed, 'replicas': args.replicas, 'workers': args.workers}
    config = load_config(args, overrides)
    report, code = run_experiment(config, strict=args.strict, out_dir=args.out)
    print_summary(report, os.path.join(args.out or config.output_dir or Config.OUTPUT_DIR, report.name), code)
    return code


def cmd_list_presets(args) -> int:
    catalog = list_presets()
    if args.json:
        print(json.dumps(catalog, indent=2))
        return 0
    for entry in catalog:
        print(f"{entry['name']:<24} {entry['anchor']}")
    return 0


def cmd_validate(args) -> int:
    config = load_config_file(args.file)
    print(f"OK: {config.name} ({len(config.experiments)} experiments: "
          f"{', '.join(e.label for e in config.experiments)})")
    return 0


def cmd_oracle_check(args) -> int:
    config = oracle_checks(load_config(args, {}))
    report, code = run_experiment(config, out_dir=args.out)
    print_summary(report, os.path.join(args.out or config.output_dir or Config.OUTPUT_DIR, report.name), code)
    return code


COMMANDS = {
    'run': cmd_run,
    'list-presets': cmd_list_presets,
    'validate-config': cmd_validate,
    'oracle-check': cmd_oracle_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=Config.LOG_LEVEL, format='%(levelname)s %(name)s %(message)s')
    try:
        Config.validate()
        return COMMANDS[args.verb](args)
    except (GChainsError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
