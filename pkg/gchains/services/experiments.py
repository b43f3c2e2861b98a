"""Experiment configs and the runner that turns them into diagnostics reports.

A config is a YAML/JSON document:

    schema_version: 1
    name: renewal-example
    root_seed: 7
    model: {family: renewal, q: {limit: 0.5, decay: {form: power, amplitude: 0.3, exponent: 1}}}
    experiments:
      - kind: criteria-scan
        k_max: 50
      - kind: weak-l2
        N: 2000
        replicas: 200

Each experiment may carry its own `model` and a `label` (defaults to its kind).
"""

import copy
import logging
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from gchains.config import Config
from gchains.errors import ConfigError, GChainsError
from gchains.kernels.base import Kernel, SearchBudget
from gchains.kernels.criteria import dobrushin_sum, ell2_criterion, oscillation, oscillation_sup, probs_after, \
    variation_profile
from gchains.kernels.numerics import all_words, log_spaced
from gchains.kernels.past import Past
from gchains.kernels.series import CONVERGENT, DIVERGENT, INCONCLUSIVE
from gchains.coupling.greedy import coupling_time_tail, default_window
from gchains.diagnostics.correlations import correlation_curve
from gchains.diagnostics.mixing import beta_mixing_curve, tv_decay_curve
from gchains.diagnostics.report import DiagnosticsReport
from gchains.diagnostics.weak_l2 import p_weak_l2_curve, weak_l2_curve
from gchains.models.autoregressive import ARKernel
from gchains.models.finite_memory import FiniteMemoryKernel
from gchains.models.renewal import RenewalKernel
from gchains.models.schema import as_int, get_field, kernel_from_spec
from gchains.oracle.enumeration import exact_hellinger_increments, exact_weak_l2_expectation, exact_window_law
from gchains.oracle.markov import markov_window_law
from gchains.sim.chain import default_burn_in

logger = logging.getLogger(__name__)

KINDS = ('weak-l2', 'p-weak-l2', 'tv-decay', 'coupling-tail', 'beta-mixing', 'correlations',
         'criteria-scan', 'oracle-check')
DECAYING = 'decaying'
PASSED = 'passed'
FAILED = 'failed'
MAX_ORACLE_N = 20


@dataclass
class Experiment:
    """One entry of a config's experiment list, with its arguments already validated."""
    kind: str
    label: str
    kernel: Kernel
    args: dict
    model: Optional[dict] = None


@dataclass
class ExperimentConfig:
    name: str
    model: dict
    root_seed: int
    experiments: list
    document: dict
    anchor: str = ''
    description: str = ''
    workers: int = field(default_factory=lambda: Config.WORKERS)
    output_dir: Optional[str] = None
    overrides: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """The config as it affects results (no worker count, no output paths)."""
        doc = copy.deepcopy(self.document)
        for key in ('workers', 'output_dir'):
            doc.pop(key, None)
        return doc


# Field parsing


def _mapping(value, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(where, f"expected a mapping, got {value!r}")
    return value


def past_from_spec(doc, kernel: Kernel, where: str) -> Past:
    """A past given as a constant symbol, {constant: s} or {suffix: [...], tail: [...]}."""
    alphabet = kernel.alphabet
    try:
        if isinstance(doc, (str, int, float)) and not isinstance(doc, bool):
            return Past.constant(alphabet, doc)
        doc = _mapping(doc, where)
        if 'constant' in doc:
            return Past.constant(alphabet, doc['constant'])
        return Past.from_symbols(alphabet, doc.get('suffix', []), get_field(doc, 'tail', where))
    except ConfigError:
        raise
    except GChainsError as e:
        raise ConfigError(where, str(e)) from e


def _pair(doc: dict, kernel: Kernel, where: str) -> tuple:
    pasts = _mapping(doc.get('pasts'), f"{where}.pasts")
    extremal = kernel.extremal_pasts()
    x = past_from_spec(pasts['x'], kernel, f"{where}.pasts.x") if 'x' in pasts else extremal[0]
    y = past_from_spec(pasts['y'], kernel, f"{where}.pasts.y") if 'y' in pasts else extremal[-1]
    return x, y


def horizons_from_spec(value, where: str) -> list:
    """An explicit list of offsets or {log_spaced: {max, count, start}}."""
    if isinstance(value, dict) and 'log_spaced' in value:
        spec = _mapping(value['log_spaced'], f"{where}.log_spaced")
        n_max = as_int(get_field(spec, 'max', f"{where}.log_spaced"), f"{where}.log_spaced.max")
        count = as_int(spec.get('count', 20), f"{where}.log_spaced.count")
        start = as_int(spec.get('start', 1), f"{where}.log_spaced.start")
        return [int(n) for n in log_spaced(n_max, count, start)]
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(where, "expected a non-empty list of offsets or {log_spaced: ...}")
    out = [as_int(v, f"{where}[{i}]") for i, v in enumerate(value)]
    if min(out) < 0:
        raise ConfigError(where, "offsets must be >= 0")
    return sorted(set(out))


def _positive(doc: dict, key: str, where: str, default=...) -> int:
    value = as_int(get_field(doc, key, where, default), f"{where}.{key}")
    if value < 1:
        raise ConfigError(f"{where}.{key}", f"must be >= 1, got {value}")
    return value


def _optional_int(doc: dict, key: str, where: str) -> Optional[int]:
    return None if doc.get(key) is None else as_int(doc[key], f"{where}.{key}")


def _sampler(doc: dict, kernel: Kernel, where: str) -> dict:
    spec = _mapping(doc.get('sampler'), f"{where}.sampler")
    burn_in = _optional_int(spec, 'burn_in', f"{where}.sampler")
    capped = False
    if burn_in is None:
        burn_in, capped = default_burn_in(kernel)
    suffix = _optional_int(spec, 'suffix_length', f"{where}.sampler")
    suffix = burn_in if suffix is None else suffix
    if suffix < 0 or suffix > burn_in:
        raise ConfigError(f"{where}.sampler.suffix_length", f"must lie in [0, burn_in={burn_in}]")
    tail = past_from_spec(spec['tail'], kernel, f"{where}.sampler.tail") if 'tail' in spec else \
        Past(kernel.alphabet, (), (0,))
    return {'burn_in': burn_in, 'suffix_length': suffix, 'tail': tail, 'burn_in_capped': capped}


def _search(doc: dict, where: str) -> SearchBudget:
    spec = _mapping(doc.get('search'), f"{where}.search")
    try:
        return SearchBudget(
            size=as_int(spec.get('size', Config.SEARCH_BUDGET), f"{where}.search.size"),
            pasts=as_int(spec.get('pasts', 16), f"{where}.search.pasts"),
            seed=as_int(spec.get('seed', 0), f"{where}.search.seed"))
    except GChainsError as e:
        raise ConfigError(f"{where}.search", str(e)) from e


def _prepare(kind: str, doc: dict, kernel: Kernel, where: str) -> dict:
    """Validated keyword arguments of one experiment kind."""
    if kind == 'weak-l2':
        x, y = _pair(doc, kernel, where)
        N = _positive(doc, 'N', where)
        oracle_n = _optional_int(doc, 'oracle_N', where)
        if oracle_n is not None and not 1 <= oracle_n <= min(N, MAX_ORACLE_N):
            raise ConfigError(f"{where}.oracle_N", f"must lie in [1, {min(N, MAX_ORACLE_N)}]")
        horizons = horizons_from_spec(doc['horizons'], f"{where}.horizons") if 'horizons' in doc else \
            [int(n) for n in log_spaced(N)]
        if oracle_n is not None:
            horizons = sorted(set(horizons) | {oracle_n})
        return {'past_x': x, 'past_y': y, 'N': N, 'replicas': _positive(doc, 'replicas', where, 100),
                'horizons': horizons, 'oracle_N': oracle_n}
    if kind == 'p-weak-l2':
        return {'N': _positive(doc, 'N', where), 'replicas': _positive(doc, 'replicas', where, 100),
                'pairs': _positive(doc, 'pairs', where, 8), **_sampler(doc, kernel, where)}
    if kind == 'tv-decay':
        x, y = _pair(doc, kernel, where)
        return {'past_x': x, 'past_y': y,
                'horizons': horizons_from_spec(get_field(doc, 'horizons', where), f"{where}.horizons"),
                'width': _positive(doc, 'width', where, 1), 'replicas': _positive(doc, 'replicas', where, 1000),
                'budget': _optional_int(doc, 'budget', where)}
    if kind == 'coupling-tail':
        x, y = _pair(doc, kernel, where)
        horizons = horizons_from_spec(get_field(doc, 'horizons', where), f"{where}.horizons")
        T = _positive(doc, 'T', where, max(2 * horizons[-1], 4))
        window = _optional_int(doc, 'window', where) or default_window(T)
        if horizons[-1] + window > T:
            raise ConfigError(f"{where}.T", f"needs max(n) + window <= T (window {window}, T {T})")
        return {'past_x': x, 'past_y': y, 'horizons': horizons, 'T': T, 'window': window,
                'replicas': _positive(doc, 'replicas', where, 1000)}
    if kind == 'beta-mixing':
        return {'horizons': horizons_from_spec(get_field(doc, 'horizons', where), f"{where}.horizons"),
                'width': _positive(doc, 'width', where, 1), 'pairs': _positive(doc, 'pairs', where, 16),
                'replicas': _positive(doc, 'replicas', where, 1000),
                'budget': _optional_int(doc, 'budget', where), **_sampler(doc, kernel, where)}
    if kind == 'correlations':
        if not kernel.alphabet.is_spin:
            raise ConfigError(f"{where}.kind", "correlations need the binary +1/-1 alphabet")
        j_max = _positive(doc, 'j_max', where)
        length = _positive(doc, 'sample_length', where)
        if length <= j_max:
            raise ConfigError(f"{where}.sample_length", f"must exceed j_max={j_max}")
        return {'j_max': j_max, 'sample_length': length, 'replicas': _positive(doc, 'replicas', where, 10),
                'burn_in': _optional_int(doc, 'burn_in', where), 'batches': _optional_int(doc, 'batches', where),
                'profile': bool(doc.get('profile', True)), 'search': _search(doc, where)}
    if kind == 'criteria-scan':
        normalization = doc.get('normalization', 'sup')
        if normalization not in ('sup', 'sum'):
            raise ConfigError(f"{where}.normalization", f"expected 'sup' or 'sum', got {normalization!r}")
        return {'k_max': _positive(doc, 'k_max', where, 32), 'n_max': _positive(doc, 'n_max', where, 1000),
                'normalization': normalization, 'search': _search(doc, where)}
    if kind == 'oracle-check':
        x, y = _pair(doc, kernel, where)
        depth = _positive(doc, 'depth', where, 10)
        return {'past_x': x, 'past_y': y, 'depth': depth,
                'N': _positive(doc, 'N', where, min(depth, 8)), 'budget': _optional_int(doc, 'budget', where)}
    raise ConfigError(f"{where}.kind", f"unknown experiment kind {kind!r} (one of {', '.join(KINDS)})")


def parse_config(doc: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate a config document; every error names the offending field."""
    if not isinstance(doc, dict):
        raise ConfigError('config', "expected a mapping at the top level")
    doc = copy.deepcopy(doc)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if 'seed' in overrides:
        doc['root_seed'] = overrides['seed']

    version = as_int(get_field(doc, 'schema_version', 'config'), 'schema_version')
    if version != Config.SCHEMA_VERSION:
        raise ConfigError('schema_version', f"unsupported version {version} (expected {Config.SCHEMA_VERSION})")
    name = str(get_field(doc, 'name', 'config'))
    seed = as_int(get_field(doc, 'root_seed', 'config', aliases=('rootSeed',)), 'root_seed')
    if not 0 <= seed < 2 ** 64:
        raise ConfigError('root_seed', "must be a 64-bit unsigned integer")
    model = get_field(doc, 'model', 'config')
    base_kernel = kernel_from_spec(model, 'model')

    entries = doc.get('experiments')
    if entries is None:
        entries = [get_field(doc, 'experiment', 'config')]
    if not isinstance(entries, list) or not entries:
        raise ConfigError('experiments', "expected a non-empty list")

    experiments = []
    labels = set()
    for i, entry in enumerate(entries):
        where = f"experiments[{i}]"
        entry = _mapping(entry, where)
        if 'replicas' in overrides and get_field(entry, 'kind', where) not in ('criteria-scan', 'oracle-check'):
            entry['replicas'] = overrides['replicas']
        kind = get_field(entry, 'kind', where)
        label = str(entry.get('label', kind))
        if label in labels:
            raise ConfigError(f"{where}.label", f"duplicate label {label!r}")
        labels.add(label)
        own_model = entry.get('model')
        kernel = kernel_from_spec(own_model, f"{where}.model") if own_model is not None else base_kernel
        experiments.append(Experiment(kind, label, kernel, _prepare(kind, entry, kernel, where), own_model))
        entries[i] = entry
    doc['experiments'] = entries
    doc.pop('experiment', None)

    workers = as_int(overrides.get('workers', doc.get('workers', Config.WORKERS)), 'workers')
    if workers < 1:
        raise ConfigError('workers', "must be >= 1")
    return ExperimentConfig(
        name=name, model=model, root_seed=seed, experiments=experiments, document=doc,
        anchor=str(doc.get('anchor', '')), description=str(doc.get('description', '')),
        workers=workers, output_dir=doc.get('output_dir'),
        overrides={k: v for k, v in overrides.items() if k in ('seed', 'replicas')})


def load_config_file(path: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    with open(path, 'r') as f:
        try:
            doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError('config', f"not valid YAML/JSON: {e}") from e
    return parse_config(doc, overrides)


# Runners. Each returns (results, verdicts, curves, caveats).


def _run_weak_l2(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    curve = weak_l2_curve(kernel, a['past_x'], a['past_y'], a['N'], a['replicas'], seed, workers,
                          horizons=a['horizons'])
    results = curve.summary()
    if a['oracle_N'] is not None:
        exact = exact_weak_l2_expectation(kernel, a['past_x'], a['past_y'], a['oracle_N'])
        i = int(np.searchsorted(curve.horizons, a['oracle_N']))
        mean, stderr = float(curve.mean()[i]), float(curve.stderr()[i])
        results['oracle'] = {
            'N': a['oracle_N'], 'exact': exact.value, 'mean': mean, 'stderr': stderr,
            'agrees': abs(mean - exact.value) <= Config.SIGMA_BAND * stderr + Config.ORACLE_TOL,
            'evaluations': exact.evaluations,
        }
    return results, {'': curve.verdict}, {'': curve.to_frame()}, []


def _majority(verdicts: list) -> str:
    counts = {v: verdicts.count(v) for v in (CONVERGENT, DIVERGENT, INCONCLUSIVE)}
    best = max(counts.values())
    winners = [v for v, c in counts.items() if c == best]
    return winners[0] if len(winners) == 1 else INCONCLUSIVE


def _run_p_weak_l2(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    result = p_weak_l2_curve(kernel, a['tail'], a['burn_in'], a['suffix_length'], a['pairs'], a['N'],
                             a['replicas'], seed, workers, burn_in_capped=a['burn_in_capped'])
    summary = result.summary()
    return summary, {'': _majority(summary['pair_verdicts'])}, {'': result.to_frame()}, result.caveats


def _run_tv_decay(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    curve = tv_decay_curve(kernel, a['past_x'], a['past_y'], a['horizons'], a['width'], a['replicas'],
                           seed, workers, budget=a['budget'])
    results = curve.summary()
    column = 'mcTv' if curve.degraded else 'exact'
    first, last = curve.frame[column].iloc[0], curve.frame[column].iloc[-1]
    results['relative_drop'] = 1.0 - last / first if first > 0 else 0.0
    caveats = ["exact window TV unavailable within the oracle budget"] if curve.degraded else []
    return results, {}, {'': curve.frame}, caveats


def _run_coupling_tail(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    frame = coupling_time_tail(kernel, a['past_x'], a['past_y'], a['horizons'], a['T'], a['replicas'], seed,
                               window=a['window'], workers=workers)
    results = {'past_x': a['past_x'].describe(), 'past_y': a['past_y'].describe(), 'T': a['T'],
               'window': a['window'], 'censored': float(frame['censored'].iloc[0])}
    return results, {}, {'': frame}, []


def _run_beta_mixing(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    curve = beta_mixing_curve(kernel, a['horizons'], a['width'], a['pairs'], seed, tail=a['tail'],
                              burn_in=a['burn_in'], suffix_length=a['suffix_length'], replicas=a['replicas'],
                              workers=workers, budget=a['budget'])
    frame = curve.frame
    results = curve.summary()
    band = Config.SIGMA_BAND
    first = frame['beta'].iloc[0] - band * frame['stderr'].iloc[0]
    last = frame['betaIsotonic'].iloc[-1] + band * frame['stderr'].iloc[-1]
    verdict = DECAYING if last < first and curve.relative_drop >= 0.5 else INCONCLUSIVE
    exact = frame['exactBeta'].to_numpy()
    if np.all(np.isfinite(exact)):
        slack = band * frame['stderr'].to_numpy() + Config.ORACLE_TOL
        results['exact_agreement'] = int(np.sum(np.abs(frame['beta'].to_numpy() - exact) <= slack))
    return results, {'': verdict}, {'': frame}, curve.caveats


def _run_correlations(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    curve = correlation_curve(kernel, a['j_max'], a['sample_length'], a['replicas'], seed,
                              burn_in=a['burn_in'], workers=workers, batches=a['batches'],
                              profile=a['profile'], search=a['search'])
    curves = {'': curve.frame}
    if curve.profile is not None:
        curves['profile'] = curve.profile
    return curve.summary(), {'': curve.summability['verdict']}, curves, curve.caveats


def _run_criteria_scan(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    k_max, search = a['k_max'], a['search']
    dob = dobrushin_sum(kernel, k_max, search, a['normalization'])
    ell2 = ell2_criterion(kernel, k_max, search)
    profile = variation_profile(kernel, k_max, search)
    ks = np.arange(1, k_max + 1)
    frame = pd.DataFrame({
        'k': ks,
        'variation': [e.value for e in profile],
        'variationKind': [e.kind for e in profile],
        'oscillation': [oscillation(kernel, int(k), search).value for k in ks],
        'oscillationSup': [oscillation_sup(kernel, int(k), search).value for k in ks],
        'dobrushinPartialSum': dob.partial_sums,
        'ell2PartialSum': ell2.partial_sums,
    })
    results = {'dobrushin': dob.to_dict(), 'ell2': ell2.to_dict(), 'strongly_non_null': kernel.strongly_non_null,
               'non_null_bound': kernel.non_null_bound, 'monotone': kernel.monotone}
    verdicts = {'dobrushin': dob.evidence['dobrushin'], 'ell2': ell2.verdict}
    bounds = kernel.l2_certificate(a['n_max'])
    if bounds is not None:
        lower, upper = bounds
        for key, series in (('l2_lower', lower), ('l2_upper', upper)):
            if series is not None:
                results[key] = series.to_dict()
                verdicts[key] = series.verdict
    if isinstance(kernel, ARKernel):
        results['attractive'] = kernel.params.attractive
    if isinstance(kernel, RenewalKernel):
        closed = kernel.params.excess(ks)
        results['renewal_closed_form_error'] = float(np.max(np.abs(frame['variation'].to_numpy() - closed)))
    return results, verdicts, {'': frame}, []


def _run_oracle_check(kernel: Kernel, a: dict, seed: int, workers: int) -> tuple:
    x, y, d = a['past_x'], a['past_y'], a['depth']
    law = exact_window_law(kernel, x, 0, d - 1, a['budget'])
    errors = {'normalisation': abs(math.fsum(law.probs) - 1.0)}
    if d > 1:
        short = exact_window_law(kernel, x, 0, d - 2, a['budget'])
        errors['marginalisation'] = float(np.max(np.abs(law.marginal(0, d - 2).probs - short.probs)))
        step = probs_after(kernel, x, all_words(kernel.alphabet.size, d - 1))
        errors['chain_rule'] = float(np.max(np.abs((short.probs[:, None] * step).ravel() - law.probs)))
    if isinstance(kernel, FiniteMemoryKernel):
        errors['markov'] = float(np.max(np.abs(markov_window_law(kernel, x, 0, d - 1) - law.probs)))
    hellinger = exact_hellinger_increments(kernel, x, y, a['N'], a['budget'])
    weak = exact_weak_l2_expectation(kernel, x, y, a['N'], a['budget'])
    ok = all(e <= Config.ORACLE_TOL for e in errors.values()) and hellinger.sandwich_violations == 0
    results = {
        'past_x': x.describe(), 'past_y': y.describe(), 'depth': d, 'errors': errors,
        'sandwich_violations': hellinger.sandwich_violations,
        'expected_weak_l2': weak.value, 'expected_hellinger': hellinger.value,
        'evaluations': law.evaluations + hellinger.evaluations + weak.evaluations,
    }
    increments = pd.DataFrame({'n': np.arange(a['N'] + 1), 'squared': weak.curve, 'hellinger': hellinger.curve})
    return results, {'': PASSED if ok else FAILED}, {'window-law': law.to_frame(), 'increments': increments}, []


RUNNERS = {
    'weak-l2': _run_weak_l2,
    'p-weak-l2': _run_p_weak_l2,
    'tv-decay': _run_tv_decay,
    'coupling-tail': _run_coupling_tail,
    'beta-mixing': _run_beta_mixing,
    'correlations': _run_correlations,
    'criteria-scan': _run_criteria_scan,
    'oracle-check': _run_oracle_check,
}


def _key(label: str, suffix: str, sep: str) -> str:
    return f"{label}{sep}{suffix}" if suffix else label


def exit_code(report: DiagnosticsReport, strict: bool = False) -> int:
    if any(v == FAILED for v in report.verdicts.values()):
        return 1
    if strict and report.inconclusive:
        return 2
    return 0


def run_experiment(config: ExperimentConfig, strict: bool = False, out_dir: Optional[str] = None,
                   write: bool = True) -> tuple:
    """Run every experiment of `config` and return (report, exit code).

    The payload depends only on the config: worker counts and timings go to
    the metadata block.
    """
    started = datetime.now(timezone.utc)
    clock = time.perf_counter()
    report = DiagnosticsReport(name=config.name, kind=','.join(e.kind for e in config.experiments),
                               anchor=config.anchor, config=config.echo(), model=config.model,
                               root_seed=config.root_seed, overrides=config.overrides)
    timings = {}
    for exp in config.experiments:
        logger.info("[runner] %s: %s on %s", config.name, exp.label, exp.kernel.describe())
        t0 = time.perf_counter()
        results, verdicts, curves, caveats = RUNNERS[exp.kind](exp.kernel, exp.args, config.root_seed,
                                                                config.workers)
        timings[exp.label] = time.perf_counter() - t0
        report.results[exp.label] = {'kind': exp.kind, **results}
        for suffix, verdict in verdicts.items():
            report.verdicts[_key(exp.label, suffix, '.')] = verdict
        for suffix, frame in curves.items():
            report.add_curve(_key(exp.label, suffix, '-'), frame)
        report.caveats.extend(f"{exp.label}: {c}" for c in caveats)
    report.stamp(started, config.workers, time.perf_counter() - clock)
    report.metadata['experiment_wall_times'] = timings
    if write:
        report.write(out_dir or config.output_dir)
    code = exit_code(report, strict)
    logger.info("[runner] %s finished with exit code %d", config.name, code)
    return report, code


def oracle_checks(config: ExperimentConfig) -> ExperimentConfig:
    """The config's oracle-check experiments, or a default check of its model when it has none."""
    checks = [e for e in config.experiments if e.kind == 'oracle-check']
    if not checks:
        kernel = kernel_from_spec(config.model, 'model')
        checks = [Experiment('oracle-check', 'oracle-check', kernel,
                             _prepare('oracle-check', {}, kernel, 'oracle-check'))]
    doc = copy.deepcopy(config.document)
    doc['experiments'] = [e for e in doc['experiments'] if e.get('kind') == 'oracle-check'] or \
        [{'kind': 'oracle-check'}]
    return ExperimentConfig(
        name=f"{config.name}-oracle", model=config.model, root_seed=config.root_seed, experiments=checks,
        document=doc, anchor=config.anchor, description=config.description, workers=config.workers,
        output_dir=config.output_dir, overrides=config.overrides)
