"""Model parameter documents: family tag plus fields, loaded from YAML/JSON.

    model:
      family: autoregressive
      link: logit
      beta: {prefix: [0.5], tail: {c: 0.2, exponent: 1.8, start_index: 2}}
      delta: 0.0

Numbers are written with Python's shortest round-trip repr, so
dump -> load -> dump is bit-exact.
"""

import json
import math
from typing import Any, Optional

import yaml

from gchains.errors import ConfigError, GChainsError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.base import Kernel
from gchains.models.autoregressive import ARKernel, ARParams, PowerTail
from gchains.models.bkf import BKFKernel, BKFParams, GeometricGenerator
from gchains.models.custom import CustomKernel
from gchains.models.finite_memory import FiniteMemoryKernel
from gchains.models.links import link_from_spec, psi_from_spec
from gchains.models.renewal import RenewalParams, RenewalKernel

FAMILIES = ('autoregressive', 'bkf', 'renewal', 'finite-memory', 'iid', 'custom')


def get_field(doc: dict, key: str, field: str, default: Any = ..., aliases: tuple = ()):
    for name in (key,) + aliases:
        if name in doc:
            return doc[name]
    if default is ...:
        raise ConfigError(f"{field}.{key}", "required field is missing")
    return default


def as_float(value, field: str) -> float:
    # YAML 1.1 reads '1e-6' as a string
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected a number, got {value!r}")
    if not math.isfinite(out):
        raise ConfigError(field, f"expected a finite number, got {value!r}")
    return out


def as_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    try:
        out = int(value)
    except ValueError:
        raise ConfigError(field, f"expected an integer, got {value!r}")
    if out != as_float(value, field):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    return out


def as_floats(values, field: str) -> tuple:
    if not isinstance(values, (list, tuple)):
        raise ConfigError(field, f"expected a list of numbers, got {values!r}")
    return tuple(as_float(v, f"{field}[{i}]") for i, v in enumerate(values))


def alphabet_from_spec(doc: Optional[dict], field: str = 'alphabet') -> Alphabet:
    if doc is None:
        return Alphabet.spins()
    if not isinstance(doc, dict):
        raise ConfigError(field, "expected a mapping with 'symbols'")
    symbols = get_field(doc, 'symbols', field)
    embedding = doc.get('embedding')
    if embedding is not None:
        embedding = as_floats(embedding, f"{field}.embedding")
    try:
        return Alphabet(tuple(symbols), embedding)
    except GChainsError as e:
        raise ConfigError(field, str(e)) from e


def _ar_params(doc: dict, field: str) -> ARParams:
    link = link_from_spec(doc.get('link', 'logit'))
    beta = get_field(doc, 'beta', field)
    delta = as_float(doc.get('delta', 0.0), f"{field}.delta")
    if not isinstance(beta, dict):
        raise ConfigError(f"{field}.beta", "expected a mapping with 'prefix' and/or 'tail'")
    prefix = as_floats(beta.get('prefix', []), f"{field}.beta.prefix")
    tail_doc = beta.get('tail')
    if tail_doc is None:
        return ARParams(link=link, prefix=prefix, delta=delta)
    where = f"{field}.beta.tail"
    exponent = as_float(get_field(tail_doc, 'exponent', where), f"{where}.exponent")
    start = as_int(get_field(tail_doc, 'start_index', where, default=len(prefix) + 1, aliases=('startIndex',)),
                 f"{where}.start_index")
    if 'total' in tail_doc:
        return ARParams.with_total(as_float(tail_doc['total'], f"{where}.total"), exponent, start,
                                   prefix=prefix, link=link, delta=delta)
    c = as_float(get_field(tail_doc, 'c', where), f"{where}.c")
    return ARParams(link=link, prefix=prefix, tail=PowerTail(c, exponent, start), delta=delta)


def _bkf_params(doc: dict, field: str) -> BKFParams:
    psi = psi_from_spec(get_field(doc, 'psi', field))
    r0 = doc.get('r0')
    r0 = None if r0 is None else as_float(r0, f"{field}.r0")
    geometric = doc.get('geometric')
    if geometric is not None:
        where = f"{field}.geometric"
        return BKFParams.geometric(
            m1=as_int(get_field(geometric, 'm1', where), f"{where}.m1"),
            m_ratio=as_int(get_field(geometric, 'm_ratio', where), f"{where}.m_ratio"),
            lambda_ratio=as_float(get_field(geometric, 'lambda_ratio', where), f"{where}.lambda_ratio"),
            blocks=as_int(get_field(geometric, 'blocks', where), f"{where}.blocks"),
            psi=psi, r0=r0)
    m = tuple(as_int(v, f"{field}.m[{i}]") for i, v in enumerate(get_field(doc, 'm', field)))
    weights = as_floats(get_field(doc, 'weights', field, aliases=('lambda',)), f"{field}.weights")
    generator = doc.get('generator')
    if generator is not None:
        where = f"{field}.generator"
        generator = GeometricGenerator(as_float(get_field(generator, 'm_ratio', where), f"{where}.m_ratio"),
                                       as_float(get_field(generator, 'lambda_ratio', where), f"{where}.lambda_ratio"))
    return BKFParams(m=m, weights=weights, psi=psi, r0=r0, generator=generator)


def _renewal_params(doc: dict, field: str) -> RenewalParams:
    q = get_field(doc, 'q', field)
    where = f"{field}.q"
    limit = as_float(get_field(q, 'limit', where), f"{where}.limit")
    prefix = as_floats(q.get('prefix', []), f"{where}.prefix")
    decay = q.get('decay')
    if decay is None:
        return RenewalParams(q_limit=limit, prefix=prefix)
    where = f"{where}.decay"
    form = get_field(decay, 'form', where)
    amplitude = as_float(get_field(decay, 'amplitude', where), f"{where}.amplitude")
    key = 'exponent' if form == 'power' else 'ratio'
    rate = as_float(get_field(decay, key, where), f"{where}.{key}")
    return RenewalParams(q_limit=limit, prefix=prefix, decay=form, amplitude=amplitude, rate=rate)


def kernel_from_spec(doc: dict, field: str = 'model') -> Kernel:
    """Build a kernel from a parameter document; errors name the offending field."""
    if not isinstance(doc, dict):
        raise ConfigError(field, "expected a mapping with a 'family' tag")
    family = get_field(doc, 'family', field)
    alphabet = alphabet_from_spec(doc.get('alphabet'), f"{field}.alphabet")
    try:
        if family == 'autoregressive':
            return ARKernel(_ar_params(doc, field), alphabet)
        if family == 'bkf':
            return BKFKernel(_bkf_params(doc, field), alphabet)
        if family == 'renewal':
            return RenewalKernel(_renewal_params(doc, field), alphabet)
        if family == 'iid':
            return FiniteMemoryKernel.iid(as_floats(get_field(doc, 'probs', field), f"{field}.probs"), alphabet)
        if family == 'finite-memory':
            bound = doc.get('non_null_bound')
            return FiniteMemoryKernel(
                alphabet,
                as_int(get_field(doc, 'order', field), f"{field}.order"),
                [as_floats(row, f"{field}.table[{i}]") for i, row in enumerate(get_field(doc, 'table', field))],
                non_null_bound=None if bound is None else as_float(bound, f"{field}.non_null_bound"))
        if family == 'custom':
            return CustomKernel.from_reference(
                str(get_field(doc, 'ref', field)),
                alphabet,
                as_float(get_field(doc, 'non_null_bound', field), f"{field}.non_null_bound"),
                monotone=bool(doc.get('monotone', False)),
                params=doc.get('params'))
    except ConfigError:
        raise
    except GChainsError as e:
        raise ConfigError(field, str(e)) from e
    raise ConfigError(f"{field}.family", f"unknown family {family!r} (one of {', '.join(FAMILIES)})")


def dump_model_spec(kernel: Kernel) -> str:
    """JSON text of the kernel's parameter document."""
    return json.dumps(kernel.to_spec(), sort_keys=True)


def load_model_spec(text: str, field: str = 'model') -> Kernel:
    """Kernel from YAML or JSON text (JSON is valid YAML)."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(field, f"not valid YAML/JSON: {e}") from e
    return kernel_from_spec(doc, field)
