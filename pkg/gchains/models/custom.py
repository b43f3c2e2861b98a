"""User-supplied kernels loaded from an import reference."""

import importlib
from typing import Callable, Optional

import numpy as np

from gchains.config import Config
from gchains.errors import ModelError
from gchains.kernels.alphabet import Alphabet
from gchains.kernels.base import Kernel
from gchains.kernels.past import Past


def resolve_reference(ref: str):
    """Import 'package.module:attribute'."""
    module_name, sep, attr = ref.partition(':')
    if not sep or not module_name or not attr:
        raise ModelError(f"custom kernel reference must look like 'module:attribute', got {ref!r}")
    try:
        module = importlib.import_module(module_name)
    except ImportError as e:
        raise ModelError(f"custom kernel module {module_name!r} cannot be imported: {e}") from e
    target = module
    for part in attr.split('.'):
        if not hasattr(target, part):
            raise ModelError(f"custom kernel reference {ref!r}: no attribute {part!r}")
        target = getattr(target, part)
    return target


class CustomKernel(Kernel):
    """Wraps a function past -> probability vector; every output is validated."""

    family = 'custom'

    def __init__(self, fn: Callable[[Past], np.ndarray], alphabet: Alphabet, non_null_bound: float,
                 monotone: bool = False, ref: Optional[str] = None, params: Optional[dict] = None):
        super().__init__(alphabet, non_null_bound, monotone=monotone)
        self.fn = fn
        self.ref = ref
        self.params = dict(params or {})

    @classmethod
    def from_reference(cls, ref: str, alphabet: Alphabet, non_null_bound: float, monotone: bool = False,
                       params: Optional[dict] = None) -> 'CustomKernel':
        """With `params`, the reference is a factory called as factory(**params)."""
        target = resolve_reference(ref)
        fn = target(**params) if params else target
        if not callable(fn):
            raise ModelError(f"custom kernel {ref!r} did not resolve to a callable")
        return cls(fn, alphabet, non_null_bound, monotone=monotone, ref=ref, params=params)

    def to_spec(self) -> dict:
        if self.ref is None:
            raise ModelError("custom kernel built from a bare function has no parameter document")
        spec = {
            'family': 'custom',
            'ref': self.ref,
            'non_null_bound': self.non_null_bound,
            'monotone': self.monotone,
            'alphabet': self.alphabet.to_dict(),
        }
        if self.params:
            spec['params'] = self.params
        return spec

    def identity(self) -> str:
        if self.ref is None:
            return f"fn-{id(self.fn):x}"
        return super().identity()

    def probs(self, past: Past) -> np.ndarray:
        p = np.asarray(self.fn(past), dtype=float)
        if p.shape != (self.alphabet.size,):
            raise ModelError(f"custom kernel returned shape {p.shape}, expected ({self.alphabet.size},)")
        if abs(p.sum() - 1.0) > Config.PROB_TOL or p.min() < self.non_null_bound - Config.PROB_TOL:
            raise ModelError(f"custom kernel returned {p.tolist()} at {past.describe()}: "
                             f"not a distribution bounded below by {self.non_null_bound}")
        return p
