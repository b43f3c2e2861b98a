"""Semi-infinite pasts: a finite explicit suffix followed by a periodic tail.

A Past stores canonical symbol indices. `suffix[0]` is x_{-1} (most recent),
`suffix[L-1]` is x_{-L}, and every index below -L repeats `tail` with period
len(tail). Pasts are kept in a canonical form (minimal period, shortest
suffix), so two Pasts describing the same sequence compare equal and every
kernel sees one representation of it.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from gchains.errors import ModelError
from gchains.kernels.alphabet import Alphabet


def _minimal_period(tail: tuple) -> tuple:
    p = len(tail)
    for d in range(1, p + 1):
        if p % d == 0 and tail == tail[:d] * (p // d):
            return tail[:d]
    return tail


def _canonical(suffix: tuple, tail: tuple) -> tuple:
    tail = _minimal_period(tail)
    suffix = list(suffix)
    # fold the oldest suffix symbols into the tail while they continue its pattern backwards
    while suffix and suffix[-1] == tail[-1]:
        suffix.pop()
        tail = (tail[-1],) + tail[:-1]
    return tuple(suffix), tail


@dataclass(frozen=True)
class Past:
    """Eventually periodic history x_{-1}, x_{-2}, ... over an alphabet."""
    alphabet: Alphabet
    suffix: tuple
    tail: tuple

    def __post_init__(self):
        suffix = tuple(int(s) for s in self.suffix)
        tail = tuple(int(s) for s in self.tail)
        if not tail:
            raise ModelError("past tail must have period >= 1")
        n = self.alphabet.size
        for s in suffix + tail:
            if s < 0 or s >= n:
                raise ModelError(f"past symbol index {s} outside alphabet of size {n}")
        suffix, tail = _canonical(suffix, tail)
        object.__setattr__(self, 'suffix', suffix)
        object.__setattr__(self, 'tail', tail)

    @classmethod
    def constant(cls, alphabet: Alphabet, symbol) -> 'Past':
        """The constant past (e.g. all +1)."""
        return cls(alphabet, (), (alphabet.index(symbol),))

    @classmethod
    def from_symbols(cls, alphabet: Alphabet, suffix: Sequence, tail: Sequence) -> 'Past':
        """Build from symbol labels or embedded values (most recent first)."""
        return cls(alphabet, alphabet.indices(suffix), alphabet.indices(tail))

    @property
    def period(self) -> int:
        return len(self.tail)

    @property
    def suffix_length(self) -> int:
        return len(self.suffix)

    def lookup(self, k: int) -> int:
        """Symbol index of x_{-k}, k >= 1."""
        if k < 1:
            raise ModelError(f"past lookup needs k >= 1, got {k}")
        L = len(self.suffix)
        if k <= L:
            return self.suffix[k - 1]
        return self.tail[(k - L - 1) % len(self.tail)]

    def window(self, n: int) -> np.ndarray:
        """Array of x_{-1}, ..., x_{-n} as symbol indices."""
        if n <= 0:
            return np.zeros(0, dtype=np.int64)
        L = len(self.suffix)
        head = np.asarray(self.suffix[:n], dtype=np.int64)
        if n <= L:
            return head
        reps = (n - L) // len(self.tail) + 1
        rest = np.tile(np.asarray(self.tail, dtype=np.int64), reps)[:n - L]
        return np.concatenate([head, rest])

    def push(self, history: Iterable[int]) -> 'Past':
        """Past seen after emitting `history` (chronological order omega_0, omega_1, ...)."""
        newest_first = tuple(int(s) for s in reversed(list(history)))
        return Past(self.alphabet, newest_first + self.suffix, self.tail)

    def to_dict(self) -> dict:
        return {
            'suffix': [self.alphabet.label(s) for s in self.suffix],
            'tail': [self.alphabet.label(s) for s in self.tail],
        }

    def describe(self) -> str:
        suffix = ','.join(self.alphabet.label(s) for s in self.suffix)
        tail = ','.join(self.alphabet.label(s) for s in self.tail)
        return f"[{suffix}]({tail})*" if suffix else f"({tail})*"
