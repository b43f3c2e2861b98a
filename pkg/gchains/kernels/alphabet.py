"""Finite alphabets with canonical indexing."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from gchains.errors import ModelError


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite alphabet. Index i is the canonical position of symbols[i]."""
    symbols: tuple
    embedding: Optional[tuple] = None  # numeric value per symbol, e.g. spins

    def __post_init__(self):
        object.__setattr__(self, 'symbols', tuple(str(s) for s in self.symbols))
        if len(self.symbols) < 2:
            raise ModelError("alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ModelError(f"alphabet symbols are not distinct: {self.symbols}")
        if self.embedding is not None:
            emb = tuple(float(v) for v in self.embedding)
            if len(emb) != len(self.symbols):
                raise ModelError("embedding length differs from alphabet size")
            if len(set(emb)) != len(emb):
                raise ModelError(f"embedding is not injective: {emb}")
            object.__setattr__(self, 'embedding', emb)

    @classmethod
    def spins(cls) -> 'Alphabet':
        """Binary spin alphabet in canonical order (+1, -1)."""
        return cls(symbols=('+1', '-1'), embedding=(1.0, -1.0))

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def is_spin(self) -> bool:
        return self.size == 2 and self.embedding is not None and set(self.embedding) == {1.0, -1.0}

    def index(self, symbol) -> int:
        """Canonical index of a symbol label, or of a numeric value when an embedding exists."""
        label = str(symbol)
        if label in self.symbols:
            return self.symbols.index(label)
        if self.embedding is not None:
            try:
                value = float(symbol)
            except (TypeError, ValueError):
                value = None
            if value is not None and value in self.embedding:
                return self.embedding.index(value)
        raise ModelError(f"symbol {symbol!r} not in alphabet {self.symbols}")

    def indices(self, symbols: Sequence) -> tuple:
        return tuple(self.index(s) for s in symbols)

    def values(self) -> np.ndarray:
        """Numeric embedding as an array indexed by canonical index."""
        if self.embedding is None:
            raise ModelError("alphabet has no numeric embedding")
        return np.asarray(self.embedding, dtype=float)

    def label(self, index: int) -> str:
        return self.symbols[index]

    def to_dict(self) -> dict:
        return {
            'symbols': list(self.symbols),
            'embedding': list(self.embedding) if self.embedding is not None else None,
        }
