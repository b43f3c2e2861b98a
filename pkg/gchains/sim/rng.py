"""Counter-based random streams, one per (root seed, namespace, replica).

Every replica draws from its own Philox stream keyed by
SeedSequence(root_seed, spawn_key=(namespace, stream_id)), so results do not
depend on how replicas are split between workers.
"""

from dataclasses import dataclass, field

import numpy as np

from gchains.config import Config
from gchains.errors import HorizonError

# Namespaces keep the streams of different experiment stages disjoint
NS_CHAIN = 0
NS_PAST = 1
NS_COUPLING = 2
NS_WEAK_L2 = 3
NS_TV = 4
NS_BETA = 5
NS_CORRELATION = 6


@dataclass
class RngStream:
    root_seed: int
    stream_id: int
    namespace: int = NS_CHAIN
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.root_seed < 2 ** 64:
            raise HorizonError(f"root seed must be a 64-bit unsigned integer, got {self.root_seed}")
        seq = np.random.SeedSequence(self.root_seed, spawn_key=(self.namespace, self.stream_id))
        self.generator = np.random.Generator(np.random.Philox(seq))

    def uniforms(self, shape) -> np.ndarray:
        return self.generator.random(shape)


def streams(root_seed: int, namespace: int, stream_ids) -> list:
    return [RngStream(root_seed, int(s), namespace) for s in stream_ids]


class UniformBlocks:
    """Per-step uniforms for a batch of streams.

    Each stream is read in fixed blocks of `block` steps x `width` values,
    so row i always sees the same numbers whatever batch it sits in.
    """

    def __init__(self, stream_list: list, width: int = 1, block: int = Config.CONV_BLOCK):
        self.streams = stream_list
        self.width = width
        self.block = block
        self._buf = np.empty((len(stream_list), 0, width))
        self._pos = 0

    def next(self) -> np.ndarray:
        """(rows, width) uniforms for the next step."""
        if self._pos == self._buf.shape[1]:
            self._buf = np.stack([s.uniforms((self.block, self.width)) for s in self.streams])
            self._pos = 0
        out = self._buf[:, self._pos, :]
        self._pos += 1
        return out
