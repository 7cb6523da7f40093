"""Reproducible, indexable random substreams.

A stream is identified by a 64-bit master seed and a path of integer
indices. Children are derived through ``numpy.random.SeedSequence``
spawn keys and drive a counter-based Philox generator, so two streams
with different paths are independent and every stream is reproducible
without any shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    @property
    def index(self) -> int:
        return self.path[-1] if self.path else 0

    def child(self, index: int) -> RandomStream:
        if index < 0:
            raise ValueError("stream index must be nonnegative")
        return RandomStream(self.seed, self.path + (index,))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))
