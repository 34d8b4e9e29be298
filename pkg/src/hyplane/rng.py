"""Splittable counter-based random streams.

A stream is addressed by a root seed and a path of split indices.  Each
address maps to an independent Philox key via numpy's SeedSequence, so any
node of a recursion tree can draw its own variates without coordinating
with its siblings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    seed: int
    path: tuple = ()

    def __post_init__(self):
        seed = int(self.seed)
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        path = tuple(int(k) for k in self.path)
        if any(not 0 <= k <= _MASK64 for k in path):
            raise ValueError("split indices must be 64-bit unsigned integers")
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "path", path)

    def split(self, k: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + (int(k),))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a RandomStream, a Generator, or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    if rng is None:
        raise ValueError("a random source is required")
    return RandomStream(int(rng)).generator()
