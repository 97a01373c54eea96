"""Reproducible random streams.

Every random draw in the package goes through an RngStream, a thin wrapper
around numpy's Philox counter-based bit generator. Identical seeds produce
identical draw sequences across platforms, and independent child streams are
derived from (seed, tag, ...) spawn keys so that e.g. the depth-3 model's
initialization never depends on how many draws the depth-2 model consumed.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    raise TypeError(f"rng tags must be int or str, got {type(tag).__name__}")


class RngStream:
    """Stateful random stream with deterministic child derivation."""

    def __init__(self, seed: int, _spawn_key: tuple = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(_spawn_key)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.Philox(seq))

    def child(self, *tags) -> "RngStream":
        """Independent stream keyed by (seed, *existing tags, *tags)."""
        key = self.spawn_key + tuple(_tag_to_int(t) for t in tags)
        return RngStream(self.seed, key)

    def uniform(self, size=None) -> np.ndarray:
        return self._gen.random(size)

    def normal(self, size=None) -> np.ndarray:
        return self._gen.standard_normal(size)

    def integers(self, low, high=None, size=None) -> np.ndarray:
        return self._gen.integers(low, high=high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def binomial(self, n, p, size=None) -> np.ndarray:
        return self._gen.binomial(n, p, size=size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key})"
