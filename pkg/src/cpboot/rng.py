"""Seedable, splittable random streams.

A :class:`Stream` is a seed plus a key path. Children are derived by
extending the path, never by consuming draws from the parent, so the numbers
a task sees depend only on its key and not on which worker runs it or when.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _encode(key) -> int:
    if isinstance(key, str):
        # spawn_key entries must be ints; crc32 is stable across processes, hash() is not
        return zlib.crc32(key.encode("utf-8")) | (1 << 32)
    if isinstance(key, (int, np.integer)) and key >= 0:
        return int(key)
    raise TypeError(f"stream keys must be str or non-negative int, got {key!r}")


@dataclass(frozen=True)
class Stream:
    seed: int = 0
    path: tuple = ()

    def child(self, *keys) -> "Stream":
        return Stream(self.seed, self.path + tuple(keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            self.seed & _MASK64, spawn_key=tuple(_encode(k) for k in self.path)
        )
        return np.random.Generator(np.random.PCG64(ss))


def as_stream(rng) -> Stream:
    if isinstance(rng, Stream):
        return rng
    if rng is None:
        return Stream(0)
    return Stream(int(rng))
