"""Deterministic, order-independent random substreams.

Every stochastic decision in the pipeline draws from its own substream,
keyed by (master seed, sample index, slot name). Keys are derived with a
stateless 64-bit mixer and fed to a counter-based Philox generator, so
the draw at one index never depends on how many other indices were
sampled, in what order, or across how many worker processes. Overriding
the distribution of one attribute therefore cannot perturb any other
attribute: each slot owns its randomness.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(x: int) -> int:
    """splitmix64 finalizer; bijective on 64-bit integers."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def _part_to_int(part) -> int:
    if isinstance(part, (bool, int, np.integer)):
        return int(part) & _MASK64
    if isinstance(part, str):
        h = _FNV_OFFSET
        for b in part.encode("utf-8"):
            h = ((h ^ b) * _FNV_PRIME) & _MASK64
        return h
    raise TypeError(f"substream key parts must be int or str, got {type(part)!r}")


def derive_key(*parts) -> int:
    """Fold parts into a single 64-bit key. Order matters."""
    key = 0x8E51ECA6D2104E2D
    for part in parts:
        key = mix64((key + _GOLDEN) ^ mix64(_part_to_int(part)))
    return key


def substream(*parts) -> np.random.Generator:
    """A fresh generator determined solely by ``parts``.

    Two calls with equal parts return generators producing identical
    streams; unequal parts give statistically independent streams.
    """
    return np.random.Generator(np.random.Philox(counter=0, key=derive_key(*parts)))
