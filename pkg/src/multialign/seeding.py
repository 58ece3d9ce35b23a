"""Named random sub-streams derived from one root seed.

Each consumer (negative sampling, NMF init, ablation subsets, synthetic
data) draws from its own stream keyed by name and item, so turning one
feature on never shifts another feature's draws, and per-verse work gives
the same result in any execution order.
"""

import zlib

import numpy as np


def _key(text) -> int:
    return zlib.crc32(str(text).encode("utf-8"))


def derive_rng(seed: int, stream: str, item="") -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, _key(stream), _key(item)])
