"""Seeded random streams.

Every sampled object draws from numpy's Philox4x64-10 counter-based bit
generator keyed by ``seed + 2**64 * stream`` with the counter starting at zero.
The key layout is fixed so a seed reproduces the same stream anywhere that
implements Philox4x64-10.
"""

from __future__ import annotations

import os

import numpy as np

PRNG_NAME = "philox4x64-10"
_MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    key = (seed & _MASK64) | ((stream & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def thread_cap() -> int:
    """Worker count for parallel kernels: all cores, capped by DISCO_TOP_THREADS."""
    cap = os.cpu_count() or 1
    raw = os.environ.get("DISCO_TOP_THREADS")
    if raw:
        try:
            cap = min(cap, max(1, int(raw)))
        except ValueError:
            pass
    return cap
