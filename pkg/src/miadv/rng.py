"""Deterministic, seedable random streams.

Every source of randomness in the package is a numpy ``Generator`` derived
from a 64-bit master seed and an integer path. Distinct paths give
statistically independent streams; the same (seed, path) pair always
reproduces the same stream, including across processes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

# A stream is a plain numpy Generator; PCG64 state is derived from the
# (seed, path) pair via SeedSequence spawn keys.
RngStream = np.random.Generator

_MAX_SEED = 2**64 - 1


def derive_stream(master_seed: int, path: Sequence[int] = ()) -> RngStream:
    """Return the stream identified by ``master_seed`` and ``path``.

    Pure function: no global state is read or advanced. Safe to call from
    any thread or process.
    """
    seed = int(master_seed)
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"master seed must be a 64-bit unsigned integer, got {master_seed}")
    key = tuple(int(k) for k in path)
    if any(k < 0 for k in key):
        raise ValueError(f"stream path entries must be nonnegative, got {key}")
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def standard_normal(stream: RngStream, count: int) -> np.ndarray:
    """Draw ``count`` iid standard normal values, advancing the stream."""
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    return stream.standard_normal(int(count))
