"""Counter-based random streams keyed by (seed, *keys).

Every trial gets its own Philox stream, so results never depend on the
order in which trials are executed.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream_key(name: str) -> int:
    """Stable integer key for a string (Python's ``hash`` is salted)."""
    return zlib.crc32(name.encode("utf-8"))


def make_rng(seed: int, *keys: int | str) -> np.random.Generator:
    ints = [int(seed)] + [stream_key(k) if isinstance(k, str) else int(k) for k in keys]
    if any(v < 0 for v in ints):
        raise ValueError(f"rng keys must be non-negative, got {ints}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(ints)))


def as_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(0 if rng is None else rng)
