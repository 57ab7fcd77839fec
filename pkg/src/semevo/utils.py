"""Seed derivation shared by every randomized component."""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _entropy(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    return int(key) & _MASK64


def derive_seed(master_seed: int, *keys) -> np.random.SeedSequence:
    """Seed sequence for the stream named by ``keys`` under ``master_seed``.

    Streams depend only on their names, never on the order in which they
    are requested, so serial and parallel executions draw identical numbers.
    """
    return np.random.SeedSequence([_entropy(master_seed), *(_entropy(k) for k in keys)])


def derive_rng(master_seed: int, *keys) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, *keys)))


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int or a Generator into a Generator."""
    if seed is None or isinstance(seed, (int, np.integer)):
        return np.random.default_rng(seed)
    if isinstance(seed, np.random.Generator):
        return seed
    raise ValueError(f"{seed!r} cannot be used to seed a numpy Generator")
