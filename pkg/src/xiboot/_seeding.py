"""Seed derivation for reproducible, scheduling-independent random streams."""

import os

import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """64-bit child seed for the stream addressed by ``keys``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


def replicate_seeds(seed: int, count: int) -> np.ndarray:
    """One 32-bit seed per bootstrap replicate, seeds[b] = H(seed, b)."""
    return np.random.SeedSequence(int(seed)).generate_state(count, np.uint32)


def default_threads() -> int:
    env = os.environ.get("XIBOOT_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value > 0:
            return value
    return os.cpu_count() or 1
