"""
Reproducible random streams.

Every random draw in the package comes from a numpy ``Generator`` built from a
``SeedSequence(master_seed, spawn_key=...)``.  The spawn key names the stream,
so a trial's randomness depends only on (master seed, stream names, trial
index), never on which worker ran it or in what order.

Stream keys in use:

    (STREAM_CODE, point, trial)   checks, single-qubit gates, greedy ties
    (STREAM_NOISE, point, trial)  the physical error of one trial
    (STREAM_FIT, ...)             bootstrap resampling
"""

from __future__ import annotations

import hashlib

import numpy as np

STREAM_CODE = 0
STREAM_NOISE = 1
STREAM_FIT = 2
STREAM_SYNTHETIC = 3


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


def point_key(*params) -> int:
    """Stable 63-bit id of a parameter tuple (independent of PYTHONHASHSEED)."""
    text = "|".join(repr(p) for p in params).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "big") >> 1
