"""Deterministic splittable random streams.

Every random decision in the pipeline draws from a stream keyed by
(master_seed, purpose_tag, *indices).  Keys are derived by hashing the
path into a 128-bit Philox counter key, so streams are independent,
order-free, and bit-reproducible across runs.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_key(master_seed: int, *path: str | int) -> int:
    """Hash a master seed plus a purpose path into a 128-bit stream key."""
    h = hashlib.blake2b(digest_size=16)
    h.update(int(master_seed).to_bytes(8, "little", signed=True))
    for part in path:
        if isinstance(part, str):
            raw = part.encode("utf-8")
            h.update(b"s" + len(raw).to_bytes(4, "little") + raw)
        else:
            h.update(b"i" + int(part).to_bytes(8, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


def stream(master_seed: int, *path: str | int) -> np.random.Generator:
    """Generator for the sub-stream addressed by (master_seed, *path)."""
    return generator_from_key(derive_key(master_seed, *path))


def generator_from_key(key: int) -> np.random.Generator:
    """Generator seeded directly with a 128-bit key (counter-based Philox)."""
    return np.random.Generator(np.random.Philox(key=key))
