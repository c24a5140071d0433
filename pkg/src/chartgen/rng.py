"""Deterministic random-stream derivation.

Every chart in a corpus gets its own generator derived from the master
seed, the split name, and the chart index. Derivation goes through
SHA-256 so streams are independent and insensitive to build order or
worker count.
"""
import hashlib

import numpy as np


def derive_seed(master_seed: int, *parts) -> int:
    """Derive a 64-bit child seed from a master seed and context parts."""
    key = ":".join([str(master_seed)] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(master_seed: int, *parts) -> np.random.Generator:
    """Return a PCG64 generator for the given context."""
    return np.random.default_rng(derive_seed(master_seed, *parts))
