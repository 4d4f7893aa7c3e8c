"""Deterministic RNG streams derived from one global seed.

Each consumer asks for a stream by (seed, label). Labels are hashed into
the seed material, so adding a new consumer never perturbs the draws of
existing ones.
"""

import hashlib

import numpy as np


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Return a generator seeded from ``seed`` and a stable hash of ``label``."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    key = int.from_bytes(digest, "little")
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))
