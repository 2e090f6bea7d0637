"""Seed derivation and stream handling for reproducible sampling."""

from __future__ import annotations

import hashlib
import random


def derive_seed(seed: int, *keys) -> int:
    """Derive a child seed from a master seed and a key path.

    Stable across processes and platforms (sha256-based, independent of
    PYTHONHASHSEED), so experiment farms can hand out disjoint streams.
    """
    material = repr((int(seed),) + tuple(keys)).encode()
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def make_rng(seed) -> random.Random:
    """Accept an int seed or an existing Random and return a Random."""
    if isinstance(seed, random.Random):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required for reproducibility")
    return random.Random(int(seed))


def spawn(seed, *keys) -> random.Random:
    """Fresh generator on an independent stream named by `keys`."""
    if isinstance(seed, random.Random):
        # Split off a stream from the generator's own state.
        return random.Random(seed.getrandbits(64))
    return random.Random(derive_seed(seed, *keys))
