"""Deterministic seed derivation.

Every random decision in the package flows from an integer seed through
``numpy.random.SeedSequence`` substreams keyed by small integer tags, so
serial and concurrent execution produce identical results.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(seed: int, *tags: int) -> np.random.SeedSequence:
    """Child seed sequence of ``seed`` identified by an integer tag path."""
    return np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=tuple(tags))


def derive_seed(seed: int, *tags: int) -> int:
    """Collapse a substream to a fresh 64-bit integer seed."""
    return int(substream(seed, *tags).generate_state(1, dtype=np.uint64)[0])


def rng_for(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(substream(seed, *tags))
