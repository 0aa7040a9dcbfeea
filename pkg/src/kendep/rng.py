"""Seed handling.

Every random routine accepts ``seed`` as an integer, a
:class:`numpy.random.SeedSequence` or a ready :class:`numpy.random.Generator`.
Replicated experiments derive one child stream per replicate with
``SeedSequence.spawn`` so results do not depend on scheduling.
"""

from __future__ import annotations

import numpy as np

__all__ = ["as_generator", "as_seed_sequence", "replicate_streams"]


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        raise TypeError("a Generator cannot be split reproducibly; pass an integer seed")
    return np.random.SeedSequence(seed)


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(as_seed_sequence(seed))


def replicate_streams(seed, count: int) -> list:
    """``count`` independent generators derived from ``seed``."""
    return [np.random.default_rng(s) for s in as_seed_sequence(seed).spawn(count)]
