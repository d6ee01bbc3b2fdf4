"""Runtime configuration: worker caps and reproducible seed derivation."""

from __future__ import annotations

import os

import numpy as np

#: Environment variable capping the number of worker threads used by any
#: parallel evaluation loop.  The numerical kernels in this package evaluate
#: series terms sequentially with fixed per-term seeds (results are
#: bit-identical regardless of this setting); the cap exists so that callers
#: embedding recordlab in larger pipelines can bound its thread usage.
THREADS_ENV = "RECORDLAB_THREADS"


def max_workers() -> int:
    """Return the configured worker cap (>= 1); defaults to 1."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def seed_sequence(root: int, *tags: int) -> np.random.SeedSequence:
    """Derive a child seed deterministically from ``root`` and integer tags.

    Entropy tuples make the derivation stable across processes and numpy
    versions, so a multi-term computation can hand each term its own
    independent, reproducible stream.
    """
    if root < 0:
        raise ValueError(f"seed must be a non-negative integer, got {root}")
    return np.random.SeedSequence(entropy=(root, *[int(t) & 0xFFFFFFFF for t in tags]))


def rng(root: int, *tags: int) -> np.random.Generator:
    """A counter-based generator keyed by ``root`` and ``tags``."""
    return np.random.Generator(np.random.Philox(seed_sequence(root, *tags)))


def subseed(root: int, *tags: int) -> int:
    """A stable derived integer seed for handing to nested computations."""
    state = seed_sequence(root, *tags).generate_state(1, np.uint64)[0]
    return int(state >> 1)
