"""Reproducible random streams.

Every stochastic routine takes an explicit numpy Generator. Parallel
replications use counter-based Philox (4x64) substreams keyed by the pair
(master seed, replication index), so results are bit-identical for a given
seed no matter how replications are partitioned across workers.
"""
from __future__ import annotations

import numpy as np

GENERATOR_FAMILY = "philox4x64/key=(seed,index)"

_MASK64 = (1 << 64) - 1


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one replication of an experiment."""
    key = np.array([int(seed) & _MASK64, int(index) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def master_stream(seed: int) -> np.random.Generator:
    """Stream for single-shot sampling commands (index 0 substream)."""
    return substream(seed, 0)
