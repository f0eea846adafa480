"""Seeded random streams.

Each simulated round draws from its own generator derived from
``(seed, round_index)``, so results do not depend on execution order.
"""

import os

import numpy as np

SEED_ENV = "QDL_SEED"
MASK64 = (1 << 64) - 1

# Spawn-key prefixes keep auxiliary streams disjoint from round streams.
_ROUND = 0
_AUX = 1


def round_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed & MASK64, spawn_key=(_ROUND, index)))


def aux_rng(seed: int, name: str) -> np.random.Generator:
    """Stream for non-round randomness (e.g. a public hash seed)."""
    tag = int.from_bytes(name.encode(), "big") & MASK64
    return np.random.default_rng(np.random.SeedSequence(seed & MASK64, spawn_key=(_AUX, tag)))


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    return int(raw, 0) & MASK64
