"""Named deterministic random streams.

All randomness in a run flows from one master seed. Independent concerns
(init, data order, controller sampling, ...) get their own generator derived
from the master seed plus a stream name, so adding draws to one concern never
shifts another. Stream names are hashed with sha256, which is stable across
platforms and Python versions (unlike hash()).
"""

from __future__ import annotations

import hashlib

import numpy as np


def _words(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def stream(master_seed: int, *names: str) -> np.random.Generator:
    """Derive the generator for `names` (a path like ("train", "dropout"))."""
    entropy = [int(master_seed) & 0xFFFFFFFF]
    for name in names:
        entropy.extend(_words(name))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def generator_state(gen: np.random.Generator) -> dict:
    """JSON-serializable snapshot of a generator."""
    return gen.bit_generator.state


def restore_generator(state: dict) -> np.random.Generator:
    gen = np.random.Generator(np.random.PCG64())
    gen.bit_generator.state = state
    return gen
