"""Deterministic random-stream derivation.

All randomized entry points take an explicit ``random.Random``. Batch runs
derive one independent stream per trial from ``(master seed, trial index)``
so results are reproducible regardless of scheduling or trial order.
String seeding goes through the stdlib's sha512 path, which is stable across
platforms and interpreter runs (unlike ``hash()``).
"""

from __future__ import annotations

import random

__all__ = ["derive_rng", "fresh_seed"]


def derive_rng(master_seed: int, *path: int | str) -> random.Random:
    """Return an independent, reproducible stream for ``(master_seed, *path)``."""
    key = ":".join([str(master_seed), *map(str, path)])
    return random.Random(key)


def fresh_seed() -> int:
    """Generate a seed for commands invoked without one (always reported)."""
    return random.SystemRandom().randrange(2**63)
