"""Deterministic random number streams.

Every stochastic component draws from its own named stream so that adding
draws in one place (say, the synthetic data generator) never perturbs the
sequence seen by another (the cluster sampler). A stream is identified by
(seed, name); equal pairs always yield identical draw sequences.

Stream names in use:
    cluster   - Beta/theta draws in the policy engine
    policy    - tie-breaking among equally scored arms
    order     - question-order shuffling in the replay harness
    baseline  - random-baseline arm choices
    gen:*     - synthetic dataset generation substreams
"""

from __future__ import annotations

import hashlib

import numpy as np

RandomSource = np.random.Generator


def seeded_rng(seed: int) -> RandomSource:
    """Single deterministic generator for the given seed."""
    return np.random.default_rng(seed)


def _name_entropy(name: str) -> int:
    # Stable across processes and Python versions (hash() is salted; sha256 is not).
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "big")


def stream(seed: int, name: str) -> RandomSource:
    """Named substream of `seed`, independent of all other names."""
    return np.random.default_rng([seed, _name_entropy(name)])


def split_streams(seed: int, names: tuple[str, ...]) -> dict[str, RandomSource]:
    """One independent generator per name, all derived from `seed`."""
    return {name: stream(seed, name) for name in names}


def rng_state(rng: RandomSource) -> dict:
    """JSON-serializable snapshot of a generator's state."""
    return rng.bit_generator.state


def restore_rng(state: dict) -> RandomSource:
    """Rebuild a generator from a `rng_state` snapshot."""
    bit_gen = getattr(np.random, state["bit_generator"])()
    bit_gen.state = state
    return np.random.Generator(bit_gen)
