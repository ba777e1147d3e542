"""Shared fixtures: a small three-arm world used across the suite."""

from __future__ import annotations

import pytest

from coke import ArmSpec, generate_synthetic, new_engine_config, registry_for_dataset

THREE_ARM_GEN = {
    "name": "fixture-world",
    "n": 300,
    "d": 8,
    "seed": 5,
    "noise": 0.4,
    "spread": 0.25,
    "token_range": [20, 300],
    "arms": [
        {"arm_id": "kgm", "cluster": "KGM", "accuracy": 0.739, "unit_price": 0.0, "cost_mode": "per_call"},
        {"arm_id": "llm_small", "cluster": "LLM", "accuracy": 0.710, "unit_price": 4e-6, "cost_mode": "per_token"},
        {"arm_id": "llm_large", "cluster": "LLM", "accuracy": 0.802, "unit_price": 1e-5, "cost_mode": "per_token"},
    ],
}


@pytest.fixture(scope="session")
def small_world():
    """(dataset, specs) for a 300-question three-arm instance."""
    dataset = generate_synthetic(THREE_ARM_GEN)
    specs = registry_for_dataset(THREE_ARM_GEN, dataset)
    return dataset, specs


@pytest.fixture
def base_config():
    return new_engine_config({"d": 8, "budget": 1e9, "seed": 3})


@pytest.fixture
def three_specs() -> list[ArmSpec]:
    """Hand-built registry, independent of any dataset."""
    return [
        ArmSpec(arm_id="kgm", cluster="KGM", unit_price=0.0, reported_accuracy=0.739, cost_mode="per_call"),
        ArmSpec(arm_id="llm_small", cluster="LLM", unit_price=4e-6, reported_accuracy=0.710, cost_mode="per_token"),
        ArmSpec(arm_id="llm_large", cluster="LLM", unit_price=1e-5, reported_accuracy=0.802, cost_mode="per_token"),
    ]
