"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from ..types import ArmSpec, EngineConfig, new_engine_config


class ArmSpecIn(BaseModel):
    arm_id: str
    cluster: str
    unit_price: float = 0.0
    reported_accuracy: float = 0.5
    cost_mode: str = "per_token"
    sigma: float | None = None

    def to_spec(self) -> ArmSpec:
        return ArmSpec(
            arm_id=self.arm_id,
            cluster=self.cluster,
            unit_price=self.unit_price,
            reported_accuracy=self.reported_accuracy,
            cost_mode=self.cost_mode,
            sigma=self.sigma,
        )


class EngineConfigIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    d: int
    budget: float
    lambda_: float = Field(default=1.0, alias="lambda")
    sigma: float = 1.0
    delta: float = 0.1
    prior_strength: float = 10.0
    seed: int = 0
    ablation: list[str] = Field(default_factory=list)
    combine_mode: str = "two_stage"

    def to_config(self) -> EngineConfig:
        return new_engine_config(
            {
                "d": self.d,
                "budget": self.budget,
                "lambda": self.lambda_,
                "sigma": self.sigma,
                "delta": self.delta,
                "prior_strength": self.prior_strength,
                "seed": self.seed,
                "ablation": list(self.ablation),
                "combine_mode": self.combine_mode,
            }
        )


class QuestionIn(BaseModel):
    id: str
    embedding: list[float]
    tokens: int = 1


class CreateSessionRequest(BaseModel):
    config: EngineConfigIn
    arms: list[ArmSpecIn]


class CreateSessionResponse(BaseModel):
    session_id: str
    config: dict[str, Any]
    clusters: list[str]


class DecideRequest(BaseModel):
    question: QuestionIn


class DecideResponse(BaseModel):
    k: int
    question_id: str
    chosen_arm: str
    chosen_cluster: str
    projected_cost: float
    theta_samples: dict[str, float]
    per_arm_scores: dict[str, dict[str, float]]
    budget_remaining: float


class ObserveRequest(BaseModel):
    k: int
    reward: int


class SessionState(BaseModel):
    session_id: str
    iteration: int
    budget_remaining: float
    total_cost: float
    llm_calls: int
    beliefs: dict[str, dict[str, float]]
    ledger: dict[str, dict[str, float]]
    pending_k: int | None


class DatasetLineIn(BaseModel):
    id: str
    embedding: list[float]
    tokens: int
    outcomes: dict[str, int]


class ReplayRequest(BaseModel):
    config: EngineConfigIn
    arms: list[ArmSpecIn]
    name: str = "inline"
    questions: list[DatasetLineIn]
    keep_order: bool = False
    reference_arm: str | None = None


class BaselineRequest(BaseModel):
    arms: list[ArmSpecIn]
    name: str = "inline"
    questions: list[DatasetLineIn]
    policy: str
    seed: int = 0
    reference_arm: str | None = None


class ValidateRequest(BaseModel):
    name: str = "inline"
    questions: list[DatasetLineIn]


class ValidateResponse(BaseModel):
    ok: bool
    n: int
    d: int
    arm_ids: list[str]
    marginals: dict[str, float]
