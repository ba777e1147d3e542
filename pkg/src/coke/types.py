"""Core domain types: questions, arm specs, engine configuration, history records.

File formats (all carry a versioned ``"schema": 1`` field):
    arm registry  - JSON object {"schema": 1, "arms": [ArmSpec, ...]};
                    a bare JSON array is accepted and treated as schema 1.
    engine config - JSON object, see EngineConfig.to_dict().
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, DataError

LLM = "LLM"
KGM = "KGM"

PER_TOKEN = "per_token"
PER_CALL = "per_call"

SCHEMA_VERSION = 1

ABLATION_FLAGS = frozenset({"disable_cluster", "disable_context", "disable_cost_regret"})
COMBINE_MODES = ("two_stage", "additive")


@dataclass
class Question:
    """One incoming question: embedding context plus billing length.

    `outcomes` is only present in replay mode and maps every registered
    arm_id to that arm's 0/1 correctness on this question.
    """

    id: str
    embedding: np.ndarray
    token_len: int
    outcomes: dict[str, int] | None = None

    def __post_init__(self) -> None:
        self.embedding = np.asarray(self.embedding, dtype=float)
        if self.embedding.ndim != 1:
            raise DataError(f"question {self.id!r}: embedding must be a flat vector")
        if self.token_len < 1:
            raise DataError(f"question {self.id!r}: token_len must be >= 1")
        if self.outcomes is not None:
            bad = {a: v for a, v in self.outcomes.items() if v not in (0, 1)}
            if bad:
                raise DataError(f"question {self.id!r}: non-binary outcomes {bad}")

    @property
    def dim(self) -> int:
        return self.embedding.shape[0]


@dataclass(frozen=True)
class ArmSpec:
    """Static description of one candidate model.

    `unit_price` is currency per token for per-token arms and currency per
    invocation for per-call arms; local/KGM arms may be free (price 0).
    `sigma` optionally overrides the engine-wide ridge coefficient.
    """

    arm_id: str
    cluster: str
    unit_price: float
    reported_accuracy: float
    cost_mode: str
    sigma: float | None = None

    def __post_init__(self) -> None:
        if not self.arm_id:
            raise ConfigError("arm_id must be non-empty")
        if not self.cluster:
            raise ConfigError(f"arm {self.arm_id!r}: cluster must be non-empty")
        if self.unit_price < 0:
            raise ConfigError(f"arm {self.arm_id!r}: unit_price must be >= 0")
        if not 0.0 <= self.reported_accuracy <= 1.0:
            raise ConfigError(f"arm {self.arm_id!r}: reported_accuracy must be in [0, 1]")
        if self.cost_mode not in (PER_TOKEN, PER_CALL):
            raise ConfigError(
                f"arm {self.arm_id!r}: cost_mode must be {PER_TOKEN!r} or {PER_CALL!r}"
            )
        if self.sigma is not None and self.sigma <= 0:
            raise ConfigError(f"arm {self.arm_id!r}: sigma override must be > 0")

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "arm_id": self.arm_id,
            "cluster": self.cluster,
            "unit_price": self.unit_price,
            "reported_accuracy": self.reported_accuracy,
            "cost_mode": self.cost_mode,
        }
        if self.sigma is not None:
            d["sigma"] = self.sigma
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ArmSpec:
        try:
            return cls(
                arm_id=str(d["arm_id"]),
                cluster=str(d["cluster"]),
                unit_price=float(d["unit_price"]),
                reported_accuracy=float(d["reported_accuracy"]),
                cost_mode=str(d["cost_mode"]),
                sigma=float(d["sigma"]) if d.get("sigma") is not None else None,
            )
        except KeyError as exc:
            raise ConfigError(f"arm spec missing key: {exc.args[0]}") from None


@dataclass(frozen=True)
class EngineConfig:
    """Validated engine configuration; `gamma` is derived, not supplied."""

    d: int
    budget: float
    lambda_: float = 1.0
    sigma: float = 1.0
    delta: float = 0.1
    prior_strength: float = 10.0
    seed: int = 0
    ablation: frozenset[str] = frozenset()
    combine_mode: str = "two_stage"
    gamma: float = field(init=False)

    def __post_init__(self) -> None:
        if self.d <= 0:
            raise ConfigError("d must be a positive integer")
        if self.budget < 0 or not math.isfinite(self.budget):
            raise ConfigError("budget must be finite and >= 0")
        if self.lambda_ < 0 or not math.isfinite(self.lambda_):
            raise ConfigError("lambda must be finite and >= 0")
        if self.sigma <= 0 or not math.isfinite(self.sigma):
            raise ConfigError("sigma must be finite and > 0")
        if not 0.0 < self.delta <= 2.0:
            raise ConfigError("delta must be in (0, 2]")
        if self.prior_strength <= 0 or not math.isfinite(self.prior_strength):
            raise ConfigError("prior_strength must be finite and > 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        unknown = set(self.ablation) - ABLATION_FLAGS
        if unknown:
            raise ConfigError(f"unknown ablation flags: {sorted(unknown)}")
        if self.combine_mode not in COMBINE_MODES:
            raise ConfigError(f"combine_mode must be one of {COMBINE_MODES}")
        # gamma = 1 + sqrt(ln(2/delta)/2); real only for delta <= 2.
        object.__setattr__(self, "gamma", 1.0 + math.sqrt(math.log(2.0 / self.delta) / 2.0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "d": self.d,
            "budget": self.budget,
            "lambda": self.lambda_,
            "sigma": self.sigma,
            "delta": self.delta,
            "prior_strength": self.prior_strength,
            "seed": self.seed,
            "ablation": sorted(self.ablation),
            "combine_mode": self.combine_mode,
        }

    def replace(self, **changes: Any) -> EngineConfig:
        """New config with the given JSON-keyed fields changed (e.g. `lambda`)."""
        raw = self.to_dict()
        raw.update(changes)
        return new_engine_config(raw)


def _normalize_combine_mode(value: str) -> str:
    canon = value.replace("_", "").replace("-", "").lower()
    for mode in COMBINE_MODES:
        if canon == mode.replace("_", ""):
            return mode
    raise ConfigError(f"combine_mode must be one of {COMBINE_MODES} (got {value!r})")


def new_engine_config(raw: dict[str, Any]) -> EngineConfig:
    """Build a validated EngineConfig from a plain key-value map.

    Required keys: d, budget. Everything else has a documented default.
    """
    known = {
        "schema", "d", "budget", "lambda", "sigma", "delta",
        "prior_strength", "seed", "ablation", "combine_mode",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("d", "budget"):
        if key not in raw:
            raise ConfigError(f"config missing required key: {key!r}")
    schema = raw.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config schema version: {schema}")
    try:
        return EngineConfig(
            d=int(raw["d"]),
            budget=float(raw["budget"]),
            lambda_=float(raw.get("lambda", 1.0)),
            sigma=float(raw.get("sigma", 1.0)),
            delta=float(raw.get("delta", 0.1)),
            prior_strength=float(raw.get("prior_strength", 10.0)),
            seed=int(raw.get("seed", 0)),
            ablation=frozenset(raw.get("ablation", ())),
            combine_mode=_normalize_combine_mode(str(raw.get("combine_mode", "two_stage"))),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config value: {exc}") from None


@dataclass
class HistoryRecord:
    """One completed decide/observe iteration, as logged to the run history."""

    k: int
    question_id: str
    theta_samples: dict[str, float]
    chosen_cluster: str
    per_arm_scores: dict[str, dict[str, float]]
    chosen_arm: str
    reward: int
    cost_charged: float
    budget_remaining: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "question_id": self.question_id,
            "theta_samples": self.theta_samples,
            "chosen_cluster": self.chosen_cluster,
            "per_arm_scores": self.per_arm_scores,
            "chosen_arm": self.chosen_arm,
            "reward": self.reward,
            "cost_charged": self.cost_charged,
            "budget_remaining": self.budget_remaining,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> HistoryRecord:
        return cls(**d)


def dump_json(obj: Any) -> str:
    """Canonical JSON used for all emitted files: sorted keys, compact, stable."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_arm_registry(path: str | Path) -> list[ArmSpec]:
    """Load the arm registry file; duplicate arm ids are rejected."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    if isinstance(raw, dict):
        schema = raw.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise DataError(f"{path}: unsupported registry schema version: {schema}")
        entries = raw.get("arms")
        if not isinstance(entries, list):
            raise DataError(f"{path}: registry object must contain an 'arms' array")
    elif isinstance(raw, list):
        entries = raw
    else:
        raise DataError(f"{path}: registry must be a JSON array or object")
    specs = [ArmSpec.from_dict(e) for e in entries]
    seen: set[str] = set()
    for spec in specs:
        if spec.arm_id in seen:
            raise DataError(f"{path}: duplicate arm_id {spec.arm_id!r}")
        seen.add(spec.arm_id)
    if not specs:
        raise DataError(f"{path}: registry contains no arms")
    return specs


def save_arm_registry(specs: list[ArmSpec], path: str | Path) -> None:
    doc = {"schema": SCHEMA_VERSION, "arms": [s.to_dict() for s in specs]}
    Path(path).write_text(dump_json(doc) + "\n", encoding="utf-8")


def load_engine_config(path: str | Path) -> EngineConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"{path}: config must be a JSON object")
    return new_engine_config(raw)
