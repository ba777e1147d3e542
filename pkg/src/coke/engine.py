"""Policy engine: one decide/observe loop per incoming question.

Default (two-stage) selection: Thompson-sample a cluster, then play the
admissible arm of that cluster maximizing q.mu + bonus - lambda * cost_regret.
Additive mode instead ranks all admissible arms on theta + q.mu + bonus -
lambda * cost_regret. Budget-blocked LLM arms are filtered out before either
stage; if the whole LLM cluster is blocked it is skipped before sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .arms import ArmModel
from .cluster import ClusterBelief, sample_theta, seed_prior, select_cluster, update_posterior
from .errors import ConfigError, NoAdmissibleArmError
from .ledger import BudgetLedger, unit_cost
from .rng import RandomSource, restore_rng, rng_state, split_streams
from .types import (
    SCHEMA_VERSION,
    ArmSpec,
    EngineConfig,
    HistoryRecord,
    Question,
    new_engine_config,
)


@dataclass
class Decision:
    """Outcome of decide(): the chosen arm plus the full score breakdown."""

    k: int
    question: Question
    theta_samples: dict[str, float]
    chosen_cluster: str
    per_arm_scores: dict[str, dict[str, float]]
    chosen_arm: str
    projected_cost: float


def argmax_with_ties(scores: Mapping[str, float], rng: RandomSource) -> str:
    """Key of the maximal score; exact ties resolve uniformly at random.

    Adding the same constant to every score leaves both the tie set and the
    rng draw unchanged, so the choice is shift-invariant.
    """
    if not scores:
        raise ValueError("argmax over empty score map")
    best = max(scores.values())
    tied = [k for k, v in scores.items() if v == best]
    if len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(len(tied)))]


class PolicyEngine:
    """Sequential decision state over a fixed arm registry."""

    def __init__(self, config: EngineConfig, specs: Sequence[ArmSpec]) -> None:
        if not specs:
            raise ConfigError("arm registry is empty")
        ids = [s.arm_id for s in specs]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate arm ids in registry")
        self.config = config
        self.specs: dict[str, ArmSpec] = {s.arm_id: s for s in specs}
        by_cluster: dict[str, list[ArmSpec]] = {}
        for s in specs:
            by_cluster.setdefault(s.cluster, []).append(s)
        self.beliefs: dict[str, ClusterBelief] = {
            c: seed_prior(arms, config.prior_strength) for c, arms in by_cluster.items()
        }
        self.arms: dict[str, ArmModel] = {
            s.arm_id: ArmModel(s, config.d, config.sigma) for s in specs
        }
        self.ledger = BudgetLedger(config.budget, specs)
        self.history: list[HistoryRecord] = []
        self.iteration = 0
        self._pending: Decision | None = None
        self._streams = split_streams(config.seed, ("cluster", "policy"))

    # -- selection ---------------------------------------------------------

    def _score_arm(self, arm_id: str, question: Question) -> dict[str, float]:
        cfg = self.config
        if "disable_context" in cfg.ablation:
            exploit, explore = 0.0, 0.0
        else:
            exploit, explore = self.arms[arm_id].score(question, cfg.gamma)
        if "disable_cost_regret" in cfg.ablation:
            penalty = 0.0
        else:
            penalty = cfg.lambda_ * self.ledger.cost_regret(arm_id)
        return {"exploit": exploit, "explore": explore, "regret_penalty": penalty}

    def decide(self, question: Question) -> Decision:
        """Pick an arm for `question`; must be followed by observe()."""
        if self._pending is not None:
            raise RuntimeError("decide() called while a decision is awaiting observe()")
        if question.dim != self.config.d:
            raise ConfigError(
                f"question {question.id!r} has dimension {question.dim}, engine expects {self.config.d}"
            )
        admissible = [
            arm_id for arm_id, spec in self.specs.items() if self.ledger.admits(spec, question)
        ]
        if not admissible:
            raise NoAdmissibleArmError(
                "no admissible arm: every arm is budget-blocked (registry has no KGM arm?)"
            )
        eligible_clusters = sorted({self.specs[a].cluster for a in admissible})
        cluster_rng = self._streams["cluster"]
        policy_rng = self._streams["policy"]
        ablate_cluster = "disable_cluster" in self.config.ablation

        if self.config.combine_mode == "two_stage":
            if ablate_cluster:
                thetas: dict[str, float] = {}
                chosen_cluster = eligible_clusters[int(cluster_rng.integers(len(eligible_clusters)))]
            else:
                chosen_cluster, thetas = select_cluster(
                    [self.beliefs[c] for c in eligible_clusters], cluster_rng
                )
            candidates = [a for a in admissible if self.specs[a].cluster == chosen_cluster]
            breakdown = {a: self._score_arm(a, question) for a in candidates}
            totals = {
                a: s["exploit"] + s["explore"] - s["regret_penalty"] for a, s in breakdown.items()
            }
            chosen_arm = argmax_with_ties(totals, policy_rng)
        else:
            if ablate_cluster:
                thetas = {}
            else:
                thetas = {
                    c: sample_theta(self.beliefs[c], cluster_rng) for c in eligible_clusters
                }
            breakdown = {a: self._score_arm(a, question) for a in admissible}
            totals = {
                a: thetas.get(self.specs[a].cluster, 0.0)
                + s["exploit"] + s["explore"] - s["regret_penalty"]
                for a, s in breakdown.items()
            }
            chosen_arm = argmax_with_ties(totals, policy_rng)
            chosen_cluster = self.specs[chosen_arm].cluster

        decision = Decision(
            k=self.iteration + 1,
            question=question,
            theta_samples=thetas,
            chosen_cluster=chosen_cluster,
            per_arm_scores=breakdown,
            chosen_arm=chosen_arm,
            projected_cost=unit_cost(self.specs[chosen_arm], question),
        )
        self._pending = decision
        return decision

    def observe(self, decision: Decision, reward: int) -> HistoryRecord:
        """Commit the pending decision: charge, update beliefs and ridge state."""
        if self._pending is not decision:
            raise RuntimeError("observe() must receive the decision returned by the last decide()")
        if reward not in (0, 1):
            raise ValueError(f"reward must be 0 or 1, got {reward!r}")
        self.ledger.charge(decision.chosen_arm, decision.projected_cost, correct=reward)
        update_posterior(self.beliefs[decision.chosen_cluster], reward)
        self.arms[decision.chosen_arm].update(decision.question, reward)
        self.iteration += 1
        record = HistoryRecord(
            k=decision.k,
            question_id=decision.question.id,
            theta_samples=decision.theta_samples,
            chosen_cluster=decision.chosen_cluster,
            per_arm_scores=decision.per_arm_scores,
            chosen_arm=decision.chosen_arm,
            reward=reward,
            cost_charged=decision.projected_cost,
            budget_remaining=self.ledger.budget_remaining,
        )
        self.history.append(record)
        self._pending = None
        return record

    # -- checkpointing -----------------------------------------------------

    def to_checkpoint(self) -> dict[str, Any]:
        """Resumable snapshot: config, beliefs, arm states, ledger, rng streams.

        The history log is streamed separately (JSONL) and not embedded here.
        """
        if self._pending is not None:
            raise RuntimeError("cannot checkpoint with a decision awaiting observe()")
        return {
            "schema": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "specs": [s.to_dict() for s in self.specs.values()],
            "iteration": self.iteration,
            "beliefs": {c: b.to_dict() for c, b in self.beliefs.items()},
            "arms": {arm_id: m.to_dict() for arm_id, m in self.arms.items()},
            "ledger": self.ledger.to_dict(),
            "rng": {name: rng_state(rng) for name, rng in self._streams.items()},
        }

    @classmethod
    def from_checkpoint(cls, doc: dict[str, Any]) -> PolicyEngine:
        if doc.get("schema") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported checkpoint schema version: {doc.get('schema')}")
        config = new_engine_config(doc["config"])
        specs = [ArmSpec.from_dict(s) for s in doc["specs"]]
        engine = cls(config, specs)
        engine.iteration = int(doc["iteration"])
        for c, b in doc["beliefs"].items():
            engine.beliefs[c] = ClusterBelief.from_dict(b)
        for arm_id, state in doc["arms"].items():
            engine.arms[arm_id].restore(state)
        engine.ledger.restore(doc["ledger"])
        engine._streams = {name: restore_rng(state) for name, state in doc["rng"].items()}
        return engine


# -- selection regret ------------------------------------------------------


def cheapest_correct_arm(
    outcomes: Mapping[str, int], per_arm_costs: Mapping[str, float]
) -> str | None:
    """The lowest-cost arm that answers correctly, or None if all are wrong."""
    correct = [a for a, v in outcomes.items() if v == 1]
    if not correct:
        return None
    return min(correct, key=lambda a: (per_arm_costs[a], a))


def step_regret(
    outcomes: Mapping[str, int], per_arm_costs: Mapping[str, float], chosen: str
) -> int:
    """1 when the chosen arm is wrong but some arm was right, else 0."""
    if outcomes[chosen] == 1:
        return 0
    return 1 if cheapest_correct_arm(outcomes, per_arm_costs) is not None else 0


@dataclass
class RegretStep:
    best_arm: str | None
    chosen_arm: str
    step_regret: int


class RegretTracker:
    """Accumulates selection regret and the confidence-radius bound term.

    The bound term is 2*gamma + 2*sum of the chosen arm's exploration bonus
    at selection time; a run satisfies the bound when cumulative regret stays
    at or below it.
    """

    def __init__(self, gamma: float) -> None:
        self.gamma = gamma
        self.cumulative_sr = 0
        self.per_step: list[RegretStep] = []
        self.bound_rhs = 2.0 * gamma
        self.curve: list[tuple[int, int]] = []

    def record(
        self,
        outcomes: Mapping[str, int],
        per_arm_costs: Mapping[str, float],
        chosen: str,
        radius: float,
    ) -> int:
        sr = step_regret(outcomes, per_arm_costs, chosen)
        self.cumulative_sr += sr
        self.bound_rhs += 2.0 * radius
        self.per_step.append(
            RegretStep(
                best_arm=cheapest_correct_arm(outcomes, per_arm_costs),
                chosen_arm=chosen,
                step_regret=sr,
            )
        )
        self.curve.append((len(self.per_step), self.cumulative_sr))
        return sr

    def bound_holds(self) -> bool:
        return self.cumulative_sr <= self.bound_rhs


def bound_check(tracker: RegretTracker) -> bool:
    """True iff cumulative selection regret is within the tracked bound."""
    return tracker.bound_holds()
