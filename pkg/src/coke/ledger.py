"""Cost accounting and hard budget enforcement.

The budget B caps cumulative spend of LLM-cluster arms only; KGM calls are
tracked but never blocked. Per arm we keep total spend, the share of it
wasted on wrong answers (the cost-regret numerator), and call counts, so
both dollar and invocation-count comparisons fall out of one run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

from .errors import BudgetBreachError, ConfigError
from .types import LLM, PER_TOKEN, ArmSpec, Question


def unit_cost(spec: ArmSpec, question: Question) -> float:
    """Cost of answering `question` with this arm."""
    if spec.cost_mode == PER_TOKEN:
        return spec.unit_price * question.token_len
    return spec.unit_price


@dataclass
class ArmCharges:
    total_cost: float = 0.0
    failure_cost: float = 0.0
    calls: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {"total_cost": self.total_cost, "failure_cost": self.failure_cost, "calls": self.calls}


class BudgetLedger:
    """Per-arm spend tracking plus the LLM-cluster budget gate."""

    def __init__(self, budget_total: float, specs: Iterable[ArmSpec]) -> None:
        if budget_total < 0:
            raise ConfigError("budget must be >= 0")
        self.budget_total = budget_total
        self.specs = {s.arm_id: s for s in specs}
        self.per_arm = {arm_id: ArmCharges() for arm_id in self.specs}
        self.llm_spend = 0.0

    def _charges(self, arm_id: str) -> ArmCharges:
        try:
            return self.per_arm[arm_id]
        except KeyError:
            raise ConfigError(f"unknown arm_id {arm_id!r}") from None

    def cost_regret(self, arm_id: str) -> float:
        """Fraction of this arm's spend that went to wrong answers (0 if unspent)."""
        charges = self._charges(arm_id)
        if charges.total_cost == 0.0:
            return 0.0
        return charges.failure_cost / charges.total_cost

    def admits(self, spec: ArmSpec, question: Question) -> bool:
        """Whether charging this arm for this question would stay within budget.

        Non-LLM arms are always admissible. A zero budget disables the LLM
        cluster outright, even for free LLM arms.
        """
        if spec.cluster != LLM:
            return True
        if self.budget_total == 0.0:
            return False
        return self.llm_spend + unit_cost(spec, question) <= self.budget_total

    def charge(self, arm_id: str, cost: float, correct: int) -> None:
        """Record one call; raises if an LLM charge would breach the budget."""
        if cost < 0:
            raise ValueError("cost must be >= 0")
        if correct not in (0, 1):
            raise ValueError(f"correct must be 0 or 1, got {correct!r}")
        charges = self._charges(arm_id)
        if self.specs[arm_id].cluster == LLM:
            if self.llm_spend + cost > self.budget_total:
                raise BudgetBreachError(
                    f"charging {arm_id!r} {cost} would exceed budget "
                    f"{self.budget_total} (spent {self.llm_spend})"
                )
            self.llm_spend += cost
        charges.total_cost += cost
        if not correct:
            charges.failure_cost += cost
        charges.calls += 1

    @property
    def budget_remaining(self) -> float:
        return self.budget_total - self.llm_spend

    def total_cost(self) -> float:
        return sum(c.total_cost for c in self.per_arm.values())

    def llm_calls(self) -> int:
        return sum(
            c.calls for arm_id, c in self.per_arm.items() if self.specs[arm_id].cluster == LLM
        )

    def snapshot(self) -> dict[str, dict[str, Any]]:
        """Per-arm accounting as emitted in run results."""
        return {
            arm_id: {**charges.to_dict(), "cost_regret": self.cost_regret(arm_id)}
            for arm_id, charges in self.per_arm.items()
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "budget_total": self.budget_total,
            "llm_spend": self.llm_spend,
            "per_arm": {arm_id: c.to_dict() for arm_id, c in self.per_arm.items()},
        }

    def restore(self, d: dict[str, Any]) -> None:
        self.budget_total = float(d["budget_total"])
        self.llm_spend = float(d["llm_spend"])
        for arm_id, c in d["per_arm"].items():
            charges = self._charges(arm_id)
            charges.total_cost = float(c["total_cost"])
            charges.failure_cost = float(c["failure_cost"])
            charges.calls = int(c["calls"])
