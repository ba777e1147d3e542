"""Cost-aware model selection: route each question to an LLM or KGM arm.

Per question, a cluster-level Thompson draw picks the modality, a per-arm
ridge model scores candidates in context, a cost-regret penalty discounts
arms that burn money on wrong answers, and a hard budget caps LLM spend.
The replay harness evaluates the policy offline against logged per-arm
outcomes.
"""

from .arms import ArmModel
from .cluster import ClusterBelief, sample_theta, seed_prior, select_cluster, update_posterior
from .engine import (
    Decision,
    PolicyEngine,
    RegretTracker,
    argmax_with_ties,
    bound_check,
    cheapest_correct_arm,
    step_regret,
)
from .errors import BudgetBreachError, ConfigError, DataError, NoAdmissibleArmError
from .ledger import BudgetLedger, unit_cost
from .replay import (
    ReplayDataset,
    RunResult,
    budget_base_cost,
    dataset_from_lines,
    generate_synthetic,
    load_dataset,
    reference_arm_for,
    registry_for_dataset,
    run_baseline,
    run_policy,
    save_dataset,
    sweep,
    topic_of,
)
from .types import (
    KGM,
    LLM,
    ArmSpec,
    EngineConfig,
    HistoryRecord,
    Question,
    dump_json,
    load_arm_registry,
    load_engine_config,
    new_engine_config,
    save_arm_registry,
)

__version__ = "0.1.0"

__all__ = [
    "ArmModel",
    "ArmSpec",
    "BudgetBreachError",
    "BudgetLedger",
    "ClusterBelief",
    "ConfigError",
    "DataError",
    "Decision",
    "EngineConfig",
    "HistoryRecord",
    "KGM",
    "LLM",
    "NoAdmissibleArmError",
    "PolicyEngine",
    "Question",
    "RegretTracker",
    "ReplayDataset",
    "RunResult",
    "argmax_with_ties",
    "bound_check",
    "budget_base_cost",
    "cheapest_correct_arm",
    "dataset_from_lines",
    "dump_json",
    "generate_synthetic",
    "load_arm_registry",
    "load_dataset",
    "load_engine_config",
    "new_engine_config",
    "reference_arm_for",
    "registry_for_dataset",
    "run_baseline",
    "run_policy",
    "sample_theta",
    "save_arm_registry",
    "save_dataset",
    "seed_prior",
    "select_cluster",
    "step_regret",
    "sweep",
    "topic_of",
    "unit_cost",
    "update_posterior",
    "__version__",
]
