"""Offline replay: datasets with full per-arm outcomes, baselines, sweeps.

A replay dataset stores, for every question, the 0/1 outcome of every arm.
The policy only ever sees the outcome of the arm it chose; the full map is
consulted by the regret tracker and the oracle baseline. Synthetic worlds
are generated with topic-structured embeddings and per-arm accuracy targets
hit by bias calibration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .engine import PolicyEngine, RegretTracker
from .errors import DataError
from .ledger import unit_cost
from .rng import stream
from .types import (
    LLM,
    PER_TOKEN,
    SCHEMA_VERSION,
    ArmSpec,
    EngineConfig,
    Question,
    dump_json,
)

log = logging.getLogger(__name__)

HEATMAP_WIDTH = 250


# -- datasets ----------------------------------------------------------------


@dataclass
class ReplayDataset:
    """Ordered question stream with an outcome recorded for every arm."""

    name: str
    d: int
    questions: list[Question]
    arm_ids: list[str]

    def __post_init__(self) -> None:
        if not self.questions:
            raise DataError("dataset holds no questions")
        if not self.arm_ids:
            raise DataError("dataset names no arms")

    def __len__(self) -> int:
        return len(self.questions)

    def marginals(self) -> dict[str, float]:
        """Per-arm fraction of questions answered correctly."""
        n = len(self.questions)
        return {
            a: sum(q.outcomes[a] for q in self.questions) / n for a in self.arm_ids
        }


def _question_from_line(
    doc: dict[str, Any], lineno: int, arm_ids: Sequence[str], d: int | None
) -> Question:
    for key in ("id", "embedding", "tokens", "outcomes"):
        if key not in doc:
            raise DataError(f"line {lineno}: missing field {key!r}")
    outcomes = doc["outcomes"]
    if not isinstance(outcomes, dict):
        raise DataError(f"line {lineno}: outcomes must be an object")
    for arm in arm_ids:
        if arm not in outcomes:
            raise DataError(f"line {lineno}: missing outcome for arm {arm!r}")
    try:
        q = Question(
            id=str(doc["id"]),
            embedding=doc["embedding"],
            token_len=doc["tokens"],
            outcomes={a: outcomes[a] for a in arm_ids},
        )
    except (TypeError, ValueError) as exc:
        raise DataError(f"line {lineno}: {exc}") from exc
    if d is not None and q.dim != d:
        raise DataError(f"line {lineno}: embedding has dimension {q.dim}, expected {d}")
    return q


def load_dataset(path: str) -> ReplayDataset:
    """Read a JSONL dataset; logs per-arm marginal accuracies on success.

    The first line may be a header `{"schema": 1, "name": ..., "d": ...,
    "arm_ids": [...]}`; without one, the arm list and dimension are taken
    from the first question line.
    """
    import json

    name = str(path)
    arm_ids: list[str] | None = None
    d: int | None = None
    questions: list[Question] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(doc, dict):
                raise DataError(f"line {lineno}: expected an object")
            if lineno == 1 and "schema" in doc and "id" not in doc:
                if doc["schema"] != SCHEMA_VERSION:
                    raise DataError(f"line 1: unsupported schema version {doc['schema']!r}")
                name = str(doc.get("name", name))
                if "d" in doc:
                    d = int(doc["d"])
                if "arm_ids" in doc:
                    arm_ids = [str(a) for a in doc["arm_ids"]]
                continue
            if arm_ids is None:
                arm_ids = sorted(str(a) for a in doc.get("outcomes", {}))
                if not arm_ids:
                    raise DataError(f"line {lineno}: outcomes object is empty")
            q = _question_from_line(doc, lineno, arm_ids, d)
            if d is None:
                d = q.dim
            questions.append(q)
    if not questions:
        raise DataError(f"{path}: no question lines")
    ds = ReplayDataset(name=name, d=int(d), questions=questions, arm_ids=list(arm_ids))
    for arm, acc in sorted(ds.marginals().items()):
        log.info("dataset %s: arm %s marginal accuracy %.4f", ds.name, arm, acc)
    return ds


def dataset_from_lines(
    name: str, lines: Sequence[Mapping[str, Any]], arm_ids: Sequence[str] | None = None
) -> ReplayDataset:
    """Build a dataset from already-parsed line objects (service ingest path)."""
    if not lines:
        raise DataError("no question lines")
    if arm_ids is None:
        arm_ids = sorted(str(a) for a in lines[0].get("outcomes", {}))
        if not arm_ids:
            raise DataError("line 1: outcomes object is empty")
    questions: list[Question] = []
    d: int | None = None
    for lineno, doc in enumerate(lines, start=1):
        q = _question_from_line(dict(doc), lineno, arm_ids, d)
        if d is None:
            d = q.dim
        questions.append(q)
    return ReplayDataset(name=name, d=int(d), questions=questions, arm_ids=list(arm_ids))


def save_dataset(ds: ReplayDataset, path: str) -> None:
    """Write header + one JSON line per question; output is byte-stable."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            dump_json(
                {"schema": SCHEMA_VERSION, "name": ds.name, "d": ds.d, "arm_ids": ds.arm_ids}
            )
            + "\n"
        )
        for q in ds.questions:
            fh.write(
                dump_json(
                    {
                        "id": q.id,
                        "embedding": [float(x) for x in q.embedding],
                        "tokens": q.token_len,
                        "outcomes": q.outcomes,
                    }
                )
                + "\n"
            )


# -- synthetic generation ----------------------------------------------------


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _calibrate_soft(
    proj_over_noise: np.ndarray, u: np.ndarray, target: float
) -> tuple[float, np.ndarray]:
    """Bias b such that mean(u < sigmoid(proj + b)) lands on target.

    The realized rate is a nondecreasing step function of b with steps of
    1/n, so bisection reaches the target within 1/n.
    """

    def realized(b: float) -> float:
        return float(np.mean(u < _sigmoid(proj_over_noise + b)))

    lo, hi = -60.0, 60.0
    if realized(lo) > target or realized(hi) < target:
        raise DataError(f"accuracy target {target} is unreachable at this noise scale")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if realized(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi, (u < _sigmoid(proj_over_noise + hi)).astype(int)


def _calibrate_hard(proj: np.ndarray, target: float) -> tuple[float, np.ndarray]:
    """Threshold tau: the top round(target*n) projections count as correct."""
    n = proj.shape[0]
    m = int(round(target * n))
    m = max(1, min(n, m))
    order = np.sort(proj)[::-1]
    if m == n:
        tau = float(order[-1] - 1.0)
    else:
        tau = float(0.5 * (order[m - 1] + order[m]))
    return tau, (proj >= tau).astype(int)


def generate_synthetic(gen: Mapping[str, Any]) -> ReplayDataset:
    """Build a topic-structured world with calibrated per-arm marginals.

    gen keys: n, d, arms [{arm_id, cluster?, accuracy, unit_price?,
    cost_mode?, topic?}], topics?, expert_structure? ("expert"|"random"),
    spread?, noise?, token_range?, correlation? ("shared"|"independent"),
    seed?, name?.

    Each topic gets an orthonormal center; a question is a normalized
    jittered draw from its topic center. An arm's outcome is 1 when a
    latent uniform falls under sigmoid((w_a.q)/noise + bias_a); with
    "shared" correlation the uniform is one difficulty draw per question,
    so arms tend to fail on the same hard questions. noise = 0 switches to
    a hard threshold on the projection. Biases and thresholds are
    calibrated so realized marginals hit the requested accuracies.
    """
    for key in ("n", "d", "arms"):
        if key not in gen:
            raise DataError(f"generator spec is missing required key {key!r}")
    try:
        n = int(gen["n"])
        d = int(gen["d"])
        arms = list(gen["arms"])
        if n < 1:
            raise DataError("n must be >= 1")
        if not arms:
            raise DataError("generator needs at least one arm")
        n_topics = int(gen.get("topics", len(arms)))
        if n_topics < 1 or n_topics > d:
            raise DataError(f"topics must be in [1, d]; got {n_topics} with d={d}")
        structure = str(gen.get("expert_structure", "expert"))
        if structure not in ("expert", "random"):
            raise DataError(f"unknown expert_structure {structure!r}")
        correlation = str(gen.get("correlation", "shared"))
        if correlation not in ("shared", "independent"):
            raise DataError(f"unknown correlation {correlation!r}")
        spread = float(gen.get("spread", 0.25))
        noise = float(gen.get("noise", 0.15))
        if noise < 0:
            raise DataError("noise must be >= 0")
        lo, hi = gen.get("token_range", (20, 300))
        lo, hi = int(lo), int(hi)
        if lo < 1 or hi < lo:
            raise DataError(f"bad token_range ({lo}, {hi})")
        seed = int(gen.get("seed", 0))
        name = str(gen.get("name", f"synthetic-{seed}"))
    except (TypeError, ValueError) as exc:
        raise DataError(f"generator spec: {exc}") from exc

    for i, spec in enumerate(arms):
        if not isinstance(spec, Mapping) or "arm_id" not in spec or "accuracy" not in spec:
            raise DataError(f"generator arm #{i} needs arm_id and accuracy")
        try:
            acc = float(spec["accuracy"])
            int(spec.get("topic", 0))
        except (TypeError, ValueError) as exc:
            raise DataError(f"arm {spec['arm_id']!r}: {exc}") from exc
        if not 0.0 < acc < 1.0:
            raise DataError(f"arm {spec.get('arm_id')!r}: accuracy target {acc} outside (0,1)")

    centers_rng = stream(seed, "gen:topics")
    raw = centers_rng.normal(size=(d, n_topics))
    centers, _ = np.linalg.qr(raw)
    centers = centers.T  # one orthonormal row per topic

    q_rng = stream(seed, "gen:questions")
    topic_of_q = q_rng.integers(n_topics, size=n)
    embeddings = centers[topic_of_q] + spread * q_rng.normal(size=(n, d))
    embeddings /= np.linalg.norm(embeddings, axis=1, keepdims=True)

    tokens = stream(seed, "gen:tokens").integers(lo, hi + 1, size=n)
    shared_u = stream(seed, "gen:difficulty").uniform(size=n)
    arm_dir_rng = stream(seed, "gen:arms")

    outcome_cols: dict[str, np.ndarray] = {}
    for i, spec in enumerate(arms):
        arm_id = str(spec["arm_id"])
        if arm_id in outcome_cols:
            raise DataError(f"duplicate arm id {arm_id!r} in generator spec")
        if structure == "expert":
            topic = int(spec.get("topic", i % n_topics))
            if not 0 <= topic < n_topics:
                raise DataError(f"arm {arm_id!r}: topic {topic} out of range")
            w = centers[topic]
        else:
            w = arm_dir_rng.normal(size=d)
            w /= np.linalg.norm(w)
        proj = embeddings @ w
        target = float(spec["accuracy"])
        if noise == 0.0:
            _, col = _calibrate_hard(proj, target)
        else:
            u = shared_u if correlation == "shared" else stream(
                seed, f"gen:outcomes:{arm_id}"
            ).uniform(size=n)
            _, col = _calibrate_soft(proj / noise, u, target)
        outcome_cols[arm_id] = col

    width = len(str(n))
    questions = [
        Question(
            id=f"q{i:0{width}d}-t{topic_of_q[i]}",
            embedding=embeddings[i],
            token_len=int(tokens[i]),
            outcomes={a: int(col[i]) for a, col in outcome_cols.items()},
        )
        for i in range(n)
    ]
    return ReplayDataset(
        name=name, d=d, questions=questions, arm_ids=[str(s["arm_id"]) for s in arms]
    )


def registry_for_dataset(
    gen: Mapping[str, Any], dataset: ReplayDataset
) -> list[ArmSpec]:
    """Arm registry matching a generated dataset.

    Prices and clusters come from the generator spec; reported accuracy is
    the realized marginal, so seeded priors match the world.
    """
    marginals = dataset.marginals()
    specs = []
    for arm in gen["arms"]:
        arm_id = str(arm["arm_id"])
        try:
            price = float(arm.get("unit_price", 0.0))
        except (TypeError, ValueError) as exc:
            raise DataError(f"arm {arm_id!r}: {exc}") from exc
        specs.append(
            ArmSpec(
                arm_id=arm_id,
                cluster=str(arm.get("cluster", LLM)),
                unit_price=price,
                reported_accuracy=marginals[arm_id],
                cost_mode=str(arm.get("cost_mode", PER_TOKEN)),
            )
        )
    return specs


def topic_of(question: Question) -> int | None:
    """Topic index of a generated question, recovered from its id suffix."""
    _, _, tail = question.id.rpartition("-t")
    return int(tail) if tail.isdigit() else None


# -- run results ---------------------------------------------------------------


@dataclass
class RunResult:
    """Everything a single replay pass produces, JSON-serializable."""

    config: dict[str, Any]
    dataset_name: str
    n_questions: int
    order: str
    reference_arm: str
    accuracy: float
    error_rate: float
    total_cost_dollars: float
    total_llm_calls: int
    cost_saving_vs_reference: float
    per_arm_selection_counts: dict[str, int]
    regret_curve: list[tuple[int, int]]
    interval_heatmap: dict[str, Any]
    ledger: dict[str, dict[str, float]]
    bound: dict[str, Any] | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "config": self.config,
            "dataset_name": self.dataset_name,
            "n_questions": self.n_questions,
            "order": self.order,
            "reference_arm": self.reference_arm,
            "accuracy": float(self.accuracy),
            "error_rate": float(self.error_rate),
            "total_cost_dollars": float(self.total_cost_dollars),
            "total_llm_calls": int(self.total_llm_calls),
            "cost_saving_vs_reference": float(self.cost_saving_vs_reference),
            "per_arm_selection_counts": {
                a: int(c) for a, c in self.per_arm_selection_counts.items()
            },
            "regret_curve": [[int(k), int(sr)] for k, sr in self.regret_curve],
            "interval_heatmap": self.interval_heatmap,
            "ledger": self.ledger,
            "bound": self.bound,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())


def _heatmap(
    chosen_seq: Sequence[str], arm_ids: Sequence[str], width: int
) -> dict[str, Any]:
    """Selection counts per arm per fixed-width iteration interval."""
    rows = []
    for start in range(0, len(chosen_seq), width):
        block = chosen_seq[start : start + width]
        counts = {a: 0 for a in arm_ids}
        for arm in block:
            counts[arm] += 1
        rows.append({"start": start + 1, "end": start + len(block), "counts": counts})
    return {"interval_width": width, "rows": rows}


def reference_arm_for(dataset: ReplayDataset, specs: Sequence[ArmSpec]) -> str:
    """Most expensive arm: largest whole-stream cost, ties by id."""
    totals = {
        s.arm_id: sum(unit_cost(s, q) for q in dataset.questions) for s in specs
    }
    return max(totals, key=lambda a: (totals[a], a))


def _reference_cost(dataset: ReplayDataset, spec: ArmSpec) -> float:
    return sum(unit_cost(spec, q) for q in dataset.questions)


def _saving(total_cost: float, ref_cost: float) -> float:
    """Fraction of the reference cost avoided; positive means cheaper."""
    if ref_cost == 0.0:
        return 0.0
    return (ref_cost - total_cost) / ref_cost


def _check_specs(dataset: ReplayDataset, specs: Sequence[ArmSpec]) -> None:
    missing = [s.arm_id for s in specs if s.arm_id not in dataset.arm_ids]
    if missing:
        raise DataError(f"dataset has no outcomes for arms: {', '.join(sorted(missing))}")


# -- policy replay -------------------------------------------------------------


def run_policy(
    dataset: ReplayDataset,
    specs: Sequence[ArmSpec],
    config: EngineConfig,
    *,
    keep_order: bool = False,
    reference_arm: str | None = None,
    heatmap_width: int = HEATMAP_WIDTH,
) -> tuple[RunResult, PolicyEngine]:
    """Sequential decide/observe pass over the dataset.

    Questions are replayed in a seed-shuffled order unless keep_order is
    set. Only the chosen arm's outcome reaches the engine; the full map
    feeds the regret tracker.
    """
    _check_specs(dataset, specs)
    if config.d != dataset.d:
        raise DataError(f"config d={config.d} does not match dataset d={dataset.d}")
    engine = PolicyEngine(config, specs)
    spec_by_id = {s.arm_id: s for s in specs}
    ref = reference_arm or reference_arm_for(dataset, specs)
    if ref not in spec_by_id:
        raise DataError(f"unknown reference arm {ref!r}")

    if keep_order:
        questions = list(dataset.questions)
    else:
        order = stream(config.seed, "order").permutation(len(dataset.questions))
        questions = [dataset.questions[i] for i in order]

    tracker = RegretTracker(config.gamma)
    chosen_seq: list[str] = []
    correct = 0
    for q in questions:
        decision = engine.decide(q)
        reward = q.outcomes[decision.chosen_arm]
        engine.observe(decision, reward)
        correct += reward
        chosen_seq.append(decision.chosen_arm)
        per_arm_costs = {s.arm_id: unit_cost(s, q) for s in specs}
        outcomes = {s.arm_id: q.outcomes[s.arm_id] for s in specs}
        tracker.record(
            outcomes,
            per_arm_costs,
            decision.chosen_arm,
            radius=decision.per_arm_scores[decision.chosen_arm]["explore"],
        )

    n = len(questions)
    counts = {s.arm_id: 0 for s in specs}
    for arm in chosen_seq:
        counts[arm] += 1
    total_cost = engine.ledger.total_cost()
    result = RunResult(
        config=config.to_dict(),
        dataset_name=dataset.name,
        n_questions=n,
        order="file" if keep_order else "shuffled",
        reference_arm=ref,
        accuracy=correct / n,
        error_rate=1.0 - correct / n,
        total_cost_dollars=total_cost,
        total_llm_calls=engine.ledger.llm_calls(),
        cost_saving_vs_reference=_saving(total_cost, _reference_cost(dataset, spec_by_id[ref])),
        per_arm_selection_counts=counts,
        regret_curve=list(tracker.curve),
        interval_heatmap=_heatmap(chosen_seq, [s.arm_id for s in specs], heatmap_width),
        ledger=engine.ledger.snapshot(),
        bound={
            "gamma": float(config.gamma),
            "cumulative_sr": int(tracker.cumulative_sr),
            "bound_rhs": float(tracker.bound_rhs),
            "holds": tracker.bound_holds(),
        },
    )
    return result, engine


# -- baselines -----------------------------------------------------------------

BASELINE_RANDOM = "random"
BASELINE_ORACLE = "oracle"
ALWAYS_PREFIX = "always:"


def run_baseline(
    dataset: ReplayDataset,
    specs: Sequence[ArmSpec],
    policy: str,
    *,
    seed: int = 0,
    reference_arm: str | None = None,
    heatmap_width: int = HEATMAP_WIDTH,
) -> RunResult:
    """Reference pass: always:<arm>, random, or oracle (cheapest correct).

    Baselines ignore the budget; they exist to anchor the policy's
    accuracy and spend. The oracle answers with the cheapest correct arm
    and falls back to the cheapest arm when every arm is wrong.
    """
    _check_specs(dataset, specs)
    spec_by_id = {s.arm_id: s for s in specs}
    ref = reference_arm or reference_arm_for(dataset, specs)
    if ref not in spec_by_id:
        raise DataError(f"unknown reference arm {ref!r}")

    if policy.startswith(ALWAYS_PREFIX):
        pinned = policy[len(ALWAYS_PREFIX) :]
        if pinned not in spec_by_id:
            raise DataError(f"unknown arm {pinned!r} in baseline {policy!r}")
    elif policy not in (BASELINE_RANDOM, BASELINE_ORACLE):
        raise DataError(f"unknown baseline {policy!r} (always:<arm>, random, oracle)")

    rng = stream(seed, "baseline")
    arm_ids = [s.arm_id for s in specs]
    tracker = RegretTracker(gamma=0.0)
    chosen_seq: list[str] = []
    correct = 0
    total_cost = 0.0
    llm_calls = 0
    per_arm_cost: dict[str, float] = {a: 0.0 for a in arm_ids}
    per_arm_failure: dict[str, float] = {a: 0.0 for a in arm_ids}
    per_arm_calls: dict[str, int] = {a: 0 for a in arm_ids}

    for q in dataset.questions:
        costs = {s.arm_id: unit_cost(s, q) for s in specs}
        outcomes = {a: q.outcomes[a] for a in arm_ids}
        if policy.startswith(ALWAYS_PREFIX):
            arm = pinned
        elif policy == BASELINE_RANDOM:
            arm = arm_ids[int(rng.integers(len(arm_ids)))]
        else:
            right = [a for a in arm_ids if outcomes[a] == 1]
            pool = right if right else arm_ids
            arm = min(pool, key=lambda a: (costs[a], a))
        reward = outcomes[arm]
        correct += reward
        chosen_seq.append(arm)
        total_cost += costs[arm]
        per_arm_cost[arm] += costs[arm]
        per_arm_failure[arm] += costs[arm] if reward == 0 else 0.0
        per_arm_calls[arm] += 1
        if spec_by_id[arm].cluster == LLM:
            llm_calls += 1
        tracker.record(outcomes, costs, arm, radius=0.0)

    n = len(dataset.questions)
    counts = {a: 0 for a in arm_ids}
    for arm in chosen_seq:
        counts[arm] += 1
    ledger = {
        a: {
            "total_cost": per_arm_cost[a],
            "failure_cost": per_arm_failure[a],
            "calls": per_arm_calls[a],
            "cost_regret": (per_arm_failure[a] / per_arm_cost[a]) if per_arm_cost[a] else 0.0,
        }
        for a in arm_ids
    }
    return RunResult(
        config={"baseline": policy, "seed": seed},
        dataset_name=dataset.name,
        n_questions=n,
        order="file",
        reference_arm=ref,
        accuracy=correct / n,
        error_rate=1.0 - correct / n,
        total_cost_dollars=total_cost,
        total_llm_calls=llm_calls,
        cost_saving_vs_reference=_saving(total_cost, _reference_cost(dataset, spec_by_id[ref])),
        per_arm_selection_counts=counts,
        regret_curve=list(tracker.curve),
        interval_heatmap=_heatmap(chosen_seq, arm_ids, heatmap_width),
        ledger=ledger,
        bound=None,
    )


# -- sweeps ----------------------------------------------------------------------

AXIS_BUDGET = "budget"
AXIS_LAMBDA = "lambda"


def budget_base_cost(dataset: ReplayDataset, specs: Sequence[ArmSpec]) -> float:
    """Cost of answering every question with the most expensive arm.

    Budget-axis values are fractions of this quantity.
    """
    ref = reference_arm_for(dataset, specs)
    return _reference_cost(dataset, next(s for s in specs if s.arm_id == ref))


def sweep(
    dataset: ReplayDataset,
    specs: Sequence[ArmSpec],
    base_config: EngineConfig,
    axis: str,
    values: Sequence[float],
    *,
    keep_order: bool = False,
    reference_arm: str | None = None,
) -> list[tuple[float, RunResult]]:
    """Independent fresh-state runs per axis point, all on the same seed."""
    if axis not in (AXIS_BUDGET, AXIS_LAMBDA):
        raise DataError(f"unknown sweep axis {axis!r}")
    if not values:
        raise DataError("sweep axis needs at least one value")
    base = budget_base_cost(dataset, specs) if axis == AXIS_BUDGET else None
    points: list[tuple[float, RunResult]] = []
    for v in values:
        v = float(v)
        if axis == AXIS_BUDGET:
            cfg = base_config.replace(budget=v * base)
        else:
            cfg = base_config.replace(**{"lambda": v})
        result, _ = run_policy(
            dataset,
            specs,
            cfg,
            keep_order=keep_order,
            reference_arm=reference_arm,
        )
        points.append((v, result))
    return points


# -- CSV emitters -----------------------------------------------------------------


def sweep_csv(points: Iterable[tuple[float, RunResult]]) -> str:
    lines = ["axis_value,accuracy,error_rate,cost_dollars,llm_calls,saving_fraction"]
    for value, r in points:
        lines.append(
            f"{value},{r.accuracy},{r.error_rate},{r.total_cost_dollars},"
            f"{r.total_llm_calls},{r.cost_saving_vs_reference}"
        )
    return "\n".join(lines) + "\n"


def regret_curve_csv(result: RunResult) -> str:
    lines = ["k,cumulative_sr"]
    for k, sr in result.regret_curve:
        lines.append(f"{k},{sr}")
    return "\n".join(lines) + "\n"


def heatmap_csv(result: RunResult) -> str:
    lines = ["interval_start,interval_end,arm_id,count"]
    for row in result.interval_heatmap["rows"]:
        for arm in sorted(row["counts"]):
            lines.append(f"{row['start']},{row['end']},{arm},{row['counts'][arm]}")
    return "\n".join(lines) + "\n"
