"""Command line entry points: run, baseline, sweep, generate, validate, serve.

Exit codes: 0 success, 1 usage error, 2 data error. Every subcommand takes
--seed; the COKE_SEED environment variable is the fallback when the flag is
absent. Output files are byte-identical across repeated invocations with the
same flags and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from .errors import ConfigError, DataError
from .replay import (
    AXIS_BUDGET,
    AXIS_LAMBDA,
    ReplayDataset,
    generate_synthetic,
    heatmap_csv,
    load_dataset,
    regret_curve_csv,
    registry_for_dataset,
    run_baseline,
    run_policy,
    reference_arm_for,
    save_dataset,
    sweep,
    sweep_csv,
)
from .types import (
    ArmSpec,
    dump_json,
    load_arm_registry,
    load_engine_config,
    save_arm_registry,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    """Bad flag values discovered after argparse (exit 1)."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; the contract here is exit 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _resolve_seed(flag_value: int | None) -> int | None:
    """--seed beats COKE_SEED beats the file's own seed (returned as None)."""
    if flag_value is not None:
        return int(flag_value)
    env = os.environ.get("COKE_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"COKE_SEED must be an integer, got {env!r}") from None


def _parse_axis(text: str) -> tuple[str, list[float]]:
    """budget=start:stop:step or lambda=v1,v2,... -> (axis, values)."""
    name, sep, rest = text.partition("=")
    if not sep or not rest:
        raise UsageError(f"bad --axis {text!r}; expected budget=a:b:step or lambda=v1,v2,...")
    if name == AXIS_BUDGET:
        parts = rest.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad budget axis {rest!r}; expected start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise UsageError(f"bad budget axis {rest!r}; values must be numbers") from None
        if step <= 0 or stop < start:
            raise UsageError(f"bad budget axis {rest!r}; need step > 0 and stop >= start")
        count = int((stop - start) / step + 1e-9) + 1
        return AXIS_BUDGET, [round(start + i * step, 10) for i in range(count)]
    if name == AXIS_LAMBDA:
        try:
            values = [float(p) for p in rest.split(",") if p != ""]
        except ValueError:
            raise UsageError(f"bad lambda axis {rest!r}; values must be numbers") from None
        if not values:
            raise UsageError("lambda axis needs at least one value")
        return AXIS_LAMBDA, values
    raise UsageError(f"unknown axis {name!r}; expected budget or lambda")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_inputs(args: argparse.Namespace) -> tuple[list[ArmSpec], ReplayDataset]:
    specs = load_arm_registry(args.arms)
    dataset = load_dataset(args.data)
    return specs, dataset


def _print_summary(result, dataset: ReplayDataset, label: str) -> None:
    """One reporting row: accuracy, delta vs the reference arm, saving."""
    ref = result.reference_arm
    ref_acc = dataset.marginals()[ref]
    print(f"{label}: dataset={result.dataset_name} n={result.n_questions}")
    print(
        f"accuracy={result.accuracy:.4f} reference={ref} reference_accuracy={ref_acc:.4f} "
        f"delta_accuracy={result.accuracy - ref_acc:+.4f}"
    )
    print(
        f"cost_saving={result.cost_saving_vs_reference * 100:+.2f}% "
        f"total_cost=${result.total_cost_dollars:.6f} llm_calls={result.total_llm_calls}"
    )


# -- subcommands -------------------------------------------------------------


def _cmd_run(args: argparse.Namespace) -> int:
    specs, dataset = _load_inputs(args)
    config = load_engine_config(args.config)
    seed = _resolve_seed(args.seed)
    if seed is not None:
        config = config.replace(seed=seed)
    result, engine = run_policy(
        dataset,
        specs,
        config,
        keep_order=args.keep_order,
        reference_arm=args.reference_arm,
    )
    if args.out:
        _write(args.out, result.to_json() + "\n")
    if args.history:
        _write(args.history, "".join(dump_json(r.to_dict()) + "\n" for r in engine.history))
    if args.regret_csv:
        _write(args.regret_csv, regret_curve_csv(result))
    if args.heatmap_csv:
        _write(args.heatmap_csv, heatmap_csv(result))
    _print_summary(result, dataset, "run")
    return EXIT_OK


def _cmd_baseline(args: argparse.Namespace) -> int:
    specs, dataset = _load_inputs(args)
    seed = _resolve_seed(args.seed)
    result = run_baseline(
        dataset,
        specs,
        args.policy,
        seed=0 if seed is None else seed,
        reference_arm=args.reference_arm,
    )
    if args.out:
        _write(args.out, result.to_json() + "\n")
    _print_summary(result, dataset, f"baseline {args.policy}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    specs, dataset = _load_inputs(args)
    config = load_engine_config(args.config)
    seed = _resolve_seed(args.seed)
    if seed is not None:
        config = config.replace(seed=seed)
    axis, values = _parse_axis(args.axis)
    points = sweep(
        dataset,
        specs,
        config,
        axis,
        values,
        keep_order=args.keep_order,
        reference_arm=args.reference_arm,
    )
    _write(args.out_csv, sweep_csv(points))
    if args.out_json:
        _write(
            args.out_json,
            dump_json([{"axis_value": v, "result": r.to_dict()} for v, r in points]) + "\n",
        )
    print(f"sweep axis={axis} points={len(points)} -> {args.out_csv}")
    for v, r in points:
        print(
            f"{axis}={v} accuracy={r.accuracy:.4f} error={r.error_rate:.4f} "
            f"cost=${r.total_cost_dollars:.6f} llm_calls={r.total_llm_calls} "
            f"saving={r.cost_saving_vs_reference * 100:+.2f}%"
        )
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        try:
            gen = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.spec}: malformed JSON ({exc.msg})") from exc
    if not isinstance(gen, dict):
        raise DataError(f"{args.spec}: generator spec must be a JSON object")
    seed = _resolve_seed(args.seed)
    if seed is not None:
        gen = dict(gen, seed=seed)
    dataset = generate_synthetic(gen)
    save_dataset(dataset, args.out)
    if args.arms_out:
        save_arm_registry(registry_for_dataset(gen, dataset), args.arms_out)
    print(f"generated: n={len(dataset)} d={dataset.d} arms={len(dataset.arm_ids)} -> {args.out}")
    for arm, acc in sorted(dataset.marginals().items()):
        print(f"marginal {arm}={acc:.4f}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    if args.arms:
        specs = load_arm_registry(args.arms)
        missing = [s.arm_id for s in specs if s.arm_id not in dataset.arm_ids]
        if missing:
            raise DataError(f"dataset has no outcomes for arms: {', '.join(sorted(missing))}")
    print(
        f"ok: n={len(dataset)} d={dataset.d} arms={','.join(dataset.arm_ids)}"
    )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# -- parser wiring -------------------------------------------------------------


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="run seed; falls back to COKE_SEED")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coke", description="cost-aware model selection over replay logs")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="replay the selection policy over a dataset")
    p.add_argument("--arms", required=True, help="arm registry JSON")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--config", required=True, help="engine config JSON")
    p.add_argument("--out", default=None, help="write run result JSON here")
    p.add_argument("--history", default=None, help="write per-iteration history JSONL here")
    p.add_argument("--regret-csv", default=None, help="write cumulative regret curve CSV here")
    p.add_argument("--heatmap-csv", default=None, help="write selection heatmap CSV here")
    p.add_argument("--keep-order", action="store_true", help="replay in file order, no shuffle")
    p.add_argument("--reference-arm", default=None, help="arm for cost comparison (default: most expensive)")
    _add_seed(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("baseline", help="run a reference policy (always:<arm>, random, oracle)")
    p.add_argument("--arms", required=True, help="arm registry JSON")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--policy", required=True, help="always:<arm>, random, or oracle")
    p.add_argument("--out", default=None, help="write run result JSON here")
    p.add_argument("--reference-arm", default=None, help="arm for cost comparison (default: most expensive)")
    _add_seed(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("sweep", help="run one experiment per axis point")
    p.add_argument("--arms", required=True, help="arm registry JSON")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--config", required=True, help="engine config JSON")
    p.add_argument(
        "--axis",
        required=True,
        help="budget=start:stop:step (fractions of the most expensive arm's total) or lambda=v1,v2,...",
    )
    p.add_argument("--out-csv", required=True, help="write the sweep table CSV here")
    p.add_argument("--out-json", default=None, help="also write full results JSON here")
    p.add_argument("--keep-order", action="store_true", help="replay in file order, no shuffle")
    p.add_argument("--reference-arm", default=None, help="arm for cost comparison (default: most expensive)")
    _add_seed(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("generate", help="generate a synthetic dataset from a generator spec")
    p.add_argument("--spec", required=True, help="generator spec JSON")
    p.add_argument("--out", required=True, help="write dataset JSONL here")
    p.add_argument("--arms-out", default=None, help="also write a matching arm registry JSON here")
    _add_seed(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="schema-check a dataset (and optional registry coverage)")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--arms", default=None, help="arm registry JSON to check coverage against")
    _add_seed(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("serve", help="launch the HTTP service")
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8000, help="bind port")
    _add_seed(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
