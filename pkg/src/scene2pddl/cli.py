"""Command-line entry point: dataset generation, pipeline runs, scoring, planning."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .domains import DomainId
from .evaluation import FORMATS, aggregate, emit_report, score
from .pddl import PddlError, parse_domain, parse_problem, strip_markup, validate_problem
from .pipeline import GOAL_MODES, PipelineError, load_results, run_batch, write_results
from .planner import BudgetExhausted, GroundingError, SearchBudget, Unsolvable, ground, solve, validate_plan
from .scenario import DatasetError, Difficulty, generate_dataset, ingest_kitchen, load_dataset
from .vlm import AdapterConfig, AdapterError, FaultSpecError, HttpAdapter, MockOracleAdapter, RetryPolicy, parse_fault
from .vlm import template_hash

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONFIG_ENV = "SCENE2PDDL_CONFIG"

# setting -> (env var, type, default)
SETTINGS = {
    "adapter": ("SCENE2PDDL_ADAPTER", str, "oracle"),
    "endpoint": ("SCENE2PDDL_ENDPOINT", str, ""),
    "model": ("SCENE2PDDL_MODEL", str, "gpt-4o"),
    "api_key_env": ("SCENE2PDDL_API_KEY_ENV", str, "OPENAI_API_KEY"),
    "timeout": ("SCENE2PDDL_TIMEOUT", float, 60.0),
    "max_attempts": ("SCENE2PDDL_MAX_ATTEMPTS", int, 3),
    "backoff_base": ("SCENE2PDDL_BACKOFF_BASE", float, 0.5),
    "max_in_flight": ("SCENE2PDDL_MAX_IN_FLIGHT", int, 4),
    "parallel": ("SCENE2PDDL_PARALLEL", int, os.cpu_count() or 1),
}


def _err(msg: str) -> None:
    print(f"scene2pddl: {msg}", file=sys.stderr)


def load_config(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise SystemExit(_usage(f"cannot read config {path}: {exc}"))
    # Accept settings at top level or under [run].
    merged = {k: v for k, v in data.items() if not isinstance(v, dict)}
    merged.update(data.get("run", {}))
    return merged


def _usage(msg: str) -> int:
    _err(msg)
    return EXIT_USAGE


def resolve(name: str, args: argparse.Namespace, config: dict):
    """flag > environment > config file > default."""
    env_var, cast, default = SETTINGS[name]
    value = getattr(args, name, None)
    if value is not None:
        return value
    if os.environ.get(env_var):
        return cast(os.environ[env_var])
    if name in config:
        return cast(config[name])
    return default


def _csv_list(text: str | None, allowed, what: str) -> list[str] | None:
    if text is None:
        return None
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in allowed]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown {what}: {', '.join(bad)}")
    return items


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be >= 1")
    return value


DOMAINS = [d.value for d in DomainId]
LEVELS = [d.value for d in Difficulty]


# subcommands


def cmd_gen_dataset(args, config) -> int:
    domains = _csv_list(args.domain, DOMAINS, "domain")
    levels = _csv_list(args.difficulty, LEVELS, "difficulty")
    manifest = None
    try:
        for d in domains:
            if d == DomainId.KITCHEN.value:
                _err("note: kitchen scenarios are written without images; use ingest-kitchen for image runs")
            for lvl in levels:
                manifest = generate_dataset(args.out, d, lvl, args.count, args.seed, args.dataset_id)
    except DatasetError as exc:
        _err(str(exc))
        return EXIT_FAIL
    print(Path(args.out) / "manifest.json")
    return EXIT_OK if manifest is not None else EXIT_FAIL


def cmd_ingest_kitchen(args, config) -> int:
    try:
        ingest_kitchen(args.source, args.out)
    except DatasetError as exc:
        _err(str(exc))
        return EXIT_FAIL
    print(Path(args.out) / "manifest.json")
    return EXIT_OK


def make_adapter(args, config):
    kind = resolve("adapter", args, config)
    fault = parse_fault(args.fault) if getattr(args, "fault", None) else None
    if kind == "oracle":
        return MockOracleAdapter(fault, args.fault_seed)
    if kind != "http":
        raise AdapterError("CONFIG", f"unknown adapter {kind!r}")
    if fault is not None:
        raise AdapterError("CONFIG", "--fault only applies to the oracle adapter")
    cfg = AdapterConfig(
        endpoint=resolve("endpoint", args, config),
        model=resolve("model", args, config),
        api_key_env=resolve("api_key_env", args, config),
        timeout=resolve("timeout", args, config),
        retry=RetryPolicy(resolve("max_attempts", args, config), resolve("backoff_base", args, config)),
        max_in_flight=resolve("max_in_flight", args, config),
        transcript_path=args.transcript,
    )
    return HttpAdapter(cfg)


def cmd_run(args, config) -> int:
    try:
        adapter = make_adapter(args, config)
    except FaultSpecError as exc:
        return _usage(str(exc))
    except AdapterError as exc:
        _err(str(exc))
        return EXIT_FAIL
    try:
        manifest, scenarios = load_dataset(args.dataset)
    except DatasetError as exc:
        _err(str(exc))
        return EXIT_FAIL
    domains = _csv_list(args.domain, DOMAINS, "domain") if args.domain else DOMAINS
    levels = _csv_list(args.difficulty, LEVELS, "difficulty") if args.difficulty else LEVELS
    chosen = [s for s in scenarios if s.domain.value in domains and s.difficulty.value in levels]
    modes = list(GOAL_MODES) if args.goal_mode == "both" else [args.goal_mode]
    parallel = max(1, resolve("parallel", args, config))
    if hasattr(adapter, "config"):
        parallel = min(parallel, adapter.config.max_in_flight)
    results = []
    try:
        for mode in modes:
            results += run_batch(adapter, chosen, mode, parallel, args.fault)
    except PipelineError as exc:
        _err(str(exc))
        return EXIT_FAIL
    metadata = {
        "adapter": adapter.name,
        "template_hash": template_hash(),
        "dataset": str(Path(args.dataset).resolve()),
        "dataset_id": manifest.dataset_id,
        "dataset_seed": manifest.seed,
        "goal_modes": modes,
        "fault": args.fault,
        "fault_seed": args.fault_seed,
    }
    write_results(args.out, results, metadata)
    failed = sum(1 for r in results if r.problem is None)
    print(f"{len(results)} results written to {args.out} ({failed} without a parsed problem)")
    return EXIT_OK


def cmd_evaluate(args, config) -> int:
    formats = _csv_list(args.format, FORMATS + ("markdown",), "format")
    if not Path(args.run).is_dir():
        _err(f"run directory {args.run} not found")
        return EXIT_FAIL
    try:
        metadata, results = load_results(args.run)
        _, scenarios = load_dataset(args.dataset or metadata["dataset"])
    except (PipelineError, DatasetError, KeyError) as exc:
        _err(str(exc))
        return EXIT_FAIL
    by_id = {s.id: s for s in scenarios}
    missing = sorted({r.scenario_id for r in results} - set(by_id))
    if missing:
        _err(f"results reference unknown scenarios: {', '.join(missing[:5])}")
        return EXIT_FAIL
    scores = [score(by_id[r.scenario_id], r.goal_mode, r.stage3_text) for r in results]
    run_meta = [{"adapter": r.adapter, "template_hash": r.template_hash} for r in results]
    report = aggregate(scores, [metadata] + run_meta)
    for fmt in formats:
        for path in emit_report(report, fmt, args.out):
            print(path)
    return EXIT_OK


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_plan(args, config) -> int:
    try:
        domain = parse_domain(_read(args.domain))
        problem = parse_problem(strip_markup(_read(args.problem)))
    except OSError as exc:
        _err(str(exc))
        return EXIT_FAIL
    except PddlError as exc:
        print("\n".join(i.format(args.problem) for i in exc.issues))
        return EXIT_FAIL
    report = validate_problem(domain, problem)
    if not report.ok:
        print(report.format(args.problem))
        return EXIT_FAIL
    try:
        task = ground(domain, problem)
    except GroundingError as exc:
        _err(str(exc))
        return EXIT_FAIL
    result = solve(task, SearchBudget(args.budget, args.time_limit))
    if isinstance(result, Unsolvable):
        print("UNSOLVABLE")
        return EXIT_FAIL
    if isinstance(result, BudgetExhausted):
        print(f"BUDGET_EXHAUSTED ({result.reason}, {result.expanded} nodes expanded)")
        return EXIT_FAIL
    check = validate_plan(task, result)
    sys.stdout.write(result.to_ipc())
    print(f"; cost = {len(result)} (unit cost), {result.expanded} nodes expanded")
    return EXIT_OK if check.ok else EXIT_FAIL


def cmd_validate(args, config) -> int:
    try:
        domain = parse_domain(_read(args.domain))
        problem = parse_problem(strip_markup(_read(args.problem)))
    except OSError as exc:
        _err(str(exc))
        return EXIT_FAIL
    except PddlError as exc:
        print("\n".join(i.format(args.problem) for i in exc.issues))
        return EXIT_FAIL
    report = validate_problem(domain, problem)
    print(report.format(args.problem) if report.issues else f"{args.problem}: ok")
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scene2pddl", description="Scene images to PDDL problems, with evaluation.")
    p.add_argument("--config", help=f"TOML settings file (default: ${CONFIG_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-dataset", help="generate a scenario dataset")
    g.add_argument("--domain", required=True, help=f"comma list of {', '.join(DOMAINS)}")
    g.add_argument("--difficulty", required=True, help=f"comma list of {', '.join(LEVELS)}")
    g.add_argument("--count", type=positive_int, required=True, help="scenarios per domain and difficulty")
    g.add_argument("--seed", type=int, required=True, help="master seed")
    g.add_argument("--out", required=True, help="dataset root directory")
    g.add_argument("--dataset-id", help="dataset id recorded in the manifest")
    g.set_defaults(func=cmd_gen_dataset)

    k = sub.add_parser("ingest-kitchen", help="import externally rendered kitchen scenes")
    k.add_argument("--source", required=True, help="directory of scene folders with scene.json sidecars")
    k.add_argument("--out", required=True, help="dataset root directory")
    k.set_defaults(func=cmd_ingest_kitchen)

    r = sub.add_parser("run", help="run the pipeline over a dataset")
    r.add_argument("--dataset", required=True, help="dataset root directory")
    r.add_argument("--adapter", choices=("oracle", "http"), help="model adapter (default: oracle)")
    r.add_argument("--goal-mode", choices=GOAL_MODES + ("both",), default="image", help="goal input type")
    r.add_argument("--out", required=True, help="run output directory")
    r.add_argument("--fault", help="oracle fault spec, e.g. missing_item:0.1 or swap_stack_order")
    r.add_argument("--fault-seed", type=int, default=0, help="seed for fault decisions")
    r.add_argument("--domain", help="comma list of domains to include")
    r.add_argument("--difficulty", help="comma list of difficulties to include")
    r.add_argument("--parallel", type=positive_int, help="concurrent scenarios (default: CPU count)")
    r.add_argument("--endpoint", help="OpenAI-compatible base URL (http adapter)")
    r.add_argument("--model", help="model name (http adapter)")
    r.add_argument("--api-key-env", help="environment variable holding the API key")
    r.add_argument("--timeout", type=float, help="request timeout in seconds")
    r.add_argument("--max-attempts", type=positive_int, help="attempts per request, including the first")
    r.add_argument("--backoff-base", type=float, help="retry backoff base in seconds")
    r.add_argument("--max-in-flight", type=positive_int, help="concurrent requests allowed")
    r.add_argument("--transcript", help="append request/response records to this JSON-lines file")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("evaluate", help="score a run and write reports")
    e.add_argument("--run", required=True, help="run directory written by `run`")
    e.add_argument("--out", required=True, help="report directory")
    e.add_argument("--format", default="csv,json,md", help="comma list of csv, json, md")
    e.add_argument("--dataset", help="dataset root (default: the one recorded in the run)")
    e.set_defaults(func=cmd_evaluate)

    pl = sub.add_parser("plan", help="solve a problem with A*")
    pl.add_argument("--domain", required=True, help="domain file")
    pl.add_argument("--problem", required=True, help="problem file")
    pl.add_argument("--budget", type=positive_int, default=SearchBudget().max_expanded_nodes,
                    help="maximum expanded nodes")
    pl.add_argument("--time-limit", type=float, default=SearchBudget().max_wall_time, help="wall-clock seconds")
    pl.set_defaults(func=cmd_plan)

    v = sub.add_parser("validate", help="check a problem against a domain")
    v.add_argument("--domain", required=True, help="domain file")
    v.add_argument("--problem", required=True, help="problem file")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-dataset":
            _csv_list(args.domain, DOMAINS, "domain")
            _csv_list(args.difficulty, LEVELS, "difficulty")
        if args.command == "evaluate":
            _csv_list(args.format, FORMATS + ("markdown",), "format")
        if getattr(args, "time_limit", 1) <= 0:
            raise argparse.ArgumentTypeError("--time-limit must be positive")
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    config = load_config(args.config)
    return args.func(args, config)


if __name__ == "__main__":
    sys.exit(main())
