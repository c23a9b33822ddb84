"""Command line entry points.

Subcommands:
  ingest   parse a tutorial corpus and persist the retrieval database
  run      drive one requirement through the agent loop
  bench    run a benchmark manifest offline from its fixture bundles
  replay   re-run one fixture bundle and diff against its pinned outcome
  report   re-aggregate persisted run outcomes into a report

Exit codes: 0 success, 1 the operation ran but failed (run did not
complete, replay diverged from the pinned outcome), 2 usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from foamagent.config import resolve_settings
from foamagent.errors import (
    ChunkParseError,
    ConfigError,
    EmptyCorpus,
    FoamAgentError,
    InconsistentN,
    InvalidInput,
    IoFailure,
)
from foamagent.evaluation.benchmark import (
    load_manifest,
    packaged_fixtures_dir,
    replay_case,
    run_benchmark,
)
from foamagent.evaluation.reporting import aggregate_report, case_metrics, report_json, report_text
from foamagent.executor.rubric import Executability, RequirementCheck
from foamagent.executor.shell import ShellBackend
from foamagent.executor.simulator import SimulatorBackend, load_scenario
from foamagent.llm.http import HttpBackend
from foamagent.llm.mock import MockBackend, load_script
from foamagent.orchestrator.pipeline import PipelineConfig, run_pipeline
from foamagent.rag.embedding import HashedTokenEmbedder
from foamagent.rag.index import build_index, load_indices, save_indices
from foamagent.workspace import CaseWorkspace

USAGE_ERROR = 2

_CONFIG_EXCEPTIONS = (ConfigError, EmptyCorpus, InconsistentN, InvalidInput, ChunkParseError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foamagent",
        description="Natural-language CFD case construction for OpenFOAM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="build the retrieval database from a corpus")
    ingest.add_argument("--corpus", required=True, help="directory with the three corpus documents")
    ingest.add_argument("--db", required=True, help="output directory for the database")
    ingest.add_argument(
        "--skip-malformed",
        action="store_true",
        help="log and skip malformed corpus blocks instead of failing",
    )

    run = sub.add_parser("run", help="run one requirement through the agent loop")
    run.add_argument("requirement", help="the natural-language simulation requirement")
    run.add_argument("--db", help="retrieval database directory (required unless --no-rag)")
    run.add_argument("--workdir", default="runs", help="directory for case workspaces")
    run.add_argument("--run-id", default="run0", help="suffix for the workspace directory")
    run.add_argument("--out", help="directory for the outcome summary and transcript")
    run.add_argument("--config", help="JSON config file with connection settings")
    run.add_argument("--api-key", dest="api_key", help="backend API key")
    run.add_argument("--endpoint", help="chat-completions endpoint URL")
    run.add_argument("--model", help="model identifier")
    run.add_argument("--script", help="scripted replies JSON (offline backend)")
    run.add_argument("--scenario", help="scripted execution JSON (offline simulator)")
    run.add_argument("--checks", help="JSON file with requirement checks")
    run.add_argument("--temperature", type=float, default=0.01)
    run.add_argument("--top-k", type=int, default=1, dest="top_k")
    run.add_argument("--max-iterations", type=int, default=20, dest="max_iterations")
    run.add_argument("--token-budget", type=int, dest="token_budget")
    run.add_argument("--no-rag", action="store_true", help="disable retrieval augmentation")
    run.add_argument("--no-reviewer", action="store_true", help="disable the review loop")
    run.add_argument(
        "--no-review-arch",
        action="store_true",
        help="restrict the reviewer to file rewrites",
    )
    run.add_argument(
        "--confirm",
        action="store_true",
        help="ask for human confirmation when a completed run fails its checks",
    )

    bench = sub.add_parser("bench", help="run a benchmark manifest offline")
    bench.add_argument("--manifest", required=True, help="manifest path or packaged dataset name")
    bench.add_argument("--fixtures", help="fixture directory (default: packaged fixtures)")
    bench.add_argument("--workdir", default="bench-runs", help="directory for case workspaces")
    bench.add_argument("--out", help="directory for per-run outcomes and the report")
    bench.add_argument("--n", type=int, default=1, help="runs per case")
    bench.add_argument("--k", type=int, default=1, help="k for pass@k")
    bench.add_argument("--price", type=float, help="price per million tokens, for the cost line")
    bench.add_argument("--seed", type=int, help="recorded in the report for provenance")
    bench.add_argument("--json", action="store_true", help="print the report as JSON")
    bench.add_argument("--no-rag", action="store_true")
    bench.add_argument("--no-reviewer", action="store_true")
    bench.add_argument("--no-review-arch", action="store_true")

    replay = sub.add_parser("replay", help="replay a fixture bundle and diff the outcome")
    replay.add_argument("bundle", help="fixture bundle directory, or a packaged bundle name")
    replay.add_argument("--fixtures", help="fixture directory holding the corpus")
    replay.add_argument("--workdir", default="replay-runs")

    report = sub.add_parser("report", help="aggregate persisted outcomes into a report")
    report.add_argument("--runs", required=True, help="directory of <case>/<run>/outcome.json")
    report.add_argument("--k", type=int, default=1)
    report.add_argument("--price", type=float)
    report.add_argument("--json", action="store_true", help="print the report as JSON")

    return parser


def _pipeline_config(args: argparse.Namespace, model: str) -> PipelineConfig:
    return PipelineConfig(
        model_id=model,
        temperature=args.temperature,
        max_iterations=args.max_iterations,
        token_budget=args.token_budget,
        top_k=args.top_k,
        enable_rag=not args.no_rag,
        enable_reviewer=not args.no_reviewer,
        enable_review_architecture=not args.no_review_arch,
    )


def _load_checks(path: str | None) -> tuple[RequirementCheck, ...]:
    if path is None:
        return ()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read checks file {path}: {exc}") from exc
    if not isinstance(data, list):
        raise ConfigError(f"checks file {path} must hold a JSON list")
    try:
        return tuple(RequirementCheck.from_dict(c) for c in data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"checks file {path} has a malformed entry: {exc}") from exc


def _confirm_hook(workspace: CaseWorkspace, result: Executability) -> bool:
    print(f"run completed with score {result.score}: {result.rationale}")
    print(f"case files are under {workspace.root}")
    answer = input("accept the result as meeting the requirement? [y/N] ")
    return answer.strip().lower() in ("y", "yes")


def cmd_ingest(args: argparse.Namespace) -> int:
    embedder = HashedTokenEmbedder()
    indices = build_index(args.corpus, embedder, skip_malformed=args.skip_malformed)
    save_indices(indices, args.db)
    for kind in sorted(indices, key=lambda k: k.value):
        print(f"{kind.value}: {len(indices[kind])} chunks")
    print(f"database written to {args.db}")
    return 0


def cmd_run(args: argparse.Namespace, env: dict[str, str]) -> int:
    settings = resolve_settings(
        flags={"api_key": args.api_key, "endpoint": args.endpoint, "model": args.model},
        env=env,
        config_path=args.config,
    )
    config = _pipeline_config(args, settings.model)

    if args.script:
        backend = MockBackend(load_script(args.script))
    else:
        if not settings.endpoint:
            raise ConfigError("no backend: give --script, or an endpoint via flag/env/config")
        if not settings.api_key:
            raise ConfigError("no API key: set FOAMAGENT_API_KEY or use --api-key/config")
        backend = HttpBackend(settings.endpoint, settings.api_key)

    exec_backend = SimulatorBackend(load_scenario(args.scenario)) if args.scenario else ShellBackend()

    indices = None
    if config.enable_rag:
        if not args.db:
            raise ConfigError("retrieval is enabled: give --db, or pass --no-rag")
        indices = load_indices(args.db, HashedTokenEmbedder())

    outcome = run_pipeline(
        args.requirement,
        backend,
        exec_backend,
        workdir=args.workdir,
        config=config,
        indices=indices,
        checks=_load_checks(args.checks),
        run_id=args.run_id,
        confirm_hook=_confirm_hook if args.confirm else None,
    )

    summary = outcome.as_dict()
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "outcome.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        outcome.transcript.save(out / "transcript.jsonl")
    print(
        f"score {summary['score']} after {summary['iterations']} iterations "
        f"({summary['stop_reason']}), {summary['total_tokens']} tokens, "
        f"case at {outcome.workspace.root}"
    )
    return 0 if outcome.succeeded else 1


def cmd_bench(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    fixtures = Path(args.fixtures) if args.fixtures else packaged_fixtures_dir()
    config = PipelineConfig(
        enable_rag=not args.no_rag,
        enable_reviewer=not args.no_reviewer,
        enable_review_architecture=not args.no_review_arch,
    )
    report = run_benchmark(
        manifest,
        fixtures,
        args.workdir,
        config=config,
        n=args.n,
        k=args.k,
        price_per_million_tokens=args.price,
        out_dir=args.out,
    )
    if args.seed is not None:
        report["seed"] = args.seed
    print(report_json(report) if args.json else report_text(report), end="")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    fixtures = Path(args.fixtures) if args.fixtures else packaged_fixtures_dir()
    bundle = Path(args.bundle)
    if not bundle.is_dir() and (fixtures / "cases" / args.bundle).is_dir():
        bundle = fixtures / "cases" / args.bundle
    outcome, problems = replay_case(bundle, fixtures, args.workdir)
    if problems:
        print(f"replay of {args.bundle} diverged from the pinned outcome:")
        for problem in problems:
            print(f"  {problem}")
        return 1
    print(
        f"replay of {args.bundle} matches: score {outcome.executability.score} "
        f"after {outcome.iterations} iterations"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    runs_dir = Path(args.runs)
    if not runs_dir.is_dir():
        raise ConfigError(f"{runs_dir} is not a directory of persisted runs")
    rows = []
    for case_dir in sorted(p for p in runs_dir.iterdir() if p.is_dir()):
        outcomes = []
        for outcome_path in sorted(case_dir.glob("*/outcome.json")):
            try:
                outcomes.append(json.loads(outcome_path.read_text(encoding="utf-8")))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"corrupt outcome file {outcome_path}: {exc}") from exc
        if outcomes:
            rows.append(case_metrics(case_dir.name, outcomes))
    if not rows:
        raise ConfigError(f"{runs_dir} holds no <case>/<run>/outcome.json files")
    report = aggregate_report(rows, k=args.k, price_per_million_tokens=args.price)
    print(report_json(report) if args.json else report_text(report), end="")
    return 0


def main(argv: list[str] | None = None, env: dict[str, str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env = dict(os.environ) if env is None else env
    try:
        if args.command == "ingest":
            return cmd_ingest(args)
        if args.command == "run":
            return cmd_run(args, env)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "report":
            return cmd_report(args)
        parser.error(f"unknown command {args.command!r}")
    except _CONFIG_EXCEPTIONS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FoamAgentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
