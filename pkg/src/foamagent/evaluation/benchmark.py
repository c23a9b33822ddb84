"""Benchmark manifests, replay fixtures, and the bench driver.

A manifest names the cases of a dataset: requirement sentence, the
declarative requirement checks, and which fixture bundle replays it.
A fixture bundle is a directory holding ``script.json`` (the scripted
LLM replies), ``scenario.json`` (the scripted execution behaviour) and
``expected.json`` (pinned outcome fields plus optional pipeline config
overrides), which makes every benchmark case runnable offline.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from foamagent.errors import ConfigError, IoFailure
from foamagent.evaluation.reporting import (
    CaseMetrics,
    aggregate_report,
    case_metrics,
    report_json,
    report_text,
)
from foamagent.executor.rubric import RequirementCheck
from foamagent.executor.simulator import SimulatorBackend, SimulatorScenario, load_scenario
from foamagent.llm.mock import MockBackend, ScriptEntry, load_script
from foamagent.orchestrator.pipeline import PipelineConfig, RunOutcome, run_pipeline
from foamagent.rag.embedding import Embedder, HashedTokenEmbedder
from foamagent.rag.index import build_index


@dataclass(frozen=True)
class BenchmarkCase:
    case_id: str
    label: str
    requirement: str
    fixture: str
    checks: tuple[RequirementCheck, ...] = ()


@dataclass(frozen=True)
class Manifest:
    dataset: str
    cases: tuple[BenchmarkCase, ...]


def packaged_manifest_path(name: str) -> Path:
    return Path(str(resources.files("foamagent") / "data" / "manifests" / f"{name}.json"))


def packaged_fixtures_dir() -> Path:
    return Path(str(resources.files("foamagent") / "fixtures"))


def load_manifest(spec: str | Path) -> Manifest:
    """Load a manifest from a path, or by packaged dataset name.

    Raises:
        ConfigError: Unreadable file, bad shape, duplicate ids, no cases.
    """
    path = Path(spec)
    if not path.is_file():
        candidate = packaged_manifest_path(str(spec))
        if not candidate.is_file():
            raise ConfigError(f"no manifest at {spec!r} and no packaged dataset of that name")
        path = candidate
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc

    raw_cases = data.get("cases")
    if not raw_cases:
        raise ConfigError(f"manifest {path} lists no cases")
    cases = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_cases):
        try:
            case = BenchmarkCase(
                case_id=raw["id"],
                label=raw.get("label", raw["id"]),
                requirement=raw["requirement"],
                fixture=raw.get("fixture", raw["id"]),
                checks=tuple(RequirementCheck.from_dict(c) for c in raw.get("checks", [])),
            )
        except KeyError as exc:
            raise ConfigError(f"manifest {path} case {i} lacks key {exc}") from exc
        if case.case_id in seen:
            raise ConfigError(f"manifest {path} lists case id {case.case_id!r} twice")
        seen.add(case.case_id)
        cases.append(case)
    return Manifest(dataset=data.get("dataset", path.stem), cases=tuple(cases))


@dataclass(frozen=True)
class FixtureBundle:
    """Everything needed to replay one case offline."""

    bundle_dir: Path
    script: tuple[ScriptEntry, ...]
    scenario: SimulatorScenario
    requirement: str | None
    checks: tuple[RequirementCheck, ...]
    config_overrides: dict
    expected: dict


def load_bundle(bundle_dir: str | Path) -> FixtureBundle:
    """Read a fixture bundle directory.

    ``expected.json`` is optional except for standalone replay, where
    the requirement must come from the bundle itself.

    Raises:
        ConfigError: Missing script/scenario, or unreadable JSON.
    """
    bundle_dir = Path(bundle_dir)
    script_path = bundle_dir / "script.json"
    scenario_path = bundle_dir / "scenario.json"
    if not script_path.is_file() or not scenario_path.is_file():
        raise ConfigError(f"{bundle_dir} is not a fixture bundle (script.json/scenario.json)")
    script = tuple(load_script(script_path))
    scenario = load_scenario(scenario_path)

    requirement = None
    checks: tuple[RequirementCheck, ...] = ()
    overrides: dict = {}
    expected: dict = {}
    expected_path = bundle_dir / "expected.json"
    if expected_path.is_file():
        try:
            data = json.loads(expected_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"corrupt {expected_path}: {exc}") from exc
        requirement = data.get("requirement")
        checks = tuple(RequirementCheck.from_dict(c) for c in data.get("checks", []))
        overrides = data.get("config", {})
        expected = data.get("expected", {})
    return FixtureBundle(
        bundle_dir=bundle_dir,
        script=script,
        scenario=scenario,
        requirement=requirement,
        checks=checks,
        config_overrides=overrides,
        expected=expected,
    )


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(PipelineConfig)}


def apply_config_overrides(config: PipelineConfig, overrides: dict) -> PipelineConfig:
    """A copy of ``config`` with bundle overrides applied.

    Raises:
        ConfigError: An override names no pipeline config field.
    """
    unknown = set(overrides) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown pipeline config fields: {sorted(unknown)}")
    return dataclasses.replace(config, **overrides)


def run_case(
    bundle: FixtureBundle,
    requirement: str,
    checks: tuple[RequirementCheck, ...],
    indices,
    workdir: Path,
    config: PipelineConfig,
    run_id: str,
    embedder: Embedder,
) -> RunOutcome:
    """One offline pipeline run against a bundle's scripts."""
    backend = MockBackend(list(bundle.script))
    exec_backend = SimulatorBackend(bundle.scenario)
    return run_pipeline(
        requirement,
        backend,
        exec_backend,
        workdir=workdir,
        config=config,
        indices=indices,
        embedder=embedder,
        checks=checks,
        run_id=run_id,
        sleep=lambda _s: None,
    )


def _persist_outcome(out_dir: Path, outcome: RunOutcome) -> None:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        summary = json.dumps(outcome.as_dict(), indent=2, sort_keys=True) + "\n"
        (out_dir / "outcome.json").write_text(summary, encoding="utf-8")
        outcome.transcript.save(out_dir / "transcript.jsonl")
    except OSError as exc:
        raise IoFailure(f"cannot persist run outcome under {out_dir}: {exc}") from exc


def run_benchmark(
    manifest: Manifest,
    fixtures_dir: str | Path,
    workdir: str | Path,
    config: PipelineConfig | None = None,
    n: int = 1,
    k: int = 1,
    price_per_million_tokens: float | None = None,
    out_dir: str | Path | None = None,
    embedder: Embedder | None = None,
) -> dict:
    """Run every manifest case n times from its fixture bundle and report.

    Each run gets a fresh scripted backend and simulator, so runs are
    independent and the whole bench is deterministic.  When ``out_dir``
    is given, per-run outcome summaries and transcripts are written
    under ``<out_dir>/<case id>/<run id>/`` next to the final report.
    """
    fixtures_dir = Path(fixtures_dir)
    workdir = Path(workdir)
    base_config = config or PipelineConfig()
    embedder = embedder or HashedTokenEmbedder()
    indices = build_index(fixtures_dir / "corpus", embedder)

    rows: list[CaseMetrics] = []
    for case in manifest.cases:
        bundle = load_bundle(fixtures_dir / "cases" / case.fixture)
        case_config = apply_config_overrides(base_config, bundle.config_overrides)
        outcomes = []
        for i in range(n):
            run_id = f"r{i}"
            outcome = run_case(
                bundle,
                case.requirement,
                case.checks,
                indices,
                workdir / case.case_id,
                case_config,
                run_id,
                embedder,
            )
            if out_dir is not None:
                _persist_outcome(Path(out_dir) / case.case_id / run_id, outcome)
            outcomes.append(outcome)
        rows.append(case_metrics(case.label, [o.as_dict() for o in outcomes]))

    report = aggregate_report(rows, k=k, price_per_million_tokens=price_per_million_tokens)
    report["dataset"] = manifest.dataset
    if out_dir is not None:
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.json").write_text(report_json(report), encoding="utf-8")
            (out / "report.txt").write_text(report_text(report), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write report under {out}: {exc}") from exc
    return report


def diff_expected(expected: dict, actual: dict) -> list[str]:
    """Field-level differences between pinned and actual outcome values.

    Only keys pinned in ``expected`` are compared; extra actual fields
    are never a difference.
    """
    problems = []
    for key in sorted(expected):
        if key not in actual:
            problems.append(f"{key}: expected {expected[key]!r}, field is missing")
        elif actual[key] != expected[key]:
            problems.append(f"{key}: expected {expected[key]!r}, got {actual[key]!r}")
    return problems


def replay_case(
    bundle_dir: str | Path,
    fixtures_dir: str | Path,
    workdir: str | Path,
    config: PipelineConfig | None = None,
    embedder: Embedder | None = None,
) -> tuple[RunOutcome, list[str]]:
    """Replay one bundle and diff its outcome against the pinned fields.

    Raises:
        ConfigError: The bundle carries no requirement of its own.
    """
    bundle = load_bundle(bundle_dir)
    if bundle.requirement is None:
        raise ConfigError(f"{bundle_dir}/expected.json pins no requirement to replay")
    embedder = embedder or HashedTokenEmbedder()
    indices = build_index(Path(fixtures_dir) / "corpus", embedder)
    case_config = apply_config_overrides(config or PipelineConfig(), bundle.config_overrides)
    outcome = run_case(
        bundle,
        bundle.requirement,
        bundle.checks,
        indices,
        Path(workdir),
        case_config,
        "replay",
        embedder,
    )
    return outcome, diff_expected(bundle.expected, outcome.as_dict())
