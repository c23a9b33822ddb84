"""Benchmark metrics, reporting, and the offline bench driver."""

from foamagent.evaluation.benchmark import (
    BenchmarkCase,
    FixtureBundle,
    Manifest,
    apply_config_overrides,
    diff_expected,
    load_bundle,
    load_manifest,
    packaged_fixtures_dir,
    packaged_manifest_path,
    replay_case,
    run_benchmark,
    run_case,
)
from foamagent.evaluation.metrics import pass_at_k, pearson_r, productivity
from foamagent.evaluation.reporting import (
    CaseMetrics,
    aggregate_report,
    case_metrics,
    report_json,
    report_text,
)

__all__ = [
    "BenchmarkCase",
    "CaseMetrics",
    "FixtureBundle",
    "Manifest",
    "aggregate_report",
    "apply_config_overrides",
    "case_metrics",
    "diff_expected",
    "load_bundle",
    "load_manifest",
    "packaged_fixtures_dir",
    "packaged_manifest_path",
    "pass_at_k",
    "pearson_r",
    "productivity",
    "replay_case",
    "report_json",
    "report_text",
    "run_benchmark",
    "run_case",
]
