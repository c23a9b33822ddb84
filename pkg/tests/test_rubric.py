"""The 0-4 executability rubric and its log-signal scanner."""

import pytest

from foamagent.executor.run import ExecutionReport, StepResult
from foamagent.executor.rubric import (
    Executability,
    LogSignals,
    RequirementCheck,
    SignalRules,
    classify_executability,
    evaluate_requirement_checks,
    scan_log_signals,
)
from foamagent.workspace import CaseWorkspace, FoamFile


def _step(command, exit_code=0, stdout="", stderr=""):
    return StepResult(
        command=command, exit_code=exit_code, stdout_tail=stdout, stderr_tail=stderr
    )


def _report(*steps):
    failed = next((s for s in steps if s.exit_code != 0), None)
    return ExecutionReport(
        steps=tuple(steps),
        wall_time=0.01,
        failed_command=failed.command if failed else None,
        error_excerpt=failed.text if failed else None,
    )


# --- signal scanning ----------------------------------------------------------


def test_failed_mesh_step_clears_mesh_ok():
    report = _report(_step("runApplication blockMesh", exit_code=1, stderr="FOAM FATAL"))
    signals = scan_log_signals(report)
    assert not signals.mesh_ok
    assert not signals.solver_started


def test_failed_solver_step_keeps_mesh_ok():
    report = _report(
        _step("runApplication blockMesh", stdout="Mesh OK\nEnd"),
        _step("runApplication icoFoam", exit_code=1, stderr="FOAM FATAL ERROR: setup"),
    )
    assert scan_log_signals(report).mesh_ok


def test_time_step_marker_means_solver_started():
    quiet = _report(_step("runApplication icoFoam", stdout="reading fields"))
    assert not scan_log_signals(quiet).solver_started
    stepping = _report(_step("runApplication icoFoam", stdout="Time = 0.05\ncontinuing"))
    assert scan_log_signals(stepping).solver_started


@pytest.mark.parametrize(
    "text",
    ["Floating point exception", "FOAM FATAL IO ERROR", "bounding k: residual = nan"],
)
def test_divergence_patterns(text):
    report = _report(_step("runApplication icoFoam", stdout=f"Time = 1\n{text}"))
    assert scan_log_signals(report).diverged


def test_end_marker_must_be_a_whole_line_of_the_last_successful_step():
    done = _report(_step("runApplication icoFoam", stdout="Time = 2\n\nEnd\n"))
    assert scan_log_signals(done).end_time_reached

    substring = _report(_step("runApplication icoFoam", stdout="Time = 2\nEnding soon"))
    assert not scan_log_signals(substring).end_time_reached

    failed_last = _report(_step("runApplication icoFoam", exit_code=1, stdout="End"))
    assert not scan_log_signals(failed_last).end_time_reached

    # "End" printed by an earlier step (blockMesh) does not count
    early = _report(
        _step("runApplication blockMesh", stdout="End"),
        _step("runApplication icoFoam", stdout="Time = 1"),
    )
    assert not scan_log_signals(early).end_time_reached


def test_configured_end_time_line_counts_as_completion():
    report = _report(_step("runApplication icoFoam", stdout="Time = 0.5\nwriting fields"))
    assert not scan_log_signals(report).end_time_reached
    rules = SignalRules(end_time=0.5)
    assert scan_log_signals(report, rules).end_time_reached
    # integral end times render without a decimal point
    report10 = _report(_step("runApplication icoFoam", stdout="Time = 10"))
    assert scan_log_signals(report10, SignalRules(end_time=10.0)).end_time_reached


def test_empty_report_has_no_signals():
    signals = scan_log_signals(_report())
    assert signals == LogSignals(
        mesh_ok=True, solver_started=False, diverged=False, end_time_reached=False
    )


# --- the rubric --------------------------------------------------------------

# Full truth table over (mesh_ok, solver_started, diverged, end_time_reached).
# Mesh failure dominates, then a never-started solver, then divergence or a
# short run; a finished run without checks stays at 3.
RUBRIC_TABLE = [
    ((False, False, False, False), 0),
    ((False, False, False, True), 0),
    ((False, False, True, False), 0),
    ((False, False, True, True), 0),
    ((False, True, False, False), 0),
    ((False, True, False, True), 0),
    ((False, True, True, False), 0),
    ((False, True, True, True), 0),
    ((True, False, False, False), 1),
    ((True, False, False, True), 1),
    ((True, False, True, False), 1),
    ((True, False, True, True), 1),
    ((True, True, True, False), 2),
    ((True, True, True, True), 2),
    ((True, True, False, False), 2),
    ((True, True, False, True), 3),
]


@pytest.mark.parametrize("flags,expected", RUBRIC_TABLE)
def test_rubric_truth_table(flags, expected):
    signals = LogSignals(*flags)
    result = classify_executability(signals)
    assert result.score == expected


COMPLETED = LogSignals(mesh_ok=True, solver_started=True, diverged=False, end_time_reached=True)


def test_requirement_checks_decide_three_versus_four():
    no_checks = classify_executability(COMPLETED)
    assert no_checks.score == 3
    assert "no checks declared" in no_checks.rationale

    all_pass = classify_executability(COMPLETED, (("grid", True), ("solver", True)))
    assert all_pass.score == 4

    one_fails = classify_executability(COMPLETED, (("grid", True), ("solver", False)))
    assert one_fails.score == 3
    assert "solver" in one_fails.rationale


def test_human_override_beats_automated_checks():
    confirmed = classify_executability(COMPLETED, (("grid", False),), human_override=True)
    assert confirmed.score == 4
    rejected = classify_executability(COMPLETED, (("grid", True),), human_override=False)
    assert rejected.score == 3


def test_override_is_irrelevant_for_unfinished_runs():
    crashed = LogSignals(mesh_ok=False, solver_started=False, diverged=False, end_time_reached=False)
    assert classify_executability(crashed, human_override=True).score == 0


def test_rubric_result_carries_the_checks():
    checks = (("grid", True),)
    result = classify_executability(COMPLETED, checks)
    assert isinstance(result, Executability)
    assert result.requirement_checks == checks


# --- declarative requirement checks -------------------------------------------


def _cavity_workspace(tmp_path):
    ws = CaseWorkspace(root=tmp_path)
    ws.upsert(
        FoamFile(
            "blockMeshDict",
            "system",
            "hex (0 1 2 3 4 5 6 7) (16 16 16) simpleGrading (1 1 1)\n",
        )
    )
    ws.upsert(FoamFile("controlDict", "system", "endTime         20;\n"))
    return ws


def test_entry_check_is_whitespace_insensitive(tmp_path):
    ws = _cavity_workspace(tmp_path)
    check = RequirementCheck(
        check_id="end-time", file_name="controlDict", folder="system",
        kind="entry", key="endTime", value="20",
    )
    assert check.evaluate(ws)
    tight = RequirementCheck(
        check_id="t", file_name="controlDict", folder="system",
        kind="entry", key="endTime", value="21",
    )
    assert not tight.evaluate(ws)


def test_regex_check(tmp_path):
    ws = _cavity_workspace(tmp_path)
    check = RequirementCheck(
        check_id="grid", file_name="blockMeshDict", folder="system",
        kind="regex", pattern=r"\(16 16 16\)",
    )
    assert check.evaluate(ws)


def test_check_against_missing_file_fails_quietly(tmp_path):
    ws = _cavity_workspace(tmp_path)
    check = RequirementCheck(
        check_id="gone", file_name="U", folder="0", kind="regex", pattern=".",
    )
    assert not check.evaluate(ws)


def test_evaluate_requirement_checks_orders_results(tmp_path):
    ws = _cavity_workspace(tmp_path)
    checks = [
        RequirementCheck("a", "controlDict", "system", "entry", key="endTime", value="20"),
        RequirementCheck("b", "U", "0", "regex", pattern="."),
    ]
    assert evaluate_requirement_checks(ws, checks) == (("a", True), ("b", False))


def test_check_from_dict_round_trip():
    check = RequirementCheck.from_dict(
        {"id": "grid", "file": "blockMeshDict", "folder": "system",
         "kind": "regex", "pattern": "16 16 16"}
    )
    assert check.check_id == "grid"
    assert check.kind == "regex"
    entry = RequirementCheck.from_dict(
        {"id": "e", "file": "controlDict", "folder": "system",
         "kind": "entry", "key": "endTime", "value": "20"}
    )
    assert entry.key == "endTime"
