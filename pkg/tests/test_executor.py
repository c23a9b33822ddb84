"""Scenario-driven execution: rule matching, retirement, report assembly."""

import json

import pytest

from foamagent.errors import ConfigError, MissingAllrun, ScenarioRuleMissing
from foamagent.executor.run import TAIL_LINES, execute_allrun, tail
from foamagent.executor.simulator import (
    ScenarioRule,
    SimulatorBackend,
    SimulatorScenario,
    load_scenario,
)
from foamagent.workspace import CaseWorkspace

SCRIPT = (
    '#!/bin/sh\ncd "${0%/*}" || exit 1\n'
    ". ${WM_PROJECT_DIR:?}/bin/tools/RunFunctions\n\n"
    "runApplication blockMesh\nrunApplication icoFoam\n"
)


def _ws(tmp_path, allrun=SCRIPT):
    return CaseWorkspace(root=tmp_path, files=[], allrun=allrun)


# --- scenario parsing ---------------------------------------------------------


def test_scenario_from_dict_reads_all_fields():
    scenario = SimulatorScenario.from_dict(
        {
            "rules": [
                {
                    "command": "blockMesh",
                    "exit_code": 1,
                    "stdout": "meshing",
                    "stderr": "boom",
                    "advance": {"diverges": True},
                    "times": 2,
                },
                {},
            ]
        }
    )
    first, second = scenario.rules
    assert first == ScenarioRule(
        pattern="blockMesh",
        exit_code=1,
        stdout_text="meshing",
        stderr_text="boom",
        reaches_end_time=False,
        diverges=True,
        times=2,
    )
    # an empty object is the catch-all success rule
    assert second == ScenarioRule()


def test_scenario_rejects_non_object_rules():
    with pytest.raises(ConfigError, match="rule 1"):
        SimulatorScenario.from_dict({"rules": [{}, "oops"]})


def test_load_scenario_errors(tmp_path):
    missing = tmp_path / "none.json"
    with pytest.raises(ConfigError):
        load_scenario(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_scenario(bad)
    good = tmp_path / "ok.json"
    good.write_text(json.dumps({"rules": [{"command": "x"}]}), encoding="utf-8")
    assert load_scenario(good).rules[0].pattern == "x"


# --- rule matching -----------------------------------------------------------


def _backend(*rules):
    return SimulatorBackend(SimulatorScenario(rules=tuple(rules)))


def test_first_live_matching_rule_wins(tmp_path):
    backend = _backend(
        ScenarioRule(pattern="icoFoam", exit_code=3),
        ScenarioRule(pattern=""),  # catch-all
    )
    steps = backend.run(SCRIPT, tmp_path, timeout=1.0)
    # blockMesh falls through to the catch-all; icoFoam hits the first rule
    assert [(s.command.split()[-1], s.exit_code) for s in steps] == [
        ("blockMesh", 0),
        ("icoFoam", 3),
    ]


def test_match_is_substring_of_the_command_line(tmp_path):
    backend = _backend(ScenarioRule(pattern="runApplication blockMesh", exit_code=7))
    steps = backend.run("runApplication blockMesh\n", tmp_path, timeout=1.0)
    assert steps[0].exit_code == 7


def test_rule_retirement_after_times_matches(tmp_path):
    failing_once = ScenarioRule(pattern="icoFoam", exit_code=1, times=1)
    catch_all = ScenarioRule(pattern="")
    scenario = SimulatorScenario(rules=(failing_once, catch_all))
    backend = SimulatorBackend(scenario)

    first = backend.run("runApplication icoFoam\n", tmp_path, timeout=1.0)
    assert first[0].exit_code == 1
    # the failure rule retired; the same command now succeeds
    second = backend.run("runApplication icoFoam\n", tmp_path, timeout=1.0)
    assert second[0].exit_code == 0


def test_backend_instances_do_not_share_retirement_state(tmp_path):
    scenario = SimulatorScenario(
        rules=(ScenarioRule(pattern="icoFoam", exit_code=1, times=1), ScenarioRule())
    )
    one = SimulatorBackend(scenario)
    one.run("runApplication icoFoam\n", tmp_path, timeout=1.0)
    fresh = SimulatorBackend(scenario)
    assert fresh.run("runApplication icoFoam\n", tmp_path, timeout=1.0)[0].exit_code == 1


def test_unmatched_command_raises(tmp_path):
    backend = _backend(ScenarioRule(pattern="blockMesh"))
    with pytest.raises(ScenarioRuleMissing, match="icoFoam"):
        backend.run(SCRIPT, tmp_path, timeout=1.0)


def test_execution_stops_at_first_failure(tmp_path):
    backend = _backend(
        ScenarioRule(pattern="blockMesh", exit_code=1, stderr_text="FATAL"),
        ScenarioRule(pattern=""),
    )
    steps = backend.run(SCRIPT, tmp_path, timeout=1.0)
    assert len(steps) == 1
    assert "blockMesh" in steps[0].command


def test_synthesized_logs_follow_advance_flags(tmp_path):
    diverging = _backend(ScenarioRule(pattern="", diverges=True))
    log = diverging.run("runApplication icoFoam\n", tmp_path, timeout=1.0)[0].stdout
    assert "Starting time loop" in log
    assert "Time = 1" in log
    assert "Floating point exception" in log
    assert "End" not in log.split("\n")

    completing = _backend(ScenarioRule(pattern="", reaches_end_time=True))
    log = completing.run("runApplication icoFoam\n", tmp_path, timeout=1.0)[0].stdout
    assert "Time = 2" in log
    assert "End" in log.split("\n")

    plain = _backend(ScenarioRule(pattern=""))
    log = plain.run("runApplication icoFoam\n", tmp_path, timeout=1.0)[0].stdout
    assert log == "Executing: runApplication icoFoam\n"

    custom = _backend(ScenarioRule(pattern="", stdout_text="custom banner"))
    log = custom.run("runApplication icoFoam\n", tmp_path, timeout=1.0)[0].stdout
    assert log.startswith("custom banner")


# --- report assembly ----------------------------------------------------------


def test_tail_keeps_the_last_lines():
    text = "\n".join(str(i) for i in range(500)) + "\n"
    tailed = tail(text)
    lines = tailed.split("\n")
    assert len(lines) == TAIL_LINES
    assert lines[0] == "300"
    assert lines[-1] == "499"
    assert tail("short\n") == "short"
    assert tail("") == ""


def test_execute_allrun_success_report(tmp_path):
    backend = _backend(ScenarioRule(pattern="", reaches_end_time=True))
    report = execute_allrun(_ws(tmp_path), backend)
    assert report.ok
    assert report.failed_command is None
    assert report.error_excerpt is None
    assert len(report.steps) == 2
    assert report.wall_time >= 0.0


def test_execute_allrun_failure_report(tmp_path):
    backend = _backend(
        ScenarioRule(pattern="icoFoam", exit_code=1, stderr_text="FOAM FATAL ERROR: bad U"),
        ScenarioRule(pattern=""),
    )
    report = execute_allrun(_ws(tmp_path), backend)
    assert not report.ok
    assert report.failed_command == "runApplication icoFoam"
    assert "FOAM FATAL ERROR: bad U" in report.error_excerpt
    # stdout precedes stderr in the reviewer excerpt
    assert report.steps[-1].stderr_tail == "FOAM FATAL ERROR: bad U"


def test_execute_allrun_excerpt_falls_back_to_exit_code(tmp_path):
    class Silent:
        def run(self, script, root, timeout):
            from foamagent.executor.run import RawStep

            return [RawStep(command="runApplication icoFoam", exit_code=9, stdout="", stderr="")]

    report = execute_allrun(_ws(tmp_path), Silent())
    assert report.error_excerpt == "runApplication icoFoam exited with code 9"


def test_execute_allrun_requires_a_script(tmp_path):
    with pytest.raises(MissingAllrun):
        execute_allrun(_ws(tmp_path, allrun=None), _backend(ScenarioRule()))
