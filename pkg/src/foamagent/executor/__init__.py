"""Execution of Allrun scripts: backends, reports, and the scoring rubric."""

from foamagent.executor.run import (
    ExecutionBackend,
    ExecutionReport,
    RawStep,
    StepResult,
    execute_allrun,
    tail,
)
from foamagent.executor.rubric import (
    Executability,
    LogSignals,
    RequirementCheck,
    SignalRules,
    classify_executability,
    evaluate_requirement_checks,
    scan_log_signals,
)
from foamagent.executor.shell import ShellBackend
from foamagent.executor.simulator import (
    ScenarioRule,
    SimulatorBackend,
    SimulatorScenario,
    load_scenario,
)

__all__ = [
    "ExecutionBackend",
    "ExecutionReport",
    "RawStep",
    "StepResult",
    "execute_allrun",
    "tail",
    "Executability",
    "LogSignals",
    "RequirementCheck",
    "SignalRules",
    "classify_executability",
    "evaluate_requirement_checks",
    "scan_log_signals",
    "ShellBackend",
    "ScenarioRule",
    "SimulatorBackend",
    "SimulatorScenario",
    "load_scenario",
]
