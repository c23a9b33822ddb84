"""Executability scoring: log signals, the 0-4 rubric, requirement checks.

The rubric grades how far a generated case got::

    0  mesh generation failed
    1  mesh fine, but the solver never started time stepping
    2  the solver ran and then diverged or stopped short of endTime
    3  the run reached endTime
    4  reached endTime and satisfied every case requirement check
       (or a human explicitly confirmed the result)

Signals are derived purely from exit codes and log text, so the scripted
simulator and the real shell backend are graded by the same code path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from foamagent.executor.run import ExecutionReport
from foamagent.workspace import CaseWorkspace

DEFAULT_MESH_PATTERNS = ("blockMesh", "snappyHexMesh", "extrudeMesh")
DEFAULT_DIVERGENCE_PATTERNS = (
    r"Floating point exception",
    r"FOAM FATAL",
    r"residual\s*=\s*(?:nan|inf)",
)
TIME_STEP_MARKER = "Time = "
END_MARKER = "End"


@dataclass(frozen=True)
class SignalRules:
    """Configurable patterns the log scanner applies."""

    mesh_patterns: tuple[str, ...] = DEFAULT_MESH_PATTERNS
    divergence_patterns: tuple[str, ...] = DEFAULT_DIVERGENCE_PATTERNS
    end_time: float | None = None  # accept a final "Time = <endTime>" line too


@dataclass(frozen=True)
class LogSignals:
    mesh_ok: bool
    solver_started: bool
    diverged: bool
    end_time_reached: bool


def scan_log_signals(report: ExecutionReport, rules: SignalRules = SignalRules()) -> LogSignals:
    """Derive the four rubric signals from an execution report.

    Meshing is fine unless a mesh-generation step failed.  The solver
    counts as started once any log shows a time step.  Divergence is a
    pattern match anywhere; the rubric only honors it after the solver
    started, so a fatal setup error does not masquerade as divergence.
    The end is reached when the final step succeeded and its log carries
    the terminal End marker (or the configured endTime line).
    """
    mesh_ok = True
    for step in report.steps:
        if step.exit_code != 0 and any(p in step.command for p in rules.mesh_patterns):
            mesh_ok = False
    all_text = "\n".join(step.text for step in report.steps)
    solver_started = TIME_STEP_MARKER in all_text
    diverged = any(re.search(p, all_text) for p in rules.divergence_patterns)

    end_time_reached = False
    if report.steps:
        last = report.steps[-1]
        if last.exit_code == 0:
            lines = [line.strip() for line in last.text.split("\n")]
            end_time_reached = END_MARKER in lines
            if not end_time_reached and rules.end_time is not None:
                value = rules.end_time
                rendered = str(int(value)) if float(value).is_integer() else str(value)
                end_time_reached = f"Time = {rendered}" in lines
    return LogSignals(
        mesh_ok=mesh_ok,
        solver_started=solver_started,
        diverged=diverged,
        end_time_reached=end_time_reached,
    )


@dataclass(frozen=True)
class Executability:
    score: int
    rationale: str
    requirement_checks: tuple[tuple[str, bool], ...] = ()


def classify_executability(
    signals: LogSignals,
    requirement_checks: tuple[tuple[str, bool], ...] = (),
    human_override: bool | None = None,
) -> Executability:
    """Apply the rubric to the scanned signals.

    ``requirement_checks`` are pre-evaluated (check id, passed) pairs;
    they only decide 3 versus 4.  ``human_override`` models the optional
    human confirmation: True lifts a completed run to 4 regardless of
    the automated checks, False pins it at 3.
    """
    if not signals.mesh_ok:
        return Executability(0, "mesh generation failed", requirement_checks)
    if not signals.solver_started:
        return Executability(1, "solver never started time stepping", requirement_checks)
    if signals.diverged:
        return Executability(2, "solution diverged", requirement_checks)
    if not signals.end_time_reached:
        return Executability(2, "run stopped before reaching endTime", requirement_checks)
    if human_override is True:
        return Executability(4, "reached endTime; human confirmed the result", requirement_checks)
    if human_override is False:
        return Executability(3, "reached endTime; human rejected the result", requirement_checks)
    if requirement_checks and all(passed for _, passed in requirement_checks):
        return Executability(4, "reached endTime; all requirement checks passed", requirement_checks)
    failed = [check_id for check_id, passed in requirement_checks if not passed]
    note = f"; failed checks: {failed}" if failed else "; no checks declared"
    return Executability(3, "reached endTime" + note, requirement_checks)


# --- declarative requirement checks ----------------------------------------


@dataclass(frozen=True)
class RequirementCheck:
    """A declarative assertion over one generated file.

    Two kinds exist: ``regex`` (the pattern must match the file content)
    and ``entry`` (an OpenFOAM dictionary line ``key value;`` must be
    present, whitespace-insensitively).
    """

    check_id: str
    file_name: str
    folder: str
    kind: str  # "regex" | "entry"
    pattern: str = ""
    key: str = ""
    value: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "RequirementCheck":
        return cls(
            check_id=data["id"],
            file_name=data["file"],
            folder=data["folder"],
            kind=data.get("kind", "regex"),
            pattern=data.get("pattern", ""),
            key=data.get("key", ""),
            value=data.get("value", ""),
        )

    def compiled(self) -> re.Pattern:
        if self.kind == "entry":
            return re.compile(
                rf"^\s*{re.escape(self.key)}\s+{re.escape(self.value)}\s*;", re.MULTILINE
            )
        return re.compile(self.pattern, re.MULTILINE)

    def evaluate(self, workspace: CaseWorkspace) -> bool:
        target = workspace.find(self.file_name, self.folder)
        if target is None:
            return False
        return self.compiled().search(target.content) is not None


def evaluate_requirement_checks(
    workspace: CaseWorkspace, checks: list[RequirementCheck]
) -> tuple[tuple[str, bool], ...]:
    """Evaluate every check; a missing target file simply fails its check."""
    return tuple((c.check_id, c.evaluate(workspace)) for c in checks)
