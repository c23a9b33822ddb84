"""Scripted execution backend: scenarios instead of a real solver.

A scenario is an ordered rule list.  Each command extracted from the
Allrun script is answered by the first live rule whose pattern occurs
in the command text (an empty pattern matches anything).  Rules may
retire after a fixed number of matches, which is how a replay models
"this failure goes away once the file is fixed": the backend instance
carries that state, so it lives exactly as long as one pipeline run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from foamagent.errors import ConfigError, ScenarioRuleMissing
from foamagent.executor.run import RawStep
from foamagent.workspace import script_command_lines


@dataclass(frozen=True)
class ScenarioRule:
    pattern: str = ""  # substring of the command text; "" matches all
    exit_code: int = 0
    stdout_text: str = ""
    stderr_text: str = ""
    reaches_end_time: bool = False
    diverges: bool = False
    times: int | None = None  # how many matches before the rule retires


@dataclass(frozen=True)
class SimulatorScenario:
    rules: tuple[ScenarioRule, ...]

    @classmethod
    def from_dict(cls, data: dict) -> "SimulatorScenario":
        rules = []
        for i, raw in enumerate(data.get("rules", [])):
            if not isinstance(raw, dict):
                raise ConfigError(f"scenario rule {i} must be an object")
            advance = raw.get("advance", {})
            rules.append(
                ScenarioRule(
                    pattern=raw.get("command", ""),
                    exit_code=int(raw.get("exit_code", 0)),
                    stdout_text=raw.get("stdout", ""),
                    stderr_text=raw.get("stderr", ""),
                    reaches_end_time=bool(advance.get("reaches_end_time", False)),
                    diverges=bool(advance.get("diverges", False)),
                    times=raw.get("times"),
                )
            )
        return cls(rules=tuple(rules))


def load_scenario(path: str | Path) -> SimulatorScenario:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    return SimulatorScenario.from_dict(data)


class SimulatorBackend:
    """Executes Allrun commands against a scenario, no solver involved."""

    def __init__(self, scenario: SimulatorScenario):
        self._rules = list(scenario.rules)
        self._remaining = [r.times for r in scenario.rules]

    def _match(self, command: str) -> ScenarioRule:
        for i, rule in enumerate(self._rules):
            if self._remaining[i] == 0:
                continue
            if rule.pattern in command:
                if self._remaining[i] is not None:
                    self._remaining[i] -= 1
                return rule
        raise ScenarioRuleMissing(f"no scenario rule matches command {command!r}")

    def run(self, script: str, root: Path, timeout: float) -> list[RawStep]:
        steps: list[RawStep] = []
        for cmd in script_command_lines(script):
            rule = self._match(cmd.text)
            steps.append(
                RawStep(
                    command=cmd.text,
                    exit_code=rule.exit_code,
                    stdout=_synthesize_stdout(cmd.text, rule),
                    stderr=rule.stderr_text,
                )
            )
            if rule.exit_code != 0:
                break
        return steps


def _synthesize_stdout(command: str, rule: ScenarioRule) -> str:
    """Log text shaped like a solver's, driven by the advance flags."""
    lines = [rule.stdout_text] if rule.stdout_text else [f"Executing: {command}"]
    if rule.diverges:
        lines += ["Starting time loop", "", "Time = 1", "", "Floating point exception"]
    if rule.reaches_end_time:
        lines += ["Starting time loop", "", "Time = 1", "", "Time = 2", "", "End"]
    return "\n".join(lines) + "\n"
