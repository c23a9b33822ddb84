"""Running an Allrun script and reporting what happened.

Backends yield one raw step per executed command, already stopped at
the first failure.  ``execute_allrun`` wraps that into an execution
report: capped stream tails, the failing command, and an error excerpt
ready for the reviewer prompt.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from foamagent.errors import MissingAllrun
from foamagent.workspace import CaseWorkspace

logger = logging.getLogger(__name__)

TAIL_LINES = 200


@dataclass(frozen=True)
class RawStep:
    """What a backend reports for one executed command."""

    command: str
    exit_code: int
    stdout: str
    stderr: str
    log_path: str | None = None


class ExecutionBackend(Protocol):
    """Runs the commands of an Allrun script inside a workspace root."""

    def run(self, script: str, root: Path, timeout: float) -> list[RawStep]: ...


@dataclass(frozen=True)
class StepResult:
    command: str
    exit_code: int
    stdout_tail: str
    stderr_tail: str
    log_path: str | None = None

    @property
    def text(self) -> str:
        """Both stream tails, for signal scanning."""
        return "\n".join(part for part in (self.stdout_tail, self.stderr_tail) if part)


@dataclass(frozen=True)
class ExecutionReport:
    steps: tuple[StepResult, ...]
    wall_time: float
    failed_command: str | None
    error_excerpt: str | None

    @property
    def ok(self) -> bool:
        return self.failed_command is None


def tail(text: str, lines: int = TAIL_LINES) -> str:
    """The last ``lines`` lines of a stream."""
    parts = text.split("\n")
    if parts and parts[-1] == "":
        parts.pop()
    return "\n".join(parts[-lines:])


def execute_allrun(
    workspace: CaseWorkspace, backend: ExecutionBackend, timeout: float = 600.0
) -> ExecutionReport:
    """Run the workspace's Allrun through a backend.

    Stream tails are capped at 200 lines; full logs, where a backend
    writes them, stay on disk and are referenced by path.  The failing
    command and its output excerpt are recorded exactly when some step
    exited nonzero.

    Raises:
        MissingAllrun: The workspace has no Allrun script.
    """
    if workspace.allrun is None:
        raise MissingAllrun(f"workspace {workspace.root} has no Allrun script")
    started = time.monotonic()
    raw_steps = backend.run(workspace.allrun, workspace.root, timeout)
    wall = time.monotonic() - started

    steps = tuple(
        StepResult(
            command=s.command,
            exit_code=s.exit_code,
            stdout_tail=tail(s.stdout),
            stderr_tail=tail(s.stderr),
            log_path=s.log_path,
        )
        for s in raw_steps
    )
    failed = next((s for s in steps if s.exit_code != 0), None)
    excerpt = None
    if failed is not None:
        excerpt = failed.text or f"{failed.command} exited with code {failed.exit_code}"
        logger.info("run failed at %r (exit %d)", failed.command, failed.exit_code)
    return ExecutionReport(
        steps=steps,
        wall_time=wall,
        failed_command=failed.command if failed is not None else None,
        error_excerpt=excerpt,
    )
