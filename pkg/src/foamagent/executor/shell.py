"""Real execution backend: runs Allrun commands through /bin/sh.

Commands run one at a time so each gets its own exit code and the run
stops at the first failure.  Because every command runs in a fresh
shell, the script's boilerplate (cd into the case, RunFunctions
sourcing, the getApplication assignment) is replayed as a prelude
before each command.  Lines that fail the whitelist validator are never
executed; they are reported as refused steps, since generated scripts
run here unreviewed.
"""

from __future__ import annotations

import logging
import os
import subprocess
import time
from pathlib import Path

from foamagent.errors import BackendUnavailable
from foamagent.executor.run import RawStep
from foamagent.workspace import (
    default_command_whitelist,
    default_run_whitelist,
    script_boilerplate_lines,
    script_command_lines,
    validate_allrun_script,
)

logger = logging.getLogger(__name__)

TIMEOUT_EXIT_CODE = 124
REFUSED_EXIT_CODE = 126


class ShellBackend:
    """Runs commands via sh in the workspace root, one step per command."""

    def __init__(
        self,
        command_whitelist: frozenset[str] | None = None,
        run_whitelist: frozenset[str] | None = None,
    ):
        self._commands = command_whitelist or default_command_whitelist()
        self._runlist = run_whitelist or default_run_whitelist()

    def run(self, script: str, root: Path, timeout: float) -> list[RawStep]:
        commands = script_command_lines(script)
        prelude = script_boilerplate_lines(script)
        needs_runfunctions = any(
            c.text.startswith(("runApplication", "runParallel")) for c in commands
        ) or any("RunFunctions" in line for line in prelude)
        if needs_runfunctions:
            project_dir = os.environ.get("WM_PROJECT_DIR")
            if not project_dir or not Path(project_dir, "bin/tools/RunFunctions").is_file():
                raise BackendUnavailable(
                    "script needs RunFunctions but no OpenFOAM environment is sourced "
                    "(WM_PROJECT_DIR is unset or has no bin/tools/RunFunctions)"
                )
        # The prelude's cd targets the script location; commands already run
        # with cwd=root, so that line is dropped from the replayed prelude.
        prelude = [line for line in prelude if not line.startswith("cd ")]

        deadline = time.monotonic() + timeout
        steps: list[RawStep] = []
        for cmd in commands:
            violations = validate_allrun_script(
                "\n".join(prelude + [cmd.text]), self._commands, self._runlist
            )
            if violations:
                steps.append(
                    RawStep(
                        command=cmd.text,
                        exit_code=REFUSED_EXIT_CODE,
                        stdout="",
                        stderr="refused by whitelist: " + "; ".join(violations),
                    )
                )
                break
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                steps.append(_timeout_step(cmd.text, timeout))
                break
            shell_script = "\n".join(prelude + [cmd.text])
            try:
                proc = subprocess.run(
                    ["sh", "-c", shell_script],
                    cwd=root,
                    capture_output=True,
                    text=True,
                    timeout=remaining,
                )
            except subprocess.TimeoutExpired:
                steps.append(_timeout_step(cmd.text, timeout))
                break
            stdout, log_path = _fold_in_log(proc.stdout, cmd.text, root)
            steps.append(
                RawStep(
                    command=cmd.text,
                    exit_code=proc.returncode,
                    stdout=stdout,
                    stderr=proc.stderr,
                    log_path=log_path,
                )
            )
            if proc.returncode != 0:
                break
        return steps


def _timeout_step(command: str, timeout: float) -> RawStep:
    return RawStep(
        command=command,
        exit_code=TIMEOUT_EXIT_CODE,
        stdout="",
        stderr=f"timed out after {timeout:.0f}s",
    )


def _fold_in_log(stdout: str, command: str, root: Path) -> tuple[str, str | None]:
    """Merge the runApplication log file into the step's stdout.

    runApplication redirects application output to ``log.<app>``, so
    the captured stdout alone would hide everything the signals scanner
    needs.  The full log stays on disk and is referenced by path.
    """
    tokens = command.split()
    if tokens and tokens[0] in ("runApplication", "runParallel") and len(tokens) > 1:
        app = next((t for t in tokens[1:] if not t.startswith("-")), None)
        if app:
            log_file = root / f"log.{app}"
            if not log_file.is_file():
                # $application resolves inside the shell; fall back to the
                # newest log the step left behind.
                candidates = sorted(root.glob("log.*"), key=lambda p: p.stat().st_mtime)
                log_file = candidates[-1] if candidates else log_file
            if log_file.is_file():
                try:
                    return stdout + log_file.read_text(encoding="utf-8", errors="replace"), str(
                        log_file
                    )
                except OSError:
                    return stdout, str(log_file)
    return stdout, None
