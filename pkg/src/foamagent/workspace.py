"""Case workspaces: materialization, validation, and code statistics.

A workspace is the on-disk OpenFOAM case a run owns: foamfiles sorted
into their folders plus the executable Allrun script at the root.  All
state lives in memory first (the pipeline rewrites files across
iterations); materialization mirrors it to disk and is idempotent, so
re-materializing an unchanged workspace is byte-neutral.
"""

from __future__ import annotations

import logging
import re
import stat
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path, PurePosixPath

from foamagent.errors import DuplicateFile, IoFailure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoamFile:
    """One case input file: a name, the folder it lives in, its content."""

    file_name: str
    folder: str
    content: str

    def __post_init__(self):
        if not self.file_name or "/" in self.file_name or "\\" in self.file_name:
            raise IoFailure(f"invalid foamfile name {self.file_name!r}")
        folder = PurePosixPath(self.folder)
        if not self.folder or folder.is_absolute() or ".." in folder.parts:
            raise IoFailure(f"invalid folder {self.folder!r} for {self.file_name}")
        if not self.content:
            raise IoFailure(f"foamfile {self.folder}/{self.file_name} has no content")

    @property
    def rel_path(self) -> str:
        return f"{self.folder}/{self.file_name}"


@dataclass
class CaseWorkspace:
    """The in-memory case plus the directory it materializes into."""

    root: Path
    files: list[FoamFile] = field(default_factory=list)
    allrun: str | None = None

    def find(self, file_name: str, folder: str | None = None) -> FoamFile | None:
        for f in self.files:
            if f.file_name == file_name and (folder is None or f.folder == folder):
                return f
        return None

    def upsert(self, new_file: FoamFile) -> None:
        """Add a file, or replace the one occupying its (name, folder) slot."""
        for i, f in enumerate(self.files):
            if f.file_name == new_file.file_name and f.folder == new_file.folder:
                self.files[i] = new_file
                return
        self.files.append(new_file)

    def rewrite(self, file_name: str, folder: str, content: str) -> FoamFile:
        """Replace the content of an existing file.

        The reviewer occasionally reports a stale folder; when the
        (name, folder) slot misses, fall back to the name alone.

        Raises:
            IoFailure: No file of that name exists at all.
        """
        target = self.find(file_name, folder) or self.find(file_name)
        if target is None:
            raise IoFailure(f"cannot rewrite unknown file {folder}/{file_name}")
        updated = replace(target, content=content)
        self.upsert(updated)
        return updated


def run_root(base_dir: str | Path, case_name: str, run_id: str) -> Path:
    """The per-run workspace directory: ``<case>-<run-id>`` under base."""
    return Path(base_dir) / f"{case_name}-{run_id}"


def materialize_case(workspace: CaseWorkspace) -> list[Path]:
    """Write the workspace to disk; returns every path written.

    Files land at ``root/<folder>/<file name>``; Allrun lands at the
    root with the executable bit set.  Calling this again after content
    changes overwrites in place, which is how iteration rewrites reach
    the disk.

    Raises:
        DuplicateFile: Two files share a (name, folder) slot.
        IoFailure: The filesystem refused a write (message names the path).
    """
    seen: set[tuple[str, str]] = set()
    for f in workspace.files:
        slot = (f.file_name, f.folder)
        if slot in seen:
            raise DuplicateFile(f"workspace holds {f.folder}/{f.file_name} twice")
        seen.add(slot)

    written: list[Path] = []
    for f in workspace.files:
        target = workspace.root / f.folder / f.file_name
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(f.content, encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write {target}: {exc}") from exc
        written.append(target)
    if workspace.allrun is not None:
        target = workspace.root / "Allrun"
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(workspace.allrun, encoding="utf-8")
            target.chmod(target.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
        except OSError as exc:
            raise IoFailure(f"cannot write {target}: {exc}") from exc
        written.append(target)
    return written


def read_case_tree(root: str | Path) -> CaseWorkspace:
    """Reconstruct a workspace from disk (inverse of materialize).

    Execution logs (``log.*``) and the Allrun script are recognized and
    kept out of the file list; Allrun content is restored separately.
    """
    root = Path(root)
    files: list[FoamFile] = []
    allrun: str | None = None
    for path in sorted(root.rglob("*")):
        if not path.is_file():
            continue
        rel = path.relative_to(root)
        if len(rel.parts) == 1:
            if rel.name == "Allrun":
                allrun = path.read_text(encoding="utf-8")
            continue  # only Allrun and logs live at the root
        files.append(
            FoamFile(
                file_name=rel.name,
                folder=rel.parent.as_posix(),
                content=path.read_text(encoding="utf-8"),
            )
        )
    return CaseWorkspace(root=root, files=files, allrun=allrun)


# --- validators -------------------------------------------------------------


_FOAMFILE_BLOCK_RE = re.compile(r"FoamFile\s*\{(?P<body>[^}]*)\}", re.DOTALL)
_CLASS_ENTRY_RE = re.compile(r"\bclass\s+\S+?\s*;")
_OBJECT_ENTRY_RE = re.compile(r"\bobject\s+\S+?\s*;")


def validate_foamfile_header(content: str) -> list[str]:
    """Check the FoamFile header block; an empty list means it conforms.

    Violations are returned, not raised: a malformed header is a finding
    about generated content, not a programming error.
    """
    match = _FOAMFILE_BLOCK_RE.search(content)
    if match is None:
        return ["no FoamFile header block"]
    violations = []
    if not _CLASS_ENTRY_RE.search(match.group("body")):
        violations.append("FoamFile header lacks a class entry")
    if not _OBJECT_ENTRY_RE.search(match.group("body")):
        violations.append("FoamFile header lacks an object entry")
    return violations


# Allrun boilerplate the validator waves through without a whitelist hit.
_CD_CASE_RE = re.compile(r'^cd\s+"?\$\{0%/\*\}"?\s*(\|\|\s*exit\s+1)?$')
_RUNFUNCTIONS_RE = re.compile(r"^(\.|source)\s+\S*RunFunctions\s*$")
_GET_APPLICATION_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*="?\$\(getApplication\)"?$')
_APPLICATION_VAR_RE = re.compile(r"^\$\{?application\}?$")


@dataclass(frozen=True)
class ScriptLine:
    number: int  # 1-based line number in the script
    text: str  # stripped content


def script_command_lines(script: str) -> list[ScriptLine]:
    """Extract executable command lines, dropping comments and boilerplate."""
    commands: list[ScriptLine] = []
    for i, raw in enumerate(script.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if _CD_CASE_RE.match(line) or _RUNFUNCTIONS_RE.match(line) or _GET_APPLICATION_RE.match(line):
            continue
        commands.append(ScriptLine(number=i, text=line))
    return commands


def script_boilerplate_lines(script: str) -> list[str]:
    """The prelude lines (cd, RunFunctions, assignments) in script order."""
    prelude: list[str] = []
    for raw in script.split("\n"):
        line = raw.strip()
        if _CD_CASE_RE.match(line) or _RUNFUNCTIONS_RE.match(line) or _GET_APPLICATION_RE.match(line):
            prelude.append(line)
    return prelude


def validate_allrun_script(
    script: str,
    command_whitelist: frozenset[str],
    run_whitelist: frozenset[str],
) -> list[str]:
    """Check every command against the whitelists; empty list means clean.

    ``runApplication``/``runParallel`` lines must start an application
    from the run whitelist (or the conventional ``$application``
    variable); any other line must start a whitelisted utility.  A
    script that starts no application at all is also a violation.
    """
    violations: list[str] = []
    commands = script_command_lines(script)
    if not commands:
        violations.append("script contains no executable commands")
        return violations
    for cmd in commands:
        tokens = cmd.text.split()
        head = tokens[0]
        if head in ("runApplication", "runParallel"):
            args = [t for t in tokens[1:] if not t.startswith("-")]
            if not args:
                violations.append(f"line {cmd.number}: {cmd.text!r} names no application")
            else:
                app = args[0]
                if app not in run_whitelist and not _APPLICATION_VAR_RE.match(app):
                    violations.append(
                        f"line {cmd.number}: application {app!r} is not in the run list"
                    )
        elif head not in command_whitelist:
            violations.append(
                f"line {cmd.number}: command {head!r} is not in the command list"
            )
    return violations


def load_whitelist(path: str | Path | None, default_resource: str) -> frozenset[str]:
    """Read a whitelist file (one token per line, # comments)."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = (resources.files("foamagent") / "data" / default_resource).read_text(
            encoding="utf-8"
        )
    tokens = []
    for line in text.split("\n"):
        line = line.strip()
        if line and not line.startswith("#"):
            tokens.append(line)
    return frozenset(tokens)


def default_command_whitelist() -> frozenset[str]:
    return load_whitelist(None, "commands.txt")


def default_run_whitelist() -> frozenset[str]:
    return load_whitelist(None, "runlist.txt")


# --- statistics -------------------------------------------------------------


@dataclass(frozen=True)
class CodeStats:
    file_count: int
    lines_per_file: float  # mean
    total_lines: int


def count_lines(text: str) -> int:
    """Newline-delimited segments; a trailing newline adds nothing."""
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


def collect_code_stats(workspace: CaseWorkspace) -> CodeStats:
    """Line statistics over the foamfiles (the Allrun script is not code)."""
    counts = [count_lines(f.content) for f in workspace.files]
    total = sum(counts)
    mean = total / len(counts) if counts else 0.0
    return CodeStats(file_count=len(counts), lines_per_file=mean, total_lines=total)
