"""Parsers for the structured agent replies.

Three reply grammars exist: the subtask list emitted by the architect,
fenced code blocks emitted by the writers, and the ###files### in
``folders`` target pairs emitted by the reviewer.  Each parser has a
serializer (or a canonical emitter) and the pair must round-trip; the
property tests lean on that.
"""

from __future__ import annotations

import re

from foamagent.agents.types import Subtask
from foamagent.errors import (
    ArityMismatch,
    CountMismatch,
    MalformedSubtaskLine,
    MissingFileMarkers,
    MissingFolderMarkers,
    NoFence,
    NoHeader,
    UnterminatedFence,
)

_HEADER_RE = re.compile(r"^splits into (\d+) subtasks?:\s*$")
_SUBTASK_PREFIX_RE = re.compile(r"^subtask(\d+)\s*:")
_SUBTASK_LINE_RE = re.compile(
    r"^subtask(?P<index>\d+)\s*:\s*"
    r"(?P<echo>to [Ww]rite a OpenFoam (?P<file>\S+) foamfile in (?P<folder>\S+) folder\b.*?)\s*$"
)


def parse_subtask_list(text: str) -> list[Subtask]:
    """Parse the architect's decomposition reply.

    The reply must contain a ``splits into N subtasks:`` header followed
    by N lines of ``subtaskK: to Write a OpenFoam <file> foamfile in
    <folder> folder ...``.  Blank lines between subtasks are fine; the
    first non-subtask line ends the list, so trailing chatter after a
    complete list is tolerated.

    Raises:
        NoHeader: No header line anywhere in the reply.
        MalformedSubtaskLine: A subtask line that breaks the grammar
            (the message names its line number in the reply).
        CountMismatch: Fewer or more subtask lines than declared.
    """
    lines = text.split("\n")
    declared: int | None = None
    start = 0
    for i, line in enumerate(lines):
        header = _HEADER_RE.match(line.strip())
        if header:
            declared = int(header.group(1))
            start = i + 1
            break
    if declared is None:
        raise NoHeader("reply has no 'splits into N subtasks:' header")

    subtasks: list[Subtask] = []
    for i in range(start, len(lines)):
        stripped = lines[i].strip()
        if not stripped:
            continue
        if not _SUBTASK_PREFIX_RE.match(stripped):
            break
        match = _SUBTASK_LINE_RE.match(stripped)
        if match is None:
            raise MalformedSubtaskLine(f"line {i + 1} is not a valid subtask: {stripped!r}")
        subtasks.append(
            Subtask(
                index=int(match.group("index")),
                file_name=match.group("file"),
                folder=match.group("folder"),
                requirement_echo=match.group("echo"),
            )
        )
    if len(subtasks) != declared:
        raise CountMismatch(
            f"header declares {declared} subtasks but {len(subtasks)} were found"
        )
    return subtasks


def serialize_subtask_list(subtasks: list[Subtask]) -> str:
    """Emit the canonical decomposition text the parser accepts."""
    lines = [f"splits into {len(subtasks)} subtasks:"]
    lines.extend(f"subtask{st.index}: {st.requirement_echo}" for st in subtasks)
    return "\n".join(lines)


def subtask_echo(file_name: str, folder: str, requirement: str) -> str:
    """The canonical subtask clause for a file assignment."""
    return (
        f"to Write a OpenFoam {file_name} foamfile in {folder} folder "
        f"that could be used to meet user requirement:{requirement}."
    )


def extract_fenced_block(text: str) -> str:
    """Return the content of the first complete triple-backtick fence.

    A language tag on the opening line is dropped.  A closing marker
    sharing a line with content closes the fence after that content.
    The returned block never contains the fence delimiter itself.

    Raises:
        NoFence: No opening fence in the reply.
        UnterminatedFence: An opening fence that never closes.
    """
    lines = text.split("\n")
    open_idx: int | None = None
    for i, line in enumerate(lines):
        if line.lstrip().startswith("```"):
            open_idx = i
            break
    if open_idx is None:
        raise NoFence("reply contains no ``` fence")

    remainder = lines[open_idx].lstrip()[3:]
    if "```" in remainder:  # single-line fence: ```content```
        return remainder[: remainder.index("```")].strip()

    content: list[str] = []
    for line in lines[open_idx + 1 :]:
        if line.strip() == "```":
            return "\n".join(content)
        if "```" in line:
            prefix = line[: line.index("```")]
            if prefix.strip():
                content.append(prefix)
            return "\n".join(content)
        content.append(line)
    raise UnterminatedFence("fence opened but never closed")


def fence(content: str, tag: str = "") -> str:
    """Wrap content in a triple-backtick fence (the emitter tests use this)."""
    return f"```{tag}\n{content}\n```"


_FILES_RE = re.compile(r"###(.*?)###", re.DOTALL)
_FOLDERS_RE = re.compile(r"``(.*?)``", re.DOTALL)


def parse_review_targets(text: str) -> list[tuple[str, str]]:
    """Parse the reviewer's ``###files### in ``folders```` reply.

    Files and folders pair up positionally; the counts must agree.

    Raises:
        MissingFileMarkers: No ###...### group.
        MissingFolderMarkers: No ``...`` group after the files.
        ArityMismatch: Different numbers of files and folders.
    """
    files_match = _FILES_RE.search(text)
    if files_match is None:
        raise MissingFileMarkers("reply has no ###file, file, ...### group")
    folders_match = _FOLDERS_RE.search(text, files_match.end())
    if folders_match is None:
        raise MissingFolderMarkers("reply has no ``folder, folder, ...`` group")
    files = [part.strip() for part in files_match.group(1).split(",") if part.strip()]
    folders = [part.strip() for part in folders_match.group(1).split(",") if part.strip()]
    if len(files) != len(folders):
        raise ArityMismatch(f"{len(files)} files but {len(folders)} folders")
    return list(zip(files, folders))


def serialize_review_targets(targets: list[tuple[str, str]]) -> str:
    """Emit the canonical reviewer target reply."""
    files = ", ".join(f for f, _ in targets)
    folders = ", ".join(folder for _, folder in targets)
    return f"###{files}### in ``{folders}``"


_CASE_FIELD_RE = re.compile(r"^case (name|domain|category|solver)\s*:\s*(.*?)\s*$")


def parse_case_fields(text: str) -> dict[str, str]:
    """Pull ``case <field>: value`` lines out of a normalization reply.

    Lenient by design: whatever fields are present are returned, and
    the caller fills gaps from the retrieved tutorial chunk.
    """
    fields: dict[str, str] = {}
    for line in text.split("\n"):
        match = _CASE_FIELD_RE.match(line.strip())
        if match and match.group(1) not in fields:
            fields[match.group(1)] = match.group(2)
    return fields
