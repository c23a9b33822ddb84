"""Chunk grammar for the three tutorial sub-databases.

A tutorial corpus is stored as plain UTF-8 text: one document per chunk
kind, each document a sequence of delimited blocks.  Architecture blocks
describe a whole case (name, domain, category, solver, file list); file
context and Allrun blocks carry the content of a single file with the
case metadata on the begin-marker line.

The grammars::

    ###case begin:
    case name: pitzDaily
    ...
    case end.###

    ``input_file_begin: OpenFOAM foamfile controlDict of case pitzDaily (domain: d, category: c, solver: s):
    <file content>
    input_file_end.``

    ``input_file_begin: linux execution command allrun file of case pitzDaily (domain: d, category: c, solver: s):
    <script content>
    input_file_end.``

``parse_chunk_stream`` and ``serialize_chunks`` are exact inverses for
documents produced by this module; that property is load-bearing (the
persisted databases must survive arbitrarily many load/save cycles
unchanged) and is enforced by property tests.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass

from foamagent.errors import (
    ChunkParseError,
    MissingHeaderField,
    UnterminatedChunk,
)

logger = logging.getLogger(__name__)


class ChunkKind(str, enum.Enum):
    """Which sub-database a chunk belongs to."""

    ARCHITECTURE = "architecture"
    FILE_CONTEXT = "file_context"
    ALLRUN = "allrun"


ARCH_BEGIN = "###case begin:"
ARCH_END = "case end.###"
FILE_BEGIN_PREFIX = "``input_file_begin:"
FILE_END = "input_file_end.``"

ALLRUN_FILE_NAME = "Allrun"

# Metadata grammar of the begin-marker line for file-bearing chunks.  The
# solver field tolerates a missing space after the colon because existing
# databases in the wild elide it; the serializer always emits the space.
_CASE_META = r"\(domain:\s*(?P<domain>[^,]*?),\s*category:\s*(?P<category>[^,]*?),\s*solver:\s*(?P<solver>[^)]*?)\)"
_FILE_DESC_RE = re.compile(
    r"^OpenFOAM foamfile (?P<file>\S+) of case (?P<case>\S+) " + _CASE_META + r":?\s*$"
)
_ALLRUN_DESC_RE = re.compile(
    r"^linux execution command allrun file of case (?P<case>\S+) " + _CASE_META + r":?\s*$"
)


@dataclass(frozen=True)
class TutorialChunk:
    """One indexed unit of tutorial knowledge.

    ``body`` holds the raw text between the delimiters.  For architecture
    chunks that text includes the ``case ...:`` header lines (the whole
    block is what prompts receive); for file context and Allrun chunks it
    is the file content alone, since the metadata lives on the marker line.
    """

    id: str
    kind: ChunkKind
    case_name: str
    case_domain: str
    case_category: str
    case_solver: str
    file_name: str | None
    body: str


def chunk_id(kind: ChunkKind, case_name: str, file_name: str | None = None) -> str:
    """Deterministic chunk id; ids are the retrieval tie-break key."""
    if kind is ChunkKind.ARCHITECTURE:
        return f"arch/{case_name}"
    if kind is ChunkKind.ALLRUN:
        return f"allrun/{case_name}"
    return f"ctx/{case_name}/{file_name}"


def make_architecture_chunk(
    case_name: str,
    case_domain: str,
    case_category: str,
    case_solver: str,
    files: list[tuple[str, str]],
) -> TutorialChunk:
    """Build an architecture chunk with the canonical header layout.

    ``files`` is an ordered list of (file name, folder) pairs; it is
    rendered as the same quoted list / mapping layout the databases use.
    """
    names = [name for name, _ in files]
    folders = {name: folder for name, folder in files}
    body = "\n".join(
        [
            f"case name: {case_name}",
            f"case domain: {case_domain}",
            f"case category: {case_category}",
            f"case solver: {case_solver}",
            f"case input name:{names!r}",
            f"corresponding input folder: {folders!r}",
        ]
    )
    return TutorialChunk(
        id=chunk_id(ChunkKind.ARCHITECTURE, case_name),
        kind=ChunkKind.ARCHITECTURE,
        case_name=case_name,
        case_domain=case_domain,
        case_category=case_category,
        case_solver=case_solver,
        file_name=None,
        body=body,
    )


def make_file_chunk(
    kind: ChunkKind,
    case_name: str,
    case_domain: str,
    case_category: str,
    case_solver: str,
    body: str,
    file_name: str | None = None,
) -> TutorialChunk:
    """Build a file context or Allrun chunk."""
    if kind is ChunkKind.ARCHITECTURE:
        raise ValueError("use make_architecture_chunk for architecture chunks")
    name = ALLRUN_FILE_NAME if kind is ChunkKind.ALLRUN else file_name
    if not name:
        raise ValueError("file context chunks need a file_name")
    return TutorialChunk(
        id=chunk_id(kind, case_name, name),
        kind=kind,
        case_name=case_name,
        case_domain=case_domain,
        case_category=case_category,
        case_solver=case_solver,
        file_name=name,
        body=body,
    )


# --- parsing --------------------------------------------------------------


def parse_chunk_stream(
    text: str,
    kind: ChunkKind,
    source: str = "<corpus>",
    skip_malformed: bool = False,
) -> list[TutorialChunk]:
    """Parse one sub-database document into chunks, preserving order.

    Text outside delimiter blocks is ignored, so documents may carry
    comments or blank separators.  Malformed blocks raise by default;
    with ``skip_malformed`` they are logged and dropped instead, except
    for an unterminated block, which always raises since the remainder
    of the document cannot be trusted.

    Args:
        text: The document content.
        kind: Which grammar to apply (also stamped on every chunk).
        source: Name used in error messages, typically the file path.
        skip_malformed: Drop malformed blocks instead of failing fast.

    Returns:
        Chunks in document order.

    Raises:
        UnterminatedChunk: A begin marker has no matching end marker.
        MissingHeaderField: A block lacks mandatory metadata.
    """
    lines = text.split("\n")
    chunks: list[TutorialChunk] = []
    i = 0
    while i < len(lines):
        if not _is_begin(lines[i], kind):
            i += 1
            continue
        begin_line_no = i + 1
        try:
            chunk, i = _parse_block(lines, i, kind, source)
        except UnterminatedChunk:
            raise
        except ChunkParseError as exc:
            if not skip_malformed:
                raise
            logger.warning("skipping malformed chunk at %s:%d: %s", source, begin_line_no, exc)
            i = _skip_to_next_begin(lines, begin_line_no, kind)
            continue
        chunks.append(chunk)
    return chunks


def _is_begin(line: str, kind: ChunkKind) -> bool:
    stripped = line.strip()
    if kind is ChunkKind.ARCHITECTURE:
        return stripped == ARCH_BEGIN
    return stripped.startswith(FILE_BEGIN_PREFIX)


def _skip_to_next_begin(lines: list[str], start: int, kind: ChunkKind) -> int:
    for j in range(start, len(lines)):
        if _is_begin(lines[j], kind):
            return j
    return len(lines)


def _parse_block(
    lines: list[str], begin: int, kind: ChunkKind, source: str
) -> tuple[TutorialChunk, int]:
    """Parse the block whose begin marker sits at ``lines[begin]``.

    Returns the chunk and the index of the first line after the block.
    """
    end_marker = ARCH_END if kind is ChunkKind.ARCHITECTURE else FILE_END
    end = None
    for j in range(begin + 1, len(lines)):
        if lines[j].strip() == end_marker:
            end = j
            break
    if end is None:
        raise UnterminatedChunk(
            f"{source}:{begin + 1}: block opened here is never closed by {end_marker!r}"
        )
    body = "\n".join(lines[begin + 1 : end])

    if kind is ChunkKind.ARCHITECTURE:
        meta = _parse_architecture_header(body, source, begin + 1)
        chunk = TutorialChunk(
            id=chunk_id(kind, meta["name"]),
            kind=kind,
            case_name=meta["name"],
            case_domain=meta["domain"],
            case_category=meta["category"],
            case_solver=meta["solver"],
            file_name=None,
            body=body,
        )
    else:
        desc = lines[begin].strip()[len(FILE_BEGIN_PREFIX) :].strip()
        pattern = _ALLRUN_DESC_RE if kind is ChunkKind.ALLRUN else _FILE_DESC_RE
        match = pattern.match(desc)
        if match is None:
            raise MissingHeaderField(
                f"{source}:{begin + 1}: begin marker does not carry valid "
                f"{kind.value} metadata: {desc!r}"
            )
        file_name = ALLRUN_FILE_NAME if kind is ChunkKind.ALLRUN else match.group("file")
        chunk = TutorialChunk(
            id=chunk_id(kind, match.group("case"), file_name),
            kind=kind,
            case_name=match.group("case"),
            case_domain=match.group("domain"),
            case_category=match.group("category"),
            case_solver=match.group("solver"),
            file_name=file_name,
            body=body,
        )
    return chunk, end + 1


def _parse_architecture_header(body: str, source: str, line_no: int) -> dict[str, str]:
    fields = {"name": None, "domain": "", "category": "", "solver": ""}
    for line in body.split("\n"):
        for key in ("name", "domain", "category", "solver"):
            prefix = f"case {key}:"
            if line.startswith(prefix) and fields[key] in (None, ""):
                fields[key] = line[len(prefix) :].strip()
    if fields["name"] is None:
        raise MissingHeaderField(
            f"{source}:{line_no}: architecture block has no 'case name:' line"
        )
    return fields


# --- serialization --------------------------------------------------------


def serialize_chunk(chunk: TutorialChunk) -> str:
    """Render one chunk back into its delimited block."""
    if chunk.kind is ChunkKind.ARCHITECTURE:
        begin, end = ARCH_BEGIN, ARCH_END
    else:
        if chunk.kind is ChunkKind.ALLRUN:
            desc = (
                f"linux execution command allrun file of case {chunk.case_name} "
                f"(domain: {chunk.case_domain}, category: {chunk.case_category}, "
                f"solver: {chunk.case_solver}):"
            )
        else:
            desc = (
                f"OpenFOAM foamfile {chunk.file_name} of case {chunk.case_name} "
                f"(domain: {chunk.case_domain}, category: {chunk.case_category}, "
                f"solver: {chunk.case_solver}):"
            )
        begin, end = f"{FILE_BEGIN_PREFIX} {desc}", FILE_END
    for line in chunk.body.split("\n"):
        if line.strip() == end or _is_begin(line, chunk.kind):
            raise ChunkParseError(
                f"chunk {chunk.id}: body contains a delimiter line and cannot be serialized"
            )
    return f"{begin}\n{chunk.body}\n{end}"


def serialize_chunks(chunks: list[TutorialChunk]) -> str:
    """Render a sub-database document: blocks separated by blank lines."""
    return "\n\n".join(serialize_chunk(c) for c in chunks) + "\n" if chunks else ""
