"""Retrieval indices over the three tutorial sub-databases.

An index pairs the parsed chunks of one kind with their embedding
vectors.  Persistence keeps two artifacts per kind: the chunk document
itself (the same delimited text format the corpus uses, byte-exact) and
a JSON vector sidecar keyed by chunk id, headed by the embedder identity
and dimension.  Loading refuses a sidecar written by a different
embedder, so scores can never silently mix embedding schemes.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from foamagent.errors import (
    ConfigError,
    DuplicateChunk,
    EmbedderMismatch,
    EmptyCorpus,
    EmptyIndex,
    InvalidInput,
    IoFailure,
)
from foamagent.rag.chunks import (
    ChunkKind,
    TutorialChunk,
    parse_chunk_stream,
    serialize_chunk,
    serialize_chunks,
)
from foamagent.rag.embedding import Embedder, cosine_similarity

logger = logging.getLogger(__name__)

# On-disk document name per sub-database.
DB_FILES = {
    ChunkKind.ARCHITECTURE: "architecture.txt",
    ChunkKind.FILE_CONTEXT: "file_contexts.txt",
    ChunkKind.ALLRUN: "allruns.txt",
}


@dataclass(frozen=True)
class RetrievalHit:
    """One retrieval result: the chunk and its exact cosine score."""

    chunk: TutorialChunk
    score: float


class RetrievalIndex:
    """Embedded chunks of a single kind, queryable by cosine similarity."""

    def __init__(
        self,
        kind: ChunkKind,
        chunks: list[TutorialChunk],
        vectors: dict[str, np.ndarray],
        embedder_identity: str,
        dimension: int,
    ):
        ids = [c.id for c in chunks]
        dupes = {i for i in ids if ids.count(i) > 1}
        if dupes:
            raise DuplicateChunk(
                f"{kind.value} database has duplicate chunk ids: {sorted(dupes)}"
            )
        missing = [i for i in ids if i not in vectors]
        if missing:
            raise ConfigError(f"no vector for chunk ids: {missing}")
        self.kind = kind
        self.chunks = list(chunks)
        self.embedder_identity = embedder_identity
        self.dimension = dimension
        self._vectors = dict(vectors)

    def __len__(self) -> int:
        return len(self.chunks)

    def vector_for(self, chunk_id: str) -> np.ndarray:
        return self._vectors[chunk_id]

    @classmethod
    def from_chunks(cls, kind: ChunkKind, chunks: list[TutorialChunk], embedder: Embedder) -> "RetrievalIndex":
        """Embed chunks and assemble an index.

        The embedded text is the full serialized block, so the metadata
        on architecture headers and file begin-markers participates in
        matching alongside the body.
        """
        vectors = {c.id: embedder.embed(serialize_chunk(c)) for c in chunks}
        return cls(kind, chunks, vectors, embedder.identity, embedder.dimension)


def retrieve_similar(
    index: RetrievalIndex, query: str, embedder: Embedder, top_k: int = 1
) -> list[RetrievalHit]:
    """Score every chunk against the query and return the best few.

    Results are ordered by descending score; exact score ties break by
    ascending chunk id, so retrieval is fully deterministic.  Asking for
    more hits than the index holds returns them all.

    Raises:
        EmptyIndex: The index holds no chunks.
        InvalidInput: top_k < 1.
        EmbedderMismatch: The embedder is not the one that built the index.
    """
    if len(index) == 0:
        raise EmptyIndex(f"{index.kind.value} index is empty")
    if top_k < 1:
        raise InvalidInput(f"top_k must be >= 1, got {top_k}")
    if embedder.identity != index.embedder_identity:
        raise EmbedderMismatch(
            f"index built with {index.embedder_identity!r}, "
            f"queried with {embedder.identity!r}"
        )
    query_vec = embedder.embed(query)
    scored = [
        RetrievalHit(chunk=c, score=cosine_similarity(query_vec, index.vector_for(c.id)))
        for c in index.chunks
    ]
    scored.sort(key=lambda hit: (-hit.score, hit.chunk.id))
    return scored[: min(top_k, len(scored))]


# --- corpus ingestion and persistence --------------------------------------


def build_index(
    corpus_root: str | Path,
    embedder: Embedder,
    skip_malformed: bool = False,
) -> dict[ChunkKind, RetrievalIndex]:
    """Parse a corpus directory and embed all three sub-databases.

    The directory must contain ``architecture.txt``, ``file_contexts.txt``
    and ``allruns.txt``, each with at least one parsable chunk.

    Raises:
        EmptyCorpus: A sub-database document is missing or yields no chunks.
        ChunkParseError: A malformed block, unless ``skip_malformed``.
    """
    root = Path(corpus_root)
    if not root.is_dir():
        raise EmptyCorpus(f"corpus location {root} is not a readable directory")
    indices: dict[ChunkKind, RetrievalIndex] = {}
    for kind, name in DB_FILES.items():
        doc = root / name
        if not doc.is_file():
            raise EmptyCorpus(f"corpus is missing the {kind.value} document {doc}")
        chunks = parse_chunk_stream(
            doc.read_text(encoding="utf-8"), kind, source=str(doc), skip_malformed=skip_malformed
        )
        if not chunks:
            raise EmptyCorpus(f"{doc} contains no parsable {kind.value} chunks")
        indices[kind] = RetrievalIndex.from_chunks(kind, chunks, embedder)
        logger.info("indexed %d %s chunks from %s", len(chunks), kind.value, doc)
    return indices


def save_indices(indices: dict[ChunkKind, RetrievalIndex], db_dir: str | Path) -> None:
    """Persist indices: chunk documents plus vector sidecars."""
    out = Path(db_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for kind, index in indices.items():
            doc_path = out / DB_FILES[kind]
            doc_path.write_text(serialize_chunks(index.chunks), encoding="utf-8")
            sidecar = {
                "embedder": index.embedder_identity,
                "dimension": index.dimension,
                "vectors": {c.id: index.vector_for(c.id).tolist() for c in index.chunks},
            }
            sidecar_path = doc_path.with_suffix(".vectors.json")
            sidecar_path.write_text(
                json.dumps(sidecar, indent=1, sort_keys=True), encoding="utf-8"
            )
    except OSError as exc:
        raise IoFailure(f"cannot write database under {out}: {exc}") from exc


def load_indices(
    db_dir: str | Path, embedder: Embedder
) -> dict[ChunkKind, RetrievalIndex]:
    """Load persisted indices without re-embedding anything.

    Raises:
        EmptyCorpus: The directory lacks a sub-database document.
        EmbedderMismatch: A sidecar was written by a different embedder.
        ConfigError: A sidecar is missing, unreadable, or incomplete.
    """
    root = Path(db_dir)
    indices: dict[ChunkKind, RetrievalIndex] = {}
    for kind, name in DB_FILES.items():
        doc_path = root / name
        if not doc_path.is_file():
            raise EmptyCorpus(f"database is missing the {kind.value} document {doc_path}")
        chunks = parse_chunk_stream(
            doc_path.read_text(encoding="utf-8"), kind, source=str(doc_path)
        )
        sidecar_path = doc_path.with_suffix(".vectors.json")
        if not sidecar_path.is_file():
            raise ConfigError(f"missing vector sidecar {sidecar_path}")
        try:
            sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"corrupt vector sidecar {sidecar_path}: {exc}") from exc
        identity = sidecar.get("embedder")
        if identity != embedder.identity:
            raise EmbedderMismatch(
                f"{sidecar_path} was embedded with {identity!r}, "
                f"configured embedder is {embedder.identity!r}"
            )
        vectors = {
            cid: np.asarray(values, dtype=np.float64)
            for cid, values in sidecar.get("vectors", {}).items()
        }
        indices[kind] = RetrievalIndex(
            kind, chunks, vectors, identity, int(sidecar.get("dimension", embedder.dimension))
        )
    return indices
