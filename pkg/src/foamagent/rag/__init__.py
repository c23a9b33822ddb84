"""Tutorial retrieval: chunk grammar, embedding, and similarity indices."""

from foamagent.rag.chunks import (
    ChunkKind,
    TutorialChunk,
    chunk_id,
    make_architecture_chunk,
    make_file_chunk,
    parse_chunk_stream,
    serialize_chunk,
    serialize_chunks,
)
from foamagent.rag.embedding import (
    DEFAULT_DIMENSION,
    Embedder,
    HashedTokenEmbedder,
    cosine_similarity,
    tokenize,
)
from foamagent.rag.index import (
    DB_FILES,
    RetrievalHit,
    RetrievalIndex,
    build_index,
    load_indices,
    retrieve_similar,
    save_indices,
)

__all__ = [
    "ChunkKind",
    "TutorialChunk",
    "chunk_id",
    "make_architecture_chunk",
    "make_file_chunk",
    "parse_chunk_stream",
    "serialize_chunk",
    "serialize_chunks",
    "DEFAULT_DIMENSION",
    "Embedder",
    "HashedTokenEmbedder",
    "cosine_similarity",
    "tokenize",
    "DB_FILES",
    "RetrievalHit",
    "RetrievalIndex",
    "build_index",
    "load_indices",
    "retrieve_similar",
    "save_indices",
]
