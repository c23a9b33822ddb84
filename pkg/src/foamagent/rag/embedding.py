"""Deterministic local text embedding.

Retrieval must behave identically across processes, machines, and test
runs, so the default embedder is a hashed bag of tokens: each token is
mapped to a bucket of a fixed-dimension vector by a keyed blake2b hash
(never Python's salted ``hash``), with one hash bit choosing the sign to
keep collisions unbiased.  Vectors are L2-normalized.

Tokens are lowercase runs of letters or digits, split at camelCase and
letter/digit boundaries, so "pitzDaily" and "pitz daily" (or "Grid 32^3"
and "32 32 32") land on the same buckets.  That is what lets a plain
natural-language requirement find the matching tutorial case header.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol

import numpy as np

from foamagent.errors import (
    DimensionMismatch,
    EmbedderFailure,
    EmptyText,
    ZeroVector,
)

DEFAULT_DIMENSION = 256

_WORD_RE = re.compile(r"[A-Za-z0-9]+")
_SUBTOKEN_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


def tokenize(text: str) -> list[str]:
    """Split text into lowercase hash-ready tokens."""
    tokens: list[str] = []
    for run in _WORD_RE.findall(text):
        tokens.extend(sub.lower() for sub in _SUBTOKEN_RE.findall(run))
    return tokens


class Embedder(Protocol):
    """Anything that turns text into a fixed-dimension unit vector."""

    @property
    def identity(self) -> str: ...

    @property
    def dimension(self) -> int: ...

    def embed(self, text: str) -> np.ndarray: ...


class HashedTokenEmbedder:
    """The default embedder: hashed bag of tokens, unit norm.

    The ``identity`` string is persisted next to every vector sidecar;
    loading an index re-checks it, so vectors can never silently be
    compared against vectors from a different embedding scheme.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self._dimension = dimension

    @property
    def identity(self) -> str:
        return f"hashed-bow-v1-d{self._dimension}"

    @property
    def dimension(self) -> int:
        return self._dimension

    def embed(self, text: str) -> np.ndarray:
        """Embed text into a unit vector.

        Raises:
            EmptyText: No tokens survive tokenization.
            EmbedderFailure: Signed counts cancelled to a zero vector
                (astronomically unlikely outside adversarial input).
        """
        tokens = tokenize(text)
        if not tokens:
            raise EmptyText("cannot embed empty or tokenless text")
        vec = np.zeros(self._dimension, dtype=np.float64)
        for token in tokens:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            value = int.from_bytes(digest, "big")
            bucket = value % self._dimension
            sign = 1.0 if value >> 63 else -1.0
            vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise EmbedderFailure("token signs cancelled; cannot normalize")
        return vec / norm


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Raises:
        DimensionMismatch: Vectors differ in length.
        ZeroVector: Either vector has zero norm.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return max(-1.0, min(1.0, value))
