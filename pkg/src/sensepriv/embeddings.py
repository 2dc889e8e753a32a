"""Immutable word-vector store, distance functions, and exact nearest-neighbor search.

The store is the shared geometry every other module operates on. Nearest
neighbors are always computed by exact linear scan; ties are broken by
ascending token string so results are fully reproducible.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from sensepriv import kernels
from sensepriv.errors import (
    DimensionMismatch,
    DuplicateToken,
    EmptyFile,
    EmptyStore,
    MalformedLine,
    SampleTooLarge,
    UnknownToken,
)


class DistanceMetric(Enum):
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


class EmbeddingStore:
    """Ordered token list plus a |V| x d float64 matrix, immutable after construction.

    Tokens are case-sensitive and must be unique, non-empty strings; every
    vector must be finite. Zero vectors are legal: cosine against them is
    0 by convention (distance 1), Euclidean needs no carve-out.
    """

    def __init__(self, tokens: Sequence[str], matrix: np.ndarray):
        tokens = list(tokens)
        matrix = np.array(matrix, dtype=np.float64, order="C", copy=True)
        if len(tokens) == 0:
            raise EmptyStore("no tokens")
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise DimensionMismatch(matrix.shape[0] if matrix.ndim == 2 else -1, len(tokens))
        for t in tokens:
            if not isinstance(t, str) or t == "":
                raise ValueError(f"invalid token {t!r}")
        if len(set(tokens)) != len(tokens):
            seen = set()
            for t in tokens:
                if t in seen:
                    raise DuplicateToken(t)
                seen.add(t)
        if not np.all(np.isfinite(matrix)):
            raise ValueError("non-finite vector component")
        norms = np.linalg.norm(matrix, axis=1)

        matrix.setflags(write=False)
        self.tokens = tokens
        self.matrix = matrix
        self.dim = matrix.shape[1]
        self._index = {t: i for i, t in enumerate(tokens)}
        # rank[i] = position of tokens[i] in ascending string order; used for ties
        order = sorted(range(len(tokens)), key=lambda i: tokens[i])
        rank = np.empty(len(tokens), dtype=np.int64)
        for pos, i in enumerate(order):
            rank[i] = pos
        self._rank = rank
        self._norms = norms
        # zero rows stay zero: cosine similarity 0 against everything
        safe = np.where(norms == 0.0, 1.0, norms)
        self._unit = matrix / safe[:, None]
        self._unit.setflags(write=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def row(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise UnknownToken(token) from None

    def lookup(self, token: str) -> np.ndarray:
        """Vector stored for token (read-only view)."""
        return self.matrix[self.row(token)]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Sequence[float]]]) -> "EmbeddingStore":
        pairs = list(pairs)
        if not pairs:
            raise EmptyStore("no tokens")
        tokens = [t for t, _ in pairs]
        matrix = np.asarray([np.asarray(v, dtype=np.float64) for _, v in pairs])
        return cls(tokens, matrix)


def load_embedding(path: str, expected_dim: Optional[int] = None) -> EmbeddingStore:
    """Read a word2vec-format text file into a validated store.

    Accepts an optional leading "<count> <dim>" header; every other line is
    a token followed by d float components, whitespace-separated, UTF-8.
    """
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: Optional[int] = expected_dim
    header: Optional[tuple[int, int]] = None

    line_no = 0
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                fields = line.split()
                if not fields:
                    continue
                if line_no == 1 and len(fields) == 2 and _is_int(fields[0]) and _is_int(fields[1]):
                    header = (int(fields[0]), int(fields[1]))
                    if expected_dim is not None and header[1] != expected_dim:
                        raise DimensionMismatch(header[1], expected_dim)
                    dim = header[1]
                    continue
                if len(fields) < 2:
                    raise MalformedLine(line_no, "expected a token and at least one component")
                token = fields[0]
                if token in seen:
                    raise DuplicateToken(token)
                try:
                    vec = np.asarray([float(f) for f in fields[1:]], dtype=np.float64)
                except ValueError:
                    raise MalformedLine(line_no, "unparseable vector component") from None
                if not np.all(np.isfinite(vec)):
                    raise MalformedLine(line_no, "non-finite vector component")
                if dim is None:
                    dim = vec.shape[0]
                elif vec.shape[0] != dim:
                    raise DimensionMismatch(vec.shape[0], dim)
                seen.add(token)
                tokens.append(token)
                rows.append(vec)
    except UnicodeDecodeError:
        raise MalformedLine(line_no + 1, "invalid UTF-8") from None

    if not tokens:
        raise EmptyFile(path)
    if header is not None and header[0] != len(tokens):
        raise MalformedLine(1, f"header declares {header[0]} rows, file has {len(tokens)}")
    return EmbeddingStore(tokens, np.asarray(rows))


def _is_int(field: str) -> bool:
    try:
        int(field)
    except ValueError:
        return False
    return True


def distance(
    store: EmbeddingStore, u: str, v: str, metric: DistanceMetric = DistanceMetric.EUCLIDEAN
) -> float:
    """Distance between two stored tokens under the chosen metric."""
    iu, iv = store.row(u), store.row(v)
    if metric is DistanceMetric.EUCLIDEAN:
        return float(np.linalg.norm(store.matrix[iu] - store.matrix[iv]))
    return float(1.0 - store._unit[iu] @ store._unit[iv])


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors; 0.0 if either is zero."""
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float((a @ b) / (na * nb))


def nearest(
    store: EmbeddingStore,
    query: np.ndarray,
    k: int,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
) -> list[tuple[str, float]]:
    """The k tokens closest to query, ascending by distance, ties by token string."""
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (store.dim,):
        raise DimensionMismatch(query.shape[0] if query.ndim == 1 else -1, store.dim)
    if k < 1 or k > len(store):
        raise ValueError(f"k must be in [1, {len(store)}], got {k}")
    if metric is DistanceMetric.EUCLIDEAN:
        d2 = kernels.sq_dists(store.matrix, query)
        order = np.lexsort((store._rank, d2))[:k]
        return [(store.tokens[i], float(np.sqrt(d2[i]))) for i in order]
    qn = np.linalg.norm(query)
    if qn == 0.0:
        dist = np.ones(len(store))
    else:
        dist = 1.0 - store._unit @ (query / qn)
    order = np.lexsort((store._rank, dist))[:k]
    return [(store.tokens[i], float(dist[i])) for i in order]


def mean_pairwise_distance(store: EmbeddingStore, sample_size: int, seed: int) -> float:
    """Mean Euclidean distance over all unordered pairs of a seeded uniform token sample."""
    if sample_size > len(store):
        raise SampleTooLarge(sample_size, len(store))
    if sample_size < 2:
        raise ValueError(f"sample_size must be >= 2, got {sample_size}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(store), size=sample_size, replace=False)
    return float(kernels.mean_pairwise_dist(np.ascontiguousarray(store.matrix[idx])))
