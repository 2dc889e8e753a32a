"""Sense inventory induction by ego-network clustering.

Each word's nearest-neighbor subgraph is clustered with Chinese Whispers
label propagation; each surviving cluster is pooled into one sense vector
weighted by cosine similarity to the ego word. Words whose neighborhoods
yield no cluster keep a single fallback sense equal to their own vector,
so the inventory always covers the full vocabulary.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from sensepriv import kernels
from sensepriv.embeddings import EmbeddingStore, mean_pairwise_distance
from sensepriv.errors import UnknownWord
from sensepriv.seeding import DOMAIN_INDUCE, derive_seed


@dataclass
class InductionParams:
    neighborhood_size: int = 200
    edge_top_k: int = 10
    cw_iterations: int = 20
    min_cluster_size: int = 5
    seed: int = 0

    def __post_init__(self):
        for name in ("neighborhood_size", "edge_top_k", "cw_iterations", "min_cluster_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.edge_top_k > self.neighborhood_size:
            raise ValueError("edge_top_k cannot exceed neighborhood_size")


@dataclass
class EgoNetwork:
    """Weighted undirected graph over one word's nearest neighbors."""

    ego: str
    nodes: list[str]
    edges: list[tuple[str, str, float]]


@dataclass
class SenseEntry:
    sense_id: str
    vector: np.ndarray
    members: list[tuple[str, float]]


class SenseInventory:
    """Per-word ordered sense lists; sense k of a word has id "word#k"."""

    def __init__(self, entries: dict[str, list[SenseEntry]]):
        if not entries:
            raise ValueError("inventory has no entries")
        seen_ids: set[str] = set()
        for word, senses in entries.items():
            if not senses:
                raise ValueError(f"word {word!r} has no senses")
            for k, sense in enumerate(senses):
                if sense.sense_id != f"{word}#{k}":
                    raise ValueError(
                        f"sense ids for {word!r} must be consecutive, got {sense.sense_id!r}"
                    )
                if sense.sense_id in seen_ids:
                    raise ValueError(f"duplicate sense id {sense.sense_id!r}")
                seen_ids.add(sense.sense_id)
        self.entries = entries
        self._projection: Optional[_ProjectionIndex] = None

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def words(self) -> list[str]:
        return list(self.entries)

    def senses(self, word: str) -> list[SenseEntry]:
        try:
            return self.entries[word]
        except KeyError:
            raise UnknownWord(word) from None

    def num_senses(self, word: str) -> int:
        return len(self.senses(word))

    def projection_index(self) -> "_ProjectionIndex":
        """Flattened view over every sense vector, for nearest-sense search."""
        if self._projection is None:
            ids: list[str] = []
            words: list[str] = []
            vectors: list[np.ndarray] = []
            for word, senses in self.entries.items():
                for sense in senses:
                    ids.append(sense.sense_id)
                    words.append(word)
                    vectors.append(sense.vector)
            matrix = np.ascontiguousarray(np.asarray(vectors, dtype=np.float64))
            order = sorted(range(len(ids)), key=lambda i: ids[i])
            rank = np.empty(len(ids), dtype=np.int64)
            for pos, i in enumerate(order):
                rank[i] = pos
            self._projection = _ProjectionIndex(ids, words, matrix, rank)
        return self._projection

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for word, senses in self.entries.items():
                for sense in senses:
                    record = {
                        "word": word,
                        "sense_id": sense.sense_id,
                        "vector": [float(x) for x in sense.vector],
                        "members": [[t, float(w)] for t, w in sense.members],
                    }
                    handle.write(json.dumps(record) + "\n")

    @classmethod
    def load(cls, path: str) -> "SenseInventory":
        entries: dict[str, list[SenseEntry]] = {}
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                sense = SenseEntry(
                    sense_id=record["sense_id"],
                    vector=np.asarray(record["vector"], dtype=np.float64),
                    members=[(t, float(w)) for t, w in record["members"]],
                )
                entries.setdefault(record["word"], []).append(sense)
        return cls(entries)


@dataclass
class _ProjectionIndex:
    ids: list[str]
    words: list[str]
    matrix: np.ndarray
    rank: np.ndarray


def build_ego_network(store: EmbeddingStore, word: str, params: InductionParams) -> EgoNetwork:
    """Graph over the word's nearest neighbors by cosine similarity.

    An edge joins u and v iff either is among the other's edge_top_k most
    similar nodes inside the neighborhood; its weight is their cosine.
    """
    wi = store.row(word)
    sims = store._unit @ store._unit[wi]
    n_nodes = min(params.neighborhood_size, len(store) - 1)
    if n_nodes == 0:
        return EgoNetwork(ego=word, nodes=[], edges=[])
    order = np.lexsort((store._rank, -sims))
    node_rows = [int(i) for i in order if i != wi][:n_nodes]
    nodes = [store.tokens[i] for i in node_rows]

    sub_unit = store._unit[node_rows]
    sim = sub_unit @ sub_unit.T
    sub_rank = np.asarray([store._rank[i] for i in node_rows], dtype=np.int64)

    k = min(params.edge_top_k, n_nodes - 1)
    directed: set[tuple[int, int]] = set()
    if k > 0:
        for a in range(n_nodes):
            row = sim[a].copy()
            row[a] = -np.inf
            top = np.lexsort((sub_rank, -row))[:k]
            for b in top:
                directed.add((min(a, int(b)), max(a, int(b))))

    edges = [
        (nodes[a], nodes[b], float(sim[a, b]))
        for a, b in sorted(directed)
    ]
    return EgoNetwork(ego=word, nodes=nodes, edges=edges)


def chinese_whispers(graph: EgoNetwork, iterations: int, seed: int) -> dict[str, int]:
    """Label propagation over the graph; deterministic given the seed.

    Nodes start with unique labels; each round visits nodes in a fresh
    seeded shuffle and each adopts the label carrying the most incident
    edge weight among its neighbors (ties: smallest label). Stops early
    once a full round changes nothing.
    """
    n = len(graph.nodes)
    if n == 0:
        return {}
    pos = {t: i for i, t in enumerate(graph.nodes)}

    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, w in graph.edges:
        a, b = pos[u], pos[v]
        adj[a].append((b, w))
        adj[b].append((a, w))

    indptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        indptr[i + 1] = indptr[i] + len(adj[i])
    indices = np.empty(indptr[-1], dtype=np.int64)
    weights = np.empty(indptr[-1], dtype=np.float64)
    cursor = 0
    for i in range(n):
        for j, w in adj[i]:
            indices[cursor] = j
            weights[cursor] = w
            cursor += 1

    labels = np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    for _ in range(iterations):
        visit = rng.permutation(n).astype(np.int64)
        changed = kernels.cw_round(indptr, indices, weights, labels, visit)
        if changed == 0:
            break
    return {graph.nodes[i]: int(labels[i]) for i in range(n)}


def pool_sense_vector(
    store: EmbeddingStore, ego: str, members: Sequence[str]
) -> tuple[np.ndarray, list[float]]:
    """Pooled vector for a member cluster, weighted by cosine to the ego word.

    Negative cosines are clamped to zero for pooling; if everything clamps
    the plain mean is used instead. Returns the vector and the raw cosine
    weight of each member.
    """
    if not members:
        raise ValueError("members must be non-empty")
    ego_row = store.row(ego)
    rows = [store.row(m) for m in members]
    cosines = [float(store._unit[r] @ store._unit[ego_row]) for r in rows]
    clamped = np.asarray([max(0.0, c) for c in cosines])
    vectors = store.matrix[rows]
    total = clamped.sum()
    if total == 0.0:
        pooled = vectors.mean(axis=0)
    else:
        pooled = (clamped[:, None] * vectors).sum(axis=0) / total
    return pooled, cosines


def induce_inventory(
    store: EmbeddingStore, params: InductionParams, threads: int = 1
) -> SenseInventory:
    """Cluster every word's ego network into senses and pool their vectors.

    Sense ids are assigned per word in order of descending cluster size
    (ties: smallest member token). Words with no surviving cluster get a
    fallback sense holding their own vector and no members.
    """

    def senses_for(wi: int) -> list[SenseEntry]:
        word = store.tokens[wi]
        network = build_ego_network(store, word, params)
        clusters: list[list[str]] = []
        if network.nodes:
            labels = chinese_whispers(
                network, params.cw_iterations, derive_seed(params.seed, DOMAIN_INDUCE, wi)
            )
            by_label: dict[int, list[str]] = {}
            for node, label in labels.items():
                by_label.setdefault(label, []).append(node)
            clusters = [
                sorted(members)
                for members in by_label.values()
                if len(members) >= params.min_cluster_size
            ]
            clusters.sort(key=lambda c: (-len(c), c[0]))
        entries: list[SenseEntry] = []
        for k, cluster in enumerate(clusters):
            pooled, cosines = pool_sense_vector(store, word, cluster)
            entries.append(
                SenseEntry(
                    sense_id=f"{word}#{k}",
                    vector=pooled,
                    members=list(zip(cluster, cosines)),
                )
            )
        if not entries:
            entries.append(
                SenseEntry(sense_id=f"{word}#0", vector=store.lookup(word).copy(), members=[])
            )
        return entries

    indices = range(len(store))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(senses_for, indices))
    else:
        results = [senses_for(i) for i in indices]
    return SenseInventory({store.tokens[i]: results[i] for i in indices})


@dataclass
class WithinSenseStats:
    """Mean distance among each word's sense vectors, grouped by sense count."""

    rows: list[tuple[int, int, float]]  # (num_senses, word_count, mean_distance)
    baseline: float  # mean pairwise distance between sampled word vectors


def within_sense_distance_stats(
    inventory: SenseInventory,
    store: EmbeddingStore,
    sample_size: Optional[int] = None,
    seed: int = 0,
) -> WithinSenseStats:
    """Per-sense-count mean pairwise Euclidean distance, with a global baseline."""
    groups: dict[int, list[float]] = {}
    for word, senses in inventory.entries.items():
        if len(senses) < 2:
            continue
        matrix = np.ascontiguousarray(
            np.asarray([s.vector for s in senses], dtype=np.float64)
        )
        dist = float(kernels.mean_pairwise_dist(matrix))
        groups.setdefault(len(senses), []).append(dist)
    rows = [
        (count, len(values), float(np.mean(values)))
        for count, values in sorted(groups.items())
    ]
    if sample_size is None:
        sample_size = min(len(store), 1000)
    baseline = mean_pairwise_distance(store, sample_size, seed)
    return WithinSenseStats(rows=rows, baseline=baseline)
