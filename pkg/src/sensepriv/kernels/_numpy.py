"""Pure-numpy kernel implementations.

Accumulation orders mirror the numba backend where selection decisions
depend on float equality (tie-breaking), so both backends pick the same
indices on the same inputs.
"""

import numpy as np

# soft cap on scratch elements per chunk in batch_project (~32 MB of f8)
_CHUNK_ELEMS = 1 << 22


def sq_dists(matrix, query):
    """Squared Euclidean distance from query to every row of matrix."""
    diff = matrix - query
    return (diff * diff).sum(axis=1)


def argmin_tiebreak(dists, rank):
    """Index of the smallest distance; exact ties resolved by smallest rank."""
    minval = dists.min()
    n = dists.shape[0]
    ranked = np.where(dists == minval, rank, n)
    return int(ranked.argmin())


def batch_project(matrix, queries, rank):
    """Row index of the nearest matrix row (squared Euclidean) per query.

    Ties broken by ascending rank. Chunked to bound scratch memory.
    """
    m = queries.shape[0]
    n, d = matrix.shape
    out = np.empty(m, dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMS // max(1, n * d))
    for start in range(0, m, chunk):
        q = queries[start : start + chunk]
        diff = q[:, None, :] - matrix[None, :, :]
        d2 = (diff * diff).sum(axis=2)
        minval = d2.min(axis=1, keepdims=True)
        ranked = np.where(d2 == minval, rank[None, :], n)
        out[start : start + chunk] = ranked.argmin(axis=1)
    return out


def cw_round(indptr, indices, weights, labels, order):
    """One label-propagation round, asynchronous, in visit order.

    Each visited node adopts the label with the largest total incident
    edge weight among its neighbors (ties: smallest label). Mutates
    `labels` in place; returns the number of nodes whose label changed.
    """
    n = labels.shape[0]
    changed = 0
    for u in order:
        start, end = indptr[u], indptr[u + 1]
        if end == start:
            continue
        neigh_labels = labels[indices[start:end]]
        # bincount accumulates in edge order, matching the numba loop bit-for-bit
        acc = np.bincount(neigh_labels, weights=weights[start:end], minlength=n)
        present = np.unique(neigh_labels)
        vals = acc[present]
        best = present[vals == vals.max()][0]
        if best != labels[u]:
            labels[u] = best
            changed += 1
    return changed


def mean_pairwise_dist(matrix):
    """Mean Euclidean distance over all unordered row pairs."""
    n = matrix.shape[0]
    total = 0.0
    for i in range(n - 1):
        diff = matrix[i + 1 :] - matrix[i]
        total += np.sqrt((diff * diff).sum(axis=1)).sum()
    return total / (n * (n - 1) / 2)
