"""Numba-compiled kernel implementations.

Same contracts as kernels._numpy; inner loops are explicit so numba can
compile them to machine code. Tie-sensitive accumulation follows the
same order as the numpy backend.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def sq_dists(matrix, query):
    n, d = matrix.shape
    out = np.empty(n)
    for j in range(n):
        s = 0.0
        for t in range(d):
            diff = matrix[j, t] - query[t]
            s += diff * diff
        out[j] = s
    return out


@njit(cache=True)
def argmin_tiebreak(dists, rank):
    n = dists.shape[0]
    best_j = 0
    best_d = dists[0]
    best_r = rank[0]
    for j in range(1, n):
        dj = dists[j]
        if dj < best_d or (dj == best_d and rank[j] < best_r):
            best_d = dj
            best_j = j
            best_r = rank[j]
    return best_j


@njit(cache=True)
def batch_project(matrix, queries, rank):
    m = queries.shape[0]
    n, d = matrix.shape
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        best_j = -1
        best_d = np.inf
        best_r = n
        for j in range(n):
            s = 0.0
            for t in range(d):
                diff = queries[i, t] - matrix[j, t]
                s += diff * diff
            if s < best_d or (s == best_d and rank[j] < best_r):
                best_d = s
                best_j = j
                best_r = rank[j]
        out[i] = best_j
    return out


@njit(cache=True)
def cw_round(indptr, indices, weights, labels, order):
    n = labels.shape[0]
    acc = np.zeros(n)
    seen = np.full(n, -1, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    changed = 0
    for step in range(order.shape[0]):
        u = order[step]
        start = indptr[u]
        end = indptr[u + 1]
        if end == start:
            continue
        tcount = 0
        for e in range(start, end):
            lab = labels[indices[e]]
            if seen[lab] != step:
                seen[lab] = step
                acc[lab] = 0.0
                touched[tcount] = lab
                tcount += 1
            acc[lab] += weights[e]
        best_lab = touched[0]
        best_w = acc[best_lab]
        for t in range(1, tcount):
            lab = touched[t]
            w = acc[lab]
            if w > best_w or (w == best_w and lab < best_lab):
                best_w = w
                best_lab = lab
        if best_lab != labels[u]:
            labels[u] = best_lab
            changed += 1
    return changed


@njit(cache=True)
def mean_pairwise_dist(matrix):
    n, d = matrix.shape
    total = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            s = 0.0
            for t in range(d):
                diff = matrix[i, t] - matrix[j, t]
                s += diff * diff
            total += np.sqrt(s)
    return total / (n * (n - 1) / 2)
