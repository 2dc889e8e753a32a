"""Benchmark the numba kernels against the pure-numpy fallback.

Imports both backend modules directly, checks they agree on every
kernel, then reports best-of-N wall times and the speedup ratio.

    python3 benchmarks/bench_kernels.py --size 20000 --dim 300
"""

import argparse
import time

import numpy as np

from sensepriv.kernels import _numba, _numpy


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def random_graph(rng, nodes, degree):
    """Symmetric CSR adjacency with uniform weights."""
    neighbors = [set() for _ in range(nodes)]
    for u in range(nodes):
        for v in rng.choice(nodes, size=degree, replace=False):
            v = int(v)
            if v != u:
                neighbors[u].add(v)
                neighbors[v].add(u)
    indptr = np.zeros(nodes + 1, dtype=np.int64)
    indices = []
    for u in range(nodes):
        adj = sorted(neighbors[u])
        indptr[u + 1] = indptr[u] + len(adj)
        indices.extend(adj)
    indices = np.asarray(indices, dtype=np.int64)
    weights = rng.uniform(0.1, 1.0, size=indices.shape[0])
    return indptr, indices, weights


def check_agreement(name, got_np, got_nb):
    a = np.asarray(got_np)
    b = np.asarray(got_nb)
    if a.dtype.kind in "iu":
        np.testing.assert_array_equal(a, b, err_msg=name)
    else:
        np.testing.assert_allclose(a, b, rtol=1e-9, err_msg=name)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=20_000, help="vocabulary rows")
    parser.add_argument("--dim", type=int, default=300, help="vector dimension")
    parser.add_argument("--queries", type=int, default=256, help="projection queries")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, best kept")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    matrix = rng.normal(size=(args.size, args.dim))
    rank = rng.permutation(args.size).astype(np.int64)
    queries = rng.normal(size=(args.queries, args.dim))
    indptr, indices, weights = random_graph(rng, 2000, 8)
    order = rng.permutation(2000).astype(np.int64)
    sample = np.ascontiguousarray(matrix[:1000])

    def run_cw(backend):
        labels = np.arange(2000, dtype=np.int64)
        backend.cw_round(indptr, indices, weights, labels, order)
        return labels

    cases = [
        ("batch_project", lambda be: be.batch_project(matrix, queries, rank)),
        ("sq_dists", lambda be: be.sq_dists(matrix, queries[0])),
        ("cw_round", run_cw),
        ("mean_pairwise_dist", lambda be: be.mean_pairwise_dist(sample)),
    ]

    print(f"size={args.size} dim={args.dim} queries={args.queries} repeats={args.repeats}")
    print(f"{'kernel':<20} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for name, call in cases:
        got_np = call(_numpy)
        got_nb = call(_numba)  # first call also triggers JIT compilation
        check_agreement(name, got_np, got_nb)
        t_np = best_time(lambda: call(_numpy), args.repeats)
        t_nb = best_time(lambda: call(_numba), args.repeats)
        print(f"{name:<20} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>8.2f}x")


if __name__ == "__main__":
    main()
