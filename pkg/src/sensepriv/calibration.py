"""Plausible-deniability proxies and budget selection.

For a set of query words and a grid of budgets, the mechanism is run
repeatedly and two per-word statistics are recorded: the fraction of
runs that returned the word itself, and the number of distinct
substitutes divided by the number of runs. Budget selection then finds
the largest epsilon at which a high quantile of the first statistic and
the complementary quantile of the second both clear their thresholds,
interpolating between grid points linearly in log epsilon.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sensepriv.embeddings import EmbeddingStore
from sensepriv.errors import EmptyInput, NoFeasibleBudget, UnknownToken
from sensepriv.mechanism import Mode, NoiseSpec, privatize_word
from sensepriv.seeding import DOMAIN_PROXY, substream
from sensepriv.senses import SenseInventory


@dataclass
class ProxyReport:
    query_words: list[str]
    epsilon_grid: list[float]
    runs: int
    # (word, epsilon) -> (self-substitution rate, distinct-substitute rate)
    per_word: dict = field(default_factory=dict)

    def self_rates(self, epsilon: float) -> list[float]:
        return [self.per_word[(w, epsilon)][0] for w in self.query_words]

    def distinct_rates(self, epsilon: float) -> list[float]:
        return [self.per_word[(w, epsilon)][1] for w in self.query_words]


def estimate_proxies(
    store: EmbeddingStore,
    inventory: Optional[SenseInventory],
    mode: Mode,
    query_words: Sequence[str],
    epsilon_grid: Sequence[float],
    runs: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> ProxyReport:
    """Monte Carlo estimates of both proxies over the full grid.

    Each (word, epsilon, run) triple draws from its own sub-stream, so
    the report is identical for any thread count.
    """
    words = list(query_words)
    grid = [float(e) for e in epsilon_grid]
    if not words:
        raise EmptyInput("no query words")
    if not grid:
        raise EmptyInput("empty epsilon grid")
    if runs < 1:
        raise ValueError(f"runs must be positive, got {runs}")
    vocab = inventory if mode is Mode.SENSE else store
    for w in words:
        if w not in vocab:
            raise UnknownToken(w)

    report = ProxyReport(query_words=words, epsilon_grid=grid, runs=runs)

    def cell(job: tuple[int, int]) -> tuple[int, int, float, float]:
        wi, ei = job
        word = words[wi]
        spec = NoiseSpec(epsilon=grid[ei], dim=store.dim)
        substitutes = []
        for r in range(runs):
            rng = substream(seed, DOMAIN_PROXY, wi, ei, r)
            rec = privatize_word(word, None, mode, spec, store, inventory, rng)
            substitutes.append(rec.substitute)
        self_rate = sum(s == word for s in substitutes) / runs
        distinct_rate = len(set(substitutes)) / runs
        return wi, ei, self_rate, distinct_rate

    jobs = [(wi, ei) for wi in range(len(words)) for ei in range(len(grid))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(cell, jobs))
    else:
        results = [cell(j) for j in jobs]
    for wi, ei, n_w, s_w in results:
        report.per_word[(words[wi], grid[ei])] = (n_w, s_w)
    return report


def quantile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile of a finite sample.

    With sorted values v_0..v_{n-1}, the q-quantile sits at fractional
    position h = (n-1)q and interpolates between the bracketing order
    statistics.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile level must lie in [0, 1], got {q}")
    v = sorted(float(x) for x in values)
    if not v:
        raise EmptyInput("quantile of empty sample")
    h = (len(v) - 1) * q
    lo = math.floor(h)
    hi = math.ceil(h)
    return v[lo] + (h - lo) * (v[hi] - v[lo])


def _interval_le(f0: float, f1: float, c: float) -> Optional[tuple[float, float]]:
    # {t in [0,1] : f0 + (f1-f0) t <= c}
    if f0 == f1:
        return (0.0, 1.0) if f0 <= c else None
    t = (c - f0) / (f1 - f0)
    if f1 > f0:
        return (0.0, min(1.0, t)) if t >= 0.0 else None
    return (max(0.0, t), 1.0) if t <= 1.0 else None


def _interval_ge(f0: float, f1: float, c: float) -> Optional[tuple[float, float]]:
    # {t in [0,1] : f0 + (f1-f0) t >= c}
    if f0 == f1:
        return (0.0, 1.0) if f0 >= c else None
    t = (c - f0) / (f1 - f0)
    if f1 < f0:
        return (0.0, min(1.0, t)) if t >= 0.0 else None
    return (max(0.0, t), 1.0) if t <= 1.0 else None


def select_epsilon(
    report: ProxyReport,
    quantile_level: float = 0.90,
    self_threshold: float = 0.5,
    distinct_threshold: float = 0.5,
) -> float:
    """Largest budget whose interpolated quantile curves are feasible.

    A(eps) is the quantile_level-quantile of the self-substitution rates
    and B(eps) the (1 - quantile_level)-quantile of the distinct-substitute
    rates; both are treated as piecewise-linear functions of log(eps).
    Feasible means A <= self_threshold and B >= distinct_threshold.
    Infinite grid points never qualify.
    """
    finite = sorted(e for e in set(report.epsilon_grid) if math.isfinite(e))
    if len(finite) < 2:
        raise ValueError("need at least two finite grid points to interpolate")
    a = [quantile(report.self_rates(e), quantile_level) for e in finite]
    b = [quantile(report.distinct_rates(e), 1.0 - quantile_level) for e in finite]
    xs = [math.log(e) for e in finite]
    for i in range(len(finite) - 2, -1, -1):
        ia = _interval_le(a[i], a[i + 1], self_threshold)
        ib = _interval_ge(b[i], b[i + 1], distinct_threshold)
        if ia is None or ib is None:
            continue
        lo = max(ia[0], ib[0])
        hi = min(ia[1], ib[1])
        if lo <= hi:
            return math.exp(xs[i] + hi * (xs[i + 1] - xs[i]))
    raise NoFeasibleBudget(
        f"no epsilon in [{finite[0]}, {finite[-1]}] satisfies both constraints"
    )


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def save_report_csv(report: ProxyReport, path: str) -> None:
    """Per-(word, epsilon) rows: word,epsilon,n_w,s_w."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["word", "epsilon", "n_w", "s_w"])
        for word in report.query_words:
            for eps in report.epsilon_grid:
                n_w, s_w = report.per_word[(word, eps)]
                w.writerow([word, _fmt(eps), _fmt(n_w), _fmt(s_w)])


def save_summary_csv(
    report: ProxyReport,
    path: str,
    quantile_level: float = 0.90,
    self_threshold: float = 0.5,
    distinct_threshold: float = 0.5,
) -> None:
    """Per-epsilon rows: epsilon,quantile_n_w,quantile_s_w,feasible,mean_n_w,mean_s_w.

    Feasibility is evaluated pointwise at each grid epsilon; infinite
    entries are never feasible. Means over the query words ride along for
    convergence diagnostics.
    """
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["epsilon", "quantile_n_w", "quantile_s_w", "feasible", "mean_n_w", "mean_s_w"])
        for eps in report.epsilon_grid:
            selfs = report.self_rates(eps)
            dists = report.distinct_rates(eps)
            qa = quantile(selfs, quantile_level)
            qb = quantile(dists, 1.0 - quantile_level)
            feasible = (
                math.isfinite(eps) and qa <= self_threshold and qb >= distinct_threshold
            )
            w.writerow(
                [
                    _fmt(eps),
                    _fmt(qa),
                    _fmt(qb),
                    "true" if feasible else "false",
                    _fmt(sum(selfs) / len(selfs)),
                    _fmt(sum(dists) / len(dists)),
                ]
            )
