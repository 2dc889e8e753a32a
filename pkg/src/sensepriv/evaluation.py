"""Utility evaluation of the privatization mechanism.

Two protocols: rank correlation of privatized word-pair similarities
against human gold scores, and the gap in substitution similarity
between same-meaning and different-meaning context pairs. Similarities
are always measured between the reference vectors of the substitutes,
never between noisy vectors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from sensepriv.disambig import DEFAULT_WINDOW, extract_window
from sensepriv.embeddings import EmbeddingStore, cosine_similarity
from sensepriv.errors import (
    DegenerateInput,
    EmptyDatasetAfterFiltering,
    LengthMismatch,
    MalformedLine,
)
from sensepriv.mechanism import Mode, NoiseSpec, privatize_word
from sensepriv.seeding import DOMAIN_EVAL_CONTEXT, DOMAIN_EVAL_PAIRS, substream
from sensepriv.senses import SenseInventory

SIMILARITY_ONE_TOL = 1e-9


@dataclass
class WordPairDataset:
    rows: list[tuple[str, str, float]]

    def __post_init__(self):
        for i, (w1, w2, score) in enumerate(self.rows):
            if not w1 or not w2:
                raise ValueError(f"row {i}: empty token")
            if not math.isfinite(score):
                raise ValueError(f"row {i}: non-finite gold score")

    @classmethod
    def load(cls, path: str) -> "WordPairDataset":
        rows = []
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise MalformedLine(line_no, f"expected 3 tab-separated fields, got {len(parts)}")
                w1, w2, raw = parts
                if not w1 or not w2:
                    raise MalformedLine(line_no, "empty token")
                try:
                    score = float(raw)
                except ValueError:
                    raise MalformedLine(line_no, f"unparseable score {raw!r}") from None
                if not math.isfinite(score):
                    raise MalformedLine(line_no, "non-finite score")
                rows.append((w1, w2, score))
        return cls(rows=rows)


@dataclass
class ContextPairRow:
    word1: str
    context1: list[str]
    word2: str
    context2: list[str]
    same_meaning: bool

    def __post_init__(self):
        # each word must occur in its own context
        if self.word1 not in self.context1:
            raise ValueError(f"{self.word1!r} does not occur in its context")
        if self.word2 not in self.context2:
            raise ValueError(f"{self.word2!r} does not occur in its context")


@dataclass
class ContextPairDataset:
    rows: list[ContextPairRow]

    @classmethod
    def load(cls, path: str) -> "ContextPairDataset":
        rows = []
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 5:
                    raise MalformedLine(line_no, f"expected 5 tab-separated fields, got {len(parts)}")
                w1, w2, ctx1, ctx2, label = parts
                if label not in ("T", "F"):
                    raise MalformedLine(line_no, f"label must be T or F, got {label!r}")
                try:
                    row = ContextPairRow(
                        word1=w1,
                        context1=ctx1.split(),
                        word2=w2,
                        context2=ctx2.split(),
                        same_meaning=label == "T",
                    )
                except ValueError as exc:
                    raise MalformedLine(line_no, str(exc)) from None
                rows.append(row)
        return cls(rows=rows)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation: Pearson correlation of average-fractional ranks."""
    if len(x) != len(y):
        raise LengthMismatch(len(x), len(y))
    if len(x) < 2:
        raise DegenerateInput(f"need at least 2 observations, got {len(x)}")
    rx = _average_ranks(np.asarray(x, dtype=np.float64))
    ry = _average_ranks(np.asarray(y, dtype=np.float64))
    rx -= rx.mean()
    ry -= ry.mean()
    vx = float(rx @ rx)
    vy = float(ry @ ry)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateInput("zero rank variance")
    return float((rx @ ry) / math.sqrt(vx * vy))


@dataclass
class PairScore:
    word1: str
    word2: str
    gold: float
    mean_similarity: float
    samples: int


@dataclass
class WordPairResult:
    spearman: float
    pairs: list[PairScore]
    skipped_rows: int
    unmeasured_queries: int
    query_records: Optional[list[dict]] = field(default=None, repr=False)


def eval_word_pairs(
    dataset: WordPairDataset,
    store: EmbeddingStore,
    inventory: Optional[SenseInventory],
    mode: Mode,
    spec: NoiseSpec,
    queries: int = 25,
    seed: int = 0,
    reference: Optional[EmbeddingStore] = None,
    threads: int = 1,
    collect_queries: bool = False,
) -> WordPairResult:
    """Privatize each pair `queries` times and correlate with gold scores.

    Both words of a pair are privatized without context (sense mode falls
    back to the dominant sense). Pairs with an out-of-vocabulary word are
    skipped and counted; queries whose substitute is missing from the
    reference store are dropped and counted separately. One RNG
    sub-stream per (row, query), consumed by both words in order.
    """
    if queries < 1:
        raise ValueError(f"queries must be positive, got {queries}")
    ref = reference if reference is not None else store
    vocab = inventory if mode is Mode.SENSE else store

    def one(ri: int) -> Optional[tuple[PairScore, int, list[dict]]]:
        w1, w2, gold = dataset.rows[ri]
        if w1 not in vocab or w2 not in vocab:
            return None
        sims = []
        unmeasured = 0
        records = []
        for qi in range(queries):
            rng = substream(seed, DOMAIN_EVAL_PAIRS, ri, qi)
            rec1 = privatize_word(w1, None, mode, spec, store, inventory, rng)
            rec2 = privatize_word(w2, None, mode, spec, store, inventory, rng)
            if rec1.substitute not in ref or rec2.substitute not in ref:
                unmeasured += 1
                continue
            sim = cosine_similarity(
                ref.matrix[ref.row(rec1.substitute)],
                ref.matrix[ref.row(rec2.substitute)],
            )
            sims.append(sim)
            if collect_queries:
                records.append(
                    {
                        "row": ri,
                        "query": qi,
                        "substitute1": rec1.substitute,
                        "substitute2": rec2.substitute,
                        "similarity": sim,
                    }
                )
        if not sims:
            return None
        score = PairScore(
            word1=w1,
            word2=w2,
            gold=gold,
            mean_similarity=float(np.mean(sims)),
            samples=len(sims),
        )
        return score, unmeasured, records

    indices = range(len(dataset.rows))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, indices))
    else:
        outcomes = [one(ri) for ri in indices]

    pairs = []
    unmeasured_total = 0
    all_records: list[dict] = []
    for outcome in outcomes:
        if outcome is None:
            continue
        score, unmeasured, records = outcome
        pairs.append(score)
        unmeasured_total += unmeasured
        all_records.extend(records)
    skipped = len(dataset.rows) - len(pairs)
    if len(pairs) < 2:
        raise EmptyDatasetAfterFiltering(
            f"{len(pairs)} usable pairs after filtering, need at least 2"
        )
    rho = spearman([p.mean_similarity for p in pairs], [p.gold for p in pairs])
    return WordPairResult(
        spearman=rho,
        pairs=pairs,
        skipped_rows=skipped,
        unmeasured_queries=unmeasured_total,
        query_records=all_records if collect_queries else None,
    )


@dataclass
class ContextRowScore:
    word1: str
    word2: str
    same_meaning: bool
    mean_similarity: float
    samples: int
    excluded: int


@dataclass
class ContextPairResult:
    mean_same: float
    mean_diff: float
    excluded: int
    same_similarities: np.ndarray
    diff_similarities: np.ndarray
    row_scores: list[ContextRowScore]
    skipped_rows: int
    unmeasured_queries: int
    query_records: Optional[list[dict]] = field(default=None, repr=False)


def eval_context_pairs(
    dataset: ContextPairDataset,
    store: EmbeddingStore,
    inventory: Optional[SenseInventory],
    mode: Mode,
    spec: NoiseSpec,
    queries: int = 25,
    seed: int = 0,
    window: int = DEFAULT_WINDOW,
    reference: Optional[EmbeddingStore] = None,
    threads: int = 1,
    collect_queries: bool = False,
) -> ContextPairResult:
    """Substitution similarity grouped by the same-meaning label.

    Each word is disambiguated against its own context. Samples whose
    substitutes have reference similarity equal to one (within 1e-9) are
    excluded, so identity substitutions carry no signal. Group means over
    the surviving samples; an empty group yields nan.
    """
    if queries < 1:
        raise ValueError(f"queries must be positive, got {queries}")
    ref = reference if reference is not None else store
    vocab = inventory if mode is Mode.SENSE else store

    def one(ri: int) -> Optional[tuple[ContextRowScore, int, list[float], list[dict]]]:
        row = dataset.rows[ri]
        if row.word1 not in vocab or row.word2 not in vocab:
            return None
        win1 = extract_window(row.context1, row.context1.index(row.word1), window)
        win2 = extract_window(row.context2, row.context2.index(row.word2), window)
        sims = []
        excluded = 0
        unmeasured = 0
        records = []
        for qi in range(queries):
            rng = substream(seed, DOMAIN_EVAL_CONTEXT, ri, qi)
            rec1 = privatize_word(row.word1, win1, mode, spec, store, inventory, rng)
            rec2 = privatize_word(row.word2, win2, mode, spec, store, inventory, rng)
            if rec1.substitute not in ref or rec2.substitute not in ref:
                unmeasured += 1
                continue
            sim = cosine_similarity(
                ref.matrix[ref.row(rec1.substitute)],
                ref.matrix[ref.row(rec2.substitute)],
            )
            dropped = abs(sim - 1.0) <= SIMILARITY_ONE_TOL
            if dropped:
                excluded += 1
            else:
                sims.append(sim)
            if collect_queries:
                records.append(
                    {
                        "row": ri,
                        "query": qi,
                        "substitute1": rec1.substitute,
                        "substitute2": rec2.substitute,
                        "similarity": sim,
                        "excluded": dropped,
                    }
                )
        score = ContextRowScore(
            word1=row.word1,
            word2=row.word2,
            same_meaning=row.same_meaning,
            mean_similarity=float(np.mean(sims)) if sims else math.nan,
            samples=len(sims),
            excluded=excluded,
        )
        return score, unmeasured, sims, records

    indices = range(len(dataset.rows))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, indices))
    else:
        outcomes = [one(ri) for ri in indices]

    row_scores = []
    same_sims: list[float] = []
    diff_sims: list[float] = []
    excluded_total = 0
    unmeasured_total = 0
    all_records: list[dict] = []
    for outcome in outcomes:
        if outcome is None:
            continue
        score, unmeasured, sims, records = outcome
        row_scores.append(score)
        excluded_total += score.excluded
        unmeasured_total += unmeasured
        (same_sims if score.same_meaning else diff_sims).extend(sims)
        all_records.extend(records)
    if not row_scores:
        raise EmptyDatasetAfterFiltering("no rows with in-vocabulary word pairs")
    return ContextPairResult(
        mean_same=float(np.mean(same_sims)) if same_sims else math.nan,
        mean_diff=float(np.mean(diff_sims)) if diff_sims else math.nan,
        excluded=excluded_total,
        same_similarities=np.asarray(same_sims, dtype=np.float64),
        diff_similarities=np.asarray(diff_sims, dtype=np.float64),
        row_scores=row_scores,
        skipped_rows=len(dataset.rows) - len(row_scores),
        unmeasured_queries=unmeasured_total,
        query_records=all_records if collect_queries else None,
    )
