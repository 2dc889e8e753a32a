"""Command line front-end.

Subcommands wire the library into reproducible batch experiments:
induce, privatize, calibrate, eval-pairs, eval-context, stats. All
randomness flows from --seed; identical config and seed produce
byte-identical output files regardless of --threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from typing import Optional

import numpy as np

from sensepriv.calibration import (
    estimate_proxies,
    save_report_csv,
    save_summary_csv,
    select_epsilon,
)
from sensepriv.disambig import DEFAULT_WINDOW
from sensepriv.embeddings import EmbeddingStore, load_embedding
from sensepriv.errors import SensePrivError
from sensepriv.evaluation import (
    ContextPairDataset,
    WordPairDataset,
    eval_context_pairs,
    eval_word_pairs,
)
from sensepriv.mechanism import Mode, NoiseSpec, privatize_text
from sensepriv.seeding import DOMAIN_QUERY_SAMPLE, substream
from sensepriv.senses import InductionParams, SenseInventory, induce_inventory, within_sense_distance_stats

REQUIRE_SEED_ENV = "SENSEPRIV_REQUIRE_SEED"


class ConfigError(Exception):
    pass


def _parse_epsilon(raw: str) -> float:
    if raw.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"epsilon must be a number or 'inf', got {raw!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"epsilon must be positive, got {raw!r}")
    return value


def _parse_grid(raw: str) -> list[float]:
    grid = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        grid.append(_parse_epsilon(part))
    if not grid:
        raise argparse.ArgumentTypeError("empty epsilon grid")
    return grid


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensepriv",
        description="Context-aware text privatization with metric differential privacy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, inventory: bool = True):
        p.add_argument("--embedding", required=True, help="word2vec-text vector file")
        p.add_argument("--dim", type=int, default=None, help="expected vector dimension")
        p.add_argument("--seed", type=int, default=None, help="master RNG seed")
        p.add_argument("--threads", type=int, default=1, help="worker thread count")
        if inventory:
            p.add_argument("--inventory", default=None, help="sense inventory JSONL")
            p.add_argument("--mode", choices=["word", "sense"], required=True)

    p = sub.add_parser("induce", help="build a sense inventory from an embedding")
    common(p, inventory=False)
    p.add_argument("--output", required=True, help="inventory JSONL path")
    p.add_argument("--neighbors", type=int, default=200, help="ego network size")
    p.add_argument("--edge-top-k", type=int, default=10, help="edges kept per node")
    p.add_argument("--iterations", type=int, default=20, help="clustering rounds")
    p.add_argument("--min-cluster-size", type=int, default=5)

    p = sub.add_parser("privatize", help="privatize a whitespace-tokenized corpus")
    common(p)
    p.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p.add_argument("--input", required=True, help="text file, one document per line")
    p.add_argument("--output", required=True, help="privatized text path")
    p.add_argument("--records", default=None, help="records JSONL path (default: <output>.records.jsonl)")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)

    p = sub.add_parser("calibrate", help="estimate deniability proxies and select a budget")
    common(p)
    p.add_argument("--grid", type=_parse_grid, required=True, help="comma-separated epsilon grid")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--num-queries", type=int, default=100, help="query words sampled from the vocabulary")
    p.add_argument("--query-words", default=None, help="file with one query word per line")
    p.add_argument("--query-corpus", default=None, help="sample query words by corpus frequency")
    p.add_argument("--quantile", type=float, default=0.90)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--output", required=True, help="per-word proxy CSV")
    p.add_argument("--summary", default=None, help="per-epsilon summary CSV")

    p = sub.add_parser("eval-pairs", help="word-pair similarity correlation after privatization")
    common(p)
    p.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p.add_argument("--dataset", required=True, help="TSV: word1, word2, score")
    p.add_argument("--queries", type=int, default=25)
    p.add_argument("--reference", default=None, help="reference vector file for measuring similarity")
    p.add_argument("--output", required=True, help="per-pair CSV")
    p.add_argument("--verbose", action="store_true", help="also write <output>.queries.jsonl")

    p = sub.add_parser("eval-context", help="same- vs different-context substitution similarity")
    common(p)
    p.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p.add_argument("--dataset", required=True, help="TSV: word1, word2, context1, context2, label")
    p.add_argument("--queries", type=int, default=25)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--reference", default=None, help="reference vector file for measuring similarity")
    p.add_argument("--output", required=True, help="per-row CSV")
    p.add_argument("--verbose", action="store_true", help="also write <output>.queries.jsonl")

    p = sub.add_parser("stats", help="within-sense distance table for an inventory")
    common(p, inventory=False)
    p.add_argument("--inventory", required=True)
    p.add_argument("--sample", type=int, default=None, help="vocabulary sample for the baseline")
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")

    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    if os.environ.get(REQUIRE_SEED_ENV) == "1":
        raise ConfigError(f"--seed is required when {REQUIRE_SEED_ENV}=1")
    seed = time.time_ns() & ((1 << 63) - 1)
    print(f"seed={seed}", file=sys.stderr)
    return seed


def _load_store(args) -> EmbeddingStore:
    return load_embedding(args.embedding, expected_dim=args.dim)


def _load_mode_deps(args, store) -> tuple[Mode, Optional[SenseInventory]]:
    mode = Mode(args.mode)
    inventory = None
    if args.inventory is not None:
        inventory = SenseInventory.load(args.inventory)
    if mode is Mode.SENSE and inventory is None:
        raise ConfigError("sense mode requires --inventory")
    return mode, inventory


def _check_positive(args, *names: str):
    for name in names:
        value = getattr(args, name.replace("-", "_"))
        if value is not None and value < 1:
            raise ConfigError(f"--{name} must be positive, got {value}")


def _cmd_induce(args) -> int:
    _check_positive(args, "neighbors", "edge-top-k", "iterations", "min-cluster-size", "threads")
    seed = _resolve_seed(args)
    store = _load_store(args)
    params = InductionParams(
        neighborhood_size=args.neighbors,
        edge_top_k=args.edge_top_k,
        cw_iterations=args.iterations,
        min_cluster_size=args.min_cluster_size,
        seed=seed,
    )
    inventory = induce_inventory(store, params, threads=args.threads)
    inventory.save(args.output)
    print(f"words={len(inventory)} senses={sum(inventory.num_senses(w) for w in inventory.words())}")
    return 0


def _cmd_privatize(args) -> int:
    _check_positive(args, "window", "threads")
    seed = _resolve_seed(args)
    store = _load_store(args)
    mode, inventory = _load_mode_deps(args, store)
    spec = NoiseSpec(epsilon=args.epsilon, dim=store.dim)
    records_path = args.records if args.records is not None else args.output + ".records.jsonl"
    with open(args.input, encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    offset = 0
    out_lines = []
    all_records = []
    for line in lines:
        tokens = line.split()
        records = privatize_text(
            tokens,
            mode,
            spec,
            store,
            inventory,
            seed=seed,
            base_index=offset,
            window=args.window,
            threads=args.threads,
        )
        offset += len(tokens)
        out_lines.append(" ".join(r.substitute for r in records))
        all_records.extend(records)
    with open(args.output, "w", encoding="utf-8", newline="") as f:
        for line in out_lines:
            f.write(line + "\n")
    with open(records_path, "w", encoding="utf-8", newline="") as f:
        for rec in all_records:
            f.write(json.dumps(rec.to_wire(), ensure_ascii=False) + "\n")
    oov = sum(r.oov for r in all_records)
    print(f"tokens={len(all_records)} oov={oov}")
    return 0


def _select_query_words(args, store, seed) -> list[str]:
    if args.query_words is not None:
        with open(args.query_words, encoding="utf-8") as f:
            words = [line.strip() for line in f if line.strip()]
        if not words:
            raise ConfigError(f"no query words in {args.query_words}")
        return words
    _check_positive(args, "num-queries")
    if args.num_queries > len(store):
        raise ConfigError(
            f"--num-queries {args.num_queries} exceeds vocabulary size {len(store)}"
        )
    rng = substream(seed, DOMAIN_QUERY_SAMPLE)
    if args.query_corpus is not None:
        counts: dict[str, int] = {}
        with open(args.query_corpus, encoding="utf-8") as f:
            for line in f:
                for token in line.split():
                    if token in store:
                        counts[token] = counts.get(token, 0) + 1
        if len(counts) < args.num_queries:
            raise ConfigError(
                f"corpus holds {len(counts)} in-vocabulary word types, need {args.num_queries}"
            )
        words = sorted(counts)
        weights = np.asarray([counts[w] for w in words], dtype=np.float64)
        chosen = rng.choice(len(words), size=args.num_queries, replace=False, p=weights / weights.sum())
        return [words[i] for i in chosen]
    chosen = rng.choice(len(store), size=args.num_queries, replace=False)
    return [store.tokens[i] for i in chosen]


def _cmd_calibrate(args) -> int:
    _check_positive(args, "runs", "threads")
    if not 0.0 <= args.quantile <= 1.0:
        raise ConfigError(f"--quantile must lie in [0, 1], got {args.quantile}")
    seed = _resolve_seed(args)
    store = _load_store(args)
    mode, inventory = _load_mode_deps(args, store)
    words = _select_query_words(args, store, seed)
    report = estimate_proxies(
        store,
        inventory,
        mode,
        words,
        args.grid,
        runs=args.runs,
        seed=seed,
        threads=args.threads,
    )
    save_report_csv(report, args.output)
    if args.summary is not None:
        save_summary_csv(
            report,
            args.summary,
            quantile_level=args.quantile,
            self_threshold=args.threshold,
            distinct_threshold=args.threshold,
        )
    selected = select_epsilon(
        report,
        quantile_level=args.quantile,
        self_threshold=args.threshold,
        distinct_threshold=args.threshold,
    )
    print(f"selected_epsilon={_fmt(selected)}")
    return 0


def _cmd_eval_pairs(args) -> int:
    _check_positive(args, "queries", "threads")
    seed = _resolve_seed(args)
    store = _load_store(args)
    mode, inventory = _load_mode_deps(args, store)
    reference = load_embedding(args.reference) if args.reference is not None else None
    dataset = WordPairDataset.load(args.dataset)
    result = eval_word_pairs(
        dataset,
        store,
        inventory,
        mode,
        NoiseSpec(epsilon=args.epsilon, dim=store.dim),
        queries=args.queries,
        seed=seed,
        reference=reference,
        threads=args.threads,
        collect_queries=args.verbose,
    )
    with open(args.output, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["word1", "word2", "gold", "mean_similarity", "samples"])
        for p in result.pairs:
            w.writerow([p.word1, p.word2, _fmt(p.gold), _fmt(p.mean_similarity), p.samples])
    if args.verbose:
        with open(args.output + ".queries.jsonl", "w", encoding="utf-8", newline="") as f:
            for rec in result.query_records:
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(
        f"spearman={_fmt(result.spearman)} pairs={len(result.pairs)} "
        f"skipped={result.skipped_rows} unmeasured={result.unmeasured_queries}"
    )
    return 0


def _cmd_eval_context(args) -> int:
    _check_positive(args, "queries", "window", "threads")
    seed = _resolve_seed(args)
    store = _load_store(args)
    mode, inventory = _load_mode_deps(args, store)
    reference = load_embedding(args.reference) if args.reference is not None else None
    dataset = ContextPairDataset.load(args.dataset)
    result = eval_context_pairs(
        dataset,
        store,
        inventory,
        mode,
        NoiseSpec(epsilon=args.epsilon, dim=store.dim),
        queries=args.queries,
        seed=seed,
        window=args.window,
        reference=reference,
        threads=args.threads,
        collect_queries=args.verbose,
    )
    with open(args.output, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["word1", "word2", "label", "mean_similarity", "samples", "excluded"])
        for r in result.row_scores:
            w.writerow(
                [
                    r.word1,
                    r.word2,
                    "T" if r.same_meaning else "F",
                    _fmt(r.mean_similarity),
                    r.samples,
                    r.excluded,
                ]
            )
    if args.verbose:
        with open(args.output + ".queries.jsonl", "w", encoding="utf-8", newline="") as f:
            for rec in result.query_records:
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(
        f"mean_same={_fmt(result.mean_same)} mean_diff={_fmt(result.mean_diff)} "
        f"excluded={result.excluded} skipped={result.skipped_rows}"
    )
    return 0


def _cmd_stats(args) -> int:
    if args.sample is not None and args.sample < 2:
        raise ConfigError(f"--sample must be at least 2, got {args.sample}")
    seed = _resolve_seed(args)
    store = _load_store(args)
    inventory = SenseInventory.load(args.inventory)
    stats = within_sense_distance_stats(inventory, store, sample_size=args.sample, seed=seed)
    rows = [["num_senses", "word_count", "mean_within_distance"]] + [
        [str(n), str(c), _fmt(d)] for n, c, d in stats.rows
    ]
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerows(rows)
    else:
        for row in rows:
            print(",".join(row))
    print(f"baseline_mean_distance={_fmt(stats.baseline)}")
    return 0


_COMMANDS = {
    "induce": _cmd_induce,
    "privatize": _cmd_privatize,
    "calibrate": _cmd_calibrate,
    "eval-pairs": _cmd_eval_pairs,
    "eval-context": _cmd_eval_context,
    "stats": _cmd_stats,
}


def run(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"ERROR ConfigError: {exc}", file=sys.stderr)
        return 2
    except SensePrivError as exc:
        print(f"ERROR {exc.kind}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
