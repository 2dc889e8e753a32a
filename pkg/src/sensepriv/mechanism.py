"""The randomized substitution mechanism.

A token's vector (or its disambiguated sense vector) is perturbed with
noise whose density is proportional to exp(-epsilon * ||z||), then
projected back to the nearest discrete vector. In sense mode the
projection runs over every sense vector in the inventory and the chosen
sense's identifier is truncated, so the output is ordinary text either
way. The original vector always remains a projection candidate, which is
what makes the self-substitution rate a meaningful statistic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from sensepriv import kernels
from sensepriv.disambig import DEFAULT_WINDOW, ContextWindow, context_centroid, disambiguate, extract_window
from sensepriv.embeddings import EmbeddingStore
from sensepriv.errors import MissingInventory, UnknownToken
from sensepriv.seeding import DOMAIN_PRIVATIZE, substream
from sensepriv.senses import SenseInventory


class Mode(Enum):
    WORD = "word"
    SENSE = "sense"


@dataclass
class NoiseSpec:
    """Privacy budget per unit distance plus the embedding dimension.

    epsilon may be math.inf, which turns the mechanism into the identity
    perturbation (zero noise).
    """

    epsilon: float
    dim: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")


@dataclass
class PrivatizationRecord:
    input: str
    sense_id: Optional[str]
    substitute: str
    noisy_norm: float
    oov: bool = False

    def to_wire(self) -> dict:
        return {
            "input": self.input,
            "sense_id": self.sense_id,
            "substitute": self.substitute,
            "oov": self.oov,
        }


def sample_noise(spec: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    """One draw with density proportional to exp(-epsilon * ||z||).

    Sampled as a uniform direction (normalized Gaussian) scaled by a
    Gamma(shape=dim, scale=1/epsilon) radius; zero when epsilon is inf.
    """
    if math.isinf(spec.epsilon):
        return np.zeros(spec.dim)
    direction = rng.standard_normal(spec.dim)
    direction /= np.linalg.norm(direction)
    radius = rng.gamma(shape=spec.dim, scale=1.0 / spec.epsilon)
    return radius * direction


def sample_noise_batch(spec: NoiseSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """n independent draws, shape (n, dim). Uses the rng's bulk stream."""
    if math.isinf(spec.epsilon):
        return np.zeros((n, spec.dim))
    directions = rng.standard_normal((n, spec.dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.gamma(shape=spec.dim, scale=1.0 / spec.epsilon, size=n)
    return directions * radii[:, None]


def privatize_word(
    word: str,
    context: Optional[ContextWindow],
    mode: Mode,
    spec: NoiseSpec,
    store: EmbeddingStore,
    inventory: Optional[SenseInventory],
    rng: np.random.Generator,
) -> PrivatizationRecord:
    """Privatize a single token; context only matters in sense mode."""
    if mode is Mode.WORD:
        row = store.row(word)
        noise = sample_noise(spec, rng)
        noisy = store.matrix[row] + noise
        j = kernels.argmin_tiebreak(kernels.sq_dists(store.matrix, noisy), store._rank)
        return PrivatizationRecord(
            input=word,
            sense_id=None,
            substitute=store.tokens[j],
            noisy_norm=float(np.linalg.norm(noise)),
        )

    if inventory is None:
        raise MissingInventory("sense mode requires a sense inventory")
    if word not in inventory:
        raise UnknownToken(word)
    centroid = context_centroid(store, context) if context is not None else None
    sense_id = disambiguate(inventory, word, centroid)
    k = int(sense_id.rsplit("#", 1)[1])
    sense_vec = inventory.senses(word)[k].vector
    noise = sample_noise(spec, rng)
    noisy = sense_vec + noise
    proj = inventory.projection_index()
    j = kernels.argmin_tiebreak(kernels.sq_dists(proj.matrix, noisy), proj.rank)
    return PrivatizationRecord(
        input=word,
        sense_id=sense_id,
        substitute=proj.words[j],
        noisy_norm=float(np.linalg.norm(noise)),
    )


def privatize_text(
    tokens: Sequence[str],
    mode: Mode,
    spec: NoiseSpec,
    store: EmbeddingStore,
    inventory: Optional[SenseInventory],
    seed: int,
    run_index: int = 0,
    base_index: int = 0,
    window: int = DEFAULT_WINDOW,
    threads: int = 1,
) -> list[PrivatizationRecord]:
    """Privatize each in-vocabulary token independently with fresh noise.

    Out-of-vocabulary tokens pass through unchanged and are flagged.
    Disambiguation contexts come from the original token sequence, never
    from already-privatized output. Each token draws from the sub-stream
    (seed, run_index, base_index + position), so results do not depend on
    worker count.
    """
    tokens = list(tokens)
    if mode is Mode.SENSE and inventory is None:
        raise MissingInventory("sense mode requires a sense inventory")

    def one(i: int) -> PrivatizationRecord:
        token = tokens[i]
        known = token in store if mode is Mode.WORD else token in inventory
        if not known:
            return PrivatizationRecord(
                input=token, sense_id=None, substitute=token, noisy_norm=0.0, oov=True
            )
        rng = substream(seed, DOMAIN_PRIVATIZE, run_index, base_index + i)
        context = extract_window(tokens, i, window) if mode is Mode.SENSE else None
        return privatize_word(token, context, mode, spec, store, inventory, rng)

    indices = range(len(tokens))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, indices))
    return [one(i) for i in indices]


def word_substitution_counts(
    store: EmbeddingStore,
    word: str,
    spec: NoiseSpec,
    draws: int,
    rng: np.random.Generator,
    chunk: int = 1 << 16,
) -> np.ndarray:
    """Empirical output histogram of the word-mode mechanism.

    Returns counts per store row over `draws` independent perturbations,
    computed in chunks with the batched projection kernel. This is the
    Monte Carlo workhorse behind the privacy-bound and deniability checks.
    """
    base = store.lookup(word)
    counts = np.zeros(len(store), dtype=np.int64)
    remaining = draws
    while remaining > 0:
        c = min(chunk, remaining)
        noisy = base + sample_noise_batch(spec, rng, c)
        idx = kernels.batch_project(store.matrix, noisy, store._rank)
        counts += np.bincount(idx, minlength=len(store))
        remaining -= c
    return counts
