"""Context-window extraction and sense selection.

A token's sense is the one whose vector is most cosine-similar to the
mean vector of its surrounding context words. Without usable context the
word's first sense (its largest cluster) is the fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from sensepriv.embeddings import EmbeddingStore, cosine_similarity
from sensepriv.errors import IndexOutOfRange
from sensepriv.senses import SenseInventory

DEFAULT_WINDOW = 5


@dataclass
class ContextWindow:
    center: str
    left: list[str] = field(default_factory=list)
    right: list[str] = field(default_factory=list)
    window: int = DEFAULT_WINDOW


def extract_window(tokens: Sequence[str], index: int, window: int = DEFAULT_WINDOW) -> ContextWindow:
    """Up to `window` tokens on each side of tokens[index], center excluded."""
    if index < 0 or index >= len(tokens):
        raise IndexOutOfRange(index, len(tokens))
    left = list(tokens[max(0, index - window) : index])
    right = list(tokens[index + 1 : index + 1 + window])
    return ContextWindow(center=tokens[index], left=left, right=right, window=window)


def context_centroid(store: EmbeddingStore, window: ContextWindow) -> Optional[np.ndarray]:
    """Mean vector of the in-vocabulary context tokens; None when there are none."""
    rows = [store.row(t) for t in window.left + window.right if t in store]
    if not rows:
        return None
    return store.matrix[rows].mean(axis=0)


def disambiguate(
    inventory: SenseInventory, word: str, centroid: Optional[np.ndarray]
) -> str:
    """Sense id of the word's sense most cosine-similar to the centroid.

    An absent centroid, or an exact similarity tie, falls back to the
    word's first sense (the largest cluster).
    """
    senses = inventory.senses(word)
    if centroid is None or len(senses) == 1:
        return senses[0].sense_id
    sims = [cosine_similarity(centroid, sense.vector) for sense in senses]
    best = max(sims)
    winners = [i for i, s in enumerate(sims) if s == best]
    if len(winners) > 1:
        return senses[0].sense_id
    return senses[winners[0]].sense_id
