import numpy as np
import pytest

from sensepriv import EmbeddingStore, InductionParams, induce_inventory

# Two tight topical groups plus one ambiguous word sitting between them.
TOY_BANK_VECTORS = {
    "river": (1.00, 0.10, 0.02, 0.00),
    "shore": (0.95, 0.18, 0.00, 0.02),
    "water": (0.92, 0.25, 0.01, 0.01),
    "stream": (0.97, 0.14, 0.01, 0.02),
    "sunset": (0.88, 0.30, 0.00, 0.00),
    "money": (0.02, 0.00, 1.00, 0.12),
    "loan": (0.00, 0.02, 0.96, 0.20),
    "cash": (0.01, 0.01, 0.93, 0.24),
    "deposit": (0.02, 0.01, 0.98, 0.16),
    "bank": (0.55, 0.10, 0.55, 0.10),
}

TOY_BANK_PARAMS = InductionParams(
    neighborhood_size=9,
    edge_top_k=3,
    cw_iterations=20,
    min_cluster_size=4,
    seed=13,
)


def make_toy_bank_store():
    tokens = list(TOY_BANK_VECTORS)
    matrix = np.array([TOY_BANK_VECTORS[t] for t in tokens], dtype=np.float64)
    return EmbeddingStore(tokens, matrix)


@pytest.fixture(scope="session")
def toy_bank_store():
    return make_toy_bank_store()


@pytest.fixture(scope="session")
def toy_bank_inventory(toy_bank_store):
    return induce_inventory(toy_bank_store, TOY_BANK_PARAMS)


def make_synthetic_store(n=50, dim=50, seed=2024):
    rng = np.random.default_rng(seed)
    tokens = [f"w{i:02d}" for i in range(n)]
    return EmbeddingStore(tokens, rng.normal(size=(n, dim)))


@pytest.fixture(scope="session")
def synthetic_store():
    return make_synthetic_store()


def write_embedding_file(path, vectors, header=False):
    lines = []
    if header:
        first = next(iter(vectors.values()))
        lines.append(f"{len(vectors)} {len(first)}")
    for token, vec in vectors.items():
        lines.append(token + " " + " ".join(repr(float(x)) for x in vec))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
