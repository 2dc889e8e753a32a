"""Context-aware text privatization under metric differential privacy.

Pipeline: load a word embedding, induce a sense inventory by clustering
each word's nearest-neighbor graph, disambiguate tokens against their
context, perturb the chosen vector with metric-DP noise, and project
back to a discrete token. Calibration picks the privacy budget from
plausible-deniability proxies; evaluation measures what utility the
substitutions retain.
"""

from sensepriv.calibration import (
    ProxyReport,
    estimate_proxies,
    quantile,
    save_report_csv,
    save_summary_csv,
    select_epsilon,
)
from sensepriv.disambig import (
    DEFAULT_WINDOW,
    ContextWindow,
    context_centroid,
    disambiguate,
    extract_window,
)
from sensepriv.embeddings import (
    DistanceMetric,
    EmbeddingStore,
    cosine_similarity,
    distance,
    load_embedding,
    mean_pairwise_distance,
    nearest,
)
from sensepriv.errors import (
    DegenerateInput,
    DimensionMismatch,
    DuplicateToken,
    EmptyDatasetAfterFiltering,
    EmptyFile,
    EmptyInput,
    EmptyStore,
    IndexOutOfRange,
    LengthMismatch,
    MalformedLine,
    MissingInventory,
    NoFeasibleBudget,
    SampleTooLarge,
    SensePrivError,
    UnknownToken,
    UnknownWord,
)
from sensepriv.evaluation import (
    ContextPairDataset,
    ContextPairResult,
    ContextPairRow,
    WordPairDataset,
    WordPairResult,
    eval_context_pairs,
    eval_word_pairs,
    spearman,
)
from sensepriv.mechanism import (
    Mode,
    NoiseSpec,
    PrivatizationRecord,
    privatize_text,
    privatize_word,
    sample_noise,
    sample_noise_batch,
    word_substitution_counts,
)
from sensepriv.senses import (
    EgoNetwork,
    InductionParams,
    SenseEntry,
    SenseInventory,
    WithinSenseStats,
    build_ego_network,
    chinese_whispers,
    induce_inventory,
    pool_sense_vector,
    within_sense_distance_stats,
)

__version__ = "0.1.0"

__all__ = [
    "ContextPairDataset",
    "ContextPairResult",
    "ContextPairRow",
    "ContextWindow",
    "DEFAULT_WINDOW",
    "DegenerateInput",
    "DimensionMismatch",
    "DistanceMetric",
    "DuplicateToken",
    "EgoNetwork",
    "EmbeddingStore",
    "EmptyDatasetAfterFiltering",
    "EmptyFile",
    "EmptyInput",
    "EmptyStore",
    "IndexOutOfRange",
    "InductionParams",
    "LengthMismatch",
    "MalformedLine",
    "MissingInventory",
    "Mode",
    "NoFeasibleBudget",
    "NoiseSpec",
    "PrivatizationRecord",
    "ProxyReport",
    "SampleTooLarge",
    "SenseEntry",
    "SenseInventory",
    "SensePrivError",
    "UnknownToken",
    "UnknownWord",
    "WithinSenseStats",
    "WordPairDataset",
    "WordPairResult",
    "build_ego_network",
    "chinese_whispers",
    "context_centroid",
    "cosine_similarity",
    "disambiguate",
    "distance",
    "estimate_proxies",
    "eval_context_pairs",
    "eval_word_pairs",
    "extract_window",
    "induce_inventory",
    "load_embedding",
    "mean_pairwise_distance",
    "nearest",
    "pool_sense_vector",
    "privatize_text",
    "privatize_word",
    "quantile",
    "sample_noise",
    "sample_noise_batch",
    "save_report_csv",
    "save_summary_csv",
    "select_epsilon",
    "spearman",
    "within_sense_distance_stats",
    "word_substitution_counts",
]
