"""Hashing-accelerated graph neural network node embeddings.

Nodes of an attributed graph are embedded into ``K`` discrete ids by
randomised MinHash message passing, without any training; pairs of nodes are
compared by Hamming similarity of their representations.
"""

from .estimator import HashGNN
from .evaluation import EvalReport, auc, hamming_score, pair_scores, run_link_prediction
from .exceptions import (
    ConfigError,
    EmptySetError,
    HashDomainError,
    HashGNNError,
    ParseError,
    ResourceError,
    SplitError,
    ValidationError,
)
from .graph import (
    AttributedGraph,
    LinkSplit,
    generate_synthetic,
    load_graph,
    save_graph,
    shuffle_attributes,
    split_edges,
)
from .hashing import (
    HashParams,
    estimate_similarity,
    exact_jaccard,
    hash_value,
    minhash_argmin,
    minhash_signature,
    sample_hash_params,
)
from .sketch import (
    EmbeddingMatrix,
    HashFamilyTable,
    SetView,
    build_family_table,
    embed,
    memory_footprint,
    phase1_messages,
    phase2_update,
    resume,
)

__version__ = "0.1.0"
