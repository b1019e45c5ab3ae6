"""Pattern-constrained approximate nearest neighbor search.

A suffix automaton over the sequence collection locates the state whose
patterns match a query, and a per-state vector index (graph or raw id
list) answers the nearest-neighbor part. Baselines and a benchmark
harness are included.
"""

from .core import (Dataset, FormatError, QueryResult, ResourceLimitError,
                   VectorStore, brute_force_topk, contains_oracle, distance,
                   vp_oracle)
from .esam import Esam, EsamState
from .hnsw import HnswGraph, HnswParams
from .index import (AutomatonIndex, BuildConfig, StateIndex, build,
                    build_parallel)
from .snapshot import load_snapshot, save_snapshot

__version__ = "0.1.0"

__all__ = [
    "AutomatonIndex",
    "BuildConfig",
    "Dataset",
    "Esam",
    "EsamState",
    "FormatError",
    "HnswGraph",
    "HnswParams",
    "QueryResult",
    "ResourceLimitError",
    "StateIndex",
    "VectorStore",
    "build",
    "build_parallel",
    "brute_force_topk",
    "contains_oracle",
    "distance",
    "load_snapshot",
    "save_snapshot",
    "vp_oracle",
]
