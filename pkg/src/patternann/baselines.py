"""Comparison methods: a per-pattern graph forest (the quadratic-space
upper baseline), filter-then-search, and search-then-filter."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

from .core import (Dataset, QueryResult, ResourceLimitError, VectorStore,
                   brute_force_topk, contains_oracle, vp_oracle)
from .esam import Esam
from .hnsw import HnswGraph, HnswParams


@dataclass
class OptQueryIndex:
    """One graph per distinct substring, each over exactly the matching ids."""

    graphs: dict[bytes, HnswGraph]
    params: HnswParams
    enumerated: int = 0  # substring occurrences visited, duplicates included
    inserted: int = 0  # membership insertions actually performed


def _pattern_params(params: HnswParams, pattern: bytes) -> HnswParams:
    return HnswParams(m=params.m, ef_construction=params.ef_construction,
                      level_norm=params.level_norm,
                      seed=(params.seed ^ zlib.crc32(pattern)) & 0x7FFFFFFF)


def optquery_build(dataset: Dataset, hnsw_params: HnswParams | None = None,
                   max_total_insertions: int = 1_000_000,
                   store: VectorStore | None = None) -> OptQueryIndex:
    """Index every distinct substring of every sequence with its own graph.

    Space is quadratic in sequence length, so a hard cap on performed
    insertions turns the blow-up into a typed error instead of exhausting
    memory.
    """
    params = hnsw_params or HnswParams()
    store = store or VectorStore(dataset.vectors)
    index = OptQueryIndex({}, params)
    for i, s in enumerate(dataset.sequences, start=1):
        length = len(s)
        index.enumerated += length * (length + 1) // 2
        distinct = {s[j:j2] for j in range(length) for j2 in range(j + 1, length + 1)}
        for p in sorted(distinct):
            if index.inserted + 1 > max_total_insertions:
                raise ResourceLimitError(
                    f"optquery insertion cap {max_total_insertions} exceeded "
                    f"at sequence {i}"
                )
            g = index.graphs.get(p)
            if g is None:
                g = HnswGraph(_pattern_params(params, p))
                index.graphs[p] = g
            g.insert(i, store)
            index.inserted += 1
    return index


def optquery_query(index: OptQueryIndex, store: VectorStore, v_q, p: bytes,
                   k: int, ef_search: int, tombstones=frozenset()) -> QueryResult:
    if ef_search < k:
        raise ValueError("ef_search must be at least k")
    g = index.graphs.get(p)
    if g is None:
        return QueryResult([])
    return g.search(v_q, k, ef_search, store, tombstones)


def prefilter_query(filter_index: Esam | Dataset, store: VectorStore, v_q,
                    p: bytes, k: int, tombstones=frozenset()) -> QueryResult:
    """Exact top-k over the matching ids: identify them first, then brute force."""
    if isinstance(filter_index, Esam):
        ids = filter_index.id_set_of(p)
    else:
        ids = vp_oracle(filter_index, p)
    if not ids:
        return QueryResult([])
    return brute_force_topk(v_q, ids, k, store, tombstones)


def postfilter_query(global_graph: HnswGraph, sequences: list[bytes],
                     store: VectorStore, v_q, p: bytes, k: int, ef_search: int,
                     tombstones=frozenset()) -> QueryResult:
    """Retrieve ef_search candidates from the full-dataset graph, keep the
    ones whose sequence contains p, return the k closest survivors."""
    if ef_search < k:
        raise ValueError("ef_search must be at least k")
    pool = global_graph.search(v_q, ef_search, ef_search, store, tombstones)
    kept = [(vid, d) for vid, d in pool.entries if contains_oracle(sequences[vid - 1], p)]
    return QueryResult(kept[:k])
