"""Pattern-constrained ANN index: a suffix automaton whose states each carry
a searchable vector index over the ids their patterns select.

Space is kept near-linear by two strategies. Index reuse: a state points at
the transition successor holding the largest indexed set and only indexes
the difference, so the pair forms an exact cover of the state's id set and
a query needs exactly two searches. Skip-build: difference sets smaller
than a threshold stay as raw id lists answered by brute force instead of a
graph.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, QueryResult, VectorStore, brute_force_topk
from .esam import Esam
from .hnsw import HnswGraph, HnswParams

RAW = "raw"
GRAPH = "graph"


@dataclass
class BuildConfig:
    skip_threshold: int | None = 200  # None disables graphs entirely
    hnsw: HnswParams = field(default_factory=HnswParams)
    parallelism: int = 1
    metric: str = "sqeuclidean"
    reuse: bool = True  # turn off to index every state's full id set

    def __post_init__(self):
        if self.skip_threshold is not None and self.skip_threshold < 1:
            raise ValueError("skip_threshold must be positive (or None)")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")


@dataclass
class StateIndex:
    """Searchable structure of one automaton state."""

    kind: str  # RAW or GRAPH
    base: list[int]  # ids actually indexed here, ascending
    inherited: int | None = None  # state whose base completes the cover
    graph: HnswGraph | None = None


def _state_seed(base_seed: int, state_id: int) -> int:
    return (base_seed * 0x9E3779B1 + state_id * 0x85EBCA77 + 1) & 0x7FFFFFFFFFFF


def _build_graph(base: list[int], config: BuildConfig, state_id: int,
                 store: VectorStore) -> HnswGraph:
    params = HnswParams(
        m=config.hnsw.m,
        ef_construction=config.hnsw.ef_construction,
        level_norm=config.hnsw.level_norm,
        seed=_state_seed(config.hnsw.seed, state_id),
    )
    g = HnswGraph(params)
    for vid in base:
        g.insert(vid, store)
    return g


def _choose_inherited(u: int, esam: Esam, indexes: list[StateIndex | None],
                      reuse: bool) -> int | None:
    """Transition successor with the largest base, ties by smallest state id."""
    if not reuse:
        return None
    succs = esam.states[u].transitions.values()
    if not succs:
        return None
    return max(succs, key=lambda v: (len(indexes[v].base), -v))


def _cover_base(u: int, inherited: int | None, esam: Esam,
                indexes: list[StateIndex | None]) -> list[int]:
    id_set = esam.states[u].id_set
    if inherited is None:
        return list(id_set)
    excluded = set(indexes[inherited].base)
    if not excluded:
        return list(id_set)
    return [i for i in id_set if i not in excluded]


class AutomatonIndex:
    def __init__(self, esam: Esam, state_indexes: list[StateIndex],
                 store: VectorStore, config: BuildConfig,
                 tombstones: set[int] | None = None):
        self.esam = esam
        self.state_indexes = state_indexes
        self.store = store
        self.config = config
        self.tombstones: set[int] = tombstones if tombstones is not None else set()

    # -- queries ---------------------------------------------------------

    def _search_state(self, u: int, q: np.ndarray, k: int, ef_search: int) -> QueryResult:
        si = self.state_indexes[u]
        if si.kind == GRAPH:
            return si.graph.search(q, k, max(ef_search, k), self.store, self.tombstones)
        return brute_force_topk(q, si.base, k, self.store, self.tombstones)

    def query(self, v_q, p: bytes, k: int, ef_search: int) -> QueryResult:
        """Top-k nearest ids among records whose sequence contains p."""
        if k < 1:
            raise ValueError("k must be positive")
        if ef_search < k:
            raise ValueError("ef_search must be at least k")
        cur = self.esam.locate(p)
        if cur is None:
            return QueryResult([])
        q = np.asarray(v_q, dtype=np.float64)
        res = self._search_state(cur, q, k, ef_search)
        inherited = self.state_indexes[cur].inherited
        if inherited is not None:
            res = QueryResult.merge(res, self._search_state(inherited, q, k, ef_search), k)
        else:
            res = QueryResult(res.entries[:k])
        return res

    # -- maintenance -----------------------------------------------------

    def insert(self, vector, sequence: bytes) -> int:
        """Add one (vector, sequence) record online; returns the new id."""
        new_id = self.store.append(vector)
        before = len(self.esam.states)
        marked = self.esam.add_sequence(new_id, sequence)
        fresh = range(before, len(self.esam.states))
        self.state_indexes.extend([None] * len(fresh))  # type: ignore[list-item]
        affected = sorted(
            set(marked) | set(fresh),
            key=lambda u: (-self.esam.states[u].max_len, u),
        )
        threshold = self.config.skip_threshold
        for u in affected:
            if u >= before:
                inherited = _choose_inherited(u, self.esam, self.state_indexes,
                                              self.config.reuse)
                base = _cover_base(u, inherited, self.esam, self.state_indexes)
                si = StateIndex(RAW, base, inherited)
                self.state_indexes[u] = si
                if threshold is not None and len(base) >= threshold:
                    si.graph = _build_graph(base, self.config, u, self.store)
                    si.kind = GRAPH
                continue
            si = self.state_indexes[u]
            k = si.inherited
            covered = k is not None and self.state_indexes[k].base \
                and self.state_indexes[k].base[-1] == new_id
            if covered:
                continue
            si.base.append(new_id)
            if si.kind == GRAPH:
                si.graph.insert(new_id, self.store)
            elif threshold is not None and len(si.base) >= threshold:
                si.graph = _build_graph(si.base, self.config, u, self.store)
                si.kind = GRAPH
        return new_id

    def delete(self, vid: int) -> None:
        """Lazily delete a record: tombstone it, no structural change."""
        if not 1 <= vid <= self.store.n:
            raise ValueError(f"unknown id {vid}")
        if vid in self.tombstones:
            raise ValueError(f"id {vid} already deleted")
        self.tombstones.add(vid)

    # -- accounting ------------------------------------------------------

    def total_base_size(self) -> int:
        return sum(len(si.base) for si in self.state_indexes)

    def total_id_set_size(self) -> int:
        return self.esam.total_id_set_size()

    def graph_state_count(self) -> int:
        return sum(1 for si in self.state_indexes if si.kind == GRAPH)


def _build_esam(dataset: Dataset) -> Esam:
    esam = Esam()
    for i, s in enumerate(dataset.sequences, start=1):
        esam.add_sequence(i, s)
    return esam


def build(dataset: Dataset, config: BuildConfig | None = None) -> AutomatonIndex:
    """Construct the index: automaton, then per-state indexes in reverse
    topological order (decreasing class length, ties by state id)."""
    config = config or BuildConfig()
    if dataset.n == 0:
        raise ValueError("dataset must be nonempty")
    esam = _build_esam(dataset)
    store = VectorStore(dataset.vectors, config.metric)
    n_states = len(esam.states)
    indexes: list[StateIndex | None] = [None] * n_states
    order = sorted(range(n_states), key=lambda u: (-esam.states[u].max_len, u))
    threshold = config.skip_threshold
    for u in order:
        inherited = _choose_inherited(u, esam, indexes, config.reuse)
        base = _cover_base(u, inherited, esam, indexes)
        if threshold is not None and len(base) >= threshold:
            indexes[u] = StateIndex(GRAPH, base, inherited,
                                    _build_graph(base, config, u, store))
        else:
            indexes[u] = StateIndex(RAW, base, inherited)
    return AutomatonIndex(esam, indexes, store, config)  # type: ignore[arg-type]


# -- parallel construction -------------------------------------------------
#
# States become ready once every transition successor has been processed
# (a countdown per state); ready states get their cover computed, then any
# needed graph build is dispatched to a worker process. The output is
# identical to the serial build because cover sets are a function of the
# successors' covers only and graph seeds are derived per state.

_WORKER_STORE: VectorStore | None = None


def _worker_init(mat, metric):
    global _WORKER_STORE
    _WORKER_STORE = VectorStore(mat, metric)


def _worker_build_graph(state_id: int, base: list[int], m: int, ef_construction: int,
                        level_norm: float | None, seed: int):
    g = HnswGraph(HnswParams(m=m, ef_construction=ef_construction,
                             level_norm=level_norm, seed=seed))
    for vid in base:
        g.insert(vid, _WORKER_STORE)
    return state_id, g


def build_parallel(dataset: Dataset, config: BuildConfig | None = None) -> AutomatonIndex:
    """Same output as build, constructing state graphs with a worker pool."""
    config = config or BuildConfig()
    if config.parallelism <= 1:
        return build(dataset, config)
    if dataset.n == 0:
        raise ValueError("dataset must be nonempty")
    esam = _build_esam(dataset)
    store = VectorStore(dataset.vectors, config.metric)
    n_states = len(esam.states)
    indexes: list[StateIndex | None] = [None] * n_states

    preds: list[list[int]] = [[] for _ in range(n_states)]
    countdown = [0] * n_states
    for u in range(n_states):
        succs = esam.states[u].transitions.values()
        countdown[u] = len(succs)
        for v in succs:
            preds[v].append(u)
    ready = deque(u for u in range(n_states) if countdown[u] == 0)
    threshold = config.skip_threshold
    done = 0
    pool: ProcessPoolExecutor | None = None
    pending: dict = {}

    def finish(u: int) -> None:
        nonlocal done
        done += 1
        for p in preds[u]:
            countdown[p] -= 1
            if countdown[p] == 0:
                ready.append(p)

    try:
        while done < n_states:
            while ready:
                u = ready.popleft()
                inherited = _choose_inherited(u, esam, indexes, config.reuse)
                base = _cover_base(u, inherited, esam, indexes)
                if threshold is not None and len(base) >= threshold:
                    indexes[u] = StateIndex(GRAPH, base, inherited)
                    if pool is None:
                        pool = ProcessPoolExecutor(
                            max_workers=config.parallelism,
                            initializer=_worker_init,
                            initargs=(dataset.vectors, config.metric),
                        )
                    fut = pool.submit(
                        _worker_build_graph, u, base, config.hnsw.m,
                        config.hnsw.ef_construction, config.hnsw.level_norm,
                        _state_seed(config.hnsw.seed, u),
                    )
                    pending[fut] = u
                else:
                    indexes[u] = StateIndex(RAW, base, inherited)
                    finish(u)
            if done < n_states and not ready:
                if not pending:
                    raise RuntimeError("dependency cycle in automaton DAG")
                completed, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in completed:
                    u = pending.pop(fut)
                    state_id, graph = fut.result()
                    assert state_id == u
                    indexes[u].graph = graph
                    finish(u)
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    return AutomatonIndex(esam, indexes, store, config)  # type: ignore[arg-type]
