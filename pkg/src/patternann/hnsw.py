"""Hierarchical navigable small world graph over vector ids.

The graph stores ids only; vectors are resolved through an external
VectorStore at insert and search time, which lets many small graphs share
one vector array. Construction and search are fully deterministic for a
fixed seed and insertion order: every heap entry is a (distance, id) tuple
so ties always resolve by ascending id.

Every distance that can reach a result set goes through the store's einsum
kernel, keeping graph search bit-identical to the brute-force oracle when
the candidate pool is exhaustive. The neighbor-selection heuristic uses a
faster gram-matrix formulation internally; it only shapes the graph, never
a returned distance.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

import numpy as np

from .core import QueryResult, VectorStore


@dataclass
class HnswParams:
    m: int = 16  # max degree per node per layer (2m at layer 0)
    ef_construction: int = 200
    level_norm: float | None = None  # defaults to 1/ln(m)
    seed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if self.ef_construction < self.m:
            raise ValueError("ef_construction must be at least m")
        if self.level_norm is None:
            self.level_norm = 1.0 / math.log(self.m)


class HnswGraph:
    def __init__(self, params: HnswParams):
        self.params = params
        self.node_levels: dict[int, int] = {}
        # neighbors[id][level] is the adjacency list at that level
        self.neighbors: dict[int, list[list[int]]] = {}
        self.entry_point: int | None = None
        self.max_level = -1
        self._rng = random.Random(params.seed)

    def __len__(self) -> int:
        return len(self.node_levels)

    @property
    def node_ids(self):
        return self.node_levels.keys()

    def _sample_level(self) -> int:
        return int(-math.log(1.0 - self._rng.random()) * self.params.level_norm)

    def _greedy_descend(self, q, ep: int, d_ep: float, level: int,
                        store: VectorStore) -> tuple[int, float]:
        kernel = store._kernel
        mat = store._mat
        while True:
            nbs = self.neighbors[ep][level]
            if not nbs:
                return ep, d_ep
            idx = np.asarray(nbs, dtype=np.intp)
            ds = kernel(q, mat[idx - 1])
            i = int(np.lexsort((idx, ds))[0])
            if (ds[i], nbs[i]) < (d_ep, ep):
                ep, d_ep = nbs[i], float(ds[i])
            else:
                return ep, d_ep

    def _search_layer(self, q, eps: list[tuple[float, int]], ef: int,
                      level: int, store: VectorStore,
                      tombstones=frozenset()) -> list[tuple[float, int]]:
        """Bounded best-first search; returns up to ef (distance, id) pairs
        sorted ascending. Tombstoned nodes are traversed but never collected."""
        kernel = store._kernel
        mat = store._mat
        neighbors = self.neighbors
        visited = {vid for _, vid in eps}
        candidates = list(eps)
        heapq.heapify(candidates)
        # result kept as a max-heap on (distance, id) via negation
        result = [(-d, -vid) for d, vid in eps if vid not in tombstones]
        heapq.heapify(result)
        full = len(result) >= ef
        if full:
            worst_d, worst_id = -result[0][0], -result[0][1]
        while candidates:
            d_c, c = heapq.heappop(candidates)
            if full and d_c > worst_d:
                break
            fresh = [nb for nb in neighbors[c][level] if nb not in visited]
            if not fresh:
                continue
            visited.update(fresh)
            idx = np.asarray(fresh, dtype=np.intp)
            ds = kernel(q, mat[idx - 1]).tolist()
            for nb, d_nb in zip(fresh, ds):
                if not full:
                    heapq.heappush(candidates, (d_nb, nb))
                    if nb not in tombstones:
                        heapq.heappush(result, (-d_nb, -nb))
                        if len(result) == ef:
                            full = True
                            worst_d, worst_id = -result[0][0], -result[0][1]
                elif d_nb < worst_d or (d_nb == worst_d and nb < worst_id):
                    heapq.heappush(candidates, (d_nb, nb))
                    if nb not in tombstones:
                        heapq.heapreplace(result, (-d_nb, -nb))
                        worst_d, worst_id = -result[0][0], -result[0][1]
        return sorted((-nd, -nv) for nd, nv in result)

    @staticmethod
    def _select_neighbors(cands: list[tuple[float, int]], m: int,
                          store: VectorStore) -> list[tuple[float, int]]:
        """Closest-first heuristic: keep a candidate only if it is closer to
        the base point than to every neighbor already kept."""
        if len(cands) <= 1:
            return list(cands[:m])
        ids = np.asarray([c for _, c in cands], dtype=np.intp)
        rows = store._mat[ids - 1]
        if store.metric == "sqeuclidean":
            sq = np.einsum("ij,ij->i", rows, rows)
            pair = sq[:, None] + sq[None, :] - 2.0 * (rows @ rows.T)
        else:
            pair = np.asarray([store.pairwise(row, rows) for row in rows])
        selected: list[tuple[float, int]] = []
        kept: list[int] = []
        for i, (d_c, c) in enumerate(cands):
            if len(selected) == m:
                break
            row = pair[i]
            if any(row[j] < d_c for j in kept):
                continue
            kept.append(i)
            selected.append((d_c, c))
        return selected

    def insert(self, vid: int, store: VectorStore) -> None:
        if vid in self.node_levels:
            raise ValueError(f"id {vid} already in graph")
        q = store.get(vid)
        level = self._sample_level()
        self.node_levels[vid] = level
        self.neighbors[vid] = [[] for _ in range(level + 1)]
        if self.entry_point is None:
            self.entry_point = vid
            self.max_level = level
            return
        kernel = store._kernel
        mat = store._mat
        ep = self.entry_point
        d_ep = float(kernel(q, mat[ep - 1:ep])[0])
        for lc in range(self.max_level, level, -1):
            ep, d_ep = self._greedy_descend(q, ep, d_ep, lc, store)
        eps = [(d_ep, ep)]
        m = self.params.m
        for lc in range(min(level, self.max_level), -1, -1):
            cands = self._search_layer(q, eps, self.params.ef_construction, lc, store)
            selected = self._select_neighbors(cands, m, store)
            self.neighbors[vid][lc] = [c for _, c in selected]
            cap = 2 * m if lc == 0 else m
            for _, c in selected:
                lst = self.neighbors[c][lc]
                lst.append(vid)
                if len(lst) > cap:
                    c_vec = mat[c - 1]
                    idx = np.asarray(lst, dtype=np.intp)
                    ds = kernel(c_vec, mat[idx - 1])
                    ranked = [(float(ds[i]), lst[i]) for i in np.lexsort((idx, ds))]
                    self.neighbors[c][lc] = [
                        x for _, x in self._select_neighbors(ranked, cap, store)
                    ]
            eps = cands
        if level > self.max_level:
            self.max_level = level
            self.entry_point = vid

    def search(self, q, k: int, ef_search: int, store: VectorStore,
               tombstones=frozenset()) -> QueryResult:
        if ef_search < k:
            raise ValueError("ef_search must be at least k")
        if self.entry_point is None:
            return QueryResult([])
        q = np.asarray(q, dtype=np.float64)
        if q.shape != (store.dim,):
            raise ValueError(f"query dimension {q.shape} does not match store "
                             f"({store.dim},)")
        ep = self.entry_point
        d_ep = store.dist(q, ep)
        for lc in range(self.max_level, 0, -1):
            ep, d_ep = self._greedy_descend(q, ep, d_ep, lc, store)
        pool = self._search_layer(q, [(d_ep, ep)], ef_search, 0, store, tombstones)
        return QueryResult([(vid, d) for d, vid in pool[:k]])
