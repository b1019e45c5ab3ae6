"""Shared data model: datasets, vector stores, distance kernels, and the
exact brute-force / substring oracles every other module is checked against.

All vector ids are 1-based. Result ordering is always ascending by
(distance, id), which makes every comparison in the test suite exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class FormatError(ValueError):
    """A dataset or snapshot file is malformed."""


class ResourceLimitError(RuntimeError):
    """A build exceeded its configured resource cap."""


METRICS = ("sqeuclidean", "cosine")


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")


def _batch_sqeuclidean(q: np.ndarray, mat: np.ndarray) -> np.ndarray:
    diff = mat - q
    return np.einsum("ij,ij->i", diff, diff)


def _batch_cosine(q: np.ndarray, mat: np.ndarray) -> np.ndarray:
    qn = float(np.sqrt(np.einsum("i,i->", q, q)))
    norms = np.sqrt(np.einsum("ij,ij->i", mat, mat))
    dots = np.einsum("ij,j->i", mat, q)
    out = np.ones(mat.shape[0], dtype=np.float64)
    denom = norms * qn
    nz = denom > 0.0
    out[nz] = 1.0 - dots[nz] / denom[nz]
    if qn == 0.0:
        # two zero vectors are identical, distance 0
        out[norms == 0.0] = 0.0
    return out


_BATCH_KERNELS = {"sqeuclidean": _batch_sqeuclidean, "cosine": _batch_cosine}


def distance(a, b, metric: str = "sqeuclidean") -> float:
    """Distance between two vectors; squared Euclidean unless configured otherwise."""
    _check_metric(metric)
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.ndim != 1 or bv.ndim != 1 or av.shape[0] != bv.shape[0]:
        raise ValueError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    return float(_BATCH_KERNELS[metric](av, bv[np.newaxis, :])[0])


@dataclass
class Dataset:
    """Aligned vector + sequence collection; record i owns vector i and sequence i."""

    vectors: np.ndarray  # (n, d) float32
    sequences: list[bytes]

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float32)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-d array")
        if self.vectors.shape[0] != len(self.sequences):
            raise ValueError(
                f"count mismatch: {self.vectors.shape[0]} vectors, "
                f"{len(self.sequences)} sequences"
            )
        if self.vectors.shape[0] > 0 and self.vectors.shape[1] < 1:
            raise ValueError("vector dimension must be at least 1")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def m(self) -> int:
        """Total sequence length in bytes."""
        return sum(len(s) for s in self.sequences)


class VectorStore:
    """Resolves 1-based vector ids to rows and computes distances.

    Distances are always computed through the same einsum kernel so that
    every code path (graph search, brute force, oracles) produces
    bit-identical floats for identical inputs.
    """

    def __init__(self, vectors, metric: str = "sqeuclidean"):
        _check_metric(metric)
        self._mat = np.ascontiguousarray(np.asarray(vectors, dtype=np.float64))
        if self._mat.ndim != 2:
            raise ValueError("vectors must be a 2-d array")
        self.metric = metric
        self._kernel = _BATCH_KERNELS[metric]

    @property
    def n(self) -> int:
        return self._mat.shape[0]

    @property
    def dim(self) -> int:
        return self._mat.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        """The (n, d) float64 matrix backing the store (do not mutate)."""
        return self._mat

    def _rows(self, ids: np.ndarray) -> np.ndarray:
        if ids.size and (ids.min() < 1 or ids.max() > self.n):
            bad = ids[(ids < 1) | (ids > self.n)][0]
            raise ValueError(f"unresolvable vector id {bad}")
        return self._mat[ids - 1]

    def get(self, vid: int) -> np.ndarray:
        if not 1 <= vid <= self.n:
            raise ValueError(f"unresolvable vector id {vid}")
        return self._mat[vid - 1]

    def dists(self, q: np.ndarray, ids) -> np.ndarray:
        """Distances from q to each id, in the given id order."""
        arr = np.asarray(ids, dtype=np.int64)
        q = np.asarray(q, dtype=np.float64)
        if q.shape != (self.dim,):
            raise ValueError(f"query dimension {q.shape} does not match store ({self.dim},)")
        return self._kernel(q, self._rows(arr))

    def pairwise(self, q: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Distances from q to each row of an explicit matrix."""
        return self._kernel(np.asarray(q, dtype=np.float64),
                            np.asarray(rows, dtype=np.float64))

    def dist(self, q: np.ndarray, vid: int) -> float:
        return float(self.dists(q, np.asarray([vid]))[0])

    def append(self, vec) -> int:
        """Append a vector, returning its new id (n+1).

        Quantized through float32 like every persisted vector, so query
        results do not shift across a save/load round trip."""
        row = np.asarray(vec, dtype=np.float64)
        if row.shape != (self.dim,):
            raise ValueError(f"vector dimension {row.shape} does not match store ({self.dim},)")
        row = row.astype(np.float32).astype(np.float64)
        self._mat = np.vstack([self._mat, row[np.newaxis, :]])
        return self.n


@dataclass
class QueryResult:
    """Ranked (id, distance) pairs, ascending by (distance, id), length <= k."""

    entries: list[tuple[int, float]] = field(default_factory=list)

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    @staticmethod
    def merge(a: "QueryResult", b: "QueryResult", k: int) -> "QueryResult":
        """Merge two ranked lists into the top-k by (distance, id), deduplicating ids."""
        combined = sorted(a.entries + b.entries, key=lambda e: (e[1], e[0]))
        out: list[tuple[int, float]] = []
        seen: set[int] = set()
        for vid, d in combined:
            if vid in seen:
                continue
            seen.add(vid)
            out.append((vid, d))
            if len(out) == k:
                break
        return QueryResult(out)


def brute_force_topk(q, candidate_ids, k: int, store: VectorStore,
                     tombstones=frozenset()) -> QueryResult:
    """Exact top-k over a candidate id set; the ground-truth oracle."""
    if k < 1:
        raise ValueError("k must be positive")
    ids = sorted(set(candidate_ids) - set(tombstones))
    if not ids:
        return QueryResult([])
    arr = np.asarray(ids, dtype=np.int64)
    d = store.dists(np.asarray(q, dtype=np.float64), arr)
    order = np.lexsort((arr, d))[:k]
    return QueryResult([(int(arr[i]), float(d[i])) for i in order])


def contains_oracle(s: bytes, p: bytes) -> bool:
    """True iff p occurs as a contiguous substring of s (empty p always matches)."""
    return p in s


def vp_oracle(dataset: Dataset, p: bytes) -> set[int]:
    """Ids of records whose sequence contains p, by naive scan."""
    return {i for i, s in enumerate(dataset.sequences, start=1) if p in s}
