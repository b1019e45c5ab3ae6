"""Dataset files, synthetic generation, query workloads and the
recall / throughput measurement harness.

Vector file format: per record, a little-endian uint32 dimension followed
by that many little-endian float32 values (the common ANN-benchmark
layout). Sequence file: raw bytes per record, one record per line,
LF-terminated; line i pairs with vector i.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (Dataset, FormatError, QueryResult, VectorStore,
                   brute_force_topk, vp_oracle)

DEFAULT_EF_SWEEP = (8, 16, 32, 64, 128, 256, 512, 1024)
DEFAULT_PATTERN_LENGTHS = (2, 3, 4)
CSV_HEADER = "method,ef_search,recall,qps,mean_latency_us"

# synthetic sequences use bytes 'a', 'b', ... so they stay printable and
# never collide with the LF record separator
_ALPHABET_BASE = ord("a")
_MAX_ALPHABET = 256 - _ALPHABET_BASE - 1  # keep clear of byte wrap-around


@dataclass
class Workload:
    """Queries to run: (vector, pattern) pairs, all patterns occurring."""

    queries: list[tuple[np.ndarray, bytes]]
    k: int = 10
    pattern_lengths: Counter = field(default_factory=Counter)


@dataclass
class EvalRow:
    method: str
    ef_search: int
    recall: float
    qps: float
    mean_latency_us: float


@dataclass
class BenchMethod:
    """A named query callable: (v_q, p, k, ef_search) -> QueryResult."""

    name: str
    run: Callable[[np.ndarray, bytes, int, int], QueryResult]
    uses_ef: bool = True


# -- dataset files -----------------------------------------------------------


def save_vectors(vectors: np.ndarray, path) -> None:
    arr = np.asarray(vectors, dtype=np.float32)
    with open(path, "wb") as f:
        for row in arr:
            f.write(np.uint32(row.shape[0]).tobytes())
            f.write(row.tobytes())


def load_vectors(path) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    rows = []
    pos = 0
    dim = None
    record = 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise FormatError(f"truncated vector file at record {record}")
        (d,) = np.frombuffer(data, dtype="<u4", count=1, offset=pos)
        d = int(d)
        pos += 4
        if dim is None:
            if d < 1:
                raise FormatError(f"record {record} has dimension {d}")
            dim = d
        elif d != dim:
            raise FormatError(f"record {record} has dimension {d}, expected {dim}")
        if pos + 4 * d > len(data):
            raise FormatError(f"truncated vector file at record {record}")
        rows.append(np.frombuffer(data, dtype="<f4", count=d, offset=pos))
        pos += 4 * d
        record += 1
    if not rows:
        return np.zeros((0, 0), dtype=np.float32)
    return np.vstack(rows)


def save_sequences(sequences: list[bytes], path) -> None:
    with open(path, "wb") as f:
        for i, s in enumerate(sequences):
            if b"\n" in s:
                raise FormatError(f"sequence {i} contains a line feed byte")
            f.write(s)
            f.write(b"\n")


def load_sequences(path) -> list[bytes]:
    with open(path, "rb") as f:
        data = f.read()
    if not data:
        return []
    chunks = data.split(b"\n")
    if data.endswith(b"\n"):
        chunks.pop()
    return chunks


def save_dataset(dataset: Dataset, vectors_path, sequences_path) -> None:
    save_vectors(dataset.vectors, vectors_path)
    save_sequences(dataset.sequences, sequences_path)


def load_dataset(vectors_path, sequences_path) -> Dataset:
    vectors = load_vectors(vectors_path)
    sequences = load_sequences(sequences_path)
    if vectors.shape[0] != len(sequences):
        raise FormatError(
            f"count mismatch: {vectors.shape[0]} vectors but "
            f"{len(sequences)} sequences"
        )
    return Dataset(vectors, sequences)


# -- synthetic data ----------------------------------------------------------


def gen_synthetic(n: int, d: int, seq_len_range: tuple[int, int],
                  alphabet_size: int, seed: int) -> Dataset:
    """Uniform vectors in [0,1]^d plus uniform random sequences over the
    lowercase alphabet starting at 'a'."""
    if n < 1 or d < 1 or alphabet_size < 1:
        raise ValueError("n, d and alphabet_size must be positive")
    lo, hi = seq_len_range
    if lo < 0 or hi < lo:
        raise ValueError(f"bad sequence length range {seq_len_range}")
    if alphabet_size > _MAX_ALPHABET:
        raise ValueError(f"alphabet_size must be at most {_MAX_ALPHABET}")
    rng = np.random.default_rng(seed)
    vectors = rng.random((n, d), dtype=np.float64).astype(np.float32)
    lengths = rng.integers(lo, hi + 1, size=n)
    sequences = [
        (rng.integers(0, alphabet_size, size=length) + _ALPHABET_BASE)
        .astype(np.uint8).tobytes()
        for length in lengths
    ]
    return Dataset(vectors, sequences)


def gen_queries(dataset: Dataset, count_per_length: int,
                lengths=DEFAULT_PATTERN_LENGTHS, k: int = 10,
                seed: int = 0) -> Workload:
    """Patterns sampled uniformly from the occurrence multiset of each
    length; query vectors uniform over the data bounding box."""
    rng = np.random.default_rng(seed)
    if dataset.n == 0:
        raise ValueError("dataset is empty")
    mins = dataset.vectors.min(axis=0).astype(np.float64)
    spans = dataset.vectors.max(axis=0).astype(np.float64) - mins
    queries: list[tuple[np.ndarray, bytes]] = []
    counts: Counter = Counter()
    for length in lengths:
        weights = np.array([max(0, len(s) - length + 1) for s in dataset.sequences],
                           dtype=np.float64)
        total = weights.sum()
        if total <= 0:
            raise ValueError(f"no substring of length {length} occurs in the data")
        probs = weights / total
        for _ in range(count_per_length):
            i = int(rng.choice(dataset.n, p=probs))
            s = dataset.sequences[i]
            j = int(rng.integers(0, len(s) - length + 1))
            pattern = s[j:j + length]
            v_q = (mins + rng.random(dataset.d) * spans).astype(np.float32)
            queries.append((v_q, pattern))
            counts[length] += 1
    return Workload(queries, k=k, pattern_lengths=counts)


# -- evaluation --------------------------------------------------------------


def ground_truth(dataset: Dataset, workload: Workload,
                 store: VectorStore | None = None) -> list[list[int]]:
    """Exact constrained top-k ids per query, by naive scan plus brute force."""
    store = store or VectorStore(dataset.vectors)
    out = []
    for v_q, p in workload.queries:
        ids = vp_oracle(dataset, p)
        out.append(brute_force_topk(v_q, ids, workload.k, store).ids if ids else [])
    return out


def evaluate(method: BenchMethod, workload: Workload, dataset: Dataset,
             ef_search_sweep=DEFAULT_EF_SWEEP,
             truth: list[list[int]] | None = None) -> list[EvalRow]:
    """One row per ef_search value (a single row for methods that ignore it).

    Recall divides by k even when fewer than k records match, with the
    ground truth truncated to the matching count. The effective ef_search
    never drops below k so sweeps may start under k.
    """
    if truth is None:
        truth = ground_truth(dataset, workload)
    k = workload.k
    sweep = [0] if not method.uses_ef else list(ef_search_sweep)
    rows = []
    for ef in sweep:
        ef_eff = max(ef, k)
        t0 = time.perf_counter()
        results = [method.run(v_q, p, k, ef_eff) for v_q, p in workload.queries]
        elapsed = time.perf_counter() - t0
        hits = sum(len(set(res.ids) & set(gt)) for res, gt in zip(results, truth))
        recall = hits / (k * len(workload.queries))
        qps = len(workload.queries) / elapsed if elapsed > 0 else float("inf")
        latency = elapsed / len(workload.queries) * 1e6
        rows.append(EvalRow(method.name, ef, recall, qps, latency))
    return rows


def rows_to_csv(rows: list[EvalRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r.method},{r.ef_search},{r.recall!r},{r.qps!r},"
                     f"{r.mean_latency_us!r}")
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[EvalRow]:
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise FormatError("missing or unexpected CSV header")
    rows = []
    for ln in lines[1:]:
        method, ef, recall, qps, lat = ln.split(",")
        rows.append(EvalRow(method, int(ef), float(recall), float(qps), float(lat)))
    return rows


# -- method adapters ---------------------------------------------------------


def automaton_method(index) -> BenchMethod:
    return BenchMethod("automaton", lambda v, p, k, ef: index.query(v, p, k, ef))


def optquery_method(oq_index, store: VectorStore) -> BenchMethod:
    from .baselines import optquery_query

    return BenchMethod(
        "optquery", lambda v, p, k, ef: optquery_query(oq_index, store, v, p, k, ef))


def prefilter_method(esam, store: VectorStore) -> BenchMethod:
    from .baselines import prefilter_query

    return BenchMethod(
        "prefilter", lambda v, p, k, ef: prefilter_query(esam, store, v, p, k),
        uses_ef=False)


def postfilter_method(global_graph, sequences: list[bytes],
                      store: VectorStore) -> BenchMethod:
    from .baselines import postfilter_query

    return BenchMethod(
        "postfilter",
        lambda v, p, k, ef: postfilter_query(global_graph, sequences, store,
                                             v, p, k, ef))
