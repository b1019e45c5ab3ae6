#!/usr/bin/env python3
"""End-to-end benchmark on synthetic data: build every method, sweep
ef_search, print a QPS/recall table and optionally write the CSV."""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from patternann import BuildConfig, HnswGraph, HnswParams, VectorStore, build
from patternann.baselines import optquery_build
from patternann.bench import (automaton_method, evaluate, gen_queries,
                              gen_synthetic, ground_truth, optquery_method,
                              postfilter_method, prefilter_method, rows_to_csv)
from patternann.core import ResourceLimitError


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--len-min", type=int, default=8)
    ap.add_argument("--len-max", type=int, default=16)
    ap.add_argument("--alphabet", type=int, default=4)
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--T", type=int, default=200)
    ap.add_argument("--M", type=int, default=16)
    ap.add_argument("--ef-con", type=int, default=80)
    ap.add_argument("--ef-sweep", default="16,64,256,1024")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--optquery-cap", type=int, default=2_000_000)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    sweep = tuple(int(x) for x in args.ef_sweep.split(","))
    ds = gen_synthetic(args.n, args.dim, (args.len_min, args.len_max),
                       args.alphabet, args.seed)
    store = VectorStore(ds.vectors)
    params = HnswParams(m=args.M, ef_construction=args.ef_con, seed=args.seed)
    print(f"dataset: n={ds.n} d={ds.d} m={ds.m}")

    t0 = time.perf_counter()
    idx = build(ds, BuildConfig(skip_threshold=args.T, hnsw=params))
    print(f"automaton index: {time.perf_counter() - t0:.1f}s, "
          f"{idx.esam.state_count()} states, {idx.graph_state_count()} graphs, "
          f"{idx.total_base_size()} indexed ids")

    t0 = time.perf_counter()
    global_graph = HnswGraph(params)
    for vid in range(1, ds.n + 1):
        global_graph.insert(vid, store)
    print(f"global graph: {time.perf_counter() - t0:.1f}s")

    methods = [automaton_method(idx),
               prefilter_method(idx.esam, store),
               postfilter_method(global_graph, ds.sequences, store)]
    try:
        t0 = time.perf_counter()
        oq = optquery_build(ds, params, args.optquery_cap, store)
        print(f"optquery forest: {time.perf_counter() - t0:.1f}s, "
              f"{len(oq.graphs)} graphs, {oq.inserted} insertions")
        methods.append(optquery_method(oq, store))
    except ResourceLimitError as exc:
        print(f"optquery skipped: {exc}")

    workload = gen_queries(ds, args.queries, k=args.k, seed=args.seed + 1)
    truth = ground_truth(ds, workload, store)
    rows = []
    for method in methods:
        rows.extend(evaluate(method, workload, ds, sweep, truth))

    print(f"\n{'method':<12}{'ef':>6}{'recall':>9}{'qps':>12}{'lat_us':>10}")
    for r in rows:
        print(f"{r.method:<12}{r.ef_search:>6}{r.recall:>9.4f}"
              f"{r.qps:>12.1f}{r.mean_latency_us:>10.1f}")
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows))
        print(f"\nwrote {args.csv}")


if __name__ == "__main__":
    main()
