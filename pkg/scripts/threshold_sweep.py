#!/usr/bin/env python3
"""Skip-build threshold study: sweep T and report build time, graph count,
and query latency/recall at a fixed ef_search."""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from patternann import BuildConfig, HnswParams, VectorStore, build
from patternann.bench import (automaton_method, evaluate, gen_queries,
                              gen_synthetic, ground_truth)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--len-min", type=int, default=8)
    ap.add_argument("--len-max", type=int, default=16)
    ap.add_argument("--alphabet", type=int, default=4)
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--ef-search", type=int, default=64)
    ap.add_argument("--thresholds", default="25,100,400,1600,inf")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ds = gen_synthetic(args.n, args.dim, (args.len_min, args.len_max),
                       args.alphabet, args.seed)
    store = VectorStore(ds.vectors)
    workload = gen_queries(ds, args.queries, seed=args.seed + 1)
    truth = ground_truth(ds, workload, store)

    print(f"{'T':>6}{'build_s':>9}{'graphs':>8}{'sum_base':>10}"
          f"{'recall':>9}{'qps':>10}")
    for text in args.thresholds.split(","):
        threshold = None if text == "inf" else int(text)
        t0 = time.perf_counter()
        idx = build(ds, BuildConfig(
            skip_threshold=threshold,
            hnsw=HnswParams(m=16, ef_construction=80, seed=args.seed)))
        build_s = time.perf_counter() - t0
        row = evaluate(automaton_method(idx), workload, ds,
                       (args.ef_search,), truth)[0]
        print(f"{text:>6}{build_s:>9.1f}{idx.graph_state_count():>8}"
              f"{idx.total_base_size():>10}{row.recall:>9.4f}{row.qps:>10.1f}")


if __name__ == "__main__":
    main()
