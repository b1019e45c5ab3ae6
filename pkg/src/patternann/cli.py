"""Command-line entry points: synthetic data generation, index builds,
single queries, benchmark sweeps and a scripted maintenance demo.

Exit codes: 0 success, 2 usage error, 3 file format error, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from . import snapshot
from .baselines import optquery_build
from .core import Dataset, FormatError, ResourceLimitError, VectorStore
from .hnsw import HnswGraph, HnswParams
from .index import BuildConfig, build, build_parallel

USAGE_ERROR = 2
FORMAT_ERROR = 3
RESOURCE_ERROR = 4


def _parse_threshold(text: str) -> int | None:
    if text.lower() in ("inf", "none"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("threshold must be positive or 'inf'")
    return value


def _add_build_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--T", dest="threshold", type=_parse_threshold, default=200,
                   help="skip-build threshold; 'inf' stores raw id lists only")
    p.add_argument("--M", dest="m", type=int, default=16,
                   help="max degree per graph node")
    p.add_argument("--ef-con", type=int, default=200,
                   help="construction candidate list size")
    p.add_argument("--threads", type=int, default=1, help="build worker count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=("sqeuclidean", "cosine"),
                   default="sqeuclidean")


def _config_from_args(args) -> BuildConfig:
    return BuildConfig(
        skip_threshold=args.threshold,
        hnsw=HnswParams(m=args.m, ef_construction=args.ef_con, seed=args.seed),
        parallelism=args.threads,
        metric=args.metric,
    )


def _build_index(dataset: Dataset, config: BuildConfig):
    if config.parallelism > 1:
        return build_parallel(dataset, config)
    return build(dataset, config)


def _cmd_gen(args) -> int:
    dataset = bench_mod.gen_synthetic(
        args.n, args.dim, (args.len_min, args.len_max), args.alphabet, args.seed)
    bench_mod.save_dataset(dataset, args.vectors, args.sequences)
    print(f"wrote {dataset.n} records, total sequence length {dataset.m}")
    if args.queries > 0:
        workload = bench_mod.gen_queries(
            dataset, args.queries, lengths=args.lengths, k=args.k,
            seed=args.seed + 1)
        bench_mod.save_vectors(
            np.vstack([v for v, _ in workload.queries]), args.query_vectors)
        bench_mod.save_sequences([p for _, p in workload.queries], args.query_patterns)
        print(f"wrote {len(workload.queries)} queries")
    return 0


def _cmd_build(args) -> int:
    dataset = bench_mod.load_dataset(args.vectors, args.sequences)
    index = _build_index(dataset, _config_from_args(args))
    snapshot.save_snapshot(index, args.out)
    print(f"built index over {dataset.n} records: "
          f"{index.esam.state_count()} states, "
          f"{index.graph_state_count()} graph states, "
          f"{index.total_base_size()} indexed ids -> {args.out}")
    return 0


def _cmd_query(args) -> int:
    vectors = bench_mod.load_vectors(args.vectors)
    index = snapshot.load_snapshot(args.snapshot, vectors)
    v_q = np.asarray([float(x) for x in args.vector.split(",")], dtype=np.float64)
    pattern = args.pattern.encode("latin-1")
    result = index.query(v_q, pattern, args.k, args.ef_search)
    for vid, dist in result.entries:
        print(f"{vid}\t{dist!r}")
    return 0


def _cmd_bench(args) -> int:
    dataset = bench_mod.load_dataset(args.vectors, args.sequences)
    config = _config_from_args(args)
    store = VectorStore(dataset.vectors, config.metric)
    if args.snapshot:
        index = snapshot.load_snapshot(args.snapshot, dataset.vectors)
    else:
        index = _build_index(dataset, config)
    workload = bench_mod.gen_queries(
        dataset, args.queries, lengths=args.lengths, k=args.k, seed=args.seed + 1)
    truth = bench_mod.ground_truth(dataset, workload, store)
    sweep = args.ef_sweep

    methods = []
    wanted = args.methods.split(",")
    for name in wanted:
        if name == "automaton":
            methods.append(bench_mod.automaton_method(index))
        elif name == "prefilter":
            methods.append(bench_mod.prefilter_method(index.esam, store))
        elif name == "postfilter":
            graph = HnswGraph(config.hnsw)
            for vid in range(1, dataset.n + 1):
                graph.insert(vid, store)
            methods.append(bench_mod.postfilter_method(graph, dataset.sequences, store))
        elif name == "optquery":
            oq = optquery_build(dataset, config.hnsw,
                                max_total_insertions=args.optquery_cap, store=store)
            methods.append(bench_mod.optquery_method(oq, store))
        else:
            print(f"unknown method {name!r}", file=sys.stderr)
            return USAGE_ERROR

    rows = []
    for method in methods:
        rows.extend(bench_mod.evaluate(method, workload, dataset, sweep, truth))
    text = bench_mod.rows_to_csv(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)
        print(f"wrote {len(rows)} rows -> {args.out}")
    return 0


def _cmd_maintain(args) -> int:
    dataset = bench_mod.load_dataset(args.vectors, args.sequences)
    if args.snapshot:
        index = snapshot.load_snapshot(args.snapshot, dataset.vectors)
    else:
        index = _build_index(dataset, _config_from_args(args))
    sequences = list(dataset.sequences)
    with open(args.log) as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                op = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"mutation log line {line_no}: {exc}") from exc
            if op.get("op") == "insert":
                seq = op["sequence"].encode("latin-1")
                new_id = index.insert(np.asarray(op["vector"], dtype=np.float64), seq)
                sequences.append(seq)
                print(f"insert -> id {new_id}")
            elif op.get("op") == "delete":
                index.delete(int(op["id"]))
                print(f"delete id {op['id']}")
            else:
                raise FormatError(f"mutation log line {line_no}: unknown op")
    print(f"final: {index.store.n} records, {len(index.tombstones)} tombstoned")
    if args.out:
        snapshot.save_snapshot(index, args.out)
        print(f"wrote snapshot -> {args.out}")
    if args.out_vectors and args.out_sequences:
        mat = index.store.matrix.astype(np.float32)
        bench_mod.save_vectors(mat, args.out_vectors)
        bench_mod.save_sequences(sequences, args.out_sequences)
        print(f"wrote dataset -> {args.out_vectors}, {args.out_sequences}")
    return 0


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patternann",
        description="pattern-constrained approximate nearest neighbor search")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a synthetic dataset (and workload)")
    p.add_argument("--vectors", required=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--len-min", type=int, default=8)
    p.add_argument("--len-max", type=int, default=20)
    p.add_argument("--alphabet", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=int, default=0,
                   help="also emit this many queries per pattern length")
    p.add_argument("--lengths", type=_int_list, default=(2, 3, 4))
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--query-vectors", default="queries.fbin")
    p.add_argument("--query-patterns", default="patterns.txt")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("build", help="build an index snapshot from dataset files")
    p.add_argument("--vectors", required=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--out", required=True)
    _add_build_flags(p)
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("query", help="run one pattern-constrained query")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--vector", required=True, help="comma-separated floats")
    p.add_argument("--pattern", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--ef-search", type=int, default=64)
    p.set_defaults(fn=_cmd_query)

    p = sub.add_parser("bench", help="measure recall and throughput")
    p.add_argument("--vectors", required=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--snapshot", default=None,
                   help="load the automaton index instead of rebuilding")
    p.add_argument("--methods", default="automaton,prefilter,postfilter")
    p.add_argument("--queries", type=int, default=100,
                   help="queries per pattern length")
    p.add_argument("--lengths", type=_int_list, default=(2, 3, 4))
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--ef-sweep", type=_int_list,
                   default=bench_mod.DEFAULT_EF_SWEEP)
    p.add_argument("--optquery-cap", type=int, default=1_000_000)
    p.add_argument("--out", default="-")
    _add_build_flags(p)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("maintain", help="apply a JSONL insert/delete log")
    p.add_argument("--vectors", required=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--snapshot", default=None)
    p.add_argument("--log", required=True)
    p.add_argument("--out", default=None, help="write the updated snapshot here")
    p.add_argument("--out-vectors", default=None)
    p.add_argument("--out-sequences", default=None)
    _add_build_flags(p)
    p.set_defaults(fn=_cmd_maintain)
    return parser


def cli(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else 0
    try:
        return args.fn(args)
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return FORMAT_ERROR
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return RESOURCE_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
