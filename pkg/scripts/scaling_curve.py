#!/usr/bin/env python3
"""Space-growth experiment: index prefixes of a synthetic dataset and
report how the total indexed-id count grows with total sequence length,
against the per-pattern-forest insertion count and the m^1.5 bound."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from patternann import BuildConfig, Dataset, build
from patternann.bench import gen_synthetic


def optquery_insertions(sequences) -> int:
    total = 0
    for s in sequences:
        total += len({s[j:k] for j in range(len(s))
                      for k in range(j + 1, len(s) + 1)})
    return total


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--len-min", type=int, default=8)
    ap.add_argument("--len-max", type=int, default=14)
    ap.add_argument("--alphabet", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ds = gen_synthetic(args.n, args.dim, (args.len_min, args.len_max),
                       args.alphabet, args.seed)
    print(f"{'pct':>4}{'m':>9}{'states':>9}{'sum_base':>10}{'sum_ids':>10}"
          f"{'forest':>10}{'2*m^1.5':>12}")
    for pct in range(10, 101, 10):
        cut = ds.n * pct // 100
        sub = Dataset(ds.vectors[:cut], ds.sequences[:cut])
        idx = build(sub, BuildConfig(skip_threshold=None))
        print(f"{pct:>4}{sub.m:>9}{idx.esam.state_count():>9}"
              f"{idx.total_base_size():>10}{idx.total_id_set_size():>10}"
              f"{optquery_insertions(sub.sequences):>10}"
              f"{2 * sub.m ** 1.5:>12.0f}")


if __name__ == "__main__":
    main()
