"""Property fuzzing of hypograph partitions, optionally against the grid oracle."""

import argparse
import json
import time

from riikit.hypograph import PartitionParams, thick_thin_partition
from riikit.hypograph.oracle import compare_with_grid, grid_partition
from riikit.hypograph.properties import check_field
from riikit.hypograph.random_fields import random_field


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--first", type=int, default=0)
    ap.add_argument("--oracle", action="store_true", help="also compare with the grid brute force")
    ap.add_argument("--levels", type=int, default=1000)
    args = ap.parse_args()
    t0 = time.perf_counter()
    bad = {}
    for seed in range(args.first, args.first + args.seeds):
        f = random_field(seed)
        problems = check_field(f, seed)
        if args.oracle:
            p = thick_thin_partition(f, PartitionParams(t_min=float(f.xi)))
            problems += compare_with_grid(p, grid_partition(f, n_levels=args.levels))
        if problems:
            bad[seed] = problems
    print(json.dumps({"seeds": args.seeds, "violations": bad, "seconds": round(time.perf_counter() - t0, 2)},
                     indent=1))


if __name__ == "__main__":
    main()
