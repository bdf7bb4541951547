"""Area, boundary length and fiber residuals across the annulus family."""

import argparse
import csv
import sys

from riikit.holomorphic import SWEEP_COLUMNS, annulus_row


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, nargs="+", default=[10.0 ** k for k in range(-3, 7)])
    ap.add_argument("--order", type=int, default=64)
    args = ap.parse_args()
    w = csv.DictWriter(sys.stdout, fieldnames=list(SWEEP_COLUMNS), lineterminator="\n")
    w.writeheader()
    for a in args.a:
        w.writerow(annulus_row(a, args.order, 256))


if __name__ == "__main__":
    main()
