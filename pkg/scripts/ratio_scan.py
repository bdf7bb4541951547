"""Scan h / InjRad over standard collars and compare with the closed-form expression."""

import argparse
import math

import numpy as np

from riikit.hyperbolic import injrad_ratio_scan, proof_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l-min", type=float, default=1e-3)
    ap.add_argument("--l-max", type=float, default=2 * math.asinh(1))
    ap.add_argument("--n-l", type=int, default=400)
    ap.add_argument("--n-rho", type=int, default=401)
    args = ap.parse_args()
    ells = np.geomspace(args.l_min, args.l_max, args.n_l)
    scan = injrad_ratio_scan(ells, np.linspace(-1, 1, args.n_rho))
    print(f"min ratio   {scan.min_ratio:.12f} at (l, rho/w) = {scan.argmin}")
    print(f"1/pi        {1 / math.pi:.12f}")
    print(f"max ratio   {scan.max_ratio:.12f} at (l, rho/w) = {scan.argmax}")
    print(f"expression  {scan.proof_bound:.12f} (max over l; at l_max {proof_bound(args.l_max):.12f})")


if __name__ == "__main__":
    main()
