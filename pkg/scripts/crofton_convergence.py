"""Crofton estimate and standard error against sample count for the built-in curves."""

import argparse

from riikit import integral_geometry as ig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-exp", type=int, default=6)
    args = ap.parse_args()
    print("curve,samples,mean,std_error,exact_length,z")
    for name in sorted(ig.BUILTINS):
        curve, _ = ig.builtin(name)
        for e in range(3, args.max_exp + 1):
            est = ig.crofton_length(curve, 10 ** e, seed=args.seed)
            z = (est.mean - est.exact_length) / est.std_error if est.std_error else 0.0
            print(f"{name},{10 ** e},{est.mean!r},{est.std_error!r},{est.exact_length!r},{z:.3f}")


if __name__ == "__main__":
    main()
