"""Sweep the weighted-product inequality over weight growth rates and orders."""

import argparse

import numpy as np

from grassfock import BoundDiverges, WeightSystem, vage_constant
from grassfock.checks import vage_inequalities


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    orders = ((1, 0), (2, 1), (3, 1))
    for lam in (0.25, 0.5, 1.0, 2.0):
        w = WeightSystem.linear(lam)
        rng = np.random.default_rng(args.seed)
        try:
            res = vage_inequalities(rng, args.samples, w, n=args.n, orders=orders)
        except BoundDiverges as exc:
            print(f"lambda={lam}: {type(exc).__name__}: {exc}")
            continue
        consts = ", ".join(f"C({d})={vage_constant(d, w):.5f}" for d in (1, 2))
        worst = min(r.worst_margin for r in res)
        print(f"lambda={lam}: {consts}; worst slack {worst:.4g}; all pass {all(r.passed for r in res)}")


if __name__ == "__main__":
    main()
