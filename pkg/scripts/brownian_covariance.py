"""Brownian covariance from the Hermite series against min(t, s).

Prints the max error on the 0.25..2.0 grid for a sweep of truncation orders.
"""

import argparse
import time

import numpy as np

from grassfock import ProcessModel, SpectralDensity, covariance_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, nargs="+", default=[100, 200, 400, 800, 1600])
    args = ap.parse_args()
    grid = np.arange(1, 9) * 0.25
    exact = np.minimum.outer(grid, grid)
    print(f"{'n_max':>6} {'max_err':>10} {'seconds':>8}")
    for n in args.n_max:
        t0 = time.perf_counter()
        k = covariance_matrix(ProcessModel(SpectralDensity.constant(), n_max=n), grid)
        print(f"{n:>6} {np.abs(k - exact).max():>10.5f} {time.perf_counter() - t0:>8.2f}")


if __name__ == "__main__":
    main()
