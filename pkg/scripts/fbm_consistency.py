"""Power-law spectral density: series covariance against the quadrature oracle.

Also fits the constant between the oracle and the fBm closed form.
"""

import argparse

import numpy as np

from grassfock import (
    ProcessModel,
    SpectralDensity,
    covariance_matrix,
    covariance_oracle,
    fbm_closed_form,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--H", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    ap.add_argument("--n-max", type=int, nargs="+", default=[100, 400, 1600])
    args = ap.parse_args()
    grid = np.arange(1, 9) * 0.25
    for h in args.H:
        d = SpectralDensity.power_law(h)
        oracle = np.array([[covariance_oracle(d, t, s) for s in grid] for t in grid])
        closed = np.array([[fbm_closed_form(t, s, h) for s in grid] for t in grid])
        scale = oracle / closed
        print(f"H={h}: fitted scale {scale.mean():.10f} spread {np.ptp(scale):.2e} "
              f"(1/2pi = {1 / (2 * np.pi):.10f})")
        for n in args.n_max:
            k = covariance_matrix(ProcessModel(d, n_max=n), grid)
            print(f"  n_max={n:>5} max rel err {(np.abs(k - oracle) / oracle).max():.4f}")


if __name__ == "__main__":
    main()
