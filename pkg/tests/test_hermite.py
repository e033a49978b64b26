import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial.hermite import hermval
from scipy.special import roots_hermite

from grassfock import hermite_functions, hermite_xi, iter_hermite_blocks


def reference_xi(n, x):
    """Direct physicists' Hermite polynomial times the Gaussian, in log space."""
    c = np.zeros(n + 1)
    c[n] = 1.0
    log_norm = -0.5 * (n * math.log(2) + math.lgamma(n + 1) + 0.5 * math.log(math.pi))
    return hermval(x, c) * math.exp(log_norm) * np.exp(-0.5 * x * x)


def test_examples():
    assert hermite_xi(0, 0.0) == pytest.approx(math.pi**-0.25, rel=1e-15)
    assert hermite_xi(0, 0.0) == pytest.approx(0.751126, abs=1e-6)
    assert hermite_xi(1, 0.0) == 0.0


@given(st.integers(0, 60), st.floats(-8, 8))
def test_matches_direct_formula(n, x):
    assert hermite_xi(n, x) == pytest.approx(reference_xi(n, x), rel=1e-9, abs=1e-12)


def test_orthonormal_on_gauss_hermite_grid():
    # xi_n xi_m = poly * exp(-x^2): exact on a Gauss-Hermite rule of enough points
    x, w = roots_hermite(80)
    vals = hermite_functions(51, x) * np.exp(0.5 * x * x)
    gram = (vals * w) @ vals.T
    assert np.abs(gram - np.eye(51)).max() < 1e-8


def test_high_orders_stay_finite_and_bounded():
    x = np.linspace(-70, 70, 2001)
    vals = hermite_functions(2000, x)
    assert np.all(np.isfinite(vals))
    # Cramer-type bound |xi_n| <= pi^(-1/4)
    assert np.abs(vals).max() <= math.pi**-0.25 + 1e-10


def test_far_tail_underflows_to_zero():
    assert hermite_xi(3, 60.0) == 0.0


def test_blocks_cover_all_rows():
    x = np.linspace(-3, 3, 7)
    starts = []
    stacked = []
    for start, rows in iter_hermite_blocks(50, x, block=16):
        starts.append(start)
        stacked.append(rows)
    assert starts == [0, 16, 32, 48]
    assert np.array_equal(np.concatenate(stacked), hermite_functions(50, x))


def test_vector_input():
    x = np.array([0.0, 1.0])
    assert hermite_xi(2, x).shape == (2,)
    with pytest.raises(ValueError):
        hermite_xi(-1, 0.0)
