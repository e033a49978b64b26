"""Slow reference implementations used to cross-check the fast paths.

Nothing here imports from the rest of the package on purpose.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .errors import NonFinite

__all__ = ["naive_sign_sort", "quadrature", "quadrature_error"]

# 5-point Gauss-Legendre on [-1, 1], exact through degree 9
_GL5_X = (
    -0.9061798459386640,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.9061798459386640,
)
_GL5_W = (
    0.2369268850561891,
    0.4786286704993665,
    0.5688888888888889,
    0.4786286704993665,
    0.2369268850561891,
)


def naive_sign_sort(seq: Sequence[int]):
    """Bubble-sort a generator sequence, counting adjacent swaps.

    Returns ``(sign, sorted_tuple)`` or ``(0, None)`` if a generator repeats.
    """
    s = list(seq)
    if len(set(s)) != len(s):
        return 0, None
    swaps = 0
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                swaps += 1
    return (-1) ** swaps, tuple(s)


def _panel_sum(f, a, b, n):
    h = (b - a) / n
    total = 0.0
    for k in range(n):
        mid = a + (k + 0.5) * h
        for x, w in zip(_GL5_X, _GL5_W):
            v = f(mid + 0.5 * h * x)
            if not math.isfinite(v):
                raise NonFinite(f"integrand returned {v!r} at {mid + 0.5 * h * x!r}")
            total += 0.5 * h * w * v
    return total


def quadrature_error(f: Callable[[float], float], a: float, b: float, n: int):
    """Composite 5-point Gauss-Legendre on ``n`` panels plus an error estimate.

    The estimate is the difference to the same rule on ``2n`` panels.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    coarse = _panel_sum(f, a, b, n)
    fine = _panel_sum(f, a, b, 2 * n)
    return fine, abs(fine - coarse)


def quadrature(f: Callable[[float], float], a: float, b: float, n: int) -> float:
    return quadrature_error(f, a, b, n)[0]
