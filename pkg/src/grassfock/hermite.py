"""Orthonormal Hermite functions.

``xi_n(x) = (2^n n! sqrt(pi))^(-1/2) H_n(x) exp(-x^2/2)`` evaluated by the
normalized three-term recurrence.  The Gaussian factor is carried as a
separate log-scale so that orders in the thousands stay finite far out in
the oscillatory region, where ``exp(-x^2/2)`` alone would underflow.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

__all__ = ["hermite_xi", "hermite_functions", "iter_hermite_blocks"]

_RESCALE = 1e150
_LOG_RESCALE = np.log(_RESCALE)


def iter_hermite_blocks(
    n_max: int, x, block: int = 256
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, rows)`` with ``rows[k] = xi_{start+k}(x)``.

    Rows are produced in order and only ``block`` of them are held at a
    time, so projections onto thousands of functions on fine grids stay
    cheap in memory.
    """
    x = np.asarray(x, dtype=float)
    if n_max <= 0:
        return
    p_prev = np.zeros_like(x)
    p_cur = np.full_like(x, np.pi ** -0.25)
    log_scale = -0.5 * x * x
    buf = np.empty((min(block, n_max),) + x.shape)
    start = 0
    k = 0
    for n in range(n_max):
        buf[k] = p_cur * np.exp(log_scale)
        k += 1
        if k == buf.shape[0]:
            yield start, buf[:k].copy()
            start += k
            k = 0
            buf = np.empty((min(block, n_max - start),) + x.shape) if start < n_max else buf
        p_next = np.sqrt(2.0 / (n + 1)) * x * p_cur - np.sqrt(n / (n + 1)) * p_prev
        p_prev, p_cur = p_cur, p_next
        big = np.abs(p_cur) > _RESCALE
        if big.any():
            p_cur[big] /= _RESCALE
            p_prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
    if k:
        yield start, buf[:k].copy()


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Array of shape ``(n_max,) + x.shape`` holding ``xi_0 .. xi_{n_max-1}``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max,) + x.shape)
    for start, rows in iter_hermite_blocks(n_max, x):
        out[start : start + rows.shape[0]] = rows
    return out


def hermite_xi(n: int, x):
    """``xi_n(x)``; scalar in, scalar out."""
    if n < 0:
        raise ValueError("order must be non-negative")
    vals = hermite_functions(n + 1, np.atleast_1d(np.asarray(x, dtype=float)))[n]
    return vals if np.ndim(x) else float(vals[0])
