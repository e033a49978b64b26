"""Batched dense kernels for Lambda_N.

A dense element of Lambda_N is a complex array whose last axis has length
``2**N``; entry ``k`` is the coefficient of the monomial whose generator
set is the bit pattern of ``k``.  Leading axes are batch axes.

The product uses the split ``z = a + b i_N`` on the highest generator:

    (a + b i_N)(c + d i_N) = ac + (ad + b P(c)) i_N

where ``P`` is the grade involution.  That gives three half-size products
per level, i.e. ``3**N`` scalar multiplies instead of ``4**N``, and every
level is vectorized over the batch.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .core import ConjugationId, GrassmannElement

__all__ = [
    "popcounts",
    "grade_signs",
    "dense_multiply",
    "dense_left_derivative",
    "dense_conjugate",
    "to_dense",
    "from_dense",
    "random_dense",
]


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    k = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(k)
    for _ in range(n):
        out += k & 1
        k = k >> 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def grade_signs(n: int) -> np.ndarray:
    s = np.where(popcounts(n) % 2 == 0, 1.0, -1.0)
    s.setflags(write=False)
    return s


def _dim(x: np.ndarray) -> int:
    size = x.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"last axis must have length 2**N, got {size}")
    return n


def _basis_first(x: np.ndarray) -> np.ndarray:
    # kernels run with the basis on axis 0 so every half-split is a contiguous block
    return np.ascontiguousarray(np.moveaxis(x, -1, 0).reshape(x.shape[-1], -1))


def _mul(z, w, n):
    if n == 0:
        return z * w
    h = 1 << (n - 1)
    a, b = z[:h], z[h:]
    c, d = w[:h], w[h:]
    out = np.empty_like(z)
    if n == 1:
        out[:1] = a * c
        out[1:] = a * d + b * c
        return out
    if n == 2:
        # unrolled: basis (1, i1, i2, i1 i2)
        z0, z1, z2, z3 = z
        w0, w1, w2, w3 = w
        out[0] = z0 * w0
        out[1] = z0 * w1 + z1 * w0
        out[2] = z0 * w2 + z2 * w0
        out[3] = z0 * w3 + z3 * w0 + z1 * w2 - z2 * w1
        return out
    out[:h] = _mul(a, c, n - 1)
    out[h:] = _mul(a, d, n - 1)
    out[h:] += _mul(b, c * grade_signs(n - 1)[:, None], n - 1)
    return out


def dense_multiply(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Batched Grassmann product of dense arrays with matching last axis."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    n = _dim(z)
    if _dim(w) != n:
        raise ValueError("operands live in different Lambda_N")
    z, w = np.broadcast_arrays(z, w)
    out = _mul(_basis_first(z), _basis_first(w), n)
    return np.moveaxis(out.reshape((1 << n,) + z.shape[:-1]), 0, -1)


def _lder(f, g, n):
    # block form of M_f on (c, d) is [[M_a, 0], [M_b P, M_a]]; take the adjoint
    if n == 0:
        return np.conj(f) * g
    h = 1 << (n - 1)
    a, b = f[:h], f[h:]
    c, d = g[:h], g[h:]
    out = np.empty_like(g)
    if n == 2:
        f0, f1, f2, f3 = np.conj(f)
        g0, g1, g2, g3 = g
        out[0] = f0 * g0 + f1 * g1 + f2 * g2 + f3 * g3
        out[1] = f0 * g1 - f2 * g3
        out[2] = f0 * g2 + f1 * g3
        out[3] = f0 * g3
        return out
    out[:h] = _lder(a, c, n - 1)
    out[:h] += grade_signs(n - 1)[:, None] * _lder(b, d, n - 1)
    out[h:] = _lder(a, d, n - 1)
    return out


def dense_left_derivative(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Batched ``M_f^* g`` (adjoint of left multiplication by ``f``)."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = _dim(f)
    if _dim(g) != n:
        raise ValueError("operands live in different Lambda_N")
    f, g = np.broadcast_arrays(f, g)
    out = _lder(_basis_first(f), _basis_first(g), n)
    return np.moveaxis(out.reshape((1 << n,) + f.shape[:-1]), 0, -1)


def dense_conjugate(z: np.ndarray, c) -> np.ndarray:
    cid = ConjugationId.of(c)
    z = np.asarray(z, dtype=complex)
    k = popcounts(_dim(z))
    e = np.zeros_like(k)
    if cid.value & 1:
        e = e + k + k * (k - 1) // 2
    if cid.value & 4:
        e = e + k
    sign = np.where(e % 2 == 0, 1.0, -1.0)
    if cid.value & 2:
        z = np.conj(z)
    return z * sign


def to_dense(z: GrassmannElement, n: int) -> np.ndarray:
    out = np.zeros(1 << n, dtype=complex)
    for m, c in z.items():
        if m >> n:
            raise ValueError(f"element uses generators beyond {n}")
        out[m] = c
    return out


def from_dense(v: np.ndarray) -> GrassmannElement:
    v = np.asarray(v)
    idx = np.flatnonzero(v)
    return GrassmannElement({int(k): complex(v[k]) for k in idx})


def random_dense(
    rng: np.random.Generator,
    n: int,
    size: int,
    density: float | None = None,
    complex_coeffs: bool = True,
) -> np.ndarray:
    """Random batch of dense elements with a per-sample random sparsity.

    When ``density`` is None each sample draws its own keep-probability
    uniformly from (0, 1], so the batch mixes near-monomials with full
    elements.
    """
    shape = (size, 1 << n)
    z = rng.standard_normal(shape)
    if complex_coeffs:
        z = z + 1j * rng.standard_normal(shape)
    if density is None:
        keep = rng.random((size, 1)) ** 2
        keep = np.maximum(keep, 1.0 / (1 << n))
    else:
        keep = np.full((size, 1), density)
    mask = rng.random(shape) < keep
    # never return an all-zero sample
    empty = ~mask.any(axis=1)
    if empty.any():
        mask[empty, rng.integers(0, 1 << n, empty.sum())] = True
    return np.where(mask, z, 0)
