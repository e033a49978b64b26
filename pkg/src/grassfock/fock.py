"""Operators on the truncated Fock space: M_f, its adjoint, Berezin, T_f."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import GrassmannElement, MultiIndex, multiply, swap_parity
from .errors import DimensionTooLarge

__all__ = [
    "OperatorExpr",
    "left_multiply",
    "left_derivative",
    "berezin_integral",
    "t_apply",
    "apply_operator",
    "operator_matrix",
    "write_matrix_csv",
    "MAX_MATRIX_GENERATORS",
]

MAX_MATRIX_GENERATORS = 12


@dataclass(frozen=True)
class OperatorExpr:
    kind: Literal["LeftMul", "LeftDeriv", "T"]
    f: GrassmannElement

    @classmethod
    def left_mul(cls, f):
        return cls("LeftMul", f)

    @classmethod
    def left_deriv(cls, f):
        return cls("LeftDeriv", f)

    @classmethod
    def t(cls, f):
        return cls("T", f)


def left_multiply(f: GrassmannElement, g: GrassmannElement) -> GrassmannElement:
    return multiply(f, g)


def left_derivative(f: GrassmannElement, g: GrassmannElement) -> GrassmannElement:
    """``M_f^* g``, the adjoint of left multiplication.

    For a monomial, ``M_{i_a}^* i_b = (-1)^sigma(a, b\\a) i_{b\\a}`` when
    ``a`` is contained in ``b`` and zero otherwise.  Coefficients of ``f``
    enter conjugated.
    """
    acc: dict[int, complex] = {}
    gitems = list(g.items())
    for a, fa in f.items():
        cfa = fa.conjugate()
        for b, gb in gitems:
            if a & b != a:
                continue
            rest = b ^ a
            v = cfa * gb
            if swap_parity(a, rest):
                v = -v
            acc[rest] = acc.get(rest, 0) + v
    return GrassmannElement(acc)


def berezin_integral(alpha: MultiIndex, f: GrassmannElement) -> GrassmannElement:
    """Iterated left derivatives, innermost on the smallest generator.

    ``int di_alpha f = M*_{a_t} ... M*_{a_1} f`` which is the same operator
    as ``M*_{i_alpha}``.
    """
    out = f
    for n in alpha.gens:
        out = left_derivative(GrassmannElement({1 << (n - 1): 1}), out)
    return out


def t_apply(f: GrassmannElement, g: GrassmannElement) -> GrassmannElement:
    return multiply(f, g) + left_derivative(f, g)


_APPLY = {
    "LeftMul": left_multiply,
    "LeftDeriv": left_derivative,
    "T": t_apply,
}


def apply_operator(op: OperatorExpr, g: GrassmannElement) -> GrassmannElement:
    return _APPLY[op.kind](op.f, g)


def operator_matrix(op: OperatorExpr, n: int) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix with entry ``[k, j] = <op i_j, i_k>``.

    Basis order is the bit pattern of the index (1, i1, i2, i1i2, ...).
    """
    if n > MAX_MATRIX_GENERATORS:
        raise DimensionTooLarge(
            f"operator_matrix supports at most {MAX_MATRIX_GENERATORS} generators, got {n}"
        )
    if op.f.support >> n:
        raise ValueError(f"operator symbol uses generators beyond {n}")
    size = 1 << n
    mat = np.zeros((size, size), dtype=complex)
    for j in range(size):
        col = apply_operator(op, GrassmannElement({j: 1}))
        for k, c in col.items():
            mat[k, j] = c
    return mat


def write_matrix_csv(mat: np.ndarray, path) -> None:
    """Row-major CSV, one complex entry per cell as ``re+imj``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in mat:
            w.writerow(f"{c.real:.17g}{c.imag:+.17g}j" for c in row)
