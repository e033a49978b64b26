import numpy as np
import pytest
from hypothesis import given, strategies as st

from grassfock import (
    DimensionTooLarge,
    GrassmannElement,
    MultiIndex,
    OperatorExpr,
    apply_operator,
    berezin_integral,
    element,
    gen,
    inner_product,
    left_derivative,
    left_multiply,
    operator_matrix,
    t_apply,
    write_matrix_csv,
)

from conftest import elements

i1, i2, i3 = gen(1), gen(2), gen(3)
ONE = GrassmannElement({0: 1})


def test_left_multiply_examples():
    assert left_multiply(i1, i2) == i1 * i2
    assert left_multiply(i1, i1).is_zero
    assert left_multiply(i2, i1) == -(i1 * i2)


def test_left_derivative_examples():
    assert left_derivative(i1, i1 * i2) == i2
    assert left_derivative(i2, i1 * i2) == -i1
    assert left_derivative(i3, i1 * i2).is_zero


def test_left_derivative_is_antilinear_in_symbol():
    g = i1 * i2 + 3 * i1
    assert left_derivative((2 + 1j) * i1, g) == (2 - 1j) * left_derivative(i1, g)


def test_berezin_examples():
    a, b = 2.0, 5.0 - 1j
    assert berezin_integral(MultiIndex.of(1), a + b * i1) == GrassmannElement({0: b})
    assert berezin_integral(MultiIndex.of(1, 2), i1 * i2) == ONE
    assert berezin_integral(MultiIndex.of(1), i2).is_zero


def test_berezin_extracts_top_coefficient():
    f = element({(): 1, (1,): 2, (2, 3): 4, (1, 2, 3): 7})
    assert berezin_integral(MultiIndex.of(1, 2, 3), f) == GrassmannElement({0: 7})


@given(elements(max_gen=5), elements(max_gen=5))
def test_berezin_equals_composite_derivative(f, g):
    alpha = MultiIndex(0b10110)
    mono = GrassmannElement({alpha.bits: 1})
    assert berezin_integral(alpha, f) == left_derivative(mono, f)


@given(elements(max_gen=5))
def test_berezin_annihilates_missing_generator(f):
    f = GrassmannElement({m: c for m, c in f.items() if not m & 0b100})
    assert berezin_integral(MultiIndex.of(3), f).is_zero


def test_t_apply_examples():
    f = 2 * i1 + (1 - 1j) * i2 * i3
    assert t_apply(f, ONE) == f
    assert t_apply(i1, i1) == ONE


@given(elements(max_gen=6), elements(max_gen=6), elements(max_gen=6))
def test_adjoint_identity(f, g, h):
    lhs = inner_product(left_derivative(f, g), h)
    rhs = inner_product(g, left_multiply(f, h))
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@given(elements(max_gen=6), elements(max_gen=6))
def test_vacuum_inner_product(f, g):
    f, g = f.soul, g.soul
    lhs = inner_product(t_apply(f, ONE), t_apply(g, ONE))
    assert abs(lhs - inner_product(f, g)) <= 1e-9 * (1 + abs(lhs))


def test_operator_matrix_examples():
    lm = operator_matrix(OperatorExpr.left_mul(i1), 1)
    ld = operator_matrix(OperatorExpr.left_deriv(i1), 1)
    t = operator_matrix(OperatorExpr.t(i1), 1)
    assert np.array_equal(lm, [[0, 0], [1, 0]])
    assert np.array_equal(ld, [[0, 1], [0, 0]])
    assert np.array_equal(t, [[0, 1], [1, 0]])


@given(elements(max_gen=4))
def test_matrix_transpose_oracle(f):
    lm = operator_matrix(OperatorExpr.left_mul(f), 4)
    ld = operator_matrix(OperatorExpr.left_deriv(f), 4)
    assert np.array_equal(ld, lm.conj().T)


@given(elements(max_gen=4, coeffs=st.floats(-5, 5)))
def test_t_is_hermitian_for_real_symbols(f):
    t = operator_matrix(OperatorExpr.t(f), 4)
    assert np.allclose(t, t.conj().T)


def test_apply_operator_dispatch():
    g = 1 + i2
    assert apply_operator(OperatorExpr.t(i1), g) == t_apply(i1, g)
    assert apply_operator(OperatorExpr.left_deriv(i2), g) == left_derivative(i2, g)


def test_operator_matrix_limits():
    with pytest.raises(DimensionTooLarge):
        operator_matrix(OperatorExpr.left_mul(i1), 13)
    with pytest.raises(ValueError):
        operator_matrix(OperatorExpr.left_mul(i3), 2)


def test_matrix_csv(tmp_path):
    mat = operator_matrix(OperatorExpr.t(0.5j * i1), 1)
    path = tmp_path / "m.csv"
    write_matrix_csv(mat, path)
    rows = [line.split(",") for line in path.read_text().splitlines()]
    back = np.array([[complex(c) for c in r] for r in rows])
    assert np.array_equal(back, mat)
