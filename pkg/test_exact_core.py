#!/usr/bin/env python3
"""
Tests for the exact arithmetic kernel
"""

import pickle
from fractions import Fraction

import numpy as np
import pytest

from exact_core import (
    I_UNIT,
    ONE,
    GaussianRational,
    MultiVector,
    SparsePolynomial,
    determinant,
    euler_derivative,
    format_fraction,
    interior_product,
    iterated_contraction,
    matrix_rank,
    merge_sign,
    nullspace,
    polynomial_product,
    row_echelon,
)
from exceptions import DimensionMismatchError, GradeUnderflowError, IndexOutOfRangeError


def x_plus_y():
    return SparsePolynomial(2, {(1, 0): 1, (0, 1): 1})


def test_gaussian_field_operations():
    z = GaussianRational(Fraction(1, 2), 3)
    assert z * z.conjugate() == z.norm()
    assert z / z == ONE
    assert I_UNIT ** 2 == -1
    assert (1 - z) + z == 1
    assert str(GaussianRational(2, -3)) == "2-3*i"
    assert str(GaussianRational(0, Fraction(1, 3))) == "1/3*i"
    assert str(GaussianRational(5)) == "5"


def test_gaussian_rejects_floats_and_zero_division():
    with pytest.raises(TypeError):
        GaussianRational(0.5)
    with pytest.raises(ZeroDivisionError):
        ONE / GaussianRational(0)


def test_gaussian_is_immutable_and_picklable():
    z = GaussianRational(1, 1)
    with pytest.raises(AttributeError):
        z._re = Fraction(2)
    assert pickle.loads(pickle.dumps(z)) == z
    assert hash(GaussianRational(3)) == hash(Fraction(3))


def test_format_fraction():
    assert format_fraction(Fraction(-1, 6)) == "-1/6"
    assert format_fraction(Fraction(4, 2)) == "2"


def test_product_of_x_plus_y_with_itself():
    square = polynomial_product(x_plus_y(), x_plus_y())
    assert square.terms == {(0, 2): 1, (1, 1): 2, (2, 0): 1}


def test_product_with_zero_polynomial():
    assert polynomial_product(x_plus_y(), SparsePolynomial(2)).is_zero()


def test_product_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        polynomial_product(x_plus_y(), SparsePolynomial(3, {(1, 0, 0): 1}))


def test_product_support_inside_minkowski_sum():
    a = SparsePolynomial(2, {(2, 0): 1, (0, 3): -1, (1, 1): I_UNIT})
    b = SparsePolynomial(2, {(1, 0): 2, (0, 1): Fraction(1, 3)})
    sums = {(p[0] + q[0], p[1] + q[1]) for p in a.supp() for q in b.supp()}
    assert set(polynomial_product(a, b).supp()) <= sums


def test_euler_derivative():
    g = SparsePolynomial(2, {(2, 0): 1, (0, 3): 1})
    assert euler_derivative(g, 1).terms == {(2, 0): 2}
    assert euler_derivative(g, 2).terms == {(0, 3): 3}
    assert euler_derivative(SparsePolynomial.constant(2, 7), 1).is_zero()
    with pytest.raises(IndexOutOfRangeError):
        euler_derivative(g, 3)


def test_polynomial_arithmetic_and_text():
    f = SparsePolynomial(2, {(2, 0): 1, (0, 3): 1})
    assert f - f == SparsePolynomial(2)
    assert (x_plus_y() ** 2).coefficient((1, 1)) == 2
    assert str(f) == "y^3 + x^2"
    assert str(SparsePolynomial(2, {(3, 0): Fraction(1, 3), (0, 1): I_UNIT})) == "1/3*x^3 + i*y"
    assert pickle.loads(pickle.dumps(f)) == f


def test_embed_pads_exponents():
    assert x_plus_y().embed(3).supp() == [(0, 1, 0), (1, 0, 0)]


def test_merge_sign():
    assert merge_sign((2,), (1,)) == (-1, (1, 2))
    assert merge_sign((1,), (2, 3)) == (1, (1, 2, 3))
    assert merge_sign((1,), (1, 2)) == (0, ())


def test_multivector_basis_sign():
    assert MultiVector.basis(2, (2, 1)) == MultiVector(2, 2, {(1, 2): -1})
    assert MultiVector.basis(2, (1, 1)).is_zero()


def test_wedge_is_anticommutative():
    e1, e2 = MultiVector.basis(3, (1,)), MultiVector.basis(3, (2,))
    assert e1.wedge(e2) == e2.wedge(e1).scale(-1)


def test_iterated_contraction_sign_convention():
    top = MultiVector.basis(2, (1, 2))
    result = iterated_contraction([[1, 0], [0, 1]], top)
    assert result.grade == 0
    assert result.components == {(): -1}


def test_single_contraction():
    top = MultiVector.basis(2, (1, 2))
    assert interior_product([1, 0], top) == MultiVector.basis(2, (2,))
    assert interior_product([0, 1], top) == MultiVector.basis(2, (1,)).scale(-1)


def test_too_many_contractions():
    with pytest.raises(GradeUnderflowError):
        iterated_contraction([[1, 0], [0, 1]], MultiVector.basis(2, (1,)))


def test_row_echelon_and_rank():
    rows = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    reduced, pivots = row_echelon(rows)
    assert pivots == [0]
    assert reduced == [[1, 2]]
    assert matrix_rank(rows) == 1
    assert matrix_rank([]) == 0


def test_nullspace_annihilates_rows():
    rows = [[Fraction(1), Fraction(1), Fraction(0)], [Fraction(0), Fraction(1), Fraction(1)]]
    basis = nullspace(rows, 3)
    assert len(basis) == 1
    for r in rows:
        assert sum(a * b for a, b in zip(r, basis[0])) == 0


def test_nullspace_of_empty_matrix_is_everything():
    assert nullspace([], 2) == [[1, 0], [0, 1]]


def test_elimination_over_gaussian_rationals():
    rows = [[ONE, I_UNIT], [I_UNIT, GaussianRational(-1)]]
    assert matrix_rank(rows, 2) == 1


def test_determinant():
    assert determinant([[Fraction(2), Fraction(0)], [Fraction(0), Fraction(3)]]) == 6
    assert determinant([[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]) == -1
    assert determinant([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]) == 0


def _vector(n, coords):
    return MultiVector(n, 1, {(i + 1,): int(c) for i, c in enumerate(coords) if c})


def test_iterated_contraction_is_a_signed_determinant():
    rng = np.random.default_rng(14)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        r = int(rng.integers(1, n + 1))
        us = rng.integers(-3, 4, (r, n))
        vs = rng.integers(-3, 4, (r, n))
        omega = _vector(n, us[0])
        for u in us[1:]:
            omega = omega.wedge(_vector(n, u))
        result = iterated_contraction([[int(c) for c in v] for v in vs], omega)
        pairing = [[Fraction(int(v @ u)) for u in us] for v in vs]
        sign = (-1) ** (r * (r - 1) // 2)
        assert result.grade == 0
        assert result.components.get((), 0) == sign * determinant(pairing)


def test_dependent_covectors_contract_to_zero():
    omega = MultiVector.basis(3, (1, 2, 3))
    assert iterated_contraction([[1, 2, 0], [2, 4, 0]], omega).is_zero()
    assert iterated_contraction([[1, 0, 1], [0, 1, 1], [1, 1, 2]], omega).is_zero()


def test_gaussian_determinant_and_nullspace():
    assert determinant([[ONE, I_UNIT], [I_UNIT, ONE]]) == 2
    [kernel] = nullspace([[ONE, I_UNIT]], 2, one=ONE)
    assert kernel == [-I_UNIT, ONE]
    reduced, pivots = row_echelon([[I_UNIT, ONE]])
    assert pivots == [0]
    assert reduced == [[ONE, -I_UNIT]]
