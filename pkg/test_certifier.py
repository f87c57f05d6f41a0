#!/usr/bin/env python3
"""
Tests for the graded quotient certifier
"""

from fractions import Fraction

import pytest

from certifier import (
    CERTIFIED,
    INCONCLUSIVE,
    INVALID_INPUT,
    InImage,
    LogForm,
    NotInImage,
    admissible_faces,
    certify,
    certify_all,
    graded_piece_basis,
    holomorphic_to_log,
    image_membership,
    koszul_de_rham_matrix,
    quasi_homogeneous_weights,
    weighted_alpha,
)
from exact_core import I_UNIT, ZERO, SparsePolynomial
from exceptions import GradeUnderflowError
from face_grading import FaceContext, face_polynomial
from newton_polytope import LeadingPair, build_newton_polyhedron

CUSP = SparsePolynomial(2, {(2, 0): 1, (0, 3): 1})
FERMAT_CUBIC = SparsePolynomial(2, {(3, 0): 1, (0, 3): 1})
T255 = SparsePolynomial(2, {(5, 0): 1, (2, 2): 1, (0, 5): 1})
ONE = SparsePolynomial.constant(2, 1)


def h(terms):
    return SparsePolynomial(2, terms)


def edge(f):
    P = build_newton_polyhedron(f.supp())
    return P, [face for face in P.compact_faces() if face.dim == 1][0]


def test_holomorphic_forms_shift_by_ones():
    form = holomorphic_to_log(h({(0, 0): 1, (1, 0): 2}))
    assert form.terms == {((1, 2), (1, 1)): 1, ((1, 2), (2, 1)): 2}
    assert form.support() == [(1, 1), (2, 1)]


def test_d_squared_vanishes():
    g = LogForm.from_function(h({(2, 1): 3, (0, 4): 1}))
    assert g.d().p == 1
    assert g.d().d().is_zero()


def test_d_of_a_function():
    dx = LogForm.from_function(h({(1, 0): 1})).d()
    assert dx.terms == {((1,), (1, 0)): 1}


def test_wedge_signs():
    dx = LogForm(2, 1, {((1,), (0, 0)): 1})
    dy = LogForm(2, 1, {((2,), (0, 0)): 1})
    assert dy.wedge(dx) == dx.wedge(dy).scale(-1)
    assert dx.wedge(dx).is_zero()


def test_graded_piece_basis_sizes():
    P, face = edge(FERMAT_CUBIC)
    ctx = FaceContext.from_face(P, face)
    assert len(graded_piece_basis(ctx, 2, Fraction(4, 3))) == 5
    assert len(graded_piece_basis(ctx, 0, Fraction(1, 3))) == 2
    assert len(graded_piece_basis(ctx, 1, Fraction(1, 3))) == 4
    assert len(graded_piece_basis(ctx, 0, Fraction(-1, 3))) == 0
    with pytest.raises(GradeUnderflowError):
        graded_piece_basis(ctx, 3, 1)


def test_koszul_de_rham_matrix_entries():
    P, face = edge(FERMAT_CUBIC)
    ctx = FaceContext.from_face(P, face)
    matrix = koszul_de_rham_matrix(ctx, face_polynomial(FERMAT_CUBIC, face, P), Fraction(4, 3))
    assert matrix.shape == (5, 2)
    where = matrix.target.index()
    columns = {m: k for k, (_, m) in enumerate(matrix.domain.elements)}
    x_column = matrix.column(columns[(1, 0)])
    y_column = matrix.column(columns[(0, 1)])
    assert x_column[where[((1, 2), (1, 3))]] == -3
    assert y_column[where[((1, 2), (3, 1))]] == 3
    assert sum(1 for c in x_column if c) == 1
    assert matrix.rank() == 2


def test_image_membership():
    rows = [[1], [0]]
    inside = image_membership(rows, [2, 0])
    assert isinstance(inside, InImage)
    assert inside.solution == (2,)
    outside = image_membership(rows, [0, 1])
    assert isinstance(outside, NotInImage)
    assert outside.verify(rows, [0, 1])


def test_image_membership_with_no_columns():
    outside = image_membership([[], []], [1, 0])
    assert isinstance(outside, NotInImage)
    assert outside.functional[0] != ZERO


def test_cusp_volume_form_is_certified():
    P, face = edge(CUSP)
    cert = certify(CUSP, face, ONE, P=P, trials=4)
    assert cert.verdict == CERTIFIED
    assert cert.pair == LeadingPair(Fraction(-1, 6), 0)
    assert cert.a == Fraction(5, 6)
    assert cert.r == 1
    assert cert.quotient_dim == 1
    assert cert.witness == {"x*y*dx/x*dy/y": 1}
    assert cert.lower_bound == cert.pair


def test_fermat_cubic_with_xy():
    certificates = certify_all(FERMAT_CUBIC, h({(1, 1): 1}), trials=4)
    assert [(c.verdict, c.pair) for c in certificates] == [(CERTIFIED, LeadingPair(Fraction(1, 3), 0))]


def test_vertex_face_gives_a_logarithm():
    certificates = certify_all(T255, ONE, trials=4)
    assert [(c.verdict, c.pair) for c in certificates] == [(CERTIFIED, LeadingPair(Fraction(-1, 2), 1))]


def test_round_circle_certifies_zero():
    f = h({(2, 0): 1, (0, 2): 1})
    assert [c.pair for c in certify_all(f, ONE, trials=4)] == [LeadingPair(Fraction(0), 0)]


def test_exact_image_is_inconclusive():
    P, face = edge(CUSP)
    cert = certify(CUSP, face, h({(2, 0): 2, (0, 3): -3}), P=P, trials=4)
    assert cert.verdict == INCONCLUSIVE
    assert cert.a == Fraction(11, 6)
    assert cert.pair is None


def test_integer_degree_on_a_vertex_is_invalid():
    P = build_newton_polyhedron(T255.supp())
    vertex = P.face_by_vertices([(2, 2)])
    cert = certify(T255, vertex, h({(1, 1): 1}), P=P)
    assert cert.verdict == INVALID_INPUT
    assert cert.reason == "integer-a-with-r-equals-n"


@pytest.mark.parametrize("f, face_pick, form, reason", [
    (h({(1, 1): 1}), lambda P: P.compact_faces()[0], ONE, "non-convenient"),
    (CUSP, lambda P: P.face_by_vertices([(2, 0), (0, 3)]), SparsePolynomial(2), "zero-form"),
    (CUSP, lambda P: [f for f in P.faces if not f.is_compact][0], ONE, "face-not-compact"),
    (CUSP, lambda P: P.face_by_vertices([(2, 0)]), ONE, "face-on-hyperplane"),
    (CUSP, lambda P: P.face_by_vertices([(2, 0), (0, 3)]), h({(0, 0): 1, (1, 0): 1}), "mixed-degrees"),
    (T255, lambda P: P.face_by_vertices([(2, 2)]), h({(1, 0): 1}), "support-not-interior"),
])
def test_invalid_inputs(f, face_pick, form, reason):
    P = build_newton_polyhedron(f.supp())
    cert = certify(f, face_pick(P), form, P=P, trials=2)
    assert cert.verdict == INVALID_INPUT
    assert cert.reason == reason
    assert "reason" in cert.as_dict()


def test_admissible_faces_for_auto_selection():
    P, face = edge(CUSP)
    assert admissible_faces(P, holomorphic_to_log(ONE)) == [(face, Fraction(5, 6))]
    assert admissible_faces(P, holomorphic_to_log(h({(0, 0): 1, (1, 0): 1}))) == []


def test_certify_all_without_admissible_face():
    certificates = certify_all(CUSP, h({(0, 0): 1, (1, 0): 1}))
    assert [c.reason for c in certificates] == ["support-not-interior"]


def test_quasi_homogeneous_cross_check():
    weights = quasi_homogeneous_weights(CUSP)
    assert weights == (Fraction(1, 2), Fraction(1, 3))
    assert weighted_alpha(weights, (0, 0)) == Fraction(-1, 6)
    assert weighted_alpha(quasi_homogeneous_weights(FERMAT_CUBIC), (1, 1)) == Fraction(1, 3)


def test_certificate_document():
    P, face = edge(CUSP)
    doc = certify(CUSP, face, ONE, P=P, trials=2, seed=5).as_dict()
    assert doc["verdict"] == "Certified"
    assert doc["alpha"] == "-1/6"
    assert doc["k"] == 0
    assert doc["a"] == "5/6"
    assert doc["nondegeneracy"]["verdict"] == "pass-heuristic"


@pytest.mark.parametrize("c", [3, Fraction(-2, 5), I_UNIT])
def test_verdict_survives_scaling(c):
    P, face = edge(FERMAT_CUBIC)
    phi = holomorphic_to_log(h({(1, 1): 1}))
    plain = certify(FERMAT_CUBIC, face, phi, P=P, trials=2)
    scaled = certify(FERMAT_CUBIC, face, phi.scale(c), P=P, trials=2)
    assert (scaled.verdict, scaled.pair, scaled.a) == (plain.verdict, plain.pair, plain.a)


def test_verdict_survives_adding_an_exact_term():
    P, face = edge(FERMAT_CUBIC)
    phi = holomorphic_to_log(h({(1, 1): 1}))
    df = LogForm.from_function(face_polynomial(FERMAT_CUBIC, face, P)).d()
    exact = df.wedge(LogForm.from_function(h({(1, 0): 1})).d())
    assert exact.terms == {((1, 2), (1, 3)): -3}
    shifted = certify(FERMAT_CUBIC, face, phi + exact, P=P, trials=2)
    assert shifted.verdict == CERTIFIED
    assert shifted.pair == certify(FERMAT_CUBIC, face, phi, P=P, trials=2).pair


@pytest.mark.parametrize("f, forms", [
    (CUSP, [(0, 0), (0, 1)]),
    (FERMAT_CUBIC, [(0, 0), (1, 1)]),
])
def test_certificates_match_weighted_degrees(f, forms):
    weights = quasi_homogeneous_weights(f)
    for m in forms:
        [certificate] = certify_all(f, h({m: 1}), trials=2)
        assert certificate.verdict == CERTIFIED
        assert certificate.pair == LeadingPair(weighted_alpha(weights, m), 0)
