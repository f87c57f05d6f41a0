#!/usr/bin/env python3
"""
Tests for Newton polyhedra, Newton orders and lattice points of scaled faces
"""

from fractions import Fraction

import pytest

from certifier import LogForm, holomorphic_to_log
from exact_core import SparsePolynomial
from exceptions import DegeneratePolyhedronError, EmptySupportError, NonConvenientError, UnattainedOrderError
from newton_polytope import (
    Facet,
    LeadingPair,
    brute_force_lattice_points,
    build_newton_polyhedron,
    in_scaled_face,
    is_convenient,
    lattice_count_identity,
    lattice_points_scaled_face,
    minimal_generators,
    newton_number,
    newton_order_monomial,
    newton_pair_form,
    vasilev_lower_bound,
)


def cusp():
    return build_newton_polyhedron([(2, 0), (0, 3)])


def t255():
    return build_newton_polyhedron([(5, 0), (2, 2), (0, 5)])


def dx_dy():
    return holomorphic_to_log(SparsePolynomial.constant(2, 1))


def test_minimal_generators_drop_dominated_points():
    assert minimal_generators([(2, 0), (3, 0), (0, 3), (2, 1)]) == [(0, 3), (2, 0)]


def test_cusp_facets_include_coordinate_hyperplanes():
    P = cusp()
    assert P.facets == (Facet((3, 2), 6), Facet((0, 1), 0), Facet((1, 0), 0))
    assert P.generators == ((0, 3), (2, 0))


def test_cusp_face_lattice():
    P = cusp()
    assert len(P.faces) == 5
    compact = P.compact_faces()
    assert [f.vertices for f in compact] == [((0, 3),), ((2, 0),), ((0, 3), (2, 0))]
    edge = P.face_by_vertices([(2, 0), (0, 3)])
    assert edge.dim == 1
    assert edge.codim == 1
    assert not edge.on_coordinate_hyperplane
    assert all(v.on_coordinate_hyperplane for v in compact if v.dim == 0)
    assert [f.id for f in P.faces] == list(range(5))


def test_non_compact_faces_carry_rays():
    P = cusp()
    rays = [f for f in P.faces if not f.is_compact]
    assert sorted(f.rays for f in rays) == [(1,), (2,)]


def test_empty_support():
    with pytest.raises(EmptySupportError):
        build_newton_polyhedron([])


def test_convenience():
    assert is_convenient(cusp())
    xy = build_newton_polyhedron([(1, 1)])
    assert not is_convenient(xy)
    assert len(xy.compact_faces()) == 1


def test_newton_order_monomial():
    P = cusp()
    assert newton_order_monomial(P, (1, 1)) == Fraction(5, 6)
    assert newton_order_monomial(P, (0, 0)) == 0
    assert newton_order_monomial(P, (2, 0)) == 1


def test_newton_order_needs_a_positive_facet():
    P = build_newton_polyhedron([(0, 0), (1, 0)])
    with pytest.raises(DegeneratePolyhedronError):
        newton_order_monomial(P, (1, 1))


def test_newton_pair_of_the_volume_form():
    pair = newton_pair_form(cusp(), dx_dy())
    assert (pair.v, pair.l) == (Fraction(5, 6), 0)
    pair = newton_pair_form(t255(), dx_dy())
    assert (pair.v, pair.l) == (Fraction(1, 2), 1)


def test_vasilev_lower_bound():
    assert vasilev_lower_bound(cusp(), dx_dy()) == LeadingPair(Fraction(-1, 6), 0)
    assert vasilev_lower_bound(t255(), dx_dy()) == LeadingPair(Fraction(-1, 2), 1)


def test_order_attained_only_on_non_compact_face():
    P = build_newton_polyhedron([(2, 1)])
    with pytest.raises(UnattainedOrderError):
        newton_pair_form(P, LogForm.top(2, {(3, 1): 1}))


def test_leading_pair_ordering():
    assert LeadingPair(Fraction(-1, 2), 1) < LeadingPair(Fraction(-1, 6), 0)
    # equal exponents: more logarithms come first
    assert LeadingPair(Fraction(0), 2) < LeadingPair(Fraction(0), 1)


def test_scaled_edge_lattice_points():
    P = cusp()
    edge = P.face_by_vertices([(2, 0), (0, 3)])
    assert lattice_points_scaled_face(P, edge, 1) == [(0, 3), (2, 0)]
    assert lattice_points_scaled_face(P, edge, 1, interior=True) == []
    assert lattice_points_scaled_face(P, edge, 2) == [(0, 6), (2, 3), (4, 0)]
    assert lattice_points_scaled_face(P, edge, 2, interior=True) == [(2, 3)]
    assert lattice_points_scaled_face(P, edge, Fraction(5, 6), interior=True) == [(1, 1)]
    assert lattice_points_scaled_face(P, edge, 0) == [(0, 0)]


def test_in_scaled_face_interior_is_strict():
    P = cusp()
    edge = P.face_by_vertices([(2, 0), (0, 3)])
    assert in_scaled_face(P, edge, 1, (2, 0))
    assert not in_scaled_face(P, edge, 1, (2, 0), interior=True)
    assert not in_scaled_face(P, edge, 1, (1, 1))


def test_brute_force_agrees_on_every_face():
    polyhedra = [cusp(), t255(), build_newton_polyhedron([(2, 0, 0), (0, 2, 0), (0, 0, 2)])]
    for P in polyhedra:
        for face in P.compact_faces():
            for t in (Fraction(1, 2), Fraction(1), Fraction(5, 2), Fraction(3)):
                for interior in (False, True):
                    assert sorted(lattice_points_scaled_face(P, face, t, interior)) == \
                        sorted(brute_force_lattice_points(P, face, t, interior))


def test_closed_count_splits_into_relative_interiors():
    P = cusp()
    edge = P.face_by_vertices([(2, 0), (0, 3)])
    assert lattice_count_identity(P, edge, 2) == (3, 3)
    assert lattice_count_identity(P, edge, 6) == (7, 7)


def test_newton_number_of_pure_powers():
    for a in range(2, 8):
        for b in range(2, 8):
            assert newton_number(build_newton_polyhedron([(a, 0), (0, b)])) == (a - 1) * (b - 1)


def test_newton_number_with_interior_vertex():
    assert newton_number(t255()) == 11


def test_newton_number_in_three_variables():
    assert newton_number(build_newton_polyhedron([(2, 0, 0), (0, 2, 0), (0, 0, 2)])) == 1


def test_newton_number_needs_convenience():
    with pytest.raises(NonConvenientError):
        newton_number(build_newton_polyhedron([(1, 1)]))


def test_a_constant_term_is_not_a_pure_power():
    P = build_newton_polyhedron([(0, 0), (2, 0), (0, 3)])
    assert P.generators == ((0, 0),)
    assert not is_convenient(P)
    with pytest.raises(NonConvenientError):
        newton_number(P)


def test_closed_counts_grow_with_integer_dilation():
    polyhedra = [cusp(), t255(), build_newton_polyhedron([(3, 0, 0), (0, 2, 0), (0, 0, 4), (1, 1, 1)])]
    for P in polyhedra:
        for face in P.compact_faces():
            counts = [len(lattice_points_scaled_face(P, face, t)) for t in range(7)]
            assert counts[0] == 1
            assert counts == sorted(counts), (face.id, counts)
