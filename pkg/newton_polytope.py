#!/usr/bin/env python3
"""
Newton polyhedra of sparse polynomials.

Gamma_+ = conv(supp + N^n) is stored by its facet inequalities
<a, x> >= N with primitive non-negative normals, together with the full face
lattice (vertices plus recession rays e_i). On top of it live the Newton
order, the pair (v, l) of a form, lattice points of scaled faces, the lower
bound (v - 1, l) for the leading pair, and Kouchnirenko's Newton number.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from exact_core import Exponent, check_exponent, determinant, format_fraction, matrix_rank, nullspace
from exceptions import (
    DegeneratePolyhedronError,
    EmptySupportError,
    NonCompactFaceError,
    NonConvenientError,
    UnattainedOrderError,
)

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Facet:
    normal: Tuple[int, ...]
    level: int

    def value(self, point: Sequence) -> Fraction:
        return sum((Fraction(a) * p for a, p in zip(self.normal, point)), Fraction(0))


@dataclass(frozen=True)
class Face:
    """A face of Gamma_+: conv(vertices) + cone(e_i for i in rays)."""

    id: int
    dim: int
    active_facets: Tuple[int, ...]
    vertices: Tuple[Exponent, ...]
    rays: Tuple[int, ...]
    is_compact: bool
    on_coordinate_hyperplane: bool

    @property
    def codim(self) -> int:
        return len(self.vertices[0]) - self.dim


@dataclass(frozen=True)
class OrderPair:
    v: Fraction
    l: int

    def __str__(self):
        return f"({format_fraction(self.v)}, {self.l})"


@total_ordering
@dataclass(frozen=True)
class LeadingPair:
    """Exponent alpha and log power k of a leading term.

    (alpha, k) <= (alpha', k') iff alpha < alpha' or (alpha == alpha' and k >= k').
    """

    alpha: Fraction
    k: int

    def __lt__(self, other: "LeadingPair"):
        if not isinstance(other, LeadingPair):
            return NotImplemented
        return self.alpha < other.alpha or (self.alpha == other.alpha and self.k > other.k)

    def as_dict(self) -> Dict[str, object]:
        return {"alpha": format_fraction(self.alpha), "k": self.k}

    def __str__(self):
        return f"({format_fraction(self.alpha)}, {self.k})"


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    generators: Tuple[Exponent, ...]
    facets: Tuple[Facet, ...]
    faces: Tuple[Face, ...] = field(repr=False)

    def compact_faces(self) -> List[Face]:
        return [f for f in self.faces if f.is_compact]

    def face_by_id(self, face_id: int) -> Face:
        for f in self.faces:
            if f.id == face_id:
                return f
        raise KeyError(f"no face with id {face_id}")

    def face_by_vertices(self, vertices: Iterable[Sequence[int]]) -> Face:
        wanted = tuple(sorted(tuple(v) for v in vertices))
        for f in self.faces:
            if f.is_compact and f.vertices == wanted:
                return f
        raise KeyError(f"no compact face with vertices {list(wanted)}")

    def positive_facets(self) -> List[Facet]:
        return [fc for fc in self.facets if fc.level > 0]

    def tight_facets(self, point: Sequence) -> Tuple[int, ...]:
        return tuple(j for j, fc in enumerate(self.facets) if fc.value(point) == fc.level)

    def contains(self, point: Sequence, scale=1) -> bool:
        """Exact membership of ``point`` in scale * Gamma_+."""
        scale = Fraction(scale)
        return all(Fraction(p) >= 0 for p in point) and all(
            fc.value(point) >= scale * fc.level for fc in self.facets)

    def smallest_face_containing(self, point: Sequence) -> Optional[Face]:
        tight = self.tight_facets(point)
        for f in self.faces:
            if f.active_facets == tight:
                return f
        return None

    def subfaces(self, face: Face) -> List[Face]:
        """Proper faces of ``face``."""
        active = set(face.active_facets)
        return [g for g in self.faces if g.id != face.id and active <= set(g.active_facets)]


def minimal_generators(points: Iterable[Exponent]) -> List[Exponent]:
    """Points not dominated componentwise by another point of the set."""
    pts = sorted(set(points))
    return [p for p in pts if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in pts)]


def _primitive(vector: Sequence[Fraction]) -> Optional[Tuple[Tuple[int, ...], int]]:
    """Scale (a, N) to a primitive integer normal with a >= 0, or None."""
    *a, level = vector
    if all(x <= 0 for x in a):
        a, level = [-x for x in a], -level
    if any(x < 0 for x in a) or not any(a):
        return None
    denom = 1
    for x in list(a) + [level]:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    ints = [int(x * denom) for x in a]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints), int(level * denom) // g


def _facets(n: int, gens: List[Exponent]) -> List[Facet]:
    # hyperplanes <a, x> = N through k generators and n - k recession rays
    found = set()
    for k in range(1, n + 1):
        for pts in combinations(gens, k):
            for rays in combinations(range(n), n - k):
                rows = [[Fraction(c) for c in p] + [Fraction(-1)] for p in pts]
                rows += [[Fraction(int(i == r)) for i in range(n)] + [Fraction(0)] for r in rays]
                kernel = nullspace(rows, n + 1)
                if len(kernel) != 1:
                    continue
                normalized = _primitive(kernel[0])
                if normalized is None:
                    continue
                normal, level = normalized
                if all(sum(a * c for a, c in zip(normal, g)) >= level for g in gens):
                    found.add(Facet(normal, level))
    return sorted(found, key=lambda fc: (-fc.level, fc.normal))


def _dimension(points: Sequence[Exponent], rays: Iterable[int], n: int) -> int:
    p0 = points[0]
    rows = [[Fraction(a - b) for a, b in zip(p, p0)] for p in points[1:]]
    rows += [[Fraction(int(i == r)) for i in range(n)] for r in rays]
    return matrix_rank(rows, n) if rows else 0


def build_newton_polyhedron(supp: Iterable[Sequence[int]]) -> NewtonPolyhedron:
    points = list(supp)
    if not points:
        raise EmptySupportError("the support is empty")
    n = len(points[0])
    points = [check_exponent(p, n) for p in points]
    gens = minimal_generators(points)
    facets = _facets(n, gens)

    incidences = []
    for fc in facets:
        tight = frozenset(g for g in gens if fc.value(g) == fc.level)
        rays = frozenset(i for i in range(n) if fc.normal[i] == 0)
        incidences.append((tight, rays))

    # every face is an intersection of facets
    closed = set(incidences)
    frontier = set(incidences)
    while frontier:
        fresh = set()
        for a in frontier:
            for b in incidences:
                meet = (a[0] & b[0], a[1] & b[1])
                if meet[0] and meet not in closed:
                    fresh.add(meet)
        closed |= fresh
        frontier = fresh

    dims = {key: _dimension(sorted(key[0]), key[1], n) for key in closed}
    vertex_set = {next(iter(key[0])) for key, d in dims.items() if d == 0 and not key[1]}

    raw = []
    for (tight, rays), dim in dims.items():
        active = tuple(j for j, (t, r) in enumerate(incidences) if tight <= t and rays <= r)
        w = [sum(facets[j].normal[i] for j in active) for i in range(n)]
        vertices = tuple(sorted(tight & vertex_set))
        on_hyperplane = any(
            all(v[i] == 0 for v in vertices) and i not in rays for i in range(n))
        raw.append((dim, vertices, tuple(sorted(r + 1 for r in rays)), active,
                    all(x > 0 for x in w), on_hyperplane))
    raw.sort(key=lambda item: item[:3])
    faces = tuple(
        Face(id=i, dim=d, active_facets=act, vertices=vs, rays=rs,
             is_compact=compact, on_coordinate_hyperplane=hyper)
        for i, (d, vs, rs, act, compact, hyper) in enumerate(raw))
    logger.debug("Newton polyhedron in %d variables: %d generators, %d facets, %d faces",
                 n, len(gens), len(facets), len(faces))
    return NewtonPolyhedron(n=n, generators=tuple(gens), facets=tuple(facets), faces=faces)


def is_convenient(P: NewtonPolyhedron) -> bool:
    """Every axis carries a pure power x_i^k with k > 0; the origin does not count."""
    return all(
        any(g[i] > 0 and all(c == 0 for j, c in enumerate(g) if j != i) for g in P.generators)
        for i in range(P.n))


def newton_order_monomial(P: NewtonPolyhedron, m: Sequence[int]) -> Fraction:
    m = check_exponent(m, P.n)
    if not any(m):
        return Fraction(0)
    levels = P.positive_facets()
    if not levels:
        raise DegeneratePolyhedronError("no facet has a positive level")
    return min(Fraction(fc.value(m)) / fc.level for fc in levels)


def newton_pair_support(P: NewtonPolyhedron, support: Iterable[Exponent]) -> OrderPair:
    support = list(support)
    if not support:
        raise EmptySupportError("the form is zero")
    orders = {tuple(m): newton_order_monomial(P, m) for m in support}
    v = min(orders.values())
    candidates = []
    for m, order in orders.items():
        if order != v or v == 0:
            continue
        point = tuple(Fraction(c) / v for c in m)
        face = P.smallest_face_containing(point)
        if face is not None and face.is_compact:
            candidates.append(P.n - 1 - face.dim)
    if not candidates:
        raise UnattainedOrderError(
            f"no support point of Newton order {format_fraction(v)} meets a compact face")
    return OrderPair(v=v, l=max(candidates))


def newton_pair_form(P: NewtonPolyhedron, phi) -> OrderPair:
    """(v, l) of a form given in the logarithmic basis."""
    return newton_pair_support(P, phi.support())


def vasilev_lower_bound(P: NewtonPolyhedron, phi) -> LeadingPair:
    pair = newton_pair_form(P, phi)
    return LeadingPair(alpha=pair.v - 1, k=pair.l)


def _check_compact(face: Face):
    if not face.is_compact:
        raise NonCompactFaceError(f"face {face.id} is not compact")


def in_scaled_face(P: NewtonPolyhedron, face: Face, t, m: Sequence, interior: bool = False) -> bool:
    """m in t*face: tight on active facets, feasible on the rest.

    With ``interior`` the non-active inequalities must be strict.
    """
    t = Fraction(t)
    if any(Fraction(c) < 0 for c in m):
        return False
    active = set(face.active_facets)
    for j, fc in enumerate(P.facets):
        value, bound = fc.value(m), t * fc.level
        if j in active:
            if value != bound:
                return False
        elif value < bound or (interior and value == bound):
            return False
    return True


def _bounding_box(face: Face, t: Fraction) -> List[range]:
    box = []
    for i in range(len(face.vertices[0])):
        coords = [t * v[i] for v in face.vertices]
        box.append(range(math.floor(min(coords)), math.ceil(max(coords)) + 1))
    return box


def lattice_points_scaled_face(P: NewtonPolyhedron, face: Face, t, interior: bool = False) -> List[Exponent]:
    """Integer points of t*face (or of its relative interior), sorted."""
    _check_compact(face)
    t = Fraction(t)
    if t < 0:
        return []
    if t == 0:
        return [(0,) * P.n]
    return [m for m in product(*_bounding_box(face, t)) if in_scaled_face(P, face, t, m, interior)]


def brute_force_lattice_points(P: NewtonPolyhedron, face: Face, t, interior: bool = False) -> List[Exponent]:
    """Independent enumerator over the full cube [0, t*max]^n.

    Membership uses the summed normal w of the active facets instead of the
    per-facet equalities, and the interior is taken as the complement of
    all proper subfaces.
    """
    _check_compact(face)
    t = Fraction(t)
    if t < 0:
        return []
    w = [sum(P.facets[j].normal[i] for j in face.active_facets) for i in range(P.n)]
    level = sum(a * c for a, c in zip(w, face.vertices[0]))
    top = math.ceil(t * max(max(v) for v in face.vertices))

    def on_face(g: Face, m) -> bool:
        wg = [sum(P.facets[j].normal[i] for j in g.active_facets) for i in range(P.n)]
        lg = sum(a * c for a, c in zip(wg, g.vertices[0]))
        return P.contains(m, t) and sum(a * c for a, c in zip(wg, m)) == t * lg

    hits = []
    for m in product(range(top + 1), repeat=P.n):
        if not P.contains(m, t) or sum(a * c for a, c in zip(w, m)) != t * level:
            continue
        if interior and t > 0 and any(on_face(g, m) for g in P.subfaces(face)):
            continue
        hits.append(m)
    return hits


def lattice_count_identity(P: NewtonPolyhedron, face: Face, t) -> Tuple[int, int]:
    """(|L(t*face)|, sum of interior counts over the faces of t*face).

    The closed scaled face is the disjoint union of the relative interiors
    of its faces, so the two numbers agree.
    """
    closed = len(lattice_points_scaled_face(P, face, t))
    pieces = [face] + P.subfaces(face)
    return closed, sum(len(lattice_points_scaled_face(P, g, t, interior=True)) for g in pieces)


# -- Newton number -----------------------------------------------------------

def _simplices(P: NewtonPolyhedron, face: Face) -> List[Tuple[Exponent, ...]]:
    # pulling triangulation from the smallest vertex
    if face.dim == 0:
        return [face.vertices]
    apex = face.vertices[0]
    result = []
    for g in P.subfaces(face):
        if g.dim == face.dim - 1 and apex not in g.vertices:
            result.extend((apex,) + s for s in _simplices(P, g))
    return result


def _volume_under_boundary(P: NewtonPolyhedron) -> Fraction:
    """Volume of R_+^n minus Gamma_+, as cones from the origin over compact facets."""
    total = Fraction(0)
    for face in P.compact_faces():
        if face.dim != P.n - 1:
            continue
        for simplex in _simplices(P, face):
            det = determinant([[Fraction(c) for c in v] for v in simplex])
            total += abs(det) / math.factorial(P.n)
    return total


def newton_number(P: NewtonPolyhedron) -> int:
    """Kouchnirenko's alternating sum of k! V_k over coordinate subspaces."""
    if not is_convenient(P):
        raise NonConvenientError("the Newton number needs a convenient polyhedron")
    n = P.n
    total = Fraction((-1) ** n)
    for k in range(1, n + 1):
        volume = Fraction(0)
        for coords in combinations(range(n), k):
            restricted = [
                tuple(g[i] for i in coords)
                for g in P.generators if all(g[j] == 0 for j in range(n) if j not in coords)]
            volume += _volume_under_boundary(build_newton_polyhedron(restricted))
        total += (-1) ** (n - k) * math.factorial(k) * volume
    assert total.denominator == 1, total
    return int(total)
