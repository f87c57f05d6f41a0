#!/usr/bin/env python3
"""
Leading-term certifier.

A top form phi supported in the relative interior of a*delta, for a compact
face delta of codimension r, has leading pair (a - 1, r - 1) as soon as its
class in

    (Omega^n_sigma)_a / df_delta ^ d(Omega^{n-2}_sigma)_{a-1}

is non-zero. Everything here is finite exact linear algebra over Q(i) in the
logarithmic basis x^m (dx)_I / x_I.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import config
from exact_core import (
    ONE,
    ZERO,
    Exponent,
    GaussianRational,
    IndexSet,
    SparsePolynomial,
    add_exponents,
    check_exponent,
    format_fraction,
    matrix_rank,
    merge_sign,
    monomial_text,
    nullspace,
    row_echelon,
    variable_names,
)
from exceptions import DimensionMismatchError, GradeUnderflowError
from face_grading import (
    FaceContext,
    NondegeneracyReport,
    face_degree,
    face_polynomial,
    nondegeneracy_heuristic,
    scaled_face_interior_test,
)
from newton_polytope import (
    Face,
    LeadingPair,
    NewtonPolyhedron,
    build_newton_polyhedron,
    is_convenient,
    lattice_points_scaled_face,
    vasilev_lower_bound,
)

logger = logging.getLogger(__name__)

Element = Tuple[IndexSet, Exponent]

CERTIFIED = "Certified"
INCONCLUSIVE = "Inconclusive"
INVALID_INPUT = "InvalidInput"


class LogForm:
    """A p-form sum c * x^m (dx)_I / x_I with ascending index sets I."""

    __slots__ = ("_n", "_p", "_terms")

    def __init__(self, n: int, p: int, terms: Optional[Dict[Element, object]] = None):
        if not 0 <= p <= n:
            raise GradeUnderflowError(f"form degree {p} outside [0, {n}]")
        acc: Dict[Element, GaussianRational] = {}
        for (idx, m), c in (terms or {}).items():
            idx, m = tuple(idx), check_exponent(m, n)
            if len(idx) != p or list(idx) != sorted(set(idx)) or any(not 1 <= i <= n for i in idx):
                raise DimensionMismatchError(f"index set {idx} invalid for a {p}-form in {n} variables")
            acc[(idx, m)] = acc.get((idx, m), ZERO) + GaussianRational.of(c)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_p", p)
        object.__setattr__(self, "_terms", {k: acc[k] for k in sorted(acc) if acc[k]})

    def __setattr__(self, name, value):
        raise AttributeError("LogForm is immutable")

    @property
    def n(self) -> int:
        return self._n

    @property
    def p(self) -> int:
        return self._p

    @property
    def terms(self) -> Dict[Element, GaussianRational]:
        return dict(self._terms)

    @classmethod
    def from_function(cls, g: SparsePolynomial) -> "LogForm":
        return cls(g.n, 0, {((), m): c for m, c in g.items()})

    @classmethod
    def top(cls, n: int, coefficients: Dict[Sequence[int], object]) -> "LogForm":
        full = tuple(range(1, n + 1))
        return cls(n, n, {(full, tuple(m)): c for m, c in coefficients.items()})

    def support(self) -> List[Exponent]:
        return sorted({m for _, m in self._terms})

    def is_zero(self) -> bool:
        return not self._terms

    def scale(self, c) -> "LogForm":
        c = GaussianRational.of(c)
        return LogForm(self._n, self._p, {k: c * v for k, v in self._terms.items()})

    def __add__(self, other: "LogForm") -> "LogForm":
        if (other.n, other.p) != (self._n, self._p):
            raise DimensionMismatchError("forms of different shape")
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, ZERO) + c
        return LogForm(self._n, self._p, terms)

    def __sub__(self, other: "LogForm") -> "LogForm":
        return self + other.scale(-1)

    def d(self) -> "LogForm":
        """d(x^m w_I) = sum over i not in I of m_i x^m dx_i/x_i ^ w_I."""
        if self._p == self._n:
            return LogForm(self._n, self._n)
        terms: Dict[Element, GaussianRational] = {}
        for (idx, m), c in self._terms.items():
            for i in range(1, self._n + 1):
                if m[i - 1] == 0 or i in idx:
                    continue
                sign, merged = merge_sign((i,), idx)
                key = (merged, m)
                terms[key] = terms.get(key, ZERO) + c * (m[i - 1] * sign)
        return LogForm(self._n, self._p + 1, terms)

    def wedge(self, other: "LogForm") -> "LogForm":
        if other.n != self._n:
            raise DimensionMismatchError("forms in different dimensions")
        p = self._p + other.p
        if p > self._n:
            return LogForm(self._n, self._n)
        terms: Dict[Element, GaussianRational] = {}
        for (i, m), a in self._terms.items():
            for (j, m2), b in other._terms.items():
                sign, merged = merge_sign(i, j)
                if sign:
                    key = (merged, add_exponents(m, m2))
                    terms[key] = terms.get(key, ZERO) + a * b * sign
        return LogForm(self._n, p, terms)

    def embed(self, n: int) -> "LogForm":
        pad = (0,) * (n - self._n)
        return LogForm(n, self._p, {(i, m + pad): c for (i, m), c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, LogForm):
            return NotImplemented
        return (self._n, self._p, self._terms) == (other._n, other._p, other._terms)

    def __hash__(self):
        return hash((self._n, self._p, tuple(self._terms.items())))

    def __str__(self):
        if not self._terms:
            return "0"
        names = variable_names(self._n)
        parts = []
        for (idx, m), c in self._terms.items():
            mono = monomial_text(names, m) or "1"
            basis = "^".join(f"d{names[i - 1]}/{names[i - 1]}" for i in idx)
            parts.append(f"({c})*{mono}" + (f"*{basis}" if basis else ""))
        return " + ".join(parts)


def holomorphic_to_log(h: SparsePolynomial) -> LogForm:
    """h dx_1^...^dx_n as (x_1...x_n h) (dx)/x."""
    ones = (1,) * h.n
    return LogForm.top(h.n, {add_exponents(m, ones): c for m, c in h.items()})


@dataclass(frozen=True)
class GradedBasis:
    ctx: FaceContext
    p: int
    b: Fraction
    elements: Tuple[Element, ...]

    def __len__(self):
        return len(self.elements)

    def index(self) -> Dict[Element, int]:
        return {e: k for k, e in enumerate(self.elements)}

    def restrict(self, keep: Callable[[Exponent], bool]) -> "GradedBasis":
        return GradedBasis(self.ctx, self.p, self.b, tuple(e for e in self.elements if keep(e[1])))

    def labels(self) -> List[str]:
        names = variable_names(self.ctx.n)
        out = []
        for idx, m in self.elements:
            mono = monomial_text(names, m) or "1"
            out.append(mono + "".join(f"*d{names[i - 1]}/{names[i - 1]}" for i in idx))
        return out


def graded_piece_basis(ctx: FaceContext, p: int, b) -> GradedBasis:
    b = Fraction(b)
    if not 0 <= p <= ctx.n:
        raise GradeUnderflowError(f"form degree {p} outside [0, {ctx.n}]")
    if b < 0:
        return GradedBasis(ctx, p, b, ())
    points = lattice_points_scaled_face(ctx.polyhedron, ctx.face, b)
    elements = sorted(
        (idx, m) for idx in combinations(range(1, ctx.n + 1), p) for m in points)
    return GradedBasis(ctx, p, b, tuple(elements))


@dataclass(frozen=True)
class DifferentialMatrix:
    """Rows indexed by the target basis, columns by the domain basis."""

    domain: GradedBasis
    target: GradedBasis
    rows: Tuple[Tuple[GaussianRational, ...], ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.target), len(self.domain)

    def column(self, k: int) -> List[GaussianRational]:
        return [row[k] for row in self.rows]

    def rank(self) -> int:
        return matrix_rank(self.rows, len(self.domain)) if self.rows else 0


def differential_matrix(f_delta: SparsePolynomial, domain: GradedBasis, target: GradedBasis) -> DifferentialMatrix:
    """Matrix of beta -> df_delta ^ d beta between two graded pieces."""
    df = LogForm.from_function(f_delta).d()
    where = target.index()
    rows = [[ZERO] * len(domain) for _ in range(len(target))]
    for col, (idx, m) in enumerate(domain.elements):
        image = df.wedge(LogForm(f_delta.n, len(idx), {(idx, m): 1}).d())
        for key, c in image.terms.items():
            if key not in where:
                # outside a restricted target
                continue
            rows[where[key]][col] = c
    return DifferentialMatrix(domain, target, tuple(tuple(r) for r in rows))


def koszul_de_rham_matrix(ctx: FaceContext, f_delta: SparsePolynomial, a) -> DifferentialMatrix:
    a = Fraction(a)
    domain = graded_piece_basis(ctx, ctx.n - 2, a - 1) if ctx.n >= 2 else GradedBasis(ctx, 0, a - 1, ())
    target = graded_piece_basis(ctx, ctx.n, a)
    matrix = differential_matrix(f_delta, domain, target)
    logger.debug("Koszul-de Rham matrix at degree %s: %d x %d", format_fraction(a), *matrix.shape)
    return matrix


@dataclass(frozen=True)
class InImage:
    solution: Tuple[GaussianRational, ...]


@dataclass(frozen=True)
class NotInImage:
    """A covector vanishing on every column but not on the vector."""

    functional: Tuple[GaussianRational, ...]

    def verify(self, rows: Sequence[Sequence], vector: Sequence) -> bool:
        ncols = len(rows[0]) if rows else 0
        annihilates = all(
            sum((y * rows[i][k] for i, y in enumerate(self.functional)), ZERO) == 0
            for k in range(ncols))
        pairing = sum((y * v for y, v in zip(self.functional, vector)), ZERO)
        return annihilates and pairing != 0


def image_membership(rows: Sequence[Sequence], vector: Sequence) -> Union[InImage, NotInImage]:
    vector = [GaussianRational.of(v) for v in vector]
    nrows = len(vector)
    if len(rows) != nrows:
        raise DimensionMismatchError(f"matrix has {len(rows)} rows, vector has {nrows} entries")
    ncols = len(rows[0]) if rows else 0
    rows = [[GaussianRational.of(x) for x in r] for r in rows]

    augmented = [r + [v] for r, v in zip(rows, vector)]
    reduced, pivots = row_echelon(augmented, ncols + 1)
    if ncols not in pivots:
        solution = [ZERO] * ncols
        for r, pc in enumerate(pivots):
            solution[pc] = reduced[r][ncols]
        return InImage(tuple(solution))

    transpose = [[rows[i][k] for i in range(nrows)] for k in range(ncols)]
    for y in nullspace(transpose, nrows, one=ONE):
        if sum((a * b for a, b in zip(y, vector)), ZERO) != 0:
            return NotInImage(tuple(y))
    raise ArithmeticError("vector outside the image but no separating functional found")


@dataclass
class Certificate:
    face_id: Optional[int]
    verdict: str
    a: Optional[Fraction] = None
    r: Optional[int] = None
    pair: Optional[LeadingPair] = None
    reason: Optional[str] = None
    quotient_dim: Optional[int] = None
    matrix_rank: Optional[int] = None
    nondegeneracy: Optional[NondegeneracyReport] = None
    lower_bound: Optional[LeadingPair] = None
    witness: Optional[Dict[str, GaussianRational]] = field(default=None, repr=False)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def as_dict(self) -> Dict[str, object]:
        doc: Dict[str, object] = {"face_id": self.face_id, "verdict": self.verdict}
        if self.a is not None:
            doc["a"] = format_fraction(self.a)
        if self.r is not None:
            doc["r"] = self.r
        if self.pair is not None:
            doc.update(self.pair.as_dict())
        if self.reason is not None:
            doc["reason"] = self.reason
        if self.quotient_dim is not None:
            doc["quotient_dim"] = self.quotient_dim
            doc["matrix_rank"] = self.matrix_rank
        if self.lower_bound is not None:
            doc["lower_bound"] = self.lower_bound.as_dict()
        if self.nondegeneracy is not None:
            doc["nondegeneracy"] = self.nondegeneracy.as_dict()
        if self.witness is not None:
            doc["witness"] = {label: str(c) for label, c in self.witness.items()}
        return doc


def _invalid(face: Optional[Face], reason: str, **extra) -> Certificate:
    logger.info("invalid input on face %s: %s", None if face is None else face.id, reason)
    return Certificate(face_id=None if face is None else face.id, verdict=INVALID_INPUT, reason=reason, **extra)


def as_log_form(phi, n: int) -> LogForm:
    if isinstance(phi, SparsePolynomial):
        return holomorphic_to_log(phi)
    if phi.n != n:
        raise DimensionMismatchError(f"form in {phi.n} variables for f in {n}")
    return phi


def common_degree(ctx: FaceContext, phi: LogForm) -> Tuple[Optional[Fraction], Optional[str]]:
    """The shared face degree a of supp(phi), or the reason it does not exist."""
    degrees = {m: face_degree(ctx, m) for m in phi.support()}
    if any(t is None for t in degrees.values()):
        return None, "support-not-interior"
    if len(set(degrees.values())) > 1:
        return None, "mixed-degrees"
    a = next(iter(degrees.values()))
    if a <= 0 or not all(scaled_face_interior_test(ctx, a, m) for m in degrees):
        return a, "support-not-interior"
    return a, None


def certify(
    f: SparsePolynomial,
    face: Face,
    phi,
    P: Optional[NewtonPolyhedron] = None,
    trials: int = config.TRIALS,
    seed: int = config.SEED,
    tol: float = config.TOL,
) -> Certificate:
    """Decide [phi] != 0 in the graded quotient on ``face``.

    ``phi`` is a LogForm of top degree, or the coefficient h of h*dx_1^...^dx_n.
    """
    P = P or build_newton_polyhedron(f.supp())
    phi = as_log_form(phi, f.n)
    if phi.p != f.n:
        raise GradeUnderflowError(f"expected a {f.n}-form, got a {phi.p}-form")
    if not is_convenient(P):
        return _invalid(face, "non-convenient")
    if phi.is_zero():
        return _invalid(face, "zero-form")
    if not face.is_compact:
        return _invalid(face, "face-not-compact")
    if face.on_coordinate_hyperplane:
        return _invalid(face, "face-on-hyperplane")

    ctx = FaceContext.from_face(P, face)
    a, problem = common_degree(ctx, phi)
    if problem is not None:
        return _invalid(face, problem, a=a, r=ctx.r)
    if a.denominator == 1 and ctx.r == f.n:
        return _invalid(face, "integer-a-with-r-equals-n", a=a, r=ctx.r)

    report = nondegeneracy_heuristic(f, face, trials=trials, seed=seed, tol=tol, P=P)
    if report.verdict == "fail":
        logger.warning("face polynomial on face %d looks degenerate; certificate assumes non-degeneracy", face.id)

    f_delta = face_polynomial(f, face, P)
    matrix = koszul_de_rham_matrix(ctx, f_delta, a)
    where = matrix.target.index()
    vector = [ZERO] * len(matrix.target)
    for key, c in phi.terms.items():
        vector[where[key]] = c

    rank = matrix.rank()
    quotient_dim = len(matrix.target) - rank
    outcome = image_membership(matrix.rows, vector)
    bound = vasilev_lower_bound(P, phi)
    common = dict(face_id=face.id, a=a, r=ctx.r, quotient_dim=quotient_dim,
                  matrix_rank=rank, nondegeneracy=report, lower_bound=bound)
    if isinstance(outcome, InImage):
        logger.info("face %d, a=%s: form lies in the image, no certificate", face.id, format_fraction(a))
        return Certificate(verdict=INCONCLUSIVE, **common)

    if not outcome.verify(matrix.rows, vector):
        raise ArithmeticError("separating functional failed re-verification")
    pair = LeadingPair(alpha=a - 1, k=ctx.r - 1)
    if pair != bound:
        logger.warning("certified pair %s differs from the Newton bound %s", pair, bound)
    witness = {label: y for label, y in zip(matrix.target.labels(), outcome.functional) if y}
    return Certificate(verdict=CERTIFIED, pair=pair, witness=witness, **common)


def admissible_faces(P: NewtonPolyhedron, phi: LogForm) -> List[Tuple[Face, Fraction]]:
    """Compact faces off the coordinate hyperplanes whose scaled interior holds supp(phi)."""
    found = []
    for face in P.compact_faces():
        if face.on_coordinate_hyperplane:
            continue
        a, problem = common_degree(FaceContext.from_face(P, face), phi)
        if problem is None:
            found.append((face, a))
    return found


def quasi_homogeneous_weights(f: SparsePolynomial) -> Tuple[Fraction, ...]:
    """Weights w with f of weighted degree 1, when f has a single compact facet."""
    P = build_newton_polyhedron(f.supp())
    compact = [fc for fc in P.positive_facets() if all(c > 0 for c in fc.normal)]
    if len(compact) != 1:
        raise DimensionMismatchError("f is not quasi-homogeneous with a single compact facet")
    fc = compact[0]
    return tuple(Fraction(c, fc.level) for c in fc.normal)


def weighted_alpha(weights: Sequence, m: Sequence[int]) -> Fraction:
    """alpha of x^m dx for a quasi-homogeneous f: sum (m_i + 1) w_i - 1."""
    return sum((Fraction(w) * (c + 1) for w, c in zip(weights, m)), Fraction(0)) - 1


def certify_all(f: SparsePolynomial, phi, P: Optional[NewtonPolyhedron] = None, **options) -> List[Certificate]:
    """One certificate per admissible face."""
    P = P or build_newton_polyhedron(f.supp())
    phi = as_log_form(phi, f.n)
    if not is_convenient(P):
        return [_invalid(None, "non-convenient")]
    if phi.is_zero():
        return [_invalid(None, "zero-form")]
    faces = admissible_faces(P, phi)
    if not faces:
        return [_invalid(None, "support-not-interior")]
    return [certify(f, face, phi, P=P, **options) for face, _ in faces]
