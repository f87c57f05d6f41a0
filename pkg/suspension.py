#!/usr/bin/env python3
"""
Suspension F = f + y^e/e.

Turns a non-integral degree a into the integral degree b = [a] + 1 by
wedging with y^c dy/y, c = e([a] + 1 - a). The zeta^c eigenspace of the
suspended graded quotient is compared with the original quotient, and
leading terms of the two factors combine through a Beta function.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import mpmath

import config
from certifier import (
    Certificate,
    LogForm,
    certify,
    differential_matrix,
    graded_piece_basis,
    image_membership,
    InImage,
    as_log_form,
    koszul_de_rham_matrix,
)
from exact_core import ZERO, SparsePolynomial, format_fraction
from exceptions import BetaArgumentError, IntegralDegreeError, NonConvenientError, NonIntegralDegreeError, PoleRangeError
from face_grading import FaceContext, face_polynomial
from newton_polytope import Face, LeadingPair, NewtonPolyhedron, build_newton_polyhedron, is_convenient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuspensionData:
    e: int
    c: int
    a: Fraction
    b: int
    F: SparsePolynomial
    polyhedron: NewtonPolyhedron
    face: Face

    def eigenclass(self, m) -> int:
        return m[-1] % self.e

    def in_eigenspace(self, m) -> bool:
        return self.eigenclass(m) == self.c % self.e


@dataclass(frozen=True)
class LeadingTerm:
    alpha: Fraction
    k: int
    coeff: mpmath.mpc

    def as_dict(self) -> Dict[str, object]:
        return {
            "alpha": format_fraction(self.alpha),
            "k": self.k,
            "coeff": [mpmath.nstr(self.coeff.real, 20), mpmath.nstr(self.coeff.imag, 20)],
        }


def suspension_exponent(f: SparsePolynomial) -> int:
    """lcm of the levels of the compact facets."""
    P = build_newton_polyhedron(f.supp())
    if not is_convenient(P):
        raise NonConvenientError("suspension needs a convenient polynomial")
    levels = [fc.level for fc in P.positive_facets() if all(x > 0 for x in fc.normal)]
    e = 1
    for level in levels:
        e = e * level // math.gcd(e, level)
    return e


def suspend(f: SparsePolynomial, e: int) -> SparsePolynomial:
    if e < 1:
        raise ValueError("the suspension exponent must be positive")
    y_power = SparsePolynomial.monomial((0,) * f.n + (e,), Fraction(1, e))
    return f.embed(f.n + 1) + y_power


def suspension_shift(a, e: int) -> Tuple[int, int]:
    """(c, b) with c = e([a] + 1 - a) and b = [a] + 1."""
    a = Fraction(a)
    if (e * a).denominator != 1:
        raise NonIntegralDegreeError(f"e*a = {format_fraction(e * a)} is not an integer")
    b = math.floor(a) + 1
    return int(e * (b - a)), b


def suspend_form(phi: LogForm, a, e: int, c: Optional[int] = None) -> Tuple[LogForm, int]:
    """phi ^ y^c dy/y in n + 1 variables."""
    if c is None:
        c, _ = suspension_shift(a, e)
    n = phi.n + 1
    dy = LogForm(n, 1, {((n,), (0,) * phi.n + (c,)): 1})
    return phi.embed(n).wedge(dy), c


def suspended_face(f: SparsePolynomial, face: Face, e: int) -> Tuple[NewtonPolyhedron, Face]:
    """conv(face, e * e_{n+1}) inside the polyhedron of the suspension."""
    F = suspend(f, e)
    P_hat = build_newton_polyhedron(F.supp())
    apex = (0,) * f.n + (e,)
    return P_hat, P_hat.face_by_vertices([v + (0,) for v in face.vertices] + [apex])


def suspension_data(f: SparsePolynomial, face: Face, a, e: Optional[int] = None) -> SuspensionData:
    e = e or suspension_exponent(f)
    c, b = suspension_shift(a, e)
    P_hat, face_hat = suspended_face(f, face, e)
    return SuspensionData(e=e, c=c, a=Fraction(a), b=b, F=suspend(f, e), polyhedron=P_hat, face=face_hat)


def _original_quotient(f: SparsePolynomial, face: Face, a, P: NewtonPolyhedron):
    ctx = FaceContext.from_face(P, face)
    return koszul_de_rham_matrix(ctx, face_polynomial(f, face, P), a)


def _eigenspace_quotient(data: SuspensionData):
    ctx = FaceContext.from_face(data.polyhedron, data.face)
    n_hat = data.F.n
    domain = graded_piece_basis(ctx, n_hat - 2, data.b - 1).restrict(data.in_eigenspace)
    target = graded_piece_basis(ctx, n_hat, data.b).restrict(data.in_eigenspace)
    F_face = face_polynomial(data.F, data.face, data.polyhedron)
    return differential_matrix(F_face, domain, target)


def suspended_quotient_dims(f: SparsePolynomial, face: Face, a, P: Optional[NewtonPolyhedron] = None) -> Tuple[int, int]:
    """Dimensions of the degree-a quotient and of the zeta^c eigenspace of the suspended one."""
    a = Fraction(a)
    if a.denominator == 1:
        raise IntegralDegreeError(f"a = {a} is an integer")
    P = P or build_newton_polyhedron(f.supp())
    lhs = _original_quotient(f, face, a, P)
    rhs = _eigenspace_quotient(suspension_data(f, face, a))
    lhs_dim = len(lhs.target) - lhs.rank()
    rhs_dim = len(rhs.target) - rhs.rank()
    logger.debug("suspension dims at a=%s: %d vs %d", format_fraction(a), lhs_dim, rhs_dim)
    return lhs_dim, rhs_dim


@dataclass(frozen=True)
class SpotCheck:
    tested: int
    preserved: int


def forward_map_spot_check(f: SparsePolynomial, face: Face, a, P: Optional[NewtonPolyhedron] = None) -> SpotCheck:
    """Apply [phi] -> [y^c dy/y ^ phi] to basis vectors outside the image."""
    a = Fraction(a)
    P = P or build_newton_polyhedron(f.supp())
    lhs = _original_quotient(f, face, a, P)
    data = suspension_data(f, face, a)
    rhs = _eigenspace_quotient(data)
    where = rhs.target.index()
    tested = preserved = 0
    for k, (idx, m) in enumerate(lhs.target.elements):
        unit = [ZERO] * len(lhs.target)
        unit[k] = 1
        if isinstance(image_membership(lhs.rows, unit), InImage):
            continue
        tested += 1
        lifted, _ = suspend_form(LogForm(f.n, f.n, {(idx, m): 1}), a, data.e, data.c)
        vector = [ZERO] * len(rhs.target)
        for key, c in lifted.terms.items():
            vector[where[key]] = c
        if not isinstance(image_membership(rhs.rows, vector), InImage):
            preserved += 1
    return SpotCheck(tested=tested, preserved=preserved)


def beta_function(p, q):
    """B(p, q) exactly for positive integers, else at working precision."""
    p, q = Fraction(p), Fraction(q)
    if p <= 0 or q <= 0:
        raise BetaArgumentError(f"Beta arguments must be positive, got {p} and {q}")
    if p.denominator == 1 and q.denominator == 1:
        p, q = int(p), int(q)
        return Fraction(math.factorial(p - 1) * math.factorial(q - 1), math.factorial(p + q - 1))
    with mpmath.workdps(config.MPMATH_DIGITS):
        return mpmath.beta(_mpf(p), _mpf(q))


def _mpf(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def leading_term_tensor(lead_omega: LeadingTerm, lead_eta: LeadingTerm) -> LeadingTerm:
    """Leading term of the product of two expansions, scaled by B(alpha + 1, beta + 1)."""
    if lead_eta.k != 0:
        raise PoleRangeError("the second factor must carry no logarithm")
    beta = beta_function(lead_omega.alpha + 1, lead_eta.alpha + 1)
    with mpmath.workdps(config.MPMATH_DIGITS):
        factor = _mpf(beta) if isinstance(beta, Fraction) else beta
        coeff = mpmath.mpc(lead_omega.coeff) * mpmath.mpc(lead_eta.coeff) * factor
    return LeadingTerm(alpha=lead_omega.alpha + lead_eta.alpha + 1, k=lead_omega.k, coeff=coeff)


@dataclass
class SuspendedCertificate:
    original: Certificate
    suspended: Optional[Certificate] = None
    e: Optional[int] = None
    c: Optional[int] = None
    recovered: Optional[LeadingPair] = None
    beta_factor: Optional[mpmath.mpf] = None

    def as_dict(self) -> Dict[str, object]:
        doc: Dict[str, object] = {"original": self.original.as_dict()}
        if self.suspended is not None:
            doc.update({
                "suspended": self.suspended.as_dict(),
                "e": self.e,
                "c": self.c,
                "recovered": None if self.recovered is None else self.recovered.as_dict(),
                "beta_factor": mpmath.nstr(self.beta_factor, 30),
            })
        return doc


def certify_suspended(f: SparsePolynomial, face: Face, phi, P: Optional[NewtonPolyhedron] = None, **options) -> SuspendedCertificate:
    """Certify phi ^ y^c dy/y at the integral degree b and read (a - 1, r - 1) back."""
    P = P or build_newton_polyhedron(f.supp())
    phi = as_log_form(phi, f.n)
    original = certify(f, face, phi, P=P, **options)
    if original.a is None or original.reason is not None or original.a.denominator == 1:
        return SuspendedCertificate(original=original)

    data = suspension_data(f, face, original.a)
    lifted, _ = suspend_form(phi, data.a, data.e, data.c)
    suspended = certify(data.F, data.face, lifted, P=data.polyhedron, **options)
    shift = Fraction(data.c, data.e)
    recovered = None
    if suspended.certified:
        # b - 1 = (a - 1) + (c/e - 1) + 1
        recovered = LeadingPair(alpha=suspended.pair.alpha - shift, k=suspended.pair.k)
    return SuspendedCertificate(
        original=original,
        suspended=suspended,
        e=data.e,
        c=data.c,
        recovered=recovered,
        beta_factor=beta_function(data.a, shift),
    )
