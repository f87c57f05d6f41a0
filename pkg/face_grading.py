#!/usr/bin/env python3
"""
Face-local data on a compact face delta of the Newton polyhedron:
the face polynomial f_delta, the grading with deg f_delta = 1, scaled-face
membership tests, and a randomized search for critical points of f_delta
in the torus.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

import config
from exact_core import SparsePolynomial
from exceptions import ForeignFaceError, NonCompactFaceError
from newton_polytope import Face, NewtonPolyhedron, build_newton_polyhedron, in_scaled_face

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FaceContext:
    polyhedron: NewtonPolyhedron
    face: Face
    r: int
    w: Tuple[int, ...]
    level: int

    @classmethod
    def from_face(cls, P: NewtonPolyhedron, face: Face) -> "FaceContext":
        """Grading by w = sum of the normals of the facets containing the face."""
        if face not in P.faces:
            raise ForeignFaceError(f"face {face.id} does not belong to this polyhedron")
        if not face.is_compact:
            raise NonCompactFaceError(f"face {face.id} is not compact")
        w = tuple(sum(P.facets[j].normal[i] for j in face.active_facets) for i in range(P.n))
        level = sum(a * c for a, c in zip(w, face.vertices[0]))
        return cls(polyhedron=P, face=face, r=P.n - face.dim, w=w, level=level)

    @property
    def n(self) -> int:
        return self.polyhedron.n


@dataclass(frozen=True)
class NondegeneracyReport:
    verdict: str
    witness: Optional[Tuple[complex, ...]]
    trials: int
    seed: int
    residual: Optional[float] = None

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else [[z.real, z.imag] for z in self.witness],
            "trials": self.trials,
            "seed": self.seed,
            "residual": self.residual,
        }


def face_polynomial(f: SparsePolynomial, face: Face, P: Optional[NewtonPolyhedron] = None) -> SparsePolynomial:
    """The terms of f whose exponents lie on the face."""
    P = P or build_newton_polyhedron(f.supp())
    if face not in P.faces:
        raise ForeignFaceError(f"face {face.id} is not a face of the Newton polyhedron of {f}")
    tight = [P.facets[j] for j in face.active_facets]
    return f.restrict(lambda m: all(fc.value(m) == fc.level for fc in tight))


def face_degree(ctx: FaceContext, m: Sequence[int]) -> Optional[Fraction]:
    t = Fraction(sum(a * c for a, c in zip(ctx.w, m)), ctx.level)
    if in_scaled_face(ctx.polyhedron, ctx.face, t, m):
        return t
    return None


def scaled_face_interior_test(ctx: FaceContext, a, m: Sequence[int]) -> bool:
    return in_scaled_face(ctx.polyhedron, ctx.face, Fraction(a), m, interior=True)


def _euler_system(exps: np.ndarray, coeffs: np.ndarray, z: np.ndarray):
    # Euler derivatives in log coordinates x = exp(z)
    terms = coeffs * np.exp(exps @ z)
    values = exps.T @ terms
    jacobian = (exps.T * terms) @ exps
    scale = np.sum(np.abs(terms))
    return values, jacobian, scale


def _residual(values: np.ndarray, scale: float) -> float:
    return float(np.linalg.norm(values) / scale) if scale > 0 else np.inf


def _face_directions(exps: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the span of the exponent differences.

    f_delta only rescales along the orthogonal complement, so the search
    moves inside this span.
    """
    differences = exps - exps[0]
    _, singular, vt = np.linalg.svd(differences)
    rank = int(np.sum(singular > 1e-9))
    return vt[:rank].T


def nondegeneracy_heuristic(
    f: SparsePolynomial,
    face: Face,
    trials: int = config.TRIALS,
    seed: int = config.SEED,
    tol: float = config.TOL,
    P: Optional[NewtonPolyhedron] = None,
) -> NondegeneracyReport:
    """Search the torus for a common zero of x_i * df_delta/dx_i.

    Gauss-Newton in log coordinates, restricted to the directions the face
    spans. Trial j starts from the j-th child of SeedSequence(seed), so
    trials can be split across workers without changing the outcome.
    """
    P = P or build_newton_polyhedron(f.supp())
    if not face.is_compact:
        raise NonCompactFaceError(f"face {face.id} is not compact")
    g = face_polynomial(f, face, P)
    exps = g.exponent_matrix().astype(float)
    coeffs = g.coefficient_vector()
    basis = _face_directions(exps)
    lo, hi = np.log(config.START_MODULUS_RANGE[0]), np.log(config.START_MODULUS_RANGE[1])

    best = np.inf
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        z = rng.uniform(lo, hi, P.n) + 1j * rng.uniform(0.0, 2 * np.pi, P.n)
        values, jacobian, scale = _euler_system(exps, coeffs, z)
        residual = _residual(values, scale)
        for _ in range(config.NEWTON_MAX_ITER if basis.shape[1] else 0):
            if residual < tol:
                break
            step = basis @ np.linalg.lstsq(jacobian @ basis, -values, rcond=None)[0]
            damping = 1.0
            while damping > 1e-4:
                candidate = z + damping * step
                c_values, c_jac, c_scale = _euler_system(exps, coeffs, candidate)
                c_residual = _residual(c_values, c_scale)
                if np.isfinite(c_residual) and c_residual < residual:
                    break
                damping /= 2
            else:
                break
            z, values, jacobian, residual = candidate, c_values, c_jac, c_residual
        best = min(best, residual)
        if residual < tol:
            witness = tuple(complex(x) for x in np.exp(z))
            logger.info("critical point of the face polynomial %s found: %s", g, witness)
            return NondegeneracyReport("fail", witness, trials, seed, residual)
    logger.debug("no torus critical point of %s in %d trials (best residual %.3g)", g, trials, best)
    return NondegeneracyReport("pass-heuristic", None, trials, seed, float(best) if np.isfinite(best) else None)
