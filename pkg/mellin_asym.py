#!/usr/bin/env python3
"""
Mellin pole calculus and numerical verifiers.

A term r^{2 alpha} (ln r^2)^k / k! of an expansion at r -> 0 contributes the
principal part (-1)^k c / (lambda + alpha)^{k+1}. This module does that
bookkeeping exactly, predicts the leading pole of
M(lambda) = integral of |f|^{2 lambda} sigma |h|^2 dV from a certified (a, r),
and checks both against quadrature and Monte Carlo.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

import config
from certifier import holomorphic_to_log
from exact_core import SparsePolynomial, format_fraction
from exceptions import GridDivergenceError, PoleRangeError, SampleStarvationError
from newton_polytope import build_newton_polyhedron, newton_order_monomial

logger = logging.getLogger(__name__)


# -- formal series -----------------------------------------------------------

class AsymptoticSeries:
    """Finite sum of c_{alpha,k} r^{2 alpha} (ln r^2)^k / k!."""

    def __init__(self, terms: Iterable[Tuple[object, int, object]] = (), truncation: Optional[int] = None):
        self.terms: Dict[Tuple[Fraction, int], object] = {}
        for alpha, k, coeff in terms:
            key = (Fraction(alpha), int(k))
            if key[1] < 0:
                raise PoleRangeError(f"log power {k} is negative")
            if key in self.terms:
                raise ValueError(f"duplicate term (alpha={format_fraction(key[0])}, k={k})")
            self.terms[key] = coeff
        self.truncation = truncation

    def nonzero_terms(self) -> Dict[Tuple[Fraction, int], object]:
        return {key: c for key, c in sorted(self.terms.items()) if c != 0}

    def __eq__(self, other):
        if not isinstance(other, AsymptoticSeries):
            return NotImplemented
        return self.nonzero_terms() == other.nonzero_terms()

    def __repr__(self):
        body = ", ".join(f"({format_fraction(a)}, {k}, {c})" for (a, k), c in self.nonzero_terms().items())
        return f"AsymptoticSeries([{body}])"


@dataclass
class PrincipalPart:
    """sum_j coeffs[j] / (lambda - location)^j."""

    location: Fraction
    coeffs: Dict[int, object] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else 0


@dataclass(frozen=True)
class PoleProfile:
    location: Fraction
    order: int

    def as_dict(self):
        return {"location": format_fraction(self.location), "order": self.order}


def principal_parts(s: AsymptoticSeries) -> List[PrincipalPart]:
    grouped: Dict[Fraction, Dict[int, object]] = {}
    for (alpha, k), c in s.terms.items():
        orders = grouped.setdefault(alpha, {})
        value = c if k % 2 == 0 else -c
        orders[k + 1] = orders[k + 1] + value if k + 1 in orders else value
    parts = []
    for alpha in sorted(grouped):
        coeffs = {j: c for j, c in sorted(grouped[alpha].items()) if c != 0}
        if coeffs:
            parts.append(PrincipalPart(location=-alpha, coeffs=coeffs))
    return parts


def expand_principal_parts(parts: Iterable[PrincipalPart]) -> AsymptoticSeries:
    """Inverse of principal_parts: c_{alpha,k} = (-1)^k times the order-(k+1) coefficient."""
    terms = []
    for part in parts:
        for j, c in part.coeffs.items():
            k = j - 1
            terms.append((-part.location, k, c if k % 2 == 0 else -c))
    return AsymptoticSeries(terms)


def predict_pole_profile(a, r: int, n: Optional[int] = None) -> PoleProfile:
    """Leading pole of M(lambda): order r at -a, one more when a is an integer."""
    a = Fraction(a)
    if a <= 0:
        raise PoleRangeError(f"a = {format_fraction(a)} must be positive")
    if r < 1 or (n is not None and r > n):
        raise PoleRangeError(f"r = {r} outside [1, {n}]")
    order = r + 1 if a.denominator == 1 else r
    return PoleProfile(location=-a, order=order)


# -- quadrature on model integrals -------------------------------------------

def _gauss_legendre(fn, upper: float, panels: int, nodes: int = 10) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, upper, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    s = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * fn(s)))


def _trapezoid(fn, upper: float, panels: int) -> float:
    s = np.linspace(0.0, upper, panels + 1)
    values = fn(s)
    h = upper / panels
    return float(h * (values.sum() - (values[0] + values[-1]) / 2))


def model_mellin_quadrature(m: int, lam: float, panels: int = 64, rule: str = "gauss") -> float:
    """Integral of |z|^{2 lambda} |z^m|^2 over the unit disk, radially.

    With s = -ln|z| the integrand becomes 2 pi exp(-kappa s), kappa = 2(lambda + m + 1),
    integrated over [0, 40 / kappa].
    """
    kappa = 2.0 * (lam + m + 1)
    if kappa <= 0:
        raise GridDivergenceError(f"lambda = {lam} is outside the convergence half-plane for m = {m}")
    upper = 40.0 / kappa

    def integrand(s):
        return 2 * np.pi * np.exp(-kappa * s)

    if rule == "trapezoid":
        return _trapezoid(integrand, upper, panels)
    return _gauss_legendre(integrand, upper, panels)


@dataclass
class MellinReport:
    m: int
    lambdas: List[float]
    numeric: List[float]
    exact: List[float]
    max_rel_error: float

    def as_dict(self):
        return {
            "m": self.m,
            "lambdas": self.lambdas,
            "numeric": self.numeric,
            "exact": self.exact,
            "max_rel_error": self.max_rel_error,
        }


def verify_model_mellin(m: int, lambdas: Sequence[float], panels: int = 64) -> MellinReport:
    """Compare quadrature with pi / (lambda + m + 1)."""
    if m < 0:
        raise PoleRangeError("m must be non-negative")
    numeric = [model_mellin_quadrature(m, lam, panels) for lam in lambdas]
    exact = [math.pi / (lam + m + 1) for lam in lambdas]
    errors = [abs(u - v) / abs(v) for u, v in zip(numeric, exact)]
    return MellinReport(m=m, lambdas=list(lambdas), numeric=numeric, exact=exact,
                        max_rel_error=max(errors) if errors else 0.0)


def model_residue_limit(m: int, lambdas: Sequence[float], panels: int = 64) -> List[float]:
    """(lambda + m + 1) M(lambda), which tends to pi as lambda -> -m-1."""
    return [(lam + m + 1) * model_mellin_quadrature(m, lam, panels) for lam in lambdas]


def cutoff_model_mellin(m: int, lam: float, panels: int = 64) -> float:
    """Integral of |z|^{2 lambda} |z^m|^2 sigma(|z|) with the smoothstep cutoff at rho = 1.

    The taper on 1/2 <= |z| <= 1 goes through Gauss-Legendre; the inner disk
    is closed form.
    """
    kappa = 2.0 * (lam + m + 1)
    if kappa <= 0:
        raise GridDivergenceError(f"lambda = {lam} is outside the convergence half-plane for m = {m}")

    def integrand(s):
        return 2 * np.pi * np.exp(-kappa * s) * smoothstep_cutoff(np.exp(-s), 1.0)

    taper = _gauss_legendre(integrand, math.log(2.0), panels)
    return taper + 2 * math.pi * 2.0 ** -kappa / kappa


def verify_cutoff_model_mellin(m: int, lambdas: Sequence[float], panels: int = 64) -> float:
    """Largest relative gap between cutoff_model_mellin and adaptive quadrature over s in [0, inf)."""
    worst = 0.0
    for lam in lambdas:
        kappa = 2.0 * (lam + m + 1)
        reference, _ = quad(
            lambda s: 2 * math.pi * math.exp(-kappa * s) * float(smoothstep_cutoff(np.exp(-s), 1.0)),
            0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        worst = max(worst, abs(cutoff_model_mellin(m, lam, panels) - reference) / reference)
    return worst


def cutoff_residue_estimate(m: int, steps: Tuple[float, float] = (1e-5, 1e-6), panels: int = 64) -> float:
    """Limit of (lambda + m + 1) M_sigma(lambda) at lambda = -m-1, by linear extrapolation in the step."""
    first, second = steps
    r1 = first * cutoff_model_mellin(m, -m - 1 + first, panels)
    r2 = second * cutoff_model_mellin(m, -m - 1 + second, panels)
    return (first * r2 - second * r1) / (first - second)


def quadrature_refinement_order(m: int, lam: float, panels: int = 256) -> float:
    """Observed convergence order of the trapezoid rule between panels and 2*panels."""
    exact = math.pi / (lam + m + 1)
    coarse = abs(model_mellin_quadrature(m, lam, panels, "trapezoid") - exact)
    fine = abs(model_mellin_quadrature(m, lam, 2 * panels, "trapezoid") - exact)
    return math.log2(coarse / fine)


def log_term_mellin(alpha, k: int, lam):
    """Integral over (0, 1) of r^{2 lambda} r^{2 alpha} (ln r^2)^k / k! 2dr/r.

    Equals (-1)^k (lambda + alpha)^{-(k+1)}; exact for rational input.
    """
    if k < 0:
        raise PoleRangeError("log power must be non-negative")
    shift = lam + alpha
    if shift <= 0:
        raise GridDivergenceError("the integral diverges for lambda + alpha <= 0")
    if isinstance(shift, (int, Fraction)):
        return Fraction((-1) ** k) / Fraction(shift) ** (k + 1)
    return (-1) ** k / shift ** (k + 1)


def verify_log_term_mellin(alpha: float, k: int, lam: float, panels: int = 64) -> float:
    """Relative error of quadrature against log_term_mellin."""
    kappa = float(lam + alpha)
    exact = float(log_term_mellin(alpha, k, lam))
    upper = (40.0 + 4 * k) / kappa

    def integrand(s):
        # u = ln r^2 = -s
        return (-s) ** k / math.factorial(k) * np.exp(-kappa * s)

    numeric = _gauss_legendre(integrand, upper, panels)
    return abs(numeric - exact) / abs(exact)


# -- Monte Carlo -------------------------------------------------------------

def smoothstep_cutoff(norm: np.ndarray, rho: float) -> np.ndarray:
    """1 on |x| <= rho/2, quintic taper to 0 at rho."""
    s = np.clip((rho - norm) / (rho / 2), 0.0, 1.0)
    return s ** 3 * (10 - 15 * s + 6 * s ** 2)


def _log_abs(exps: np.ndarray, coeffs: np.ndarray, log_r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # log|sum c x^m| with x = exp(log_r + i theta), scaled by the largest monomial
    logs = log_r @ exps.T
    phases = theta @ exps.T
    top = logs.max(axis=1, keepdims=True)
    value = np.sum(coeffs * np.exp(logs - top + 1j * phases), axis=1)
    return top[:, 0] + np.log(np.maximum(np.abs(value), 1e-300))


@dataclass(frozen=True)
class _Block:
    f_exps: np.ndarray
    f_coeffs: np.ndarray
    h_exps: np.ndarray
    h_coeffs: np.ndarray
    rho: float
    lambdas: np.ndarray
    size: int
    span: float
    shells: int


def _block_sums(block: _Block, seed: np.random.SeedSequence) -> np.ndarray:
    """Sums of weights and squared weights per lambda for one block."""
    rng = np.random.default_rng(seed)
    n = block.f_exps.shape[1]
    u = rng.uniform(0.0, block.span, (block.size, n))
    # first coordinate stratified over equal log-radius shells
    shell = np.arange(block.size) % block.shells
    u[:, 0] = (shell + rng.uniform(0.0, 1.0, block.size)) * block.span / block.shells
    theta = rng.uniform(0.0, 2 * np.pi, (block.size, n))
    log_r = math.log(block.rho) - u

    norm = np.sqrt(np.sum(np.exp(2 * log_r), axis=1))
    sigma = smoothstep_cutoff(norm, block.rho)
    inside = sigma > 0
    base = np.full(block.size, -np.inf)
    base[inside] = (
        n * math.log(block.span * 2 * np.pi)
        + 2 * log_r[inside].sum(axis=1)
        + np.log(sigma[inside])
        + 2 * _log_abs(block.h_exps, block.h_coeffs, log_r[inside], theta[inside])
    )
    log_f = _log_abs(block.f_exps, block.f_coeffs, log_r, theta)
    weights = np.exp(base[:, None] + 2 * block.lambdas[None, :] * log_f[:, None])
    return np.stack([weights.sum(axis=0), (weights ** 2).sum(axis=0)])


@dataclass
class MellinCurve:
    lambdas: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    samples: int
    block_sums: np.ndarray = field(repr=False)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({"lambda": self.lambdas, "M": self.values, "stderr": self.stderr})


def write_curve_csv(curve: MellinCurve, path: str) -> None:
    curve.frame().to_csv(path, index=False)
    logger.info("wrote %d curve points to %s", len(curve.lambdas), path)


def divergence_threshold(f: SparsePolynomial, h: SparsePolynomial) -> Optional[Fraction]:
    """-min(v(h dx), 1): M(lambda) converges for lambda above it."""
    P = build_newton_polyhedron(f.supp())
    if not P.positive_facets():
        return None
    v = min(newton_order_monomial(P, m) for m in holomorphic_to_log(h).support())
    return -min(v, Fraction(1))


def estimate_mellin_mc(
    f: SparsePolynomial,
    h: SparsePolynomial,
    rho: float,
    lambdas: Sequence[float],
    samples: int = config.SAMPLES,
    seed: int = config.SEED,
    workers: int = config.WORKERS,
    shells: int = 64,
) -> MellinCurve:
    """Monte Carlo estimate of M(lambda) on a grid.

    Samples come in fixed-size blocks; block k draws from the k-th child of
    SeedSequence(seed), so the result does not depend on ``workers``.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    threshold = divergence_threshold(f, h)
    if threshold is not None and np.any(lambdas <= float(threshold)):
        raise GridDivergenceError(
            f"grid reaches lambda <= {format_fraction(threshold)} where M(lambda) diverges")
    size = min(config.BLOCK_SIZE, samples)
    n_blocks = max(1, -(-samples // size))
    block = _Block(
        f_exps=f.exponent_matrix().astype(float), f_coeffs=f.coefficient_vector(),
        h_exps=h.exponent_matrix().astype(float), h_coeffs=h.coefficient_vector(),
        rho=float(rho), lambdas=lambdas, size=size, span=config.LOG_RADIUS_SPAN,
        shells=min(shells, size))
    seeds = np.random.SeedSequence(seed).spawn(n_blocks)
    logger.info("Monte Carlo: %d blocks of %d samples on %d workers", n_blocks, size, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            sums = list(executor.map(_block_sums, [block] * n_blocks, seeds))
    else:
        sums = [_block_sums(block, s) for s in seeds]
    block_sums = np.stack(sums)
    total = n_blocks * size
    first = block_sums[:, 0, :].sum(axis=0) / total
    second = block_sums[:, 1, :].sum(axis=0) / total
    stderr = np.sqrt(np.maximum(second - first ** 2, 0.0) / total)
    return MellinCurve(lambdas=lambdas, values=first, stderr=stderr, samples=total, block_sums=block_sums)


@dataclass
@dataclass
class PoleFit:
    location: float
    order: int
    location_ci: Tuple[float, float]
    order_ci: Tuple[float, float]
    residue: float
    laurent: Tuple[float, ...]
    curve: MellinCurve = field(repr=False)

    def as_dict(self):
        return {
            "location": self.location,
            "order": self.order,
            "location_ci": list(self.location_ci),
            "order_ci": list(self.order_ci),
            "residue": self.residue,
            "laurent": list(self.laurent),
            "samples": self.curve.samples,
            "curve": [
                {"lambda": float(lam), "M": float(v), "stderr": float(e)}
                for lam, v, e in zip(self.curve.lambdas, self.curve.values, self.curve.stderr)
            ],
        }


def _fit_at(a: float, order: int, lambdas: np.ndarray, values: np.ndarray, weights: np.ndarray):
    # M = c_q s^-q + ... + c_1 s^-1 + b_0 + b_1 s + b_2 s^2, s = lambda + a
    shift = lambdas + a
    columns = [shift ** -j for j in range(order, 0, -1)] + [np.ones_like(shift), shift, shift ** 2]
    design = np.column_stack(columns) * weights[:, None]
    coef, *_ = np.linalg.lstsq(design, values * weights, rcond=None)
    resid = design @ coef - values * weights
    return float(resid @ resid), coef


def _fit_location(order: int, lambdas: np.ndarray, values: np.ndarray, weights: np.ndarray, span: float):
    lower = -float(np.min(lambdas))
    candidates = lower + np.geomspace(1e-4, span, 120)
    scores = [_fit_at(a, order, lambdas, values, weights)[0] for a in candidates]
    i = int(np.argmin(scores))
    lo = candidates[i - 1] if i > 0 else lower + 1e-9
    hi = candidates[min(i + 1, len(candidates) - 1)]
    result = minimize_scalar(
        lambda a: _fit_at(a, order, lambdas, values, weights)[0],
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    a = float(result.x) if result.fun <= scores[i] else float(candidates[i])
    chi2, coef = _fit_at(a, order, lambdas, values, weights)
    return a, chi2, coef


def fit_pole(lambdas: np.ndarray, values: np.ndarray, rel_err: np.ndarray,
             max_order: int = 2, span: float = 1.0):
    """Weighted least-squares fit of a principal part at lambda = -a.

    For each pole order q up to ``max_order`` the model is
    sum_{j<=q} c_j (lambda + a)^{-j} plus a quadratic background, linear in
    the coefficients and searched over a. A higher order replaces a lower one
    only when it lowers chi^2 by more than ln(points), its leading coefficient
    is positive and its leading term carries at least half of M at the grid
    point nearest the pole.

    Returns (a, q, coefficients) with coefficients ordered c_q, ..., c_1, b_0, b_1, b_2.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    values = np.asarray(values, dtype=float)
    weights = 1.0 / (np.maximum(rel_err, 1e-6) * np.abs(values))
    penalty = math.log(len(lambdas))
    nearest = int(np.argmin(lambdas))
    best = None
    for order in range(1, max_order + 1):
        a, chi2, coef = _fit_location(order, lambdas, values, weights, span)
        share = coef[0] * (lambdas[nearest] + a) ** -order / values[nearest]
        logger.debug("order %d: a %.5f chi2 %.4g leading share %.3f", order, a, chi2, share)
        if best is None or (coef[0] > 0 and share >= 0.5 and chi2 + penalty < best[3]):
            best = (a, order, coef, chi2)
    a, order, coef, _ = best
    return a, order, tuple(float(c) for c in coef)


def estimate_leading_pole_mc(
    f: SparsePolynomial,
    h: SparsePolynomial,
    rho: float,
    lambdas: Sequence[float],
    samples: int = config.SAMPLES,
    seed: int = config.SEED,
    workers: int = config.WORKERS,
    bootstrap: int = config.BOOTSTRAP_ROUNDS,
) -> PoleFit:
    """Fit the leading pole of M(lambda) from above, with bootstrap intervals over blocks.

    Pole orders up to the number of variables are tried.
    """
    if not f.has_real_coefficients():
        logger.warning("f has non-real coefficients")
    curve = estimate_mellin_mc(f, h, rho, lambdas, samples, seed, workers)
    rel_err = curve.stderr / curve.values
    if np.any(~np.isfinite(rel_err)) or np.any(rel_err > config.MAX_RELATIVE_STDERR):
        raise SampleStarvationError(
            f"relative standard error up to {np.nanmax(rel_err):.3g} exceeds {config.MAX_RELATIVE_STDERR}")

    a, q, coef = fit_pole(curve.lambdas, curve.values, rel_err, max_order=f.n)

    per_block = curve.block_sums[:, 0, :]
    n_blocks = per_block.shape[0]
    # the child after the last block seed
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(n_blocks + 1)[-1])
    draws = []
    for _ in range(bootstrap if n_blocks > 1 else 0):
        pick = rng.integers(0, n_blocks, n_blocks)
        values = per_block[pick].sum(axis=0) / curve.samples
        if np.all(values > 0):
            draws.append(fit_pole(curve.lambdas, values, rel_err, max_order=f.n)[:2])
    if draws:
        draws = np.array(draws, dtype=float)
        loc_ci = tuple(float(x) for x in np.percentile(-draws[:, 0], [2.5, 97.5]))
        ord_ci = tuple(float(x) for x in np.percentile(draws[:, 1], [2.5, 97.5]))
    else:
        loc_ci, ord_ci = (-a, -a), (float(q), float(q))
    logger.info("pole fit: location %.4f order %d", -a, q)
    return PoleFit(location=-a, order=q, location_ci=loc_ci, order_ci=ord_ci,
                   residue=coef[0], laurent=coef[:q], curve=curve)
