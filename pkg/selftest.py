#!/usr/bin/env python3
"""
Acceptance suite for Leadterm.

Run with ``python main.py selftest`` (add ``--quick`` to skip the Monte
Carlo fits). Each criterion prints a status line to stderr; the JSON
report goes to stdout.
"""

from __future__ import annotations

import logging
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np

import config
from certifier import CERTIFIED, INCONCLUSIVE, LogForm, admissible_faces, certify, certify_all
from cli import EXIT_NUMERIC, EXIT_OK, parse_polynomial
from exact_core import SparsePolynomial
from face_grading import nondegeneracy_heuristic
from mellin_asym import (
    AsymptoticSeries,
    cutoff_residue_estimate,
    divergence_threshold,
    estimate_leading_pole_mc,
    expand_principal_parts,
    principal_parts,
    verify_cutoff_model_mellin,
    verify_log_term_mellin,
    verify_model_mellin,
)
from newton_polytope import (
    LeadingPair,
    brute_force_lattice_points,
    build_newton_polyhedron,
    lattice_count_identity,
    lattice_points_scaled_face,
    newton_number,
    vasilev_lower_bound,
)
from suspension import forward_map_spot_check, suspended_quotient_dims, suspension_exponent

logger = logging.getLogger(__name__)

# Suspensions with a larger exponent make the eigenspace quotient slow
MAX_SUSPENSION_EXPONENT = 30


def random_convenient_polynomial(rng: np.random.Generator, max_degree: int = 6) -> SparsePolynomial:
    """Pure powers x^a, y^b plus up to three more points, coefficients in {1, -1, 2, -2}."""
    coefficients = (1, -1, 2, -2)
    terms = {
        (int(rng.integers(2, max_degree + 1)), 0): int(rng.choice(coefficients)),
        (0, int(rng.integers(2, max_degree + 1))): int(rng.choice(coefficients)),
    }
    for _ in range(int(rng.integers(0, 4))):
        m = (int(rng.integers(0, max_degree)), int(rng.integers(0, max_degree)))
        if any(m):
            terms[m] = int(rng.choice(coefficients))
    return SparsePolynomial(2, terms)


def _monomial_forms(n: int, box: int) -> List[LogForm]:
    grid = np.indices((box,) * n).reshape(n, -1).T + 1
    return [LogForm.top(n, {tuple(int(c) for c in m): 1}) for m in grid]


def check_certifier_oracles(seed: int) -> Dict[str, object]:
    cases = [
        ("x^2 + y^3", "1", LeadingPair(Fraction(-1, 6), 0)),
        ("x^3 + y^3", "x*y", LeadingPair(Fraction(1, 3), 0)),
        ("x^5 + x^2*y^2 + y^5", "1", LeadingPair(Fraction(-1, 2), 1)),
        ("x^2 + y^3", "2*x^2 - 3*y^3", None),
    ]
    rows = []
    passed = True
    for f_text, h_text, expected in cases:
        f = parse_polynomial(f_text)
        certificates = certify_all(f, parse_polynomial(h_text, f.n), trials=4, seed=seed)
        if expected is None:
            ok = [c.verdict for c in certificates] == [INCONCLUSIVE]
        else:
            ok = [(c.verdict, c.pair) for c in certificates] == [(CERTIFIED, expected)]
        passed &= ok
        rows.append({"f": f_text, "h": h_text, "verdicts": [c.verdict for c in certificates], "ok": ok})
    return {"passed": passed, "cases": rows}


def check_vasilev_equality(seed: int, polynomials: int = 100, box: int = 4) -> Dict[str, object]:
    rng = np.random.default_rng(seed)
    certified = mismatches = 0
    for _ in range(polynomials):
        f = random_convenient_polynomial(rng)
        P = build_newton_polyhedron(f.supp())
        for phi in _monomial_forms(2, box):
            for face, _ in admissible_faces(P, phi):
                cert = certify(f, face, phi, P=P, trials=2, seed=seed)
                if not cert.certified:
                    continue
                certified += 1
                if cert.pair != vasilev_lower_bound(P, phi):
                    mismatches += 1
                    logger.error("%s on face %d: %s vs bound %s", f, face.id, cert.pair,
                                 vasilev_lower_bound(P, phi))
    return {"passed": mismatches == 0 and certified > 0, "certified": certified, "mismatches": mismatches}


def check_suspension_bijection(seed: int, instances: int = 20, box: int = 4) -> Dict[str, object]:
    rng = np.random.default_rng(seed + 1)
    found: List[Dict[str, object]] = []
    passed = True
    attempts = 0
    while len(found) < instances and attempts < 50 * instances:
        attempts += 1
        f = random_convenient_polynomial(rng, max_degree=5)
        if suspension_exponent(f) > MAX_SUSPENSION_EXPONENT:
            continue
        P = build_newton_polyhedron(f.supp())
        candidates = [
            (face, a) for phi in _monomial_forms(2, box)
            for face, a in admissible_faces(P, phi) if a.denominator != 1]
        if not candidates:
            continue
        face, a = candidates[int(rng.integers(0, len(candidates)))]
        if nondegeneracy_heuristic(f, face, trials=4, seed=seed, P=P).verdict == "fail":
            continue
        lhs, rhs = suspended_quotient_dims(f, face, a, P=P)
        if lhs == 0:
            continue
        spot = forward_map_spot_check(f, face, a, P=P)
        ok = lhs == rhs and spot.preserved >= 1
        passed &= ok
        found.append({"f": str(f), "face_id": face.id, "a": str(a), "lhs_dim": lhs, "rhs_dim": rhs,
                      "preserved": spot.preserved, "ok": ok})
    return {"passed": passed and len(found) >= instances, "instances": found}


def check_principal_parts_round_trip(seed: int, series: int = 1000) -> Dict[str, object]:
    rng = np.random.default_rng(seed + 2)
    failures = 0
    for _ in range(series):
        terms = {}
        for _ in range(int(rng.integers(1, 8))):
            alpha = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 7)))
            k = int(rng.integers(0, 4))
            coeff = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
            if coeff:
                terms[(alpha, k)] = coeff
        s = AsymptoticSeries((alpha, k, c) for (alpha, k), c in terms.items())
        if expand_principal_parts(principal_parts(s)) != s:
            failures += 1
    return {"passed": failures == 0, "series": series, "failures": failures}


def check_model_mellin() -> Dict[str, object]:
    worst = 0.0
    worst_residue = 0.0
    worst_cutoff = 0.0
    for m in range(4):
        lambdas = np.linspace(-m - 1 + 0.05, 2.0, 10)
        worst = max(worst, verify_model_mellin(m, lambdas).max_rel_error)
        worst_cutoff = max(worst_cutoff, verify_cutoff_model_mellin(m, np.linspace(-m - 1 + 0.2, 2.0, 6)))
        worst_residue = max(worst_residue, abs(cutoff_residue_estimate(m) - np.pi))
    log_error = max(verify_log_term_mellin(0.25, k, 0.5) for k in range(4))
    return {
        "passed": worst <= 1e-8 and worst_cutoff <= 1e-8 and worst_residue <= 1e-6 and log_error <= 1e-8,
        "max_rel_error": worst,
        "max_cutoff_rel_error": worst_cutoff,
        "max_residue_error": worst_residue,
        "log_term_rel_error": log_error,
    }


def check_pole_fits(seed: int, samples: int, workers: int) -> Dict[str, object]:
    cases = [
        ("x^2 + y^3", Fraction(-5, 6), 1),
        ("x^5 + x^2*y^2 + y^5", Fraction(-1, 2), 2),
    ]
    rows = []
    passed = True
    for f_text, location, order in cases:
        f = parse_polynomial(f_text)
        h = SparsePolynomial.constant(f.n, 1)
        threshold = float(divergence_threshold(f, h))
        lambdas = np.linspace(threshold + 0.02, threshold + 0.4, 16)
        fit = estimate_leading_pole_mc(f, h, 1.0, lambdas, samples=samples, seed=seed, workers=workers)
        ok = abs(fit.location - float(location)) <= 0.05 and abs(fit.order - order) <= 0.3
        passed &= ok
        rows.append({"f": f_text, "location": fit.location, "order": fit.order,
                     "expected_location": str(location), "expected_order": order, "ok": ok})
    return {"passed": passed, "fits": rows}


def check_newton_numbers() -> Dict[str, object]:
    wrong = []
    for a in range(2, 8):
        for b in range(2, 8):
            P = build_newton_polyhedron([(a, 0), (0, b)])
            if newton_number(P) != (a - 1) * (b - 1):
                wrong.append([a, b])
    return {"passed": not wrong, "wrong": wrong}


def check_lattice_counts() -> Dict[str, object]:
    polynomials = ["x^2 + y^3", "x^3 + y^3", "x^5 + x^2*y^2 + y^5", "x^2*y + x*y^3 + x^4 + y^5", "x^2 + y^2 + z^2",
                   "x*y", "x^3 + y^2*z + z^4"]
    scales = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]
    compared = 0
    disagreements = []
    for text in polynomials:
        f = parse_polynomial(text)
        P = build_newton_polyhedron(f.supp())
        for face in P.compact_faces():
            for t in scales:
                for interior in (False, True):
                    compared += 1
                    fast = sorted(lattice_points_scaled_face(P, face, t, interior))
                    slow = sorted(brute_force_lattice_points(P, face, t, interior))
                    if fast != slow:
                        disagreements.append({"f": text, "face_id": face.id, "t": str(t), "interior": interior})
                if t > 0:
                    closed, pieces = lattice_count_identity(P, face, t)
                    if closed != pieces:
                        disagreements.append({"f": text, "face_id": face.id, "t": str(t), "identity": [closed, pieces]})
    return {"passed": not disagreements, "compared": compared, "disagreements": disagreements}


def run_selftest(quick: bool = False, seed: int = config.SEED, samples: int = config.SAMPLES,
                 workers: int = config.WORKERS) -> Tuple[Dict[str, object], int]:
    criteria: List[Tuple[int, str, Callable[[], Dict[str, object]]]] = [
        (1, "certifier oracles", lambda: check_certifier_oracles(seed)),
        (2, "Newton bound equality", lambda: check_vasilev_equality(seed)),
        (3, "suspension dimension bijection", lambda: check_suspension_bijection(seed)),
        (4, "principal parts round trip", lambda: check_principal_parts_round_trip(seed)),
        (5, "model Mellin quadrature", check_model_mellin),
        (6, "Monte Carlo pole fits", lambda: check_pole_fits(seed, samples, workers)),
        (7, "Newton number oracle", check_newton_numbers),
        (8, "lattice point enumerators", check_lattice_counts),
    ]
    report = []
    for number, name, check in criteria:
        if quick and number == 6:
            print(f"⏭️  {number}. {name}: skipped (--quick)", file=sys.stderr)
            report.append({"id": number, "name": name, "passed": None, "skipped": True})
            continue
        started = time.perf_counter()
        result = check()
        elapsed = time.perf_counter() - started
        mark = "✅" if result["passed"] else "❌"
        print(f"{mark} {number}. {name} ({elapsed:.1f}s)", file=sys.stderr)
        report.append({"id": number, "name": name, **result})

    passed = all(entry["passed"] is not False for entry in report)
    print("🎉 All checks passed" if passed else "⚠️  Some checks failed", file=sys.stderr)
    return {"passed": passed, "criteria": report}, EXIT_OK if passed else EXIT_NUMERIC
