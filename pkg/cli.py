#!/usr/bin/env python3
"""
Command-line surface for Leadterm.

    python main.py newton --f "x^2 + y^3"
    python main.py certify --f "x^2+y^3" --form 1 --face auto
    python main.py mellin-fit --f "x^2+y^3" --samples 1000000 --grid -0.8:-0.4:12

JSON goes to stdout (or --output), diagnostics to stderr. Exit codes:
0 success, 2 invalid input, 3 parse error, 4 numeric verification outside
tolerance.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError

import config
from certifier import INVALID_INPUT, admissible_faces, as_log_form, certify, certify_all, common_degree
from exact_core import I_UNIT, SparsePolynomial, format_fraction
from exceptions import LeadtermError, PolynomialSyntaxError
from face_grading import FaceContext
from mellin_asym import divergence_threshold, estimate_leading_pole_mc, predict_pole_profile, write_curve_csv
from newton_polytope import (
    Face,
    NewtonPolyhedron,
    build_newton_polyhedron,
    is_convenient,
    newton_number,
    newton_pair_form,
    vasilev_lower_bound,
)
from schemas import load_polyhedron_document, polyhedron_document
from suspension import certify_suspended, forward_map_spot_check, suspended_quotient_dims

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4

COMMANDS = ("newton", "analyze", "certify", "suspend-check", "mellin-fit", "selftest")

# Pole fit tolerances against the certified prediction
LOCATION_TOLERANCE = 0.05
ORDER_TOLERANCE = 0.3


# -- polynomial grammar --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")
_LETTER_VARIABLES = "xyzw"


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[bad]!r}", bad)
        number, name, op = match.groups()
        start = match.start(match.lastindex)
        if number is not None:
            tokens.append(("num", number, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _variable_index(name: str) -> Tuple[str, int]:
    """('letter' | 'indexed', 1-based index) of a variable name."""
    if len(name) == 1 and name in _LETTER_VARIABLES:
        return "letter", _LETTER_VARIABLES.index(name) + 1
    if re.fullmatch(r"x[1-9]\d*", name):
        return "indexed", int(name[1:])
    raise KeyError(name)


def _resolve_variables(tokens, n: Optional[int]) -> Tuple[Dict[str, int], int]:
    style = None
    indices: Dict[str, int] = {}
    for kind, value, pos in tokens:
        if kind != "name" or value == "i":
            continue
        try:
            this_style, index = _variable_index(value)
        except KeyError:
            raise PolynomialSyntaxError(f"unknown variable {value!r}", pos) from None
        if style is not None and this_style != style:
            raise PolynomialSyntaxError("cannot mix x,y,z,w with x1..xn", pos)
        style = this_style
        if n is not None and index > n:
            raise PolynomialSyntaxError(f"variable {value} exceeds n = {n}", pos)
        indices[value] = index
    inferred = max(indices.values(), default=1)
    return indices, n if n is not None else inferred


class _Parser:
    """Recursive descent over

        expr   := [+|-] term {(+|-) term}
        term   := factor {[*|/] factor}
        factor := atom [^ integer]
        atom   := integer | variable | i | ( expr )
    """

    def __init__(self, tokens, indices: Dict[str, int], n: int):
        self.tokens = tokens
        self.indices = indices
        self.n = n
        self.k = 0

    @property
    def current(self):
        return self.tokens[self.k]

    def _take(self):
        token = self.tokens[self.k]
        self.k += 1
        return token

    def _starts_atom(self) -> bool:
        kind, value, _ = self.current
        return kind in ("num", "name") or (kind == "op" and value == "(")

    def parse(self) -> SparsePolynomial:
        result = self.expr()
        kind, value, pos = self.current
        if kind != "end":
            raise PolynomialSyntaxError(f"unexpected {value!r}", pos)
        return result

    def expr(self) -> SparsePolynomial:
        sign = 1
        if self.current[:2] in (("op", "+"), ("op", "-")):
            sign = -1 if self._take()[1] == "-" else 1
        result = self.term() if sign > 0 else -self.term()
        while self.current[:2] in (("op", "+"), ("op", "-")):
            op = self._take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> SparsePolynomial:
        result = self.factor()
        while True:
            kind, value, pos = self.current
            if kind == "op" and value == "*":
                self._take()
                result = result * self.factor()
            elif kind == "op" and value == "/":
                self._take()
                divisor = self.factor()
                if not divisor.is_constant() or divisor.is_zero():
                    raise PolynomialSyntaxError("division only by a non-zero constant", pos)
                result = result.scale(1 / divisor.coefficient((0,) * self.n))
            elif self._starts_atom():
                result = result * self.factor()
            else:
                return result

    def factor(self) -> SparsePolynomial:
        base = self.atom()
        if self.current[:2] != ("op", "^"):
            return base
        self._take()
        kind, value, pos = self._take()
        if kind == "op" and value == "-":
            raise PolynomialSyntaxError("negative exponents are not allowed", pos)
        if kind != "num":
            raise PolynomialSyntaxError("expected an integer exponent", pos)
        return base ** int(value)

    def atom(self) -> SparsePolynomial:
        kind, value, pos = self._take()
        if kind == "num":
            return SparsePolynomial.constant(self.n, int(value))
        if kind == "name":
            if value == "i":
                return SparsePolynomial.constant(self.n, I_UNIT)
            return SparsePolynomial.variable(self.n, self.indices[value])
        if kind == "op" and value == "(":
            inner = self.expr()
            kind, value, pos = self._take()
            if (kind, value) != ("op", ")"):
                raise PolynomialSyntaxError("expected ')'", pos)
            return inner
        if kind == "end":
            raise PolynomialSyntaxError("unexpected end of input", pos)
        raise PolynomialSyntaxError(f"unexpected {value!r}", pos)


def parse_polynomial(text: str, n: Optional[int] = None) -> SparsePolynomial:
    """Parse text like ``1/3*x^3 + i*y`` into an exact polynomial.

    Variables are x, y, z, w or x1..xn (not both); n is the highest
    variable used unless declared. Positions in errors are 0-based offsets.
    """
    if n is not None and n < 1:
        raise PolynomialSyntaxError("n must be at least 1", 0)
    tokens = _tokenize(text)
    indices, n = _resolve_variables(tokens, n)
    return _Parser(tokens, indices, n).parse()


def parse_form(text: str, n: int) -> SparsePolynomial:
    """The coefficient h of h dx_1^...^dx_n, in the variables of f."""
    return parse_polynomial(text, n)


def select_faces(P: NewtonPolyhedron, selector: str) -> Optional[List[Face]]:
    """None for "auto", else the face named by id or by a vertex list like (2,0),(0,3)."""
    selector = selector.strip()
    if selector == "auto":
        return None
    if selector.isdigit():
        try:
            return [P.face_by_id(int(selector))]
        except KeyError as exc:
            raise LeadtermError(str(exc.args[0]), code="unknown-face") from None
    vertices = [tuple(int(c) for c in group.split(",")) for group in re.findall(r"[(\[]([-\d,\s]+)[)\]]", selector)]
    if not vertices or any(len(v) != P.n for v in vertices):
        raise LeadtermError(f"cannot read face selector {selector!r}", code="unknown-face")
    try:
        return [P.face_by_vertices(vertices)]
    except KeyError as exc:
        raise LeadtermError(str(exc.args[0]), code="unknown-face") from None


def parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        grid = np.linspace(float(lo), float(hi), int(steps))
    except ValueError:
        raise LeadtermError(f"grid must look like lo:hi:steps, got {text!r}", code="bad-grid") from None
    if len(grid) < 4:
        raise LeadtermError("the grid needs at least 4 points", code="bad-grid")
    return grid


# -- jobs ----------------------------------------------------------------------

class JobSpec(BaseModel):
    command: Literal["newton", "analyze", "certify", "suspend-check", "mellin-fit", "selftest"]
    f: Optional[str] = Field(None, description="Polynomial source text")
    forms: List[str] = Field(["1"], description="Coefficients h of h dx_1^...^dx_n")
    face: str = Field("auto", description="auto, a face id, or a vertex list")
    n: Optional[int] = Field(None, ge=1, description="Declared number of variables")
    seed: int = Field(config.SEED, ge=0)
    samples: int = Field(config.SAMPLES, ge=1)
    workers: int = Field(config.WORKERS, ge=1)
    tol: float = Field(config.TOL, gt=0)
    trials: int = Field(config.TRIALS, ge=0)
    grid: Optional[str] = Field(None, description="lo:hi:steps; defaults to just above the divergence threshold")
    rho: float = Field(1.0, gt=0)
    quick: bool = Field(False, description="selftest without the Monte Carlo criteria")
    output: Optional[str] = None
    dump_curve: Optional[str] = None
    polyhedron: Optional[str] = Field(None, description="Path of a serialized polyhedron to reuse")


def newton_document(f: Optional[SparsePolynomial], P: NewtonPolyhedron) -> Dict[str, object]:
    convenient = is_convenient(P)
    return {
        "f": None if f is None else str(f),
        "n": P.n,
        "convenient": convenient,
        "newton_number": newton_number(P) if convenient else None,
        "compact_faces": len(P.compact_faces()),
        "polyhedron": polyhedron_document(P),
    }


def analyze_document(f: SparsePolynomial, forms: Sequence[str], P: NewtonPolyhedron) -> Dict[str, object]:
    results = []
    for text in forms:
        phi = as_log_form(parse_form(text, f.n), f.n)
        pair = newton_pair_form(P, phi)
        results.append({
            "form": text,
            "v": format_fraction(pair.v),
            "l": pair.l,
            "lower_bound": vasilev_lower_bound(P, phi).as_dict(),
            "admissible_faces": [
                {"face_id": face.id, "a": format_fraction(a)} for face, a in admissible_faces(P, phi)
            ],
        })
    return {"f": str(f), "forms": results}


def certify_document(f: SparsePolynomial, forms: Sequence[str], selector: str, P: NewtonPolyhedron,
                     **options) -> Dict[str, object]:
    faces = select_faces(P, selector)
    results = []
    for text in forms:
        h = parse_form(text, f.n)
        if faces is None:
            certificates = certify_all(f, h, P=P, **options)
        else:
            certificates = [certify(f, face, h, P=P, **options) for face in faces]
        results.append({"form": text, "certificates": [c.as_dict() for c in certificates]})
    return {"f": str(f), "face": selector, "results": results}


def suspend_document(f: SparsePolynomial, forms: Sequence[str], selector: str, P: NewtonPolyhedron,
                     **options) -> Dict[str, object]:
    faces = select_faces(P, selector)
    results = []
    for text in forms:
        phi = as_log_form(parse_form(text, f.n), f.n)
        if faces is None:
            pairs = [(face, a, None) for face, a in admissible_faces(P, phi)]
        else:
            pairs = [(face,) + common_degree(FaceContext.from_face(P, face), phi) for face in faces]
        checks = []
        for face, a, problem in pairs:
            entry: Dict[str, object] = {"face_id": face.id, "a": None if a is None else format_fraction(a)}
            if problem is not None or a.denominator == 1:
                entry["skipped"] = problem or "integral-degree"
                checks.append(entry)
                continue
            lhs, rhs = suspended_quotient_dims(f, face, a, P=P)
            spot = forward_map_spot_check(f, face, a, P=P)
            entry.update({
                "lhs_dim": lhs,
                "rhs_dim": rhs,
                "dims_agree": lhs == rhs,
                "forward_map": {"tested": spot.tested, "preserved": spot.preserved},
                "certificate": certify_suspended(f, face, phi, P=P, **options).as_dict(),
            })
            checks.append(entry)
        results.append({"form": text, "checks": checks})
    return {"f": str(f), "face": selector, "results": results}


def _predicted_profile(f: SparsePolynomial, h: SparsePolynomial, P: NewtonPolyhedron, trials: int, seed: int):
    certified = [c for c in certify_all(f, h, P=P, trials=trials, seed=seed) if c.certified]
    if not certified:
        return None
    best = min(certified, key=lambda c: c.pair)
    return predict_pole_profile(best.pair.alpha + 1, best.pair.k + 1, f.n)


def mellin_document(job: JobSpec, f: SparsePolynomial, P: NewtonPolyhedron) -> Tuple[Dict[str, object], bool]:
    """Pole fit report and whether it matches the certified prediction."""
    h = parse_form(job.forms[0], f.n)
    if job.grid:
        lambdas = parse_grid(job.grid)
    else:
        threshold = float(divergence_threshold(f, h))
        lambdas = np.linspace(threshold + 0.02, threshold + 0.4, 16)
    fit = estimate_leading_pole_mc(f, h, job.rho, lambdas, samples=job.samples, seed=job.seed, workers=job.workers)
    if job.dump_curve:
        write_curve_csv(fit.curve, job.dump_curve)
    profile = _predicted_profile(f, h, P, job.trials, job.seed)
    doc: Dict[str, object] = {"f": str(f), "form": job.forms[0], "fit": fit.as_dict(), "prediction": None}
    ok = True
    if profile is not None:
        location_error = abs(fit.location - float(profile.location))
        order_error = abs(fit.order - profile.order)
        ok = location_error <= LOCATION_TOLERANCE and order_error <= ORDER_TOLERANCE
        doc["prediction"] = profile.as_dict()
        doc["agreement"] = {
            "location_error": location_error,
            "order_error": order_error,
            "location_tolerance": LOCATION_TOLERANCE,
            "order_tolerance": ORDER_TOLERANCE,
            "within_tolerance": ok,
        }
    return doc, ok


def _error_document(exc: LeadtermError) -> Dict[str, object]:
    error: Dict[str, object] = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, PolynomialSyntaxError):
        error["position"] = exc.position
    return {"error": error}


def _has_invalid(doc: Dict[str, object]) -> bool:
    return any(
        c["verdict"] == INVALID_INPUT
        for result in doc.get("results", [])
        for c in result.get("certificates", []))


def _load_polyhedron(job: JobSpec, f: Optional[SparsePolynomial]) -> NewtonPolyhedron:
    if job.polyhedron:
        with open(job.polyhedron, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return load_polyhedron_document(doc.get("polyhedron", doc))
    return build_newton_polyhedron(f.supp())


def run(job: JobSpec) -> Tuple[Dict[str, object], int]:
    """Execute one job and return its JSON document with the exit code."""
    if job.command == "selftest":
        from selftest import run_selftest
        return run_selftest(quick=job.quick, seed=job.seed, samples=job.samples, workers=job.workers)

    options = dict(trials=job.trials, seed=job.seed, tol=job.tol)
    try:
        f = parse_polynomial(job.f, job.n) if job.f is not None else None
        if f is None and not (job.command == "newton" and job.polyhedron):
            raise LeadtermError("--f is required", code="missing-polynomial")
        P = _load_polyhedron(job, f)
        if job.command == "newton":
            return newton_document(f, P), EXIT_OK
        if job.command == "analyze":
            return analyze_document(f, job.forms, P), EXIT_OK
        if job.command == "certify":
            doc = certify_document(f, job.forms, job.face, P, **options)
            return doc, EXIT_INVALID if _has_invalid(doc) else EXIT_OK
        if job.command == "suspend-check":
            return suspend_document(f, job.forms, job.face, P, **options), EXIT_OK
        doc, ok = mellin_document(job, f, P)
        if not ok:
            logger.error("pole fit disagrees with the certified prediction")
        return doc, EXIT_OK if ok else EXIT_NUMERIC
    except PolynomialSyntaxError as exc:
        logger.error("parse error: %s", exc)
        return _error_document(exc), EXIT_PARSE
    except LeadtermError as exc:
        logger.error("%s: %s", exc.code, exc)
        return _error_document(exc), EXIT_INVALID


def emit(doc: Dict[str, object], output: Optional[str] = None) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leadterm", description="Newton-polyhedron leading-term certifier")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--f", help="Polynomial, e.g. 'x^2 + y^3'")
    parser.add_argument("--form", action="append", dest="forms",
                        help="Coefficient h of h dx_1^...^dx_n (repeatable, default 1)")
    parser.add_argument("--face", default="auto", help="auto, a face id, or vertices like '(2,0),(0,3)'")
    parser.add_argument("--n", type=int, help="Declared number of variables")
    parser.add_argument("--seed", type=int, default=config.SEED)
    parser.add_argument("--samples", type=int, default=config.SAMPLES)
    parser.add_argument("--workers", type=int, default=config.WORKERS)
    parser.add_argument("--tol", type=float, default=config.TOL)
    parser.add_argument("--trials", type=int, default=config.TRIALS)
    parser.add_argument("--grid", help="Monte Carlo lambda grid lo:hi:steps")
    parser.add_argument("--rho", type=float, default=1.0, help="Cutoff radius")
    parser.add_argument("--quick", action="store_true", help="selftest without Monte Carlo")
    parser.add_argument("--polyhedron", help="Serialized polyhedron JSON to reuse")
    parser.add_argument("--dump-curve", help="Write (lambda, M, stderr) CSV here")
    parser.add_argument("--output", help="Write JSON here instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    values = vars(args)
    values.pop("verbose")
    if not values["forms"]:
        values.pop("forms")
    try:
        job = JobSpec(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        logger.error("invalid options: %s", exc)
        emit({"error": {"code": "invalid-options", "message": str(exc)}}, values.get("output"))
        return EXIT_INVALID
    doc, code = run(job)
    emit(doc, job.output)
    return code


if __name__ == '__main__':
    sys.exit(main())
