#!/usr/bin/env python3
"""
Tests for the polynomial grammar, the job runner and the command line
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from cli import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_PARSE,
    JobSpec,
    emit,
    main,
    parse_grid,
    parse_polynomial,
    run,
    select_faces,
)
from exact_core import I_UNIT, SparsePolynomial
from exceptions import LeadtermError, PolynomialSyntaxError
from newton_polytope import build_newton_polyhedron, is_convenient
from selftest import (
    check_certifier_oracles,
    check_model_mellin,
    check_newton_numbers,
    check_principal_parts_round_trip,
    check_vasilev_equality,
    random_convenient_polynomial,
)


def job(**fields):
    fields.setdefault("trials", 4)
    return JobSpec(**fields)


# -- grammar -------------------------------------------------------------------

def test_parse_letters():
    assert parse_polynomial("x^2 + y^3") == SparsePolynomial(2, {(2, 0): 1, (0, 3): 1})
    assert parse_polynomial("x**2") == SparsePolynomial(1, {(2,): 1})


def test_parse_indexed_variables():
    f = parse_polynomial("x1*x3 - 2")
    assert f.n == 3
    assert f == SparsePolynomial(3, {(1, 0, 1): 1, (0, 0, 0): -2})


def test_parse_implicit_products_and_rationals():
    assert parse_polynomial("2(x + y)") == SparsePolynomial(2, {(1, 0): 2, (0, 1): 2})
    assert parse_polynomial("x y") == SparsePolynomial(2, {(1, 1): 1})
    f = parse_polynomial("1/3*x^3 + i*y")
    assert f.coefficient((3, 0)) == Fraction(1, 3)
    assert f.coefficient((0, 1)) == I_UNIT
    assert str(f) == "1/3*x^3 + i*y"


def test_parse_leading_sign_and_parentheses():
    assert parse_polynomial("-(x - y)^2") == SparsePolynomial(2, {(2, 0): -1, (1, 1): 2, (0, 2): -1})


def test_declared_variable_count():
    assert parse_polynomial("x", n=3).n == 3
    with pytest.raises(PolynomialSyntaxError):
        parse_polynomial("z", n=2)


@pytest.mark.parametrize("text, position", [
    ("x^-2", 2),
    ("x $ y", 2),
    ("", 0),
    ("(x + y", 6),
    ("x + q", 4),
    ("x + x2", 4),
    ("x/y", 1),
])
def test_syntax_errors_report_positions(text, position):
    with pytest.raises(PolynomialSyntaxError) as info:
        parse_polynomial(text)
    assert info.value.position == position
    assert info.value.code == "syntax-error"


def test_mixed_variable_styles_message():
    with pytest.raises(PolynomialSyntaxError, match="cannot mix"):
        parse_polynomial("x1 + y")


# -- selectors -----------------------------------------------------------------

def test_select_faces():
    P = build_newton_polyhedron([(2, 0), (0, 3)])
    edge = P.face_by_vertices([(2, 0), (0, 3)])
    assert select_faces(P, "auto") is None
    assert select_faces(P, "(2,0),(0,3)") == [edge]
    assert select_faces(P, str(edge.id)) == [edge]
    for bad in ("99", "(1,1)", "edge"):
        with pytest.raises(LeadtermError) as info:
            select_faces(P, bad)
        assert info.value.code == "unknown-face"


def test_parse_grid():
    assert np.allclose(parse_grid("-0.8:-0.4:5"), [-0.8, -0.7, -0.6, -0.5, -0.4])
    for bad in ("-0.8:-0.4", "a:b:c", "0:1:3"):
        with pytest.raises(LeadtermError) as info:
            parse_grid(bad)
        assert info.value.code == "bad-grid"


# -- jobs ----------------------------------------------------------------------

def test_certify_cusp():
    doc, code = run(job(command="certify", f="x^2 + y^3"))
    assert code == EXIT_OK
    [certificate] = doc["results"][0]["certificates"]
    assert certificate["verdict"] == "Certified"
    assert certificate["alpha"] == "-1/6"
    assert certificate["k"] == 0


def test_certify_on_a_named_face_with_several_forms():
    doc, code = run(job(command="certify", f="x^3 + y^3", forms=["x*y", "1"], face="(3,0),(0,3)"))
    assert code == EXIT_OK
    first, second = doc["results"]
    assert first["certificates"][0]["alpha"] == "1/3"
    assert second["certificates"][0]["alpha"] == "-1/3"


def test_certify_non_convenient_is_invalid():
    doc, code = run(job(command="certify", f="x*y"))
    assert code == EXIT_INVALID
    assert doc["results"][0]["certificates"][0]["verdict"] == "InvalidInput"


def test_newton_document():
    doc, code = run(job(command="newton", f="x*y"))
    assert code == EXIT_OK
    assert doc["convenient"] is False
    assert doc["compact_faces"] == 1
    assert doc["newton_number"] is None

    doc, _ = run(job(command="newton", f="x^5 + x^2*y^2 + y^5"))
    assert doc["newton_number"] == 11


def test_analyze_document():
    doc, code = run(job(command="analyze", f="x^5 + x^2*y^2 + y^5"))
    assert code == EXIT_OK
    [form] = doc["forms"]
    assert form["v"] == "1/2"
    assert form["l"] == 1
    assert form["lower_bound"] == {"alpha": "-1/2", "k": 1}
    assert [entry["a"] for entry in form["admissible_faces"]] == ["1/2"]


def test_suspend_check_document():
    doc, code = run(job(command="suspend-check", f="x^2 + y^3"))
    assert code == EXIT_OK
    [check] = doc["results"][0]["checks"]
    assert (check["lhs_dim"], check["rhs_dim"], check["dims_agree"]) == (1, 1, True)
    assert check["forward_map"] == {"tested": 1, "preserved": 1}
    assert check["certificate"]["recovered"] == {"alpha": "-1/6", "k": 0}


def test_suspend_check_skips_integral_degrees():
    doc, _ = run(job(command="suspend-check", f="x^2 + y^2"))
    [check] = doc["results"][0]["checks"]
    assert check["skipped"] == "integral-degree"


def test_parse_error_exit_code():
    doc, code = run(job(command="certify", f="x^-2"))
    assert code == EXIT_PARSE
    assert doc["error"]["code"] == "syntax-error"
    assert doc["error"]["position"] == 2


def test_missing_polynomial():
    doc, code = run(job(command="analyze"))
    assert code == EXIT_INVALID
    assert doc["error"]["code"] == "missing-polynomial"


def test_polyhedron_round_trip(tmp_path):
    first, _ = run(job(command="newton", f="x^2*y + x*y^3 + x^4 + y^5"))
    path = tmp_path / "polyhedron.json"
    emit(first, str(path))
    second, code = run(job(command="newton", polyhedron=str(path)))
    assert code == EXIT_OK
    assert json.dumps(second["polyhedron"], indent=2) == json.dumps(first["polyhedron"], indent=2)
    assert second["newton_number"] == first["newton_number"]


def test_certify_with_a_saved_polyhedron(tmp_path):
    first, _ = run(job(command="newton", f="x^2 + y^3"))
    path = tmp_path / "cusp.json"
    emit(first["polyhedron"], str(path))
    doc, code = run(job(command="certify", f="x^2 + y^3", polyhedron=str(path)))
    assert code == EXIT_OK
    assert doc["results"][0]["certificates"][0]["alpha"] == "-1/6"


def test_runs_are_byte_identical():
    first, _ = run(job(command="certify", f="x^2 + y^3", seed=9))
    second, _ = run(job(command="certify", f="x^2 + y^3", seed=9))
    assert json.dumps(first) == json.dumps(second)


# -- command line --------------------------------------------------------------

def test_main_writes_output(tmp_path):
    path = tmp_path / "out.json"
    code = main(["certify", "--f", "x^2 + y^3", "--trials", "4", "--output", str(path)])
    assert code == EXIT_OK
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["results"][0]["form"] == "1"


def test_main_rejects_bad_options(capsys):
    code = main(["certify", "--f", "x^2 + y^3", "--samples", "0"])
    assert code == EXIT_INVALID
    assert json.loads(capsys.readouterr().out)["error"]["code"] == "invalid-options"


def test_main_parse_error(capsys):
    assert main(["newton", "--f", "x $ y"]) == EXIT_PARSE
    assert json.loads(capsys.readouterr().out)["error"]["position"] == 2


# -- acceptance checks at small sizes -------------------------------------------

def test_random_polynomials_are_convenient():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = random_convenient_polynomial(rng)
        P = build_newton_polyhedron(f.supp())
        assert is_convenient(P)


def test_selftest_checks_at_small_sizes():
    assert check_certifier_oracles(seed=0)["passed"]
    assert check_vasilev_equality(seed=1, polynomials=3)["passed"]
    assert check_principal_parts_round_trip(seed=2, series=50)["passed"]
    assert check_model_mellin()["passed"]
    assert check_newton_numbers()["passed"]
