#!/usr/bin/env python3
"""
Test script for the API endpoints
"""

from fastapi.testclient import TestClient

import config
from local_server import app

client = TestClient(app)


def test_root():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["routes"] == ["/api/analysis", "/api/health"]


def test_health():
    """Test the health endpoint"""
    response = client.get("/api/health/")
    assert response.status_code == 200
    health = response.json()
    assert health["status"] == "healthy"
    assert health["version"] == "1.0.0"
    assert set(health["numerics"]) == {"numpy", "scipy", "mpmath"}
    assert health["defaults"]["seed"] == config.SEED


def test_newton():
    response = client.post("/api/analysis/newton", json={"f": "x^2 + y^3"})
    assert response.status_code == 200
    doc = response.json()
    assert doc["convenient"] is True
    assert doc["newton_number"] == 2
    assert doc["polyhedron"]["facets"][0] == {"normal": [3, 2], "level": 6}


def test_analyze():
    response = client.post("/api/analysis/analyze", json={"f": "x^3 + y^3", "forms": ["x*y"]})
    assert response.status_code == 200
    assert response.json()["forms"][0]["lower_bound"] == {"alpha": "1/3", "k": 0}


def test_certify():
    """Test the certification endpoint"""
    response = client.post("/api/analysis/certify", json={"f": "x^2 + y^3", "trials": 4})
    assert response.status_code == 200
    [certificate] = response.json()["results"][0]["certificates"]
    assert certificate["verdict"] == "Certified"
    assert certificate["alpha"] == "-1/6"


def test_suspend_check():
    response = client.post("/api/analysis/suspend-check", json={"f": "x^3 + y^3", "trials": 4})
    assert response.status_code == 200
    [check] = response.json()["results"][0]["checks"]
    assert check["lhs_dim"] == check["rhs_dim"] == 3
    assert check["dims_agree"] is True


def test_syntax_error_is_422():
    response = client.post("/api/analysis/certify", json={"f": "x^-2"})
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert detail["code"] == "syntax-error"
    assert detail["position"] == 2


def test_unknown_face_is_400():
    response = client.post("/api/analysis/certify", json={"f": "x^2 + y^3", "face": "42"})
    assert response.status_code == 400
    assert response.json()["detail"]["code"] == "unknown-face"


def test_request_validation():
    response = client.post("/api/analysis/newton", json={"f": ""})
    assert response.status_code == 422
