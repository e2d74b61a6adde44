import pytest
from fastapi.testclient import TestClient

from affine_conjugacy.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


SHIFT = {"A": [["1"]], "b": ["1"]}
UNIPOTENT = {"A": [["1", "0"], ["1", "1"]], "b": ["1", "0"]}


def test_root(client):
    r = client.get("/")
    assert r.status_code == 200
    assert "running" in r.json()["message"]


def test_fixed_point(client):
    r = client.post("/fixed-point", json={"operator": {"A": [["2"]], "b": ["1"]}})
    assert r.status_code == 200
    assert r.json() == {"field": "R", "fixed_point": ["-1"]}

    r = client.post("/fixed-point", json={"operator": SHIFT})
    assert r.json()["fixed_point"] is None


def test_split(client):
    r = client.post("/split", json={"operator": {"A": [["1", "0"], ["0", "0"]]}})
    assert r.status_code == 200
    assert {"fitting", "partition"} <= set(r.json())


def test_canonical(client):
    r = client.post("/canonical", json={"operator": UNIPOTENT})
    assert r.status_code == 200
    body = r.json()
    assert body["kind"] == "NoFixedPoint"
    assert body["k"] == 2


def test_canonical_complex_field(client):
    r = client.post("/canonical", json={"operator": SHIFT, "field": "C"})
    assert r.json()["field"] == "C"


def test_decide(client):
    r = client.post("/decide", json={"f": SHIFT, "g": {"A": [["1"]], "b": ["7/3"]}})
    assert r.status_code == 200
    assert r.json()["conjugate"] is True

    r = client.post("/decide", json={"f": {"A": [["2"]], "b": ["1"]}, "g": SHIFT})
    assert r.json()["reason"] == "FIXED_POINT_MISMATCH"


def test_decide_mixed_inferred_fields_compare_over_c(client):
    r = client.post("/decide", json={"f": {"A": [["2"]]}, "g": {"A": [["2i"]]}})
    assert r.status_code == 200
    body = r.json()
    assert body["field"] == "C"
    assert body["conjugate"] is True


def test_witness_and_verify(client):
    r = client.post("/witness", json={"operator": UNIPOTENT})
    assert r.status_code == 200
    doc = r.json()
    assert doc["residual"]["passed"] is True
    assert doc["form"]["k"] == 2

    r = client.post("/verify", json={"f": UNIPOTENT, "g": doc["canonical"], "witness": doc, "seed": 3})
    assert r.status_code == 200
    assert r.json()["passed"] is True


def test_witness_over_tolerance_is_500(client):
    r = client.post("/witness", json={"operator": {"A": [["1", "0"], ["0", "3"]], "b": ["1", "0"]}, "tolerance": 1e-300})
    assert r.status_code == 500
    body = r.json()
    assert body["code"] == "WITNESS_RESIDUAL"
    assert body["details"]["residual"] > 1e-300


def test_precondition_is_422(client):
    r = client.post("/canonical", json={"operator": {"A": [["0", "-1"], ["1", "0"]]}})
    assert r.status_code == 422
    assert r.json()["code"] == "ROOT_OF_UNITY_PRECONDITION"


def test_witness_with_fixed_point_is_422(client):
    r = client.post("/witness", json={"operator": {"A": [["2"]], "b": ["1"]}})
    assert r.status_code == 422
    assert r.json()["code"] == "PRECONDITION"


def test_parse_error_is_400(client):
    r = client.post("/canonical", json={"operator": {"A": [["1", "x"]]}})
    assert r.status_code == 400
    assert r.json()["code"] == "PARSE_ERROR"


def test_declared_real_with_complex_entry(client):
    r = client.post("/canonical", json={"operator": {"A": [["i"]]}, "field": "R"})
    assert r.status_code == 422
    assert r.json()["code"] == "FIELD_MISMATCH"


def test_report_pdf(client):
    r = client.post("/report", json={"f": UNIPOTENT, "g": SHIFT})
    assert r.status_code == 200
    assert r.headers["content-type"] == "application/pdf"
    assert r.content.startswith(b"%PDF")
