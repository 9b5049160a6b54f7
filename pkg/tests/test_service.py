"""HTTP facade: endpoints, deferred solves, parallel sessions, CLI parity."""

from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from archforge.documents import bundled_path, load_catalog
from archforge.service import create_app

DC_DOC = json.loads(bundled_path("catalog_dc.catalog.json").read_text())
ML_DOC = json.loads(bundled_path("ml_training.query.json").read_text())


@pytest.fixture(scope="module")
def client():
    app = create_app(
        default_catalog=load_catalog([bundled_path("catalog_dc.catalog.json")]),
        budget_seconds=60,
        defer_after=30.0,  # keep module tests synchronous
    )
    with TestClient(app) as c:
        yield c


def _new_session(client) -> str:
    response = client.post("/v1/sessions", json={})
    assert response.status_code == 201
    return response.json()["session"]


def test_create_session_with_inline_catalog(client):
    response = client.post("/v1/sessions", json={"catalog": DC_DOC})
    assert response.status_code == 201
    assert response.json()["session"]


def test_catalog_sections(client):
    response = client.get("/v1/catalog/systems")
    assert response.status_code == 200
    ids = {s["id"] for s in response.json()["systems"]}
    assert {"RDMA", "PacketSpray", "Sonata"} <= ids
    assert client.get("/v1/catalog/nope").status_code == 404


def test_synthesize_matches_cli_document(client, tmp_path, capsys):
    session = _new_session(client)
    response = client.post(f"/v1/sessions/{session}/synthesize", json={"query": ML_DOC})
    assert response.status_code == 200
    service_doc = response.json()

    from archforge.cli import run

    out_path = tmp_path / "cli.design.json"
    run(
        [
            "synthesize",
            "-c",
            str(bundled_path("catalog_dc.catalog.json")),
            "-q",
            str(bundled_path("ml_training.query.json")),
            "--output",
            str(out_path),
        ]
    )
    capsys.readouterr()
    cli_doc = json.loads(out_path.read_text())
    assert service_doc == cli_doc

    latest = client.get(f"/v1/sessions/{session}/designs/latest")
    assert latest.status_code == 200
    assert latest.json() == service_doc


def test_put_query_then_synthesize(client):
    session = _new_session(client)
    response = client.put(f"/v1/sessions/{session}/query", json=ML_DOC)
    assert response.status_code == 200
    response = client.post(f"/v1/sessions/{session}/synthesize", json={})
    assert response.status_code == 200
    assert response.json()["systems"]["ML_Training"]["cca"] == "DCQCN"


def test_explain_endpoint_conflict(client):
    session = _new_session(client)
    client.post(f"/v1/sessions/{session}/synthesize", json={"query": ML_DOC})
    response = client.post(
        f"/v1/sessions/{session}/explain",
        json={
            "workload": "ML_Training",
            "role": "load_balancer",
            "prefer": "PacketSpray",
            "objective": "load_balancing",
        },
    )
    assert response.status_code == 200
    doc = response.json()
    assert doc["outcome"] == "CONFLICT"
    assert set(doc["categories"]) == {"INSUFFICIENT_INVENTORY", "SYSTEM_INCOMPATIBILITY"}
    assert "rendered" in doc


def test_explain_before_synthesize_conflicts(client):
    session = _new_session(client)
    response = client.post(
        f"/v1/sessions/{session}/explain",
        json={"workload": "w", "role": "r", "prefer": "X"},
    )
    assert response.status_code == 409
    body = response.json()
    assert set(body) == {"code", "message", "details"}


def test_unknown_session_error_body(client):
    response = client.get("/v1/sessions/nope/designs/latest")
    assert response.status_code == 404
    body = response.json()
    assert body["code"] == "unknown-session"


def test_invalid_query_gives_422_with_details(client):
    session = _new_session(client)
    bad = dict(ML_DOC)
    bad = json.loads(json.dumps(ML_DOC))
    bad["workloads"][0]["objectives"] = ["latency", "no_such_objective"]
    response = client.post(f"/v1/sessions/{session}/synthesize", json={"query": bad})
    assert response.status_code == 422
    assert response.json()["details"]


def test_delete_session(client):
    session = _new_session(client)
    assert client.delete(f"/v1/sessions/{session}").status_code == 204
    assert client.get(f"/v1/sessions/{session}/designs/latest").status_code == 404


def test_deferred_solve_returns_202_and_polls():
    app = create_app(
        default_catalog=load_catalog([bundled_path("catalog_dc.catalog.json")]),
        budget_seconds=60,
        defer_after=0.0,  # force the deferred path
    )
    with TestClient(app) as client:
        session = _new_session(client)
        response = client.post(f"/v1/sessions/{session}/synthesize", json={"query": ML_DOC})
        assert response.status_code == 202
        poll = response.json()["poll"]
        for _ in range(600):
            polled = client.get(poll)
            if polled.status_code != 202:
                break
        assert polled.status_code == 200
        assert polled.json()["systems"]["ML_Training"]["load_balancer"] == "PLB"


def test_parallel_sessions_do_not_interfere():
    app = create_app(
        default_catalog=load_catalog([bundled_path("catalog_dc.catalog.json")]),
        budget_seconds=120,
        defer_after=60.0,
    )
    results: dict[int, dict] = {}
    errors: list[str] = []
    with TestClient(app) as client:
        sessions = [_new_session(client) for _ in range(8)]

        def work(i: int):
            try:
                response = client.post(
                    f"/v1/sessions/{sessions[i]}/synthesize", json={"query": ML_DOC}
                )
                if response.status_code != 200:
                    errors.append(f"{i}: {response.status_code}")
                else:
                    results[i] = response.json()
            except Exception as exc:  # pragma: no cover
                errors.append(f"{i}: {exc}")

        threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=600)
    assert not errors
    assert len(results) == 8
    reference = results[0]
    for i in range(1, 8):
        assert results[i] == reference
