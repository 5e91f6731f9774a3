import json

import pytest
from fastapi.testclient import TestClient

from gridqa.server import STATUS, create_app
from gridqa.session import SessionRegistry

TURN_ONE = "Which manufacturers made transformers with oil leakage?"
REFINE = "only 220kV"


@pytest.fixture
def client(demo_engine):
    return TestClient(create_app(demo_engine), raise_server_exceptions=False)


def _drop_elapsed(doc):
    doc = json.loads(json.dumps(doc))
    doc["stats"].pop("elapsed_ms")
    return doc


# --- /api/ask -----------------------------------------------------------------


def test_ask_returns_the_full_answer_document(client):
    resp = client.post("/api/ask", json={"question": TURN_ONE})
    assert resp.status_code == 200
    doc = resp.json()
    assert [v["id"] for v in doc["answers"]] == ["M1"]
    assert doc["count"] == 1
    assert {"parsed", "plan", "traversal", "subgraph", "bindings", "stats", "pseudo_query"} <= set(doc)
    assert doc["pseudo_query"].startswith("MATCH Manufacturer")
    assert doc["plan"]["target"] == "Manufacturer"
    ids = {v["id"] for v in doc["subgraph"]["vertices"]}
    assert {"M1", "T1", "D1"} <= ids


def test_sessionless_asks_are_stateless(client):
    first = client.post("/api/ask", json={"question": TURN_ONE}).json()
    second = client.post("/api/ask", json={"question": TURN_ONE}).json()
    assert _drop_elapsed(first) == _drop_elapsed(second)


def test_empty_question_is_a_bad_request(client):
    resp = client.post("/api/ask", json={"question": "   "})
    assert resp.status_code == 400
    assert resp.json() == {
        "error": {"code": "bad_request", "message": "question must not be empty"}
    }


def test_unparseable_question_maps_to_422(client):
    resp = client.post("/api/ask", json={"question": "zzz qqq"})
    assert resp.status_code == 422
    assert resp.json()["error"]["code"] == "parse_failed"


def test_question_without_a_target_maps_to_422(client):
    resp = client.post("/api/ask", json={"question": "Show everything everywhere"})
    assert resp.status_code == 422
    assert resp.json()["error"]["code"] == "no_target"


def test_follow_up_without_session_is_rejected(client):
    resp = client.post("/api/ask", json={"question": TURN_ONE, "mode": "follow_up"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "bad_request"


def test_bad_mode_with_session_is_rejected(client):
    session = client.post("/api/session").json()["session"]
    resp = client.post("/api/ask", json={"question": TURN_ONE, "session": session, "mode": "sideways"})
    assert resp.status_code == 400


def test_malformed_body_is_a_bad_request(client):
    resp = client.post("/api/ask", json={"nope": True})
    assert resp.status_code == 400
    assert resp.json() == {"error": {"code": "bad_request", "message": "invalid request body"}}


# --- sessions over HTTP ---------------------------------------------------------


def test_session_refinement_flow(client):
    created = client.post("/api/session").json()
    assert created["context"] == {"target": None, "constraints": []}
    sid = created["session"]

    turn1 = client.post("/api/ask", json={"question": TURN_ONE, "session": sid})
    assert turn1.status_code == 200
    assert turn1.json()["session"] == sid
    assert turn1.json()["context"]["target"]["class"] == "Manufacturer"

    turn2 = client.post("/api/ask", json={"question": REFINE, "session": sid, "mode": "follow_up"})
    assert turn2.status_code == 200
    doc = turn2.json()
    assert [v["id"] for v in doc["answers"]] == ["M1"]
    anchors = {(c["kind"], c.get("class"), c.get("attribute")) for c in doc["context"]["constraints"]}
    assert ("attribute", "VoltageLevel", "kv") in anchors


def test_anchor_endpoint_pins_a_vertex(client):
    sid = client.post("/api/session").json()["session"]
    client.post("/api/ask", json={"question": TURN_ONE, "session": sid})
    resp = client.post(f"/api/session/{sid}/anchor", json={"vertex": "M1"})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["context"]["target"] is None
    assert any(c["kind"] == "instance" and c["vertex"] == "M1" for c in doc["context"]["constraints"])

    followed = client.post(
        "/api/ask",
        json={"question": "Which substations host its transformers?", "session": sid, "mode": "follow_up"},
    )
    assert [v["id"] for v in followed.json()["answers"]] == ["S1"]


def test_unknown_session_and_vertex_are_404(client):
    assert client.post("/api/ask", json={"question": TURN_ONE, "session": "nope"}).status_code == 404
    assert client.post("/api/session/nope/anchor", json={"vertex": "M1"}).status_code == 404
    sid = client.post("/api/session").json()["session"]
    resp = client.post(f"/api/session/{sid}/anchor", json={"vertex": "M404"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "not_found"


def test_failed_session_turn_does_not_break_the_session(client):
    sid = client.post("/api/session").json()["session"]
    client.post("/api/ask", json={"question": TURN_ONE, "session": sid})
    assert client.post("/api/ask", json={"question": "zzz qqq", "session": sid}).status_code == 422
    ok = client.post("/api/ask", json={"question": REFINE, "session": sid, "mode": "follow_up"})
    assert [v["id"] for v in ok.json()["answers"]] == ["M1"]


# --- read-only endpoints ----------------------------------------------------------


def test_schema_endpoint_round_trips(client, demo_engine):
    resp = client.get("/api/schema")
    assert resp.status_code == 200
    assert resp.json() == demo_engine.schema.to_json()


def test_neighborhood_endpoint_matches_the_engine(client, demo_engine):
    resp = client.get("/api/graph/neighborhood", params={"vertex": "M1", "hops": 1})
    assert resp.status_code == 200
    assert resp.json() == demo_engine.neighborhood("M1", hops=1)
    wider = client.get("/api/graph/neighborhood", params={"vertex": "M1", "hops": 3}).json()
    assert len(wider["vertices"]) >= len(resp.json()["vertices"])


def test_neighborhood_validation(client):
    assert client.get("/api/graph/neighborhood", params={"vertex": "M404"}).status_code == 404
    assert client.get("/api/graph/neighborhood", params={"vertex": "M1", "hops": -1}).status_code == 400
    assert client.get("/api/graph/neighborhood", params={"vertex": "M1", "hops": "x"}).status_code == 400


def test_health_reports_graph_shape(client, demo_engine):
    doc = client.get("/api/health").json()
    assert doc["status"] == "ok"
    assert doc["graph"] == demo_engine.store.stats()
    assert doc["evaluation_date"] == demo_engine.evaluation_date.isoformat()


# --- error containment --------------------------------------------------------------


def test_unexpected_errors_never_leak_a_trace(demo_engine, monkeypatch):
    app = create_app(demo_engine)
    client = TestClient(app, raise_server_exceptions=False)

    def boom(*_args, **_kwargs):
        raise RuntimeError("secret stack detail")

    monkeypatch.setattr(demo_engine, "answer", boom)
    resp = client.post("/api/ask", json={"question": TURN_ONE})
    assert resp.status_code == 500
    assert resp.json() == {"error": {"code": "internal", "message": "internal error"}}
    assert "secret" not in resp.text


def test_every_error_code_maps_to_a_known_status():
    assert STATUS == {
        "bad_request": 400,
        "not_found": 404,
        "parse_failed": 422,
        "no_target": 422,
        "internal": 500,
    }


def test_api_docs_are_disabled(client):
    assert client.get("/docs").status_code == 404
    assert client.get("/openapi.json").status_code == 404


# --- static frontend ------------------------------------------------------------------


def test_static_mount_serves_the_ui_when_present(demo_engine, tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>gridqa</title>")
    app = create_app(demo_engine, static_dir=tmp_path)
    client = TestClient(app)
    resp = client.get("/")
    assert resp.status_code == 200
    assert "gridqa" in resp.text
    # API routes still win over the static mount
    assert client.get("/api/health").status_code == 200


def test_shared_registry_is_visible_to_both_sides(demo_engine):
    registry = SessionRegistry(demo_engine)
    client = TestClient(create_app(demo_engine, registry=registry))
    sid = client.post("/api/session").json()["session"]
    assert registry.get(sid).id == sid
