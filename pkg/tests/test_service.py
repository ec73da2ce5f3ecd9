"""HTTP surface tests, run in-process through the ASGI test client.

The interesting contracts: session lifecycle, the worked two-lesson
probability table over the wire, writer-lock conflicts (409), input
validation (422), and the guarantee that GET endpoints never mutate.
"""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from groundschool.curriculum import demo_react_scene, train_demo_agent
from groundschool.service import create_app
from groundschool.world import snapshot_to_json, snapshot_to_text

RED_BOX = {"objects": [{"id": "o1", "shape": "box", "color": "red", "x": 2.0, "y": 2.0}]}
RED_CYLINDER = {"objects": [{"id": "o2", "shape": "cylinder", "color": "red", "x": 5.0, "y": 5.0}]}
GREEN_CONE = {"objects": [{"id": "g1", "shape": "cone", "color": "green", "x": 3.0, "y": 3.0}]}

EXPECTED_RED_TABLE = {
    "(isa (GenEntFn 0 RRedMt) CVBox)": 0.5,
    "(isa (GenEntFn 0 RRedMt) CVCylinder)": 0.5,
    "(isa (GenEntFn 0 RRedMt) CVRed)": 1.0,
    "(isa (GenEntFn 0 RRedMt) RRed)": 1.0,
}


@pytest.fixture()
def app():
    return create_app()


@pytest.fixture()
def client(app):
    return TestClient(app)


def _session(client: TestClient, **payload) -> str:
    res = client.post("/v1/session", json=payload)
    assert res.status_code == 201, res.text
    return res.json()["id"]


def _lesson(client: TestClient, sid: str, content: str, signal: str, scene=None) -> dict:
    body = {"content": content, "signal": signal}
    if scene is not None:
        body["scene"] = scene
    res = client.post(f"/v1/session/{sid}/lesson", json=body)
    assert res.status_code == 200, res.text
    return res.json()


def teach_red(client: TestClient, sid: str) -> None:
    _lesson(client, sid, "red", "inform", RED_BOX)
    _lesson(client, sid, "red", "inform", RED_CYLINDER)


def test_create_session_starts_empty(client):
    res = client.post("/v1/session", json={})
    assert res.status_code == 201
    data = res.json()
    assert data["id"]
    assert data["seed"] == 0
    assert data["words"] == []


def test_worked_flow_reaches_exact_table(client):
    sid = _session(client)

    first = _lesson(client, sid, "red", "inform", RED_BOX)
    assert first["status"] == "success"
    assert (first["creates"], first["stores"]) == (1, 1)
    assert first["plan"] == []
    assert first["diff"]["added"] == []
    assert first["diff"]["moved"] == []

    second = _lesson(client, sid, "red", "inform", RED_CYLINDER)
    assert (second["creates"], second["stores"]) == (0, 1)

    res = client.get(f"/v1/session/{sid}/memory", params={"concept": "red"})
    assert res.status_code == 200
    payload = res.json()
    assert payload["word"] == "red"
    assert payload["kind"] == "visual"
    assert payload["example_total"] == 2
    assert len(payload["generalizations"]) == 1
    gen = payload["generalizations"][0]
    assert gen["example_count"] == 2
    table = {row["fact"]: row["probability"] for row in gen["facts"]}
    assert table == EXPECTED_RED_TABLE

    # The concept is reachable by symbol name as well as by word.
    by_name = client.get(f"/v1/session/{sid}/memory", params={"concept": "RRed"})
    assert by_name.status_code == 200
    assert by_name.json()["word"] == "red"


def test_scene_roundtrip(client):
    sid = _session(client)
    put = client.put(f"/v1/session/{sid}/scene", json=RED_BOX)
    assert put.status_code == 200
    got = client.get(f"/v1/session/{sid}/scene")
    assert got.status_code == 200
    assert got.json()["scene"] == put.json()["scene"]
    obj = got.json()["scene"]["objects"][0]
    assert obj["id"] == "o1"
    assert obj["held"] is False


def test_metrics_tracks_lessons_and_verifies(client):
    sid = _session(client)
    teach_red(client, sid)
    miss = _lesson(client, sid, "red", "verify", GREEN_CONE)
    assert miss["status"] == "failure"

    res = client.get(f"/v1/session/{sid}/metrics")
    assert res.status_code == 200
    metrics = res.json()
    assert metrics["session"] == sid
    assert metrics["lessons"] == {"inform": 2, "verify": 1, "react": 0}
    assert metrics["concepts"] == 1
    # Verify lessons never store, so the running total flattens.
    assert metrics["cumulative_stores"] == [1, 2, 2]
    assert metrics["memory"]["creates"] == 1
    assert metrics["memory"]["stores"] == 2
    assert metrics["verify"] == {"attempts": 1, "successes": 0}


def test_unknown_session_is_404(client):
    assert client.get("/v1/session/nope/scene").status_code == 404
    assert client.get("/v1/session/nope/memory").status_code == 404
    assert client.get("/v1/session/nope/metrics").status_code == 404
    assert client.put("/v1/session/nope/scene", json=RED_BOX).status_code == 404
    assert client.delete("/v1/session/nope").status_code == 404
    body = {"content": "red", "signal": "inform"}
    assert client.post("/v1/session/nope/lesson", json=body).status_code == 404


def test_client_mistakes_are_422(client):
    sid = _session(client)
    bad_shape = {"objects": [{"id": "o1", "shape": "dodecahedron", "color": "red", "x": 1, "y": 1}]}
    assert client.put(f"/v1/session/{sid}/scene", json=bad_shape).status_code == 422

    bad_signal = {"content": "red", "signal": "shout"}
    assert client.post(f"/v1/session/{sid}/lesson", json=bad_signal).status_code == 422

    # React needs an action utterance, not a bare property.
    react_property = {"content": "red", "signal": "react", "scene": RED_BOX}
    assert client.post(f"/v1/session/{sid}/lesson", json=react_property).status_code == 422

    empty = {"content": "", "signal": "inform", "scene": RED_BOX}
    assert client.post(f"/v1/session/{sid}/lesson", json=empty).status_code == 422

    place_without_position = {
        "content": "move red box left of red cylinder",
        "signal": "inform",
        "initial": RED_BOX,
        "actions": [{"type": "place"}],
    }
    assert client.post(f"/v1/session/{sid}/demo", json=place_without_position).status_code == 422

    no_actions = {
        "content": "move red box left of red cylinder",
        "signal": "inform",
        "initial": RED_BOX,
        "actions": [],
    }
    assert client.post(f"/v1/session/{sid}/demo", json=no_actions).status_code == 422

    bad_memory = client.post("/v1/session", json={"memory": {"bogus": True}})
    assert bad_memory.status_code == 422


def test_unknown_concept_is_404(client):
    sid = _session(client)
    res = client.get(f"/v1/session/{sid}/memory", params={"concept": "plaid"})
    assert res.status_code == 404


def test_lesson_in_flight_is_409(app, client):
    sid = _session(client)
    state = app.state.sessions[sid]
    assert state.lock.acquire(blocking=False)
    try:
        body = {"content": "red", "signal": "inform", "scene": RED_BOX}
        res = client.post(f"/v1/session/{sid}/lesson", json=body)
        assert res.status_code == 409
        assert client.put(f"/v1/session/{sid}/scene", json=RED_BOX).status_code == 409
    finally:
        state.lock.release()
    # Once the writer is done the same request goes through.
    follow_up = client.post(
        f"/v1/session/{sid}/lesson",
        json={"content": "red", "signal": "inform", "scene": RED_BOX},
    )
    assert follow_up.status_code == 200


def test_get_endpoints_never_mutate(app, client):
    sid = _session(client)
    teach_red(client, sid)
    state = app.state.sessions[sid]

    def fingerprint() -> tuple[str, str]:
        return state.agent.memory.snapshot_text(), snapshot_to_text(state.agent.world.snapshot)

    before = fingerprint()
    client.get(f"/v1/session/{sid}/scene")
    client.get(f"/v1/session/{sid}/memory")
    client.get(f"/v1/session/{sid}/memory", params={"concept": "red"})
    client.get(f"/v1/session/{sid}/metrics")
    client.get("/v1/health")
    assert fingerprint() == before


def test_session_restores_from_memory_snapshot(client):
    source = _session(client)
    teach_red(client, source)
    snapshot = client.get(f"/v1/session/{source}/memory").json()

    res = client.post("/v1/session", json={"memory": snapshot})
    assert res.status_code == 201
    restored = res.json()
    assert restored["words"] == ["red"]

    table_res = client.get(f"/v1/session/{restored['id']}/memory", params={"concept": "red"})
    gen = table_res.json()["generalizations"][0]
    table = {row["fact"]: row["probability"] for row in gen["facts"]}
    assert table == EXPECTED_RED_TABLE


def test_delete_session(client):
    sid = _session(client)
    assert client.delete(f"/v1/session/{sid}").status_code == 204
    assert client.delete(f"/v1/session/{sid}").status_code == 404
    assert client.get(f"/v1/session/{sid}/scene").status_code == 404
    assert client.get("/v1/health").json()["sessions"] == 0


# -- trained sessions -------------------------------------------------------

@pytest.fixture(scope="module")
def trained_memory() -> dict:
    return train_demo_agent(seed=11).snapshot()["memory"]


def test_demo_endpoint_verifies_a_recorded_trace(client, trained_memory):
    sid = _session(client, memory=trained_memory)
    scene = snapshot_to_json(demo_react_scene())
    utterance = "move blue cone right of red cylinder"

    # o2 sits at (4, 5); a drop at (1, 5) lands due west and disconnected.
    truthful = {
        "content": utterance,
        "signal": "verify",
        "initial": scene,
        "actions": [
            {"type": "pick-up", "object": "o1"},
            {"type": "place", "position": [1.0, 5.0]},
        ],
    }
    res = client.post(f"/v1/session/{sid}/demo", json=truthful)
    assert res.status_code == 200, res.text
    assert res.json()["status"] == "success"

    false_claim = dict(truthful)
    false_claim["actions"] = [
        {"type": "pick-up", "object": "o1"},
        {"type": "place", "position": [7.5, 5.0]},
    ]
    res = client.post(f"/v1/session/{sid}/demo", json=false_claim)
    assert res.status_code == 200
    assert res.json()["status"] == "failure"


def test_react_executes_and_reports_plan_and_diff(client, trained_memory):
    sid = _session(client, memory=trained_memory, seed=11)
    scene = snapshot_to_json(demo_react_scene())
    reply = _lesson(
        client, sid, "move blue cone right of red cylinder", "react", scene
    )
    assert reply["status"] == "success"
    assert len(reply["plan"]) == 2
    assert reply["plan"][0] == "pick-up(o1)"
    assert reply["plan"][1].startswith("place(")

    diff = reply["diff"]
    assert [m["id"] for m in diff["moved"]] == ["o1"]
    assert diff["held_after"] is None

    moved = {o["id"]: o for o in reply["scene"]["objects"]}
    # West of the anchor with clearance: strictly smaller x.
    assert moved["o1"]["x"] < moved["o2"]["x"]
