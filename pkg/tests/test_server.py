"""HTTP endpoints: instance views, sessions, hygiene, and logging."""

import json

import pytest
from fastapi.testclient import TestClient

from seatbench.generator import generate_instance, write_instance
from seatbench.server import create_app


@pytest.fixture(scope="module")
def served(world, tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("data")
    instances = [generate_instance(level, world, 17) for level in (2, 18, 33)]
    for inst in instances:
        write_instance(inst, data_dir)
    app = create_app(data_dir, w=world)
    return TestClient(app), instances, data_dir


def test_missing_data_dir_rejected(world, tmp_path):
    with pytest.raises(FileNotFoundError):
        create_app(tmp_path / "absent", w=world)


def test_list_instances(served):
    client, instances, _ = served
    body = client.get("/api/v1/instances").json()
    assert {e["id"] for e in body["instances"]} == {i.id for i in instances}


def test_instance_view_shape_and_hygiene(served, world):
    client, instances, _ = served
    inst = instances[0]
    body = client.get(f"/api/v1/instances/{inst.id}").json()
    assert body["id"] == inst.id
    assert len(body["npcs"]) == len(inst.party)
    assert set(body["utterances"]) == set(inst.party)
    payload = json.dumps(body)
    assert "ground_truth" not in payload
    for seat_id in inst.ground_truth.values():
        # seat ids appear in the scene, but never paired with their NPC
        for npc in inst.party:
            assert f'"{npc}": "{seat_id}"' not in payload


def test_unknown_instance_404(served):
    client, _, _ = served
    assert client.get("/api/v1/instances/nope").status_code == 404


def test_session_lifecycle_and_score(served):
    client, instances, _ = served
    inst = instances[0]
    opened = client.post(
        "/api/v1/sessions", json={"instance_id": inst.id}
    ).json()
    sid = opened["session_id"]
    assert opened["phase"] == "elicit"

    utter = client.post(
        f"/api/v1/sessions/{sid}/query",
        json={"npc": inst.party[0], "slot": 0},
    ).json()
    assert utter["utterance"]

    reflection = client.post(
        f"/api/v1/sessions/{sid}/propose",
        json={"assignment": inst.ground_truth},
    ).json()
    assert "scaled_score" not in json.dumps(reflection)
    assert reflection["unmet"] == []

    answer = client.get(f"/api/v1/sessions/{sid}/answer").json()
    assert answer["assignment"] == inst.ground_truth

    result = client.post(
        f"/api/v1/sessions/{sid}/finalize",
        json={"assignment": inst.ground_truth},
    ).json()
    assert result["scaled_score"] == pytest.approx(99.3, abs=0.05)


def test_phase_violation_maps_to_400(served):
    client, instances, _ = served
    inst = instances[1]
    sid = client.post("/api/v1/sessions", json={"instance_id": inst.id}).json()[
        "session_id"
    ]
    client.post(
        f"/api/v1/sessions/{sid}/propose", json={"assignment": inst.ground_truth}
    )
    reply = client.post(
        f"/api/v1/sessions/{sid}/query", json={"npc": inst.party[0], "slot": 0}
    )
    assert reply.status_code == 400


def test_session_log_has_timestamps(served):
    client, instances, data_dir = served
    inst = instances[2]
    sid = client.post("/api/v1/sessions", json={"instance_id": inst.id}).json()[
        "session_id"
    ]
    client.post(
        f"/api/v1/sessions/{sid}/propose", json={"assignment": inst.ground_truth}
    )
    client.post(
        f"/api/v1/sessions/{sid}/finalize", json={"assignment": inst.ground_truth}
    )
    log_path = data_dir / "session-logs" / f"{sid}.jsonl"
    records = [json.loads(line) for line in log_path.read_text().splitlines()]
    actions = [r["action"] for r in records]
    assert actions == ["open", "propose", "finalize"]
    times = [r["t"] for r in records]
    assert times == sorted(times)


def test_full_session_hygiene_scan(served):
    # Replay a complete session and scan every response body for gt pairs.
    client, instances, _ = served
    inst = instances[0]
    bodies = []
    bodies.append(client.get("/api/v1/instances").text)
    bodies.append(client.get(f"/api/v1/instances/{inst.id}").text)
    opened = client.post("/api/v1/sessions", json={"instance_id": inst.id})
    bodies.append(opened.text)
    sid = opened.json()["session_id"]
    for npc in inst.party:
        for slot in range(3):
            r = client.post(
                f"/api/v1/sessions/{sid}/query",
                json={"npc": npc, "slot": slot},
            )
            bodies.append(r.text)
            if r.status_code != 200:
                break
    shuffled = dict(zip(inst.party, sorted(s.id for s in inst.scene.seats)))
    bodies.append(
        client.post(
            f"/api/v1/sessions/{sid}/propose", json={"assignment": shuffled}
        ).text
    )
    for body in bodies:
        for npc, seat in inst.ground_truth.items():
            assert f'"{npc}": "{seat}"' not in body
            assert f'"{npc}":"{seat}"' not in body
