"""HTTP surface for the interaction protocol and the browser console.

Endpoints live under /api/v1/. Instance views never include ground truth;
numeric scores appear only in finalize responses. Every session action is
appended to a per-session JSONL log with a timestamp so time-on-task can be
reconstructed afterwards.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import protocol
from .dialogue import render_utterance
from .generator import ScenarioInstance, load_instance
from .geometry import scene_to_dict
from .protocol import (
    Budgets,
    ProtocolError,
    SENTINEL_UTTERANCE,
    finalize,
    get_session,
    open_session,
    propose,
    query_npc,
    request_view,
)
from .world import World, load_world

API_PREFIX = "/api/v1"


class OpenSessionRequest(BaseModel):
    instance_id: str
    mode: str = "observed"
    budgets: dict | None = None


class AssignmentRequest(BaseModel):
    assignment: dict[str, str]


class QueryRequest(BaseModel):
    npc: str
    slot: int


class ViewRequest(BaseModel):
    viewpoint_id: str
    heading_index: int


def _npc_card(w: World, npc_id: str) -> dict:
    r = w.resident(npc_id)
    return {
        "id": r.id,
        "name": r.name,
        "age": r.age,
        "gender": r.gender,
        "job": r.job,
        "dominant_hand": r.dominant_hand,
        "interests": sorted(r.interests),
    }


def _utterances(inst: ScenarioInstance, w: World) -> dict[str, list[str]]:
    """All NPC utterances with the same deterministic rendering the protocol
    uses, so UI text and session text are byte-identical."""
    import random

    out: dict[str, list[str]] = {}
    for npc in inst.party:
        slots = [p for p in inst.preferences if p.owner == npc]
        slots += [c for c in inst.conflicts if c.a == npc]
        texts = []
        for slot, constraint in enumerate(slots):
            rng = random.Random(f"dialogue:{inst.id}:{npc}:{slot}")
            texts.append(render_utterance(constraint, w, rng))
        out[npc] = texts
    return out


def instance_view(inst: ScenarioInstance, w: World) -> dict:
    """Everything a participant may see; ground truth deliberately absent."""
    return {
        "id": inst.id,
        "level": inst.level,
        "scene": scene_to_dict(inst.scene),
        "party": list(inst.party),
        "npcs": [_npc_card(w, npc) for npc in inst.party],
        "utterances": _utterances(inst, w),
    }


class SessionLog:
    """Append-only JSONL action log, one file per session."""

    def __init__(self, log_dir: Path):
        self.log_dir = log_dir
        log_dir.mkdir(parents=True, exist_ok=True)

    def append(self, session_id: str, action: str, detail: dict | None = None):
        record = {"t": time.time(), "session": session_id, "action": action}
        if detail:
            record["detail"] = detail
        path = self.log_dir / f"{session_id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")


def load_instance_dir(data_dir: Path) -> dict[str, ScenarioInstance]:
    instances: dict[str, ScenarioInstance] = {}
    for path in sorted(data_dir.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if "scene" not in data or "party" not in data:
            continue   # sidecars, manifests, reports
        inst = load_instance(path)
        instances[inst.id] = inst
    return instances


def create_app(
    data_dir: str | Path,
    w: World | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise FileNotFoundError(f"data dir {data_dir} does not exist")
    w = w or load_world()
    instances = load_instance_dir(data_dir)
    log = SessionLog(data_dir / "session-logs")

    app = FastAPI(title="seatbench", docs_url=None, redoc_url=None)
    app.state.instances = instances
    app.state.world = w

    def _inst(instance_id: str) -> ScenarioInstance:
        try:
            return instances[instance_id]
        except KeyError:
            raise HTTPException(404, f"unknown instance {instance_id!r}")

    def _session(session_id: str):
        try:
            return get_session(session_id)
        except ProtocolError as exc:
            raise HTTPException(404, str(exc))

    @app.get(API_PREFIX + "/instances")
    def list_instances():
        return {
            "instances": [
                {"id": i.id, "level": i.level, "template": i.scene.template_id,
                 "party_size": len(i.party)}
                for i in sorted(instances.values(), key=lambda i: (i.level, i.id))
            ]
        }

    @app.get(API_PREFIX + "/instances/{instance_id}")
    def get_instance(instance_id: str):
        return instance_view(_inst(instance_id), w)

    @app.post(API_PREFIX + "/sessions")
    def open_session_ep(req: OpenSessionRequest):
        inst = _inst(req.instance_id)
        budgets = Budgets(**req.budgets) if req.budgets else None
        try:
            session = open_session(inst, w, mode=req.mode, budgets=budgets)
        except ProtocolError as exc:
            raise HTTPException(400, str(exc))
        log.append(session.session_id, "open", {"instance": inst.id, "mode": req.mode})
        return {
            "session_id": session.session_id,
            "phase": session.phase,
            "instance_id": inst.id,
            "budgets": {
                "queries": session.budgets.queries,
                "viewpoints": session.budgets.viewpoints,
                "iterations": session.budgets.iterations,
            },
        }

    @app.get(API_PREFIX + "/sessions/{session_id}")
    def session_state(session_id: str):
        s = _session(session_id)
        return {
            "session_id": s.session_id,
            "phase": s.phase,
            "instance_id": s.inst.id,
            "queries_used": s.queries_used,
            "views_used": s.views_used,
            "proposals": len(s.proposals),
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/query")
    def query_ep(session_id: str, req: QueryRequest):
        s = _session(session_id)
        try:
            text = query_npc(s, req.npc, req.slot)
        except ProtocolError as exc:
            raise HTTPException(400, str(exc))
        log.append(session_id, "query", {"npc": req.npc, "slot": req.slot})
        return {"utterance": text, "sentinel": text == SENTINEL_UTTERANCE}

    @app.post(API_PREFIX + "/sessions/{session_id}/view")
    def view_ep(session_id: str, req: ViewRequest):
        s = _session(session_id)
        try:
            frame = request_view(s, req.viewpoint_id, req.heading_index)
        except ProtocolError as exc:
            raise HTTPException(400, str(exc))
        log.append(session_id, "view", {"viewpoint": req.viewpoint_id,
                                        "heading": req.heading_index})
        return {
            "viewpoint_id": frame.viewpoint_id,
            "heading_index": frame.heading_index,
            "visible_seat_ids": list(frame.visible_seat_ids),
            "visible_feature_ids": list(frame.visible_feature_ids),
            "measurements": frame.measurements,
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/propose")
    def propose_ep(session_id: str, req: AssignmentRequest):
        s = _session(session_id)
        try:
            reflection = propose(s, req.assignment)
        except ProtocolError as exc:
            raise HTTPException(400, str(exc))
        log.append(session_id, "propose", {"assignment": req.assignment})
        return reflection.to_dict()

    @app.post(API_PREFIX + "/sessions/{session_id}/finalize")
    def finalize_ep(session_id: str, req: AssignmentRequest | None = None):
        s = _session(session_id)
        assignment = req.assignment if req is not None else None
        try:
            report = finalize(s, assignment)
        except ProtocolError as exc:
            raise HTTPException(400, str(exc))
        log.append(session_id, "finalize", {"score": report.scaled_score})
        return report.to_dict()

    @app.get(API_PREFIX + "/sessions/{session_id}/answer")
    def export_answer(session_id: str):
        s = _session(session_id)
        if not s.proposals:
            raise HTTPException(400, "no proposal to export")
        assignment = s.proposals[-1][0]
        log.append(session_id, "export")
        return JSONResponse(
            {
                "schema_version": 1,
                "instance_id": s.inst.id,
                "assignment": assignment,
            },
            headers={
                "Content-Disposition":
                    f'attachment; filename="{s.inst.id}-answer.json"'
            },
        )

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
