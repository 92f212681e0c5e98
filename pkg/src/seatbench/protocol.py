"""Three-phase interaction contract for external solving agents.

A session walks an agent through eliciting preferences from NPCs, observing
the room from viewpoints, and proposing assignments with reflection-only
feedback. A scripted oracle agent and a line-delimited JSON adapter are
included so the contract can be exercised end to end without any external
process.
"""

from __future__ import annotations

import json
import math
import uuid
from dataclasses import dataclass, field, replace

from .dialogue import parse_utterance, render_utterance
from .generator import ScenarioInstance
from .geometry import (
    GeomConfig,
    ObservationFrame,
    SceneInstance,
    Seat,
    SpatialFeature,
    export_ground_truth_features,
    viewpoint_observe,
)
from .scoring import (
    AssignmentError,
    ReflectionReport,
    ScoreReport,
    reflect,
    score_instance,
    validate_assignment,
)
from .world import World

PHASES = ("elicit", "observe", "decide", "done")

SENTINEL_UTTERANCE = "I have nothing more to share."

MESSAGE_KINDS = (
    "query_npc",
    "npc_utterance",
    "request_view",
    "frame",
    "propose",
    "reflection",
    "finalize",
    "result",
)

# Session rng stream label for deterministic template choice per slot.
_DIALOGUE_SALT = "dialogue"


class ProtocolError(Exception):
    """Phase, budget, or payload violation; the session stays usable."""


@dataclass
class Budgets:
    queries: int
    viewpoints: int
    iterations: int

    def __post_init__(self):
        if min(self.queries, self.viewpoints, self.iterations) <= 0:
            raise ProtocolError("budgets must be positive")


def default_budgets(inst: ScenarioInstance) -> Budgets:
    return Budgets(
        queries=2 * max(1, len(inst.constraints)),
        viewpoints=8 * len(inst.scene.viewpoints),
        iterations=10,
    )


@dataclass
class SessionState:
    session_id: str
    inst: ScenarioInstance
    world: World
    mode: str                       # observed | gt_perception
    budgets: Budgets
    phase: str = "elicit"
    sequence: int = 0
    transcript: dict[str, list[tuple[int, str]]] = field(default_factory=dict)
    frames_seen: list[ObservationFrame] = field(default_factory=list)
    proposals: list[tuple[dict, ScoreReport, ReflectionReport]] = field(
        default_factory=list
    )
    queries_used: int = 0
    views_used: int = 0
    gt_digest: dict | None = None   # filled in gt_perception mode only
    _utterance_cache: dict[tuple[str, int], str] = field(default_factory=dict)

    def next_sequence(self) -> int:
        self.sequence += 1
        return self.sequence


_SESSIONS: dict[str, SessionState] = {}


def _advance(session: SessionState, target: str) -> None:
    cur = PHASES.index(session.phase)
    new = PHASES.index(target)
    if new < cur:
        raise ProtocolError(
            f"operation belongs to phase {target!r} but session is in {session.phase!r}"
        )
    session.phase = target


def open_session(
    inst: ScenarioInstance,
    w: World,
    mode: str = "observed",
    budgets: Budgets | None = None,
) -> SessionState:
    """Start a session in the elicit phase.

    In gt_perception mode the observe phase is considered complete up front
    and the full geometry digest is available without spending views.
    """
    if mode not in ("observed", "gt_perception"):
        raise ProtocolError(f"unknown mode {mode!r}")
    session = SessionState(
        session_id=uuid.uuid4().hex,
        inst=inst,
        world=w,
        mode=mode,
        budgets=budgets or default_budgets(inst),
    )
    if mode == "gt_perception":
        session.gt_digest = export_ground_truth_features(inst.scene)
    _SESSIONS[session.session_id] = session
    return session


def get_session(session_id: str) -> SessionState:
    try:
        return _SESSIONS[session_id]
    except KeyError:
        raise ProtocolError(f"unknown session {session_id!r}") from None


def _npc_slots(session: SessionState, npc: str):
    """Stable per-NPC constraint order: preferences then owned conflicts."""
    inst = session.inst
    slots = [p for p in inst.preferences if p.owner == npc]
    slots += [c for c in inst.conflicts if c.a == npc]
    return slots


def query_npc(session: SessionState, npc: str, slot: int) -> str:
    """Return the NPC's slot-th constraint as an utterance.

    Out-of-range slots get a fixed sentinel; repeats are verbatim. Every call
    spends one query."""
    _advance(session, "elicit")
    if npc not in session.inst.party:
        raise ProtocolError(f"{npc!r} is not in the party")
    if session.queries_used >= session.budgets.queries:
        raise ProtocolError("query budget exhausted")
    session.queries_used += 1
    session.next_sequence()

    key = (npc, slot)
    if key not in session._utterance_cache:
        slots = _npc_slots(session, npc)
        if 0 <= slot < len(slots):
            import random

            rng = random.Random(
                f"{_DIALOGUE_SALT}:{session.inst.id}:{npc}:{slot}"
            )
            text = render_utterance(slots[slot], session.world, rng)
        else:
            text = SENTINEL_UTTERANCE
        session._utterance_cache[key] = text
    text = session._utterance_cache[key]
    session.transcript.setdefault(npc, []).append((slot, text))
    return text


def request_view(session: SessionState, viewpoint_id: str, heading_index: int) -> ObservationFrame:
    """Observe the room from a grid viewpoint along one of 8 headings."""
    _advance(session, "observe")
    if session.mode == "gt_perception":
        raise ProtocolError("gt_perception sessions have no observe phase")
    if session.views_used >= session.budgets.viewpoints:
        raise ProtocolError("viewpoint budget exhausted")
    session.views_used += 1
    session.next_sequence()
    frame = viewpoint_observe(session.inst.scene, viewpoint_id, heading_index)
    session.frames_seen.append(frame)
    return frame


def propose(session: SessionState, assignment: dict[str, str]) -> ReflectionReport:
    """Submit a candidate assignment; the agent gets reflection feedback only.

    The numeric score is recorded but withheld until finalize."""
    _advance(session, "decide")
    if len(session.proposals) >= session.budgets.iterations:
        raise ProtocolError("iteration budget exhausted")
    session.next_sequence()
    try:
        validate_assignment(session.inst, assignment)
    except AssignmentError as exc:
        raise ProtocolError(str(exc)) from exc
    report = score_instance(session.inst, assignment, session.world)
    reflection = reflect(session.inst, assignment, session.world)
    session.proposals.append((dict(assignment), report, reflection))
    return reflection


def finalize(session: SessionState, assignment: dict[str, str] | None = None) -> ScoreReport:
    """Close the session and reveal the numeric score of the final answer."""
    if session.phase == "done":
        raise ProtocolError("session already finalized")
    if assignment is None:
        if not session.proposals:
            raise ProtocolError("nothing to finalize: no proposal submitted")
        assignment = session.proposals[-1][0]
    try:
        validate_assignment(session.inst, assignment)
    except AssignmentError as exc:
        raise ProtocolError(str(exc)) from exc
    session.phase = "done"
    session.next_sequence()
    return score_instance(session.inst, assignment, session.world)


# ---------------------------------------------------------------------------
# Digest reconstruction from observation frames
# ---------------------------------------------------------------------------

def _project(origin, distance: float, brg: float):
    return (
        origin[0] + distance * math.cos(brg),
        origin[1] + distance * math.sin(brg),
    )


def reconstruct_digest_from_frames(
    scene: SceneInstance, frames: list[ObservationFrame]
) -> dict:
    """Build a per-seat geometry digest from observation frames alone.

    Positions come from distance-plus-bearing triangulation off the known
    viewpoint grid; seat details (tableware, facing, perimeter index) require
    at least one close-range frame; walls are never observed, so line-of-sight
    judgments are optimistic where interior walls exist.
    """
    vp_pos = {v.id: v.position for v in scene.viewpoints}
    seats_raw: dict[str, dict] = {}
    features_raw: dict[str, dict] = {}

    for frame in frames:
        origin = vp_pos[frame.viewpoint_id]
        for eid, m in frame.measurements.items():
            pos = _project(origin, m["distance"], m["bearing"])
            if eid in frame.visible_seat_ids:
                entry = seats_raw.setdefault(eid, {"position": pos})
                for key in ("table_id", "tableware", "facing", "perimeter_index"):
                    if key in m:
                        entry[key] = m[key]
            else:
                if "vertices" in m and eid not in features_raw:
                    features_raw[eid] = {
                        "kind": m["kind"],
                        "geometry": tuple(
                            _project(origin, d, b) for d, b in m["vertices"]
                        ),
                    }

    seats = []
    for sid, raw in sorted(seats_raw.items()):
        if "perimeter_index" not in raw:
            # Never inspected closely; skip rather than guess adjacency.
            continue
        seats.append(
            Seat(
                id=sid,
                table_id=raw["table_id"],
                position=raw["position"],
                facing=raw["facing"],
                perimeter_index=raw["perimeter_index"],
                tableware=raw["tableware"],
            )
        )
    features = tuple(
        SpatialFeature(id=fid, kind=raw["kind"], geometry=raw["geometry"])
        for fid, raw in sorted(features_raw.items())
    )
    believed = SceneInstance(
        template_id=scene.template_id,
        seed=scene.seed,
        rooms=(),
        walls=(),               # unknown to the observer
        tables=(),
        seats=tuple(seats),
        features=features,
        viewpoints=(),
        table_style=scene.table_style,
        chair_style=scene.chair_style,
        config=scene.config,
    )
    return export_ground_truth_features(believed)


def session_digest(session: SessionState) -> dict:
    """The geometry belief available to the agent in this session's mode."""
    if session.mode == "gt_perception":
        assert session.gt_digest is not None
        return session.gt_digest
    return reconstruct_digest_from_frames(session.inst.scene, session.frames_seen)


# ---------------------------------------------------------------------------
# Oracle agent
# ---------------------------------------------------------------------------

def run_oracle_agent(
    inst: ScenarioInstance,
    w: World,
    mode: str = "observed",
    budgets: Budgets | None = None,
):
    """Play the protocol end to end with scripted best play.

    Queries every slot, parses the transcript back into constraints, sweeps
    the full viewpoint grid (observed mode) or takes the gt digest, solves the
    believed instance exactly up to 8 seats (local search beyond), and
    finalizes. Returns (assignment, ScoreReport, SolverTrace, session).
    """
    from .solvers import Evaluator, solve_exact, solve_local_search

    session = open_session(inst, w, mode=mode, budgets=budgets)

    believed_prefs, believed_conflicts = [], []
    for npc in inst.party:
        slot = 0
        while True:
            text = query_npc(session, npc, slot)
            if text == SENTINEL_UTTERANCE:
                break
            c = parse_utterance(text, w, npc)
            if hasattr(c, "owner"):
                believed_prefs.append(c)
            else:
                believed_conflicts.append(c)
            slot += 1

    if mode == "observed":
        for vp in inst.scene.viewpoints:
            for heading in range(8):
                request_view(session, vp.id, heading)
    digest = session_digest(session)

    believed = replace(
        inst,
        preferences=tuple(believed_prefs),
        conflicts=tuple(believed_conflicts),
    )
    ev = Evaluator(believed, w, digest=digest)
    if len(inst.party) <= 8:
        assignment, trace = solve_exact(believed, w, evaluator=ev)
    else:
        assignment, trace = solve_local_search(believed, w, evaluator=ev)

    propose(session, assignment)
    report = finalize(session, assignment)
    return assignment, report, trace, session


# ---------------------------------------------------------------------------
# Line-delimited JSON adapter
# ---------------------------------------------------------------------------

class ProtocolAdapter:
    """Bridge the session operations over line-delimited JSON messages.

    Each request line is a JSON object with an "op" field; responses echo the
    request's "seq" if present. Sessions are addressed by id, so a peer can
    reconnect and resume. Malformed lines get a diagnostic naming the byte
    offset where the bad line started; the session is never torn down."""

    def __init__(self, instances: dict[str, ScenarioInstance], w: World):
        self.instances = instances
        self.world = w
        self.bytes_read = 0

    def handle_line(self, line: str) -> str:
        offset = self.bytes_read
        self.bytes_read += len(line.encode()) + 1
        try:
            msg = json.loads(line)
            if not isinstance(msg, dict):
                raise ValueError("message must be a JSON object")
        except ValueError as exc:
            return json.dumps(
                {"ok": False, "error": f"malformed message at byte {offset}: {exc}"}
            )
        try:
            payload = self._dispatch(msg)
            reply = {"ok": True, **payload}
        except (ProtocolError, KeyError, TypeError) as exc:
            reply = {"ok": False, "error": str(exc)}
        if "seq" in msg:
            reply["seq"] = msg["seq"]
        return json.dumps(reply)

    def _dispatch(self, msg: dict) -> dict:
        op = msg.get("op")
        if op == "open":
            inst = self.instances[msg["instance_id"]]
            budgets = None
            if "budgets" in msg:
                budgets = Budgets(**msg["budgets"])
            session = open_session(
                inst, self.world, mode=msg.get("mode", "observed"), budgets=budgets
            )
            return {
                "session_id": session.session_id,
                "phase": session.phase,
                "party": list(inst.party),
                "seats": [s.id for s in inst.scene.seats],
                "viewpoints": [
                    {"id": v.id, "position": list(v.position)}
                    for v in inst.scene.viewpoints
                ],
                "budgets": {
                    "queries": session.budgets.queries,
                    "viewpoints": session.budgets.viewpoints,
                    "iterations": session.budgets.iterations,
                },
            }
        if op == "resume":
            session = get_session(msg["session_id"])
            return {
                "session_id": session.session_id,
                "phase": session.phase,
                "queries_used": session.queries_used,
                "views_used": session.views_used,
                "proposals": len(session.proposals),
            }
        session = get_session(msg["session_id"])
        if op == "query_npc":
            text = query_npc(session, msg["npc"], int(msg["slot"]))
            return {"kind": "npc_utterance", "utterance": text}
        if op == "request_view":
            frame = request_view(
                session, msg["viewpoint_id"], int(msg["heading_index"])
            )
            return {
                "kind": "frame",
                "viewpoint_id": frame.viewpoint_id,
                "heading_index": frame.heading_index,
                "visible_seat_ids": list(frame.visible_seat_ids),
                "visible_feature_ids": list(frame.visible_feature_ids),
                "measurements": frame.measurements,
            }
        if op == "propose":
            reflection = propose(session, dict(msg["assignment"]))
            return {"kind": "reflection", **reflection.to_dict()}
        if op == "finalize":
            report = finalize(session, msg.get("assignment"))
            return {"kind": "result", **report.to_dict()}
        raise ProtocolError(f"unknown op {op!r}")

    def serve_streams(self, reader, writer) -> None:
        """Process messages from a text stream until EOF."""
        for line in reader:
            line = line.rstrip("\n")
            if not line:
                self.bytes_read += 1
                continue
            writer.write(self.handle_line(line) + "\n")
            if hasattr(writer, "flush"):
                writer.flush()


def serve_socket(adapter: ProtocolAdapter, host: str = "127.0.0.1", port: int = 0):
    """Serve the adapter on a local TCP socket; returns the bound address.

    Handles one peer at a time; adequate for a local agent harness."""
    import socket
    import threading

    server = socket.create_server((host, port))

    def loop():
        while True:
            try:
                conn, _ = server.accept()
            except OSError:
                return
            with conn, conn.makefile("r") as reader, conn.makefile("w") as writer:
                adapter.serve_streams(reader, writer)

    thread = threading.Thread(target=loop, daemon=True)
    thread.start()
    return server, server.getsockname()
