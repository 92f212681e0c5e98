"""Play one full agent session through the line-delimited protocol adapter:
interview the guests, observe the room, propose, read the reflection, and
finalize for a score.

Run:  python3 demos/03_scripted_session.py
"""

import json
from dataclasses import replace

from seatbench.dialogue import parse_utterance
from seatbench.generator import generate_instance
from seatbench.protocol import SENTINEL_UTTERANCE, ProtocolAdapter
from seatbench.solvers import solve_exact
from seatbench.world import load_world

w = load_world()
inst = generate_instance(12, w, 4)
adapter = ProtocolAdapter({inst.id: inst}, w)


def send(**msg):
    line = json.dumps(msg)
    print(f">> {line}")
    reply = json.loads(adapter.handle_line(line))
    print(f"<< {json.dumps(reply)[:120]}...")
    return reply


opened = send(op="open", instance_id=inst.id)
sid = opened["session_id"]

# Phase 1: interview every guest until they have nothing more to share.
believed = []
for npc in opened["party"]:
    slot = 0
    while True:
        reply = send(op="query_npc", session_id=sid, npc=npc, slot=slot)
        if reply["utterance"] == SENTINEL_UTTERANCE:
            break
        believed.append(parse_utterance(reply["utterance"], w, npc))
        slot += 1

# Phase 2: look around from one viewpoint.
vp = inst.scene.viewpoints[0].id
send(op="request_view", session_id=sid, viewpoint=vp, heading=0)

# Phase 3: solve against what we heard, propose, and read the reflection.
prefs = tuple(c for c in believed if hasattr(c, "owner"))
conflicts = tuple(c for c in believed if not hasattr(c, "owner"))
assignment, _ = solve_exact(
    replace(inst, preferences=prefs, conflicts=conflicts), w
)
reflection = send(op="propose", session_id=sid, assignment=assignment)
print(f"\nunmet after proposal: {len(reflection['unmet'])}")

result = send(op="finalize", session_id=sid)
print(f"\nfinal score: {result['scaled_score']:.2f} / 99.30")
