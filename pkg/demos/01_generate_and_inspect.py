"""Generate a scenario at a chosen difficulty level and walk through what it
contains: the floor plan, the party, and the constraints each guest holds.

Run:  python3 demos/01_generate_and_inspect.py [level] [seed]
"""

import sys

from seatbench.constraints import constraint_id
from seatbench.generator import generate_instance
from seatbench.world import load_world

level = int(sys.argv[1]) if len(sys.argv) > 1 else 35
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

w = load_world()
inst = generate_instance(level, w, seed)

print(f"instance {inst.id} (level {level}, template {inst.scene.template_id})")
print(f"  rooms: {len(inst.scene.rooms)}, seats: {len(inst.scene.seats)}, "
      f"features: {len(inst.scene.features)}")
print(f"  party of {len(inst.party)}:")
for npc in inst.party:
    r = w.resident(npc)
    print(f"    {r.name} ({r.age}, {r.job})")

print(f"  constraints ({len(inst.constraints)}):")
for c in inst.constraints:
    print(f"    [w{c.strength}] {constraint_id(c)}")

print("\nEvery instance ships with a hidden seating that satisfies everything,")
print("so a perfect answer always exists. The sidecar file holds it; the")
print("instance file released to an agent does not.")
