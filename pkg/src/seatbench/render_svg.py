"""Top-down SVG rendering of scenes and seating arrangements.

Output is plain SVG 1.1 built with ElementTree, so documents are well formed
by construction. Without an answer the floor plan alone is drawn; with one,
NPC labels, preference glyphs, and relationship lines are added, and unmet
constraints are highlighted using the reflection report."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .generator import ScenarioInstance
from .scoring import reflect
from .world import World, relation_between

SVG_NS = "http://www.w3.org/2000/svg"

SCALE = 60.0           # pixels per meter
MARGIN = 40.0          # pixel border around the plan

CATEGORY_COLOR = {
    "embodied": "#3b7dd8",
    "social": "#3aa655",
    "conflict": "#d88a3b",
}
VIOLATION_COLOR = "#d4373e"
RELATION_COLOR = "#9aa0a6"

FEATURE_STYLE = {
    "window": {"stroke": "#64b5f6", "stroke-width": "5"},
    "television": {"fill": "#263238"},
    "air_conditioner": {"fill": "#80cbc4"},
    "kitchen_zone": {"fill": "#ffe0b2", "stroke": "#ffb74d"},
    "exit": {"fill": "#81c784"},
}


def _bounds(scene):
    xs, ys = [], []
    for room in scene.rooms:
        for x, y in room.outline:
            xs.append(x)
            ys.append(y)
    return min(xs), min(ys), max(xs), max(ys)


class _Canvas:
    """Meter-to-pixel mapping with the y axis flipped for screen space."""

    def __init__(self, scene):
        x0, y0, x1, y1 = _bounds(scene)
        self.x0, self.y1 = x0, y1
        self.width = (x1 - x0) * SCALE + 2 * MARGIN
        self.height = (y1 - y0) * SCALE + 2 * MARGIN

    def pt(self, p) -> tuple[float, float]:
        return (
            MARGIN + (p[0] - self.x0) * SCALE,
            MARGIN + (self.y1 - p[1]) * SCALE,
        )

    def fmt(self, p) -> str:
        x, y = self.pt(p)
        return f"{x:.1f},{y:.1f}"


def _el(parent, tag, **attrs):
    return ET.SubElement(parent, tag, {k.replace("_", "-"): v for k, v in attrs.items()})


def _text(parent, p, content, size=12.0, anchor="middle", fill="#202124", weight="normal"):
    t = _el(
        parent,
        "text",
        x=f"{p[0]:.1f}",
        y=f"{p[1]:.1f}",
        font_size=f"{size:.0f}",
        text_anchor=anchor,
        fill=fill,
        font_family="sans-serif",
        font_weight=weight,
    )
    t.text = content
    return t


def _draw_plan(svg, canvas, scene):
    for room in scene.rooms:
        _el(
            svg,
            "polygon",
            points=" ".join(canvas.fmt(p) for p in room.outline),
            fill="#fafafa",
            stroke="none",
        )
    for a, b in scene.walls:
        (x1, y1), (x2, y2) = canvas.pt(a), canvas.pt(b)
        _el(
            svg,
            "line",
            x1=f"{x1:.1f}", y1=f"{y1:.1f}", x2=f"{x2:.1f}", y2=f"{y2:.1f}",
            stroke="#37474f",
            stroke_width="4",
            stroke_linecap="square",
        )
    for feature in scene.features:
        style = dict(FEATURE_STYLE.get(feature.kind, {"fill": "#b0bec5"}))
        geometry = feature.geometry
        if len(geometry) >= 3:
            _el(svg, "polygon", points=" ".join(canvas.fmt(p) for p in geometry), **style)
        elif len(geometry) == 2:
            (x1, y1), (x2, y2) = canvas.pt(geometry[0]), canvas.pt(geometry[1])
            _el(
                svg, "line",
                x1=f"{x1:.1f}", y1=f"{y1:.1f}", x2=f"{x2:.1f}", y2=f"{y2:.1f}",
                **style,
            )
        else:
            x, y = canvas.pt(geometry[0])
            _el(svg, "circle", cx=f"{x:.1f}", cy=f"{y:.1f}", r="7", **style)
        label = canvas.pt(feature.ref_point())
        _text(svg, (label[0], label[1] - 10), feature.kind.replace("_", " "), size=9, fill="#607d8b")
    for table in scene.tables:
        _el(
            svg,
            "polygon",
            points=" ".join(canvas.fmt(p) for p in table.perimeter),
            fill="#d7ccc8",
            stroke="#8d6e63",
            stroke_width="2",
        )
        _text(svg, canvas.pt(table.center), table.id, size=10, fill="#5d4037")


def _draw_seats(svg, canvas, scene, unmet_owners):
    for seat in scene.seats:
        x, y = canvas.pt(seat.position)
        violated = seat.id in unmet_owners
        _el(
            svg,
            "circle",
            cx=f"{x:.1f}",
            cy=f"{y:.1f}",
            r="11",
            fill="#ffffff",
            stroke=VIOLATION_COLOR if violated else "#546e7a",
            stroke_width="3" if violated else "1.5",
        )
        _text(svg, (x, y + 3), seat.id.split("-")[-1], size=8, fill="#546e7a")


def _draw_relationship_lines(svg, canvas, inst, assignment, w, violated_conflicts):
    assigned = sorted(assignment)
    seat_pos = {s.id: s.position for s in inst.scene.seats}
    conflict_pairs = {frozenset((c.a, c.b)): c for c in inst.conflicts}
    for i, a in enumerate(assigned):
        for b in assigned[i + 1:]:
            pair = frozenset((a, b))
            related = bool(relation_between(w, a, b))
            conflict = conflict_pairs.get(pair)
            if not related and conflict is None:
                continue
            (x1, y1) = canvas.pt(seat_pos[assignment[a]])
            (x2, y2) = canvas.pt(seat_pos[assignment[b]])
            if conflict is not None:
                violated = pair in violated_conflicts
                _el(
                    svg, "line",
                    x1=f"{x1:.1f}", y1=f"{y1:.1f}", x2=f"{x2:.1f}", y2=f"{y2:.1f}",
                    stroke=VIOLATION_COLOR if violated else CATEGORY_COLOR["conflict"],
                    stroke_width="3" if violated else "1.5",
                    stroke_dasharray="6,4",
                    opacity="0.9",
                )
            else:
                _el(
                    svg, "line",
                    x1=f"{x1:.1f}", y1=f"{y1:.1f}", x2=f"{x2:.1f}", y2=f"{y2:.1f}",
                    stroke=RELATION_COLOR,
                    stroke_width="1",
                    opacity="0.6",
                )


def _draw_npcs(svg, canvas, inst, assignment, w, reflection):
    unmet_refs = {e.ref for e in reflection.unmet}
    prefs_by_owner: dict[str, list] = {}
    for p in inst.preferences:
        prefs_by_owner.setdefault(p.owner, []).append(p)
    seat_by_id = {s.id: s for s in inst.scene.seats}
    for npc, seat_id in sorted(assignment.items()):
        seat = seat_by_id[seat_id]
        x, y = canvas.pt(seat.position)
        _text(svg, (x, y - 16), w.resident(npc).name, size=11, weight="bold")
        glyphs = prefs_by_owner.get(npc, [])
        total_w = 10.0 * len(glyphs)
        for i, pref in enumerate(glyphs):
            from .constraints import constraint_id

            gx = x - total_w / 2.0 + 10.0 * i + 5.0
            gy = y - 32.0
            violated = constraint_id(pref) in unmet_refs
            _el(
                svg,
                "rect",
                x=f"{gx - 4:.1f}",
                y=f"{gy - 4:.1f}",
                width="8",
                height="8",
                fill=CATEGORY_COLOR[pref.category],
                stroke=VIOLATION_COLOR if violated else "none",
                stroke_width="2" if violated else "0",
            )


def render_instance(
    inst: ScenarioInstance,
    w: World,
    assignment: dict[str, str] | None = None,
) -> str:
    """Render the scene, and the arrangement when an answer is given."""
    canvas = _Canvas(inst.scene)
    svg = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "version": "1.1",
            "width": f"{canvas.width:.0f}",
            "height": f"{canvas.height:.0f}",
            "viewBox": f"0 0 {canvas.width:.0f} {canvas.height:.0f}",
        },
    )
    title = ET.SubElement(svg, "title")
    title.text = f"Seating plan {inst.id}"
    _draw_plan(svg, canvas, inst.scene)

    if assignment is None:
        _draw_seats(svg, canvas, inst.scene, unmet_owners=set())
        return ET.tostring(svg, encoding="unicode")

    reflection = reflect(inst, assignment, w)
    violated_conflicts = set()
    violated_seats = set()
    for entry in reflection.unmet:
        parts = entry.ref.split(":")
        if parts[0] == "conflict":
            violated_conflicts.add(frozenset((parts[1], parts[2])))
            violated_seats.update((assignment[parts[1]], assignment[parts[2]]))
        else:
            violated_seats.add(assignment[parts[1]])
    _draw_relationship_lines(svg, canvas, inst, assignment, w, violated_conflicts)
    _draw_seats(svg, canvas, inst.scene, unmet_owners=violated_seats)
    _draw_npcs(svg, canvas, inst, assignment, w, reflection)
    return ET.tostring(svg, encoding="unicode")
