"""Randomized 2D floor plans and the spatial predicates grounding embodied
preferences: distance, orientation, field of view with wall occlusion, seat
adjacency, and viewpoint visibility.

All coordinates are meters; angles are radians, measured counterclockwise
from the +x axis.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

Point = tuple[float, float]
Segment = tuple[Point, Point]

TWO_PI = 2.0 * math.pi

PLACEMENT_RETRY_BUDGET = 1000

TABLEWARE = ("chopsticks", "cutlery")


@dataclass(frozen=True)
class GeomConfig:
    """Tunable thresholds for spatial predicates."""

    near_distance: float = 1.5
    away_distance: float = 3.0
    seat_fov: float = TWO_PI / 3.0          # television visibility cone
    observe_fov: float = TWO_PI / 3.0       # viewpoint camera cone
    observe_range: float = 8.0
    close_inspect_range: float = 2.0        # range for reading seat details
    viewpoint_spacing: float = 1.0


DEFAULT_CONFIG = GeomConfig()


@dataclass(frozen=True)
class Seat:
    id: str
    table_id: str
    position: Point
    facing: float
    perimeter_index: int
    tableware: str


@dataclass(frozen=True)
class Table:
    id: str
    shape: str                     # rectangular | circular | oval | irregular
    center: Point
    angle: float
    perimeter: tuple[Point, ...]   # closed polyline (last joins first)
    bound_radius: float


@dataclass(frozen=True)
class SpatialFeature:
    id: str
    kind: str   # window | television | air_conditioner | kitchen_zone | exit
    geometry: tuple[Point, ...]    # single point, segment, or polygon
    orientation: float | None = None

    def ref_point(self) -> Point:
        xs = [p[0] for p in self.geometry]
        ys = [p[1] for p in self.geometry]
        return (sum(xs) / len(xs), sum(ys) / len(ys))


@dataclass(frozen=True)
class Room:
    id: str
    outline: tuple[Point, ...]     # axis-aligned rectangle corners, CCW

    def contains(self, p: Point, margin: float = 0.0) -> bool:
        (x0, y0), _, (x1, y1), _ = self.outline
        return (
            min(x0, x1) + margin <= p[0] <= max(x0, x1) - margin
            and min(y0, y1) + margin <= p[1] <= max(y0, y1) - margin
        )


@dataclass(frozen=True)
class Viewpoint:
    id: str
    position: Point


@dataclass(frozen=True)
class SceneInstance:
    template_id: str
    seed: int
    rooms: tuple[Room, ...]
    walls: tuple[Segment, ...]     # occluding segments (door openings removed)
    tables: tuple[Table, ...]
    seats: tuple[Seat, ...]
    features: tuple[SpatialFeature, ...]
    viewpoints: tuple[Viewpoint, ...]
    table_style: int
    chair_style: int
    config: GeomConfig = field(default=DEFAULT_CONFIG, compare=False)

    def seat(self, seat_id: str) -> Seat:
        for s in self.seats:
            if s.id == seat_id:
                return s
        raise KeyError(f"unknown seat id: {seat_id}")

    def features_of_kind(self, kind: str) -> list[SpatialFeature]:
        return [f for f in self.features if f.kind == kind]

    def viewpoint(self, vp_id: str) -> Viewpoint:
        for v in self.viewpoints:
            if v.id == vp_id:
                return v
        raise KeyError(f"unknown viewpoint id: {vp_id}")


@dataclass(frozen=True)
class ObservationFrame:
    viewpoint_id: str
    heading_index: int
    visible_seat_ids: tuple[str, ...]
    visible_feature_ids: tuple[str, ...]
    measurements: dict   # entity id -> {distance, bearing, **close-range attrs}


class PlacementError(Exception):
    """Furniture placement failed within the rejection-sampling budget."""


# ---------------------------------------------------------------------------
# Vector helpers
# ---------------------------------------------------------------------------

def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def bearing(src: Point, dst: Point) -> float:
    return math.atan2(dst[1] - src[1], dst[0] - src[0])


def angle_diff(a: float, b: float) -> float:
    """Absolute angular difference in [0, pi]."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return dist(p, a)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length_sq))
    return dist(p, (ax + t * dx, ay + t * dy))


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Proper or touching intersection of segments p1p2 and q1q2."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(v) < 1e-12:
            return 0
        return 1 if v > 0 else -1

    o1 = orient(p1, p2, q1)
    o2 = orient(p1, p2, q2)
    o3 = orient(q1, q2, p1)
    o4 = orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) - 1e-12 <= c[0] <= max(a[0], b[0]) + 1e-12
            and min(a[1], b[1]) - 1e-12 <= c[1] <= max(a[1], b[1]) + 1e-12
        )

    if o1 == 0 and on_seg(p1, p2, q1):
        return True
    if o2 == 0 and on_seg(p1, p2, q2):
        return True
    if o3 == 0 and on_seg(q1, q2, p1):
        return True
    if o4 == 0 and on_seg(q1, q2, p2):
        return True
    return False


def line_of_sight(src: Point, dst: Point, walls: tuple[Segment, ...]) -> bool:
    for (a, b) in walls:
        if segments_intersect(src, dst, a, b):
            return False
    return True


def polyline_distance(p: Point, polyline: tuple[Point, ...]) -> float:
    if len(polyline) == 1:
        return dist(p, polyline[0])
    best = math.inf
    n = len(polyline)
    closed = n > 2
    pairs = range(n if closed else n - 1)
    for i in pairs:
        a = polyline[i]
        b = polyline[(i + 1) % n]
        best = min(best, point_segment_distance(p, a, b))
    return best


# ---------------------------------------------------------------------------
# Scene templates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableSpec:
    shape: str
    seat_count: int
    size: tuple[float, float]   # rect: (length, width); circle: (r, r);
                                # oval: (a, b); irregular: (circumradius, -)


@dataclass(frozen=True)
class SceneTemplate:
    id: str
    rooms: tuple[tuple[float, float, float, float], ...]  # x0, y0, x1, y1
    tables: tuple[tuple[int, TableSpec], ...]             # (room index, spec)
    viewpoint_spacing: float = 1.0


TEMPLATES: dict[str, SceneTemplate] = {
    "A": SceneTemplate(
        id="A",
        rooms=((0.0, 0.0, 6.0, 5.0),),
        tables=((0, TableSpec("rectangular", 4, (1.8, 0.9))),),
    ),
    "B": SceneTemplate(
        id="B",
        rooms=((0.0, 0.0, 6.0, 5.0),),
        tables=((0, TableSpec("irregular", 5, (1.1, 0.0))),),
    ),
    "C": SceneTemplate(
        id="C",
        rooms=((0.0, 0.0, 6.0, 6.0),),
        tables=((0, TableSpec("circular", 6, (0.9, 0.9))),),
    ),
    "D": SceneTemplate(
        id="D",
        rooms=((0.0, 0.0, 10.0, 6.5),),
        tables=(
            (0, TableSpec("rectangular", 6, (2.4, 1.0))),
            (0, TableSpec("circular", 4, (0.8, 0.8))),
        ),
    ),
    "E": SceneTemplate(
        id="E",
        rooms=((0.0, 0.0, 7.0, 6.5), (7.0, 0.0, 17.0, 6.5)),
        tables=(
            (0, TableSpec("rectangular", 5, (2.0, 1.0))),
            (1, TableSpec("circular", 4, (0.8, 0.8))),
            (1, TableSpec("oval", 4, (1.1, 0.75))),
        ),
    ),
}

SEAT_SETBACK = 0.45          # seat center distance outward from table edge
SEAT_CLEARANCE = 0.35        # personal space radius around a seat
AISLE = 0.6                  # minimum clearance between furniture groups
DOOR_WIDTH = 1.0


def template_seat_count(template_id: str) -> int:
    return sum(spec.seat_count for _, spec in TEMPLATES[template_id].tables)


def _rotate(p: Point, angle: float) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    return (p[0] * c - p[1] * s, p[0] * s + p[1] * c)


def _translate(p: Point, origin: Point) -> Point:
    return (p[0] + origin[0], p[1] + origin[1])


def _build_table(
    table_id: str, spec: TableSpec, center: Point, angle: float
) -> tuple[Table, list[tuple[Point, float]]]:
    """Return the table and its seat slots as (position, facing) in order
    around the perimeter."""
    slots: list[tuple[Point, float]] = []
    if spec.shape == "rectangular":
        length, width = spec.size
        hl, hw = length / 2.0, width / 2.0
        corners = [(-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw)]
        n = spec.seat_count
        top = (n + 1) // 2   # seats on the +w edge
        bottom = n - top
        # Seats occupy the two long edges only; perimeter order runs along
        # the top edge then back along the bottom, so consecutive indices
        # stay physically adjacent around the table.
        for i in range(top):
            x = -hl + (i + 1) * (length / (top + 1))
            slots.append(((x, hw + SEAT_SETBACK), -math.pi / 2.0))
        for i in range(bottom):
            x = hl - (i + 1) * (length / (bottom + 1))
            slots.append(((x, -hw - SEAT_SETBACK), math.pi / 2.0))
        perimeter = corners
        bound = math.hypot(hl, hw)
    elif spec.shape in ("circular", "oval"):
        a, b = spec.size
        n = spec.seat_count
        perimeter = [
            (a * math.cos(TWO_PI * k / 24), b * math.sin(TWO_PI * k / 24))
            for k in range(24)
        ]
        for i in range(n):
            t = TWO_PI * i / n
            px = (a + SEAT_SETBACK) * math.cos(t)
            py = (b + SEAT_SETBACK) * math.sin(t)
            slots.append(((px, py), math.atan2(-py, -px)))
        bound = max(a, b)
    elif spec.shape == "irregular":
        # Fixed hexagonal perimeter; seats on five of the six edge midpoints.
        r = spec.size[0]
        perimeter = [
            (r * math.cos(TWO_PI * k / 6), r * math.sin(TWO_PI * k / 6))
            for k in range(6)
        ]
        for i in range(spec.seat_count):
            a_pt = perimeter[i]
            b_pt = perimeter[(i + 1) % 6]
            mx, my = (a_pt[0] + b_pt[0]) / 2.0, (a_pt[1] + b_pt[1]) / 2.0
            norm = math.hypot(mx, my)
            px = mx + SEAT_SETBACK * mx / norm
            py = my + SEAT_SETBACK * my / norm
            slots.append(((px, py), math.atan2(-py, -px)))
        bound = r
    else:
        raise ValueError(f"unknown table shape: {spec.shape}")

    world_perimeter = tuple(
        _translate(_rotate(p, angle), center) for p in perimeter
    )
    world_slots = []
    for pos, facing in slots:
        wp = _translate(_rotate(pos, angle), center)
        world_slots.append((wp, (facing + angle) % TWO_PI))
    table = Table(
        id=table_id,
        shape=spec.shape,
        center=center,
        angle=angle,
        perimeter=world_perimeter,
        bound_radius=bound + SEAT_SETBACK + SEAT_CLEARANCE,
    )
    return table, world_slots


def _spec_bound_radius(spec: TableSpec) -> float:
    if spec.shape == "rectangular":
        core = math.hypot(spec.size[0] / 2.0, spec.size[1] / 2.0)
    else:
        core = max(spec.size)
    return core + SEAT_SETBACK + SEAT_CLEARANCE


def _wall_with_gaps(a: Point, b: Point, gaps: list[tuple[float, float]]) -> list[Segment]:
    """Split wall a->b into segments, removing parameterized gap spans."""
    length = dist(a, b)
    if length == 0.0:
        return []
    spans = sorted((max(0.0, g0), min(length, g1)) for g0, g1 in gaps)
    segs: list[Segment] = []
    cursor = 0.0
    ux, uy = (b[0] - a[0]) / length, (b[1] - a[1]) / length
    for g0, g1 in spans:
        if g0 > cursor:
            segs.append(
                ((a[0] + ux * cursor, a[1] + uy * cursor),
                 (a[0] + ux * g0, a[1] + uy * g0))
            )
        cursor = max(cursor, g1)
    if cursor < length:
        segs.append(
            ((a[0] + ux * cursor, a[1] + uy * cursor), (b[0], b[1]))
        )
    return [s for s in segs if dist(*s) > 1e-9]


# ---------------------------------------------------------------------------
# Scene instantiation
# ---------------------------------------------------------------------------

def instantiate_scene(
    template_id: str, seed: int, config: GeomConfig = DEFAULT_CONFIG
) -> SceneInstance:
    """Instantiate a randomized scene; deterministic given (template, seed)."""
    if template_id not in TEMPLATES:
        raise ValueError(f"unknown template: {template_id}")
    template = TEMPLATES[template_id]
    rng = random.Random(f"scene:{template_id}:{seed}")
    for _ in range(PLACEMENT_RETRY_BUDGET):
        scene = _try_instantiate(template, seed, rng, config)
        if scene is not None:
            return scene
    raise PlacementError(
        f"could not place template {template_id} within "
        f"{PLACEMENT_RETRY_BUDGET} attempts"
    )


def _try_instantiate(
    template: SceneTemplate, seed: int, rng: random.Random, config: GeomConfig
) -> SceneInstance | None:
    rooms = tuple(
        Room(
            id=f"room{i}",
            outline=((x0, y0), (x1, y0), (x1, y1), (x0, y1)),
        )
        for i, (x0, y0, x1, y1) in enumerate(template.rooms)
    )

    # Walls: each room's rectangle; shared edges between rooms get a
    # connecting door, and every room on the exterior gets at least one exit.
    walls: list[Segment] = []
    exits: list[SpatialFeature] = []
    feature_counter = [0]

    def fid(kind: str) -> str:
        feature_counter[0] += 1
        return f"{kind}{feature_counter[0]}"

    shared_x = None
    if len(template.rooms) == 2:
        shared_x = template.rooms[0][2]   # rooms abut along a vertical line

    for i, (x0, y0, x1, y1) in enumerate(template.rooms):
        edges = {
            "south": ((x0, y0), (x1, y0)),
            "east": ((x1, y0), (x1, y1)),
            "north": ((x1, y1), (x0, y1)),
            "west": ((x0, y1), (x0, y0)),
        }
        # Exterior exit on the south wall at a random offset.
        exit_offset = rng.uniform(0.8, (x1 - x0) - 0.8 - DOOR_WIDTH)
        if i == 0:
            a, b = edges["south"]
            walls.extend(
                _wall_with_gaps(a, b, [(exit_offset, exit_offset + DOOR_WIDTH)])
            )
            exits.append(
                SpatialFeature(
                    id=fid("exit"),
                    kind="exit",
                    geometry=(
                        (x0 + exit_offset, y0),
                        (x0 + exit_offset + DOOR_WIDTH, y0),
                    ),
                )
            )
            del edges["south"]
        for name, (a, b) in edges.items():
            if shared_x is not None and abs(a[0] - shared_x) < 1e-9 and abs(b[0] - shared_x) < 1e-9:
                # Interior wall: cut a connecting door near its middle; add
                # the wall only once (from the left room's perspective).
                if i == 0:
                    height = abs(b[1] - a[1])
                    door_at = rng.uniform(1.0, height - 1.0 - 1.2)
                    walls.extend(_wall_with_gaps(a, b, [(door_at, door_at + 1.2)]))
                continue
            walls.append((a, b))

    walls_t = tuple(walls)

    # Tables and seats via rejection sampling inside their rooms.
    tables: list[Table] = []
    seats: list[Seat] = []
    for t_index, (room_index, spec) in enumerate(template.tables):
        room = rooms[room_index]
        placed = None
        for _ in range(60):
            margin = _spec_bound_radius(spec) + 0.55
            (x0, y0), _, (x1, y1), _ = room.outline
            if x1 - x0 <= 2 * margin or y1 - y0 <= 2 * margin:
                margin = min((x1 - x0), (y1 - y0)) / 2.0 - 0.1
            cx = rng.uniform(x0 + margin, x1 - margin)
            cy = rng.uniform(y0 + margin, y1 - margin)
            angle = rng.uniform(0.0, TWO_PI) if spec.shape != "rectangular" else (
                rng.choice([0.0, math.pi / 2.0]) + rng.uniform(-0.2, 0.2)
            )
            table, slots = _build_table(f"t{t_index}", spec, (cx, cy), angle)
            if any(
                dist(table.center, other.center)
                < table.bound_radius + other.bound_radius + AISLE
                for other in tables
            ):
                continue
            placed = (table, slots)
            break
        if placed is None:
            return None
        table, slots = placed
        tables.append(table)
        for idx, (pos, facing) in enumerate(slots):
            seats.append(
                Seat(
                    id=f"{table.id}s{idx}",
                    table_id=table.id,
                    position=pos,
                    facing=facing,
                    perimeter_index=idx,
                    tableware=rng.choice(TABLEWARE),
                )
            )

    # Wall-mounted features and the kitchen zone.
    features: list[SpatialFeature] = list(exits)
    for i, (x0, y0, x1, y1) in enumerate(template.rooms):
        # Window on the north wall.
        # Wall-mounted features are nudged 5 cm off the wall plane so sight
        # lines to them are not blocked by their own mounting wall.
        w0 = rng.uniform(0.5, (x1 - x0) - 0.5 - 1.2)
        features.append(
            SpatialFeature(
                id=fid("window"),
                kind="window",
                geometry=((x0 + w0, y1 - 0.05), (x0 + w0 + 1.2, y1 - 0.05)),
            )
        )
        # Air conditioner high on the west or east wall (point feature).
        side_x = x0 + 0.05 if rng.random() < 0.5 else x1 - 0.05
        features.append(
            SpatialFeature(
                id=fid("air_conditioner"),
                kind="air_conditioner",
                geometry=((side_x, rng.uniform(y0 + 0.5, y1 - 0.5)),),
            )
        )
    # One television total, in the first room, facing inward.
    tx0, ty0, tx1, ty1 = template.rooms[0]
    tv_x = rng.uniform(tx0 + 0.5, tx1 - 0.5)
    features.append(
        SpatialFeature(
            id=fid("television"),
            kind="television",
            geometry=((tv_x, ty1 - 0.05),),
            orientation=-math.pi / 2.0,
        )
    )
    # One kitchen zone in a corner of the last room.
    kx0, ky0, kx1, ky1 = template.rooms[-1]
    corner = rng.choice([(kx0, ky0), (kx1 - 1.5, ky0), (kx0, ky1 - 1.5), (kx1 - 1.5, ky1 - 1.5)])
    features.append(
        SpatialFeature(
            id=fid("kitchen_zone"),
            kind="kitchen_zone",
            geometry=(
                (corner[0], corner[1]),
                (corner[0] + 1.5, corner[1]),
                (corner[0] + 1.5, corner[1] + 1.5),
                (corner[0], corner[1] + 1.5),
            ),
        )
    )
    # Kitchen zone must stay clear of tables.
    kitchen = features[-1]
    kc = kitchen.ref_point()
    if any(dist(kc, t.center) < t.bound_radius + 1.1 for t in tables):
        return None

    scene = SceneInstance(
        template_id=template.id,
        seed=seed,
        rooms=rooms,
        walls=walls_t,
        tables=tuple(tables),
        seats=tuple(seats),
        features=tuple(features),
        viewpoints=(),
        table_style=rng.randint(1, 8),
        chair_style=rng.randint(1, 6),
        config=config,
    )
    viewpoints = _viewpoint_grid(scene, config)
    scene = replace(scene, viewpoints=viewpoints)

    if not _seats_reachable(scene):
        return None
    if not _coverage_ok(scene, config):
        return None
    return scene


def _viewpoint_grid(scene: SceneInstance, config: GeomConfig) -> tuple[Viewpoint, ...]:
    points: list[Viewpoint] = []
    idx = 0
    for room in scene.rooms:
        (x0, y0), _, (x1, y1), _ = room.outline
        x = min(x0, x1) + 0.5
        while x < max(x0, x1) - 0.25:
            y = min(y0, y1) + 0.5
            while y < max(y0, y1) - 0.25:
                p = (x, y)
                if _walkable(scene, p, clearance=0.25):
                    points.append(Viewpoint(id=f"v{idx}", position=p))
                    idx += 1
                y += config.viewpoint_spacing
            x += config.viewpoint_spacing
    return tuple(points)


def _walkable(scene: SceneInstance, p: Point, clearance: float = 0.3) -> bool:
    if not any(room.contains(p, margin=0.05) for room in scene.rooms):
        return False
    for table in scene.tables:
        # Cheap bounding-circle rejection before any perimeter work.
        if dist(p, table.center) >= table.bound_radius + clearance:
            continue
        if polyline_distance(p, table.perimeter) < clearance and dist(
            p, table.center
        ) < table.bound_radius:
            return False
        if _point_in_polygon(p, table.perimeter):
            return False
    return True


def _point_in_polygon(p: Point, polygon: tuple[Point, ...]) -> bool:
    x, y = p
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xint:
                inside = not inside
    return inside


def _seats_reachable(scene: SceneInstance) -> bool:
    """Grid flood fill from exits; every seat needs a reachable cell nearby."""
    step = 0.3
    cells: dict[tuple[int, int], Point] = {}
    min_x = min(min(p[0] for p in r.outline) for r in scene.rooms)
    min_y = min(min(p[1] for p in r.outline) for r in scene.rooms)
    max_x = max(max(p[0] for p in r.outline) for r in scene.rooms)
    max_y = max(max(p[1] for p in r.outline) for r in scene.rooms)
    nx = int((max_x - min_x) / step) + 1
    ny = int((max_y - min_y) / step) + 1
    for i in range(nx):
        for j in range(ny):
            p = (min_x + i * step, min_y + j * step)
            if _walkable(scene, p):
                cells[(i, j)] = p

    starts = []
    for ex in (f for f in scene.features if f.kind == "exit"):
        ref = ex.ref_point()
        for key, p in cells.items():
            if dist(p, ref) <= 0.8:
                starts.append(key)
    if not starts:
        return False

    seen = set(starts)
    stack = list(starts)
    while stack:
        i, j = stack.pop()
        here = cells[(i, j)]
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            key = (i + di, j + dj)
            if key in cells and key not in seen:
                if line_of_sight(here, cells[key], scene.walls):
                    seen.add(key)
                    stack.append(key)

    reachable_points = [cells[k] for k in seen]
    for seat in scene.seats:
        if not any(dist(p, seat.position) <= 0.6 for p in reachable_points):
            return False
    return True


def _coverage_ok(scene: SceneInstance, config: GeomConfig) -> bool:
    """Every seat and feature must be visible from some viewpoint, and every
    seat must have a close-range viewpoint for reading tableware."""
    targets: list[tuple[Point, bool]] = [(s.position, True) for s in scene.seats]
    targets += [(f.ref_point(), False) for f in scene.features]
    for pos, needs_close in targets:
        vps = sorted(scene.viewpoints, key=lambda v: dist(v.position, pos))
        visible_from = None
        for vp in vps:
            d = dist(vp.position, pos)
            if d > config.observe_range:
                break
            if line_of_sight(vp.position, pos, scene.walls):
                visible_from = vp
                break
        if visible_from is None:
            return False
        if needs_close and dist(visible_from.position, pos) > config.close_inspect_range:
            return False
    return True


# ---------------------------------------------------------------------------
# Spatial predicates
# ---------------------------------------------------------------------------

def seat_adjacency(scene: SceneInstance) -> dict[str, set[str]]:
    """Immediate neighbors: same table, consecutive perimeter index."""
    by_table: dict[str, list[Seat]] = {}
    for seat in scene.seats:
        by_table.setdefault(seat.table_id, []).append(seat)
    adjacency: dict[str, set[str]] = {s.id: set() for s in scene.seats}
    for seats in by_table.values():
        seats = sorted(seats, key=lambda s: s.perimeter_index)
        n = len(seats)
        if n == 1:
            continue
        for i in range(n):
            j = (i + 1) % n
            if n == 2 and j < i:
                continue   # two-seat table: one adjacency pair, stored twice
            adjacency[seats[i].id].add(seats[j].id)
            adjacency[seats[j].id].add(seats[i].id)
    return adjacency


def distance_to(seat: Seat, feature: SpatialFeature) -> float:
    return polyline_distance(seat.position, feature.geometry)


def in_field_of_view(
    seat: Seat,
    feature: SpatialFeature,
    scene: SceneInstance,
    fov: float | None = None,
) -> bool:
    fov = fov if fov is not None else scene.config.seat_fov
    if not 0.0 < fov <= TWO_PI:
        raise ValueError("fov must be in (0, 2*pi]")
    target = feature.ref_point()
    if angle_diff(bearing(seat.position, target), seat.facing) > fov / 2.0:
        return False
    return line_of_sight(seat.position, target, scene.walls)


def neighbor_on_side(scene: SceneInstance, seat: Seat, side: str) -> str | None:
    """Seat id of the adjacent seat on the given hand side, if any.

    A neighbor counts as being "on" a side when the direction to it deviates
    from that side's axis by less than 45 degrees; a neighbor directly across
    the table blocks neither hand.
    """
    assert side in ("left", "right")
    offset = math.pi / 2.0 if side == "left" else -math.pi / 2.0
    side_dir = (seat.facing + offset) % TWO_PI
    adjacency = seat_adjacency(scene)
    for other_id in adjacency[seat.id]:
        other = scene.seat(other_id)
        if angle_diff(bearing(seat.position, other.position), side_dir) < math.pi / 4.0:
            return other_id
    return None


def viewpoint_observe(
    scene: SceneInstance, viewpoint_id: str, heading_index: int
) -> ObservationFrame:
    """Observe from a viewpoint along one of 8 compass headings."""
    if not 0 <= heading_index <= 7:
        raise ValueError("heading index must be 0..7")
    vp = scene.viewpoint(viewpoint_id)
    heading = TWO_PI * heading_index / 8.0
    config = scene.config
    visible_seats: list[str] = []
    visible_features: list[str] = []
    measurements: dict = {}

    def try_entity(entity_id: str, pos: Point, bucket: list[str], extra: dict):
        d = dist(vp.position, pos)
        if d > config.observe_range:
            return
        brg = bearing(vp.position, pos)
        if angle_diff(brg, heading) > config.observe_fov / 2.0:
            return
        if not line_of_sight(vp.position, pos, scene.walls):
            return
        bucket.append(entity_id)
        entry = {"distance": d, "bearing": brg}
        if d <= config.close_inspect_range:
            entry.update(extra)
        elif "table_id" in extra:
            entry["table_id"] = extra["table_id"]
        measurements[entity_id] = entry

    for seat in scene.seats:
        try_entity(
            seat.id,
            seat.position,
            visible_seats,
            {
                "table_id": seat.table_id,
                "tableware": seat.tableware,
                "facing": seat.facing,
                "perimeter_index": seat.perimeter_index,
            },
        )
    for feature in scene.features:
        ref = feature.ref_point()
        d = dist(vp.position, ref)
        if d > config.observe_range:
            continue
        brg = bearing(vp.position, ref)
        if angle_diff(brg, heading) > config.observe_fov / 2.0:
            continue
        if not line_of_sight(vp.position, ref, scene.walls):
            continue
        visible_features.append(feature.id)
        measurements[feature.id] = {
            "distance": d,
            "bearing": brg,
            "kind": feature.kind,
            "vertices": [
                (dist(vp.position, p), bearing(vp.position, p))
                for p in feature.geometry
            ],
        }
    return ObservationFrame(
        viewpoint_id=viewpoint_id,
        heading_index=heading_index,
        visible_seat_ids=tuple(visible_seats),
        visible_feature_ids=tuple(visible_features),
        measurements=measurements,
    )


# ---------------------------------------------------------------------------
# Ground-truth digest
# ---------------------------------------------------------------------------

def export_ground_truth_features(scene: SceneInstance) -> dict:
    """Complete per-seat digest sufficient to grade any embodied preference."""
    adjacency = seat_adjacency(scene)
    television = scene.features_of_kind("television")
    digest: dict = {"seats": {}, "config": {
        "near_distance": scene.config.near_distance,
        "away_distance": scene.config.away_distance,
        "seat_fov": scene.config.seat_fov,
    }}
    for seat in scene.seats:
        entry = {
            "table_id": seat.table_id,
            "perimeter_index": seat.perimeter_index,
            "position": list(seat.position),
            "facing": seat.facing,
            "tableware": seat.tableware,
            "neighbors": sorted(adjacency[seat.id]),
            "seat_on_left": neighbor_on_side(scene, seat, "left"),
            "seat_on_right": neighbor_on_side(scene, seat, "right"),
            "tv_visible": bool(television)
            and in_field_of_view(seat, television[0], scene),
        }
        for kind in ("window", "air_conditioner", "kitchen_zone", "exit"):
            feats = scene.features_of_kind(kind)
            entry[f"dist_{kind}"] = (
                min(distance_to(seat, f) for f in feats) if feats else math.inf
            )
        digest["seats"][seat.id] = entry
    return digest


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def scene_to_dict(scene: SceneInstance) -> dict:
    return {
        "template_id": scene.template_id,
        "seed": scene.seed,
        "units": {"length": "meters", "angle": "radians"},
        "rooms": [{"id": r.id, "outline": [list(p) for p in r.outline]} for r in scene.rooms],
        "walls": [[list(a), list(b)] for a, b in scene.walls],
        "tables": [
            {
                "id": t.id,
                "shape": t.shape,
                "center": list(t.center),
                "angle": t.angle,
                "perimeter": [list(p) for p in t.perimeter],
                "bound_radius": t.bound_radius,
            }
            for t in scene.tables
        ],
        "seats": [
            {
                "id": s.id,
                "table_id": s.table_id,
                "position": list(s.position),
                "facing": s.facing,
                "perimeter_index": s.perimeter_index,
                "tableware": s.tableware,
            }
            for s in scene.seats
        ],
        "features": [
            {
                "id": f.id,
                "kind": f.kind,
                "geometry": [list(p) for p in f.geometry],
                "orientation": f.orientation,
            }
            for f in scene.features
        ],
        "viewpoints": [
            {"id": v.id, "position": list(v.position)} for v in scene.viewpoints
        ],
        "table_style": scene.table_style,
        "chair_style": scene.chair_style,
    }


def scene_from_dict(data: dict, config: GeomConfig = DEFAULT_CONFIG) -> SceneInstance:
    return SceneInstance(
        template_id=data["template_id"],
        seed=data["seed"],
        rooms=tuple(
            Room(id=r["id"], outline=tuple(tuple(p) for p in r["outline"]))
            for r in data["rooms"]
        ),
        walls=tuple((tuple(a), tuple(b)) for a, b in data["walls"]),
        tables=tuple(
            Table(
                id=t["id"],
                shape=t["shape"],
                center=tuple(t["center"]),
                angle=t["angle"],
                perimeter=tuple(tuple(p) for p in t["perimeter"]),
                bound_radius=t["bound_radius"],
            )
            for t in data["tables"]
        ),
        seats=tuple(
            Seat(
                id=s["id"],
                table_id=s["table_id"],
                position=tuple(s["position"]),
                facing=s["facing"],
                perimeter_index=s["perimeter_index"],
                tableware=s["tableware"],
            )
            for s in data["seats"]
        ),
        features=tuple(
            SpatialFeature(
                id=f["id"],
                kind=f["kind"],
                geometry=tuple(tuple(p) for p in f["geometry"]),
                orientation=f.get("orientation"),
            )
            for f in data["features"]
        ),
        viewpoints=tuple(
            Viewpoint(id=v["id"], position=tuple(v["position"]))
            for v in data["viewpoints"]
        ),
        table_style=data["table_style"],
        chair_style=data["chair_style"],
        config=config,
    )
