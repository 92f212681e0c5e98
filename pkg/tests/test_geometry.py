"""Scene instantiation and spatial predicates, checked against independent
sampling-based oracles."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seatbench.geometry import (
    TEMPLATES,
    PlacementError,
    SpatialFeature,
    angle_diff,
    bearing,
    dist,
    distance_to,
    export_ground_truth_features,
    in_field_of_view,
    instantiate_scene,
    line_of_sight,
    point_segment_distance,
    polyline_distance,
    scene_from_dict,
    scene_to_dict,
    seat_adjacency,
    segments_intersect,
    template_seat_count,
    viewpoint_observe,
)

SEAT_COUNTS = {"A": 4, "B": 5, "C": 6, "D": 10, "E": 13}


# --- oracles ---------------------------------------------------------------

def boundary_sample_distance(p, polyline, samples=4000):
    """Distance oracle: densely sample each polyline segment."""
    if len(polyline) == 1:
        return dist(p, polyline[0])
    best = math.inf
    closed = polyline if len(polyline) == 2 else polyline + (polyline[0],)
    for a, b in zip(closed, closed[1:]):
        for i in range(samples + 1):
            t = i / samples
            q = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
            best = min(best, dist(p, q))
    return best


def rational_segments_cross(p1, p2, q1, q2):
    """Exact segment intersection by solving the 2x2 linear system with
    rational arithmetic; independent of the orientation-sign method."""
    from fractions import Fraction as F

    rx, ry = F(p2[0]) - F(p1[0]), F(p2[1]) - F(p1[1])
    sx, sy = F(q2[0]) - F(q1[0]), F(q2[1]) - F(q1[1])
    qpx, qpy = F(q1[0]) - F(p1[0]), F(q1[1]) - F(p1[1])
    denom = rx * sy - ry * sx
    if denom == 0:
        if qpx * ry - qpy * rx != 0:
            return False   # parallel, non-collinear
        # collinear: project onto the dominant axis and test overlap
        axis = 0 if abs(rx) >= abs(ry) else 1
        ps = sorted([F(p1[axis]), F(p2[axis])])
        qs = sorted([F(q1[axis]), F(q2[axis])])
        return max(ps[0], qs[0]) <= min(ps[1], qs[1])
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    return 0 <= t <= 1 and 0 <= u <= 1


def occlusion_oracle(src, dst, walls):
    """Visibility oracle built on the rational intersection test."""
    return not any(rational_segments_cross(src, dst, a, b) for a, b in walls)


# --- instantiation ---------------------------------------------------------

@pytest.mark.parametrize("template_id", sorted(TEMPLATES))
def test_templates_instantiate(template_id):
    scene = instantiate_scene(template_id, seed=0)
    assert len(scene.seats) == SEAT_COUNTS[template_id]
    assert scene.viewpoints, "coverage requires a non-empty viewpoint grid"


@pytest.mark.parametrize("template_id", sorted(TEMPLATES))
def test_instantiation_deterministic(template_id):
    a = instantiate_scene(template_id, seed=4)
    b = instantiate_scene(template_id, seed=4)
    assert scene_to_dict(a) == scene_to_dict(b)


def test_seeds_vary_layout():
    a = instantiate_scene("A", seed=1)
    b = instantiate_scene("A", seed=2)
    assert scene_to_dict(a) != scene_to_dict(b)


def test_template_seat_count_matches():
    for tid, n in SEAT_COUNTS.items():
        assert template_seat_count(tid) == n


def test_required_features_present():
    scene = instantiate_scene("E", seed=0)
    kinds = {f.kind for f in scene.features}
    assert {"window", "television", "air_conditioner", "kitchen_zone", "exit"} <= kinds
    assert len(scene.features_of_kind("television")) == 1


def test_seats_keep_clearance():
    scene = instantiate_scene("D", seed=3)
    for i, a in enumerate(scene.seats):
        for b in scene.seats[i + 1:]:
            assert dist(a.position, b.position) > 0.35


# --- adjacency -------------------------------------------------------------

def brute_adjacency(scene):
    """Oracle: enumerate same-table consecutive perimeter indices directly."""
    adj = {s.id: set() for s in scene.seats}
    for a in scene.seats:
        for b in scene.seats:
            if a.id == b.id or a.table_id != b.table_id:
                continue
            n = sum(1 for s in scene.seats if s.table_id == a.table_id)
            d = (a.perimeter_index - b.perimeter_index) % n
            if d in (1, n - 1):
                adj[a.id].add(b.id)
    return adj


@pytest.mark.parametrize("template_id", sorted(TEMPLATES))
def test_adjacency_matches_enumeration_oracle(template_id):
    scene = instantiate_scene(template_id, seed=6)
    assert seat_adjacency(scene) == brute_adjacency(scene)


def test_adjacency_never_crosses_tables():
    scene = instantiate_scene("E", seed=1)
    table_of = {s.id: s.table_id for s in scene.seats}
    for sid, neighbors in seat_adjacency(scene).items():
        for nb in neighbors:
            assert table_of[sid] == table_of[nb]


# --- distances and visibility ----------------------------------------------

def test_distance_to_matches_boundary_oracle():
    rng = random.Random(0)
    scenes = [instantiate_scene(t, seed=2) for t in sorted(TEMPLATES)]
    checked = 0
    while checked < 200:
        scene = rng.choice(scenes)
        seat = rng.choice(scene.seats)
        feature = rng.choice(scene.features)
        assert distance_to(seat, feature) == pytest.approx(
            boundary_sample_distance(seat.position, feature.geometry, samples=800),
            abs=1e-5,
        )
        checked += 1


def test_point_segment_distance_cases():
    assert point_segment_distance((0, 1), (0, 0), (2, 0)) == pytest.approx(1.0)
    assert point_segment_distance((-1, 0), (0, 0), (2, 0)) == pytest.approx(1.0)
    assert point_segment_distance((3, 4), (0, 0), (0, 0)) == pytest.approx(5.0)


def test_segments_intersect_cases():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))
    # collinear overlap counts as touching
    assert segments_intersect((0, 0), (2, 0), (1, 0), (3, 0))


def test_fov_agrees_with_occlusion_oracle():
    rng = random.Random(1)
    scene = instantiate_scene("E", seed=5)
    tv = scene.features_of_kind("television")[0]
    for seat in scene.seats:
        target = tv.ref_point()
        within_cone = (
            angle_diff(bearing(seat.position, target), seat.facing)
            <= scene.config.seat_fov / 2.0
        )
        visible = occlusion_oracle(seat.position, target, scene.walls)
        assert in_field_of_view(seat, tv, scene) == (within_cone and visible)


def test_line_of_sight_blocked_by_interior_wall():
    scene = instantiate_scene("E", seed=0)
    room0, room1 = scene.rooms[0], scene.rooms[1]
    p0 = room0.outline[0]
    a = (p0[0] + 1.0, p0[1] + 1.0)
    q0 = room1.outline[2]
    b = (q0[0] - 1.0, q0[1] - 1.0)
    blocked = not line_of_sight(a, b, scene.walls)
    assert blocked or occlusion_oracle(a, b, scene.walls)


# --- sides and observation -------------------------------------------------

def test_sides_are_mutually_exclusive():
    from seatbench.geometry import neighbor_on_side

    for template_id in sorted(TEMPLATES):
        scene = instantiate_scene(template_id, seed=8)
        for seat in scene.seats:
            left = neighbor_on_side(scene, seat, "left")
            right = neighbor_on_side(scene, seat, "right")
            if left is not None:
                assert left != right


def test_observation_close_range_reveals_details():
    scene = instantiate_scene("A", seed=0)
    revealed = set()
    for vp in scene.viewpoints:
        for heading in range(8):
            frame = viewpoint_observe(scene, vp.id, heading)
            for sid in frame.visible_seat_ids:
                m = frame.measurements[sid]
                if m["distance"] <= scene.config.close_inspect_range:
                    assert {"tableware", "facing", "perimeter_index"} <= set(m)
                    revealed.add(sid)
                else:
                    assert "tableware" not in m
    assert revealed == {s.id for s in scene.seats}


def test_observation_measures_exact_range_and_bearing():
    scene = instantiate_scene("B", seed=2)
    vp = scene.viewpoints[0]
    for heading in range(8):
        frame = viewpoint_observe(scene, vp.id, heading)
        for sid in frame.visible_seat_ids:
            seat = scene.seat(sid)
            m = frame.measurements[sid]
            assert m["distance"] == pytest.approx(dist(vp.position, seat.position))
            assert m["bearing"] == pytest.approx(bearing(vp.position, seat.position))


def test_observation_never_includes_walls():
    scene = instantiate_scene("E", seed=0)
    frame = viewpoint_observe(scene, scene.viewpoints[0].id, 0)
    text = str(frame.measurements)
    assert "wall" not in text


def test_digest_covers_every_seat():
    scene = instantiate_scene("D", seed=1)
    digest = export_ground_truth_features(scene)
    assert set(digest["seats"]) == {s.id for s in scene.seats}
    for entry in digest["seats"].values():
        assert entry["dist_window"] < math.inf
        assert isinstance(entry["tv_visible"], bool)


def test_scene_serialization_round_trip():
    scene = instantiate_scene("E", seed=9)
    clone = scene_from_dict(scene_to_dict(scene))
    assert scene_to_dict(clone) == scene_to_dict(scene)


# --- scalar helpers (property-based) ---------------------------------------

coord = st.floats(min_value=-50, max_value=50, allow_nan=False)


@given(ax=coord, ay=coord, bx=coord, by=coord)
@settings(max_examples=100, deadline=None)
def test_dist_symmetry(ax, ay, bx, by):
    assert dist((ax, ay), (bx, by)) == pytest.approx(dist((bx, by), (ax, ay)))


@given(a=st.floats(0, 2 * math.pi), b=st.floats(0, 2 * math.pi))
@settings(max_examples=100, deadline=None)
def test_angle_diff_bounded_and_symmetric(a, b):
    d = angle_diff(a, b)
    assert 0 <= d <= math.pi + 1e-9
    assert d == pytest.approx(angle_diff(b, a))


@given(px=coord, py=coord, ax=coord, ay=coord, bx=coord, by=coord)
@settings(max_examples=100, deadline=None)
def test_point_segment_distance_vs_samples(px, py, ax, ay, bx, by):
    d = point_segment_distance((px, py), (ax, ay), (bx, by))
    oracle = boundary_sample_distance((px, py), ((ax, ay), (bx, by)), samples=500)
    assert d <= oracle + 1e-9
    # sampling error is bounded by half the sample spacing
    assert d == pytest.approx(oracle, abs=dist((ax, ay), (bx, by)) / 500 + 1e-9)
