"""Acceptance gate: every stated criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the summary lines.
"""

import json
import random
import time

import pytest

from seatbench.constraints import (
    ALL_KINDS,
    CONFLICT_KINDS,
    Conflict,
    conflict_compatible,
    constraint_id,
    make_preference,
)
from seatbench.dialogue import parse_utterance, render_utterance
from seatbench.generator import (
    generate_dataset,
    generate_instance,
    total_variation_distance,
)
from seatbench.geometry import (
    TEMPLATES,
    angle_diff,
    bearing,
    distance_to,
    export_ground_truth_features,
    in_field_of_view,
    instantiate_scene,
    viewpoint_observe,
)
from seatbench.protocol import reconstruct_digest_from_frames
from seatbench.scoring import (
    prioritization_gap,
    remap,
    remap_raw,
    score_instance,
)
from seatbench.solvers import (
    RepairAgent,
    reflect_loop,
    solve_brute_force,
    solve_exact,
    solve_greedy,
)

from test_geometry import boundary_sample_distance, occlusion_oracle


def verdict(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


@pytest.fixture(scope="module")
def seventy_set(world):
    return [generate_instance(level, world, 0) for level in range(1, 71)]


# --- primary criteria -------------------------------------------------------

def test_solvability_guarantee(world):
    """1,000 instances across all 70 levels: ground truth fully satisfied,
    scaled score 99.3 +/- 0.05, within 60 s."""
    start = time.perf_counter()
    n = 0
    all_ok = True
    for rep in range(15):
        for level in range(1, 71):
            if n >= 1000:
                break
            inst = generate_instance(level, world, 100 + rep)
            report = score_instance(inst, inst.ground_truth, world)
            if not report.fully_satisfied:
                all_ok = False
            if abs(report.scaled_score - 99.3) > 0.05:
                all_ok = False
            n += 1
    elapsed = time.perf_counter() - start
    verdict(
        "solvability: 1000 ground truths fully satisfied at 99.3 +/- 0.05",
        all_ok and n == 1000 and elapsed <= 60.0,
        f"n={n}, elapsed={elapsed:.1f}s",
    )


def test_remap_fidelity():
    """Printed quintic values and the clamped negative dip."""
    ok = (
        remap_raw(0.0) == 0.0
        and abs(remap_raw(1.0) - 0.993) <= 0.001
        and abs(remap_raw(0.5) - 0.0729) <= 0.0005
        and abs(remap_raw(0.8) - 0.576) <= 0.001
        and remap_raw(0.015) < 0.0
        and remap(0.015) == 0.0
    )
    verdict("remap fidelity: F(0), F(0.5), F(0.8), F(1), clamp at 0.015", ok)


def test_exact_solver_oracle_equivalence(world):
    """100 instances with <= 6 seats: branch-and-bound equals exhaustive
    enumeration exactly, <= 10 s total."""
    small_levels = [lv for lv in range(1, 43)]   # templates A-C: 4-6 seats
    start = time.perf_counter()
    checked = 0
    agree = True
    seed = 0
    while checked < 100:
        level = small_levels[checked % len(small_levels)]
        inst = generate_instance(level, world, 500 + seed)
        seed += 1
        best, _ = solve_exact(inst, world)
        bb = score_instance(inst, best, world).scaled_score
        _, brute = solve_brute_force(inst, world)
        if bb != pytest.approx(brute, abs=1e-9):
            agree = False
        checked += 1
    elapsed = time.perf_counter() - start
    verdict(
        "exact solver equals exhaustive enumeration on 100 small instances",
        agree and elapsed <= 10.0,
        f"elapsed={elapsed:.1f}s",
    )


def test_geometry_oracles():
    """distance_to within 1e-6 of the boundary-sampling oracle on 1,000
    pairs; in_field_of_view agrees with the occlusion oracle on 1,000 cases."""
    rng = random.Random(0)
    scenes = [instantiate_scene(t, seed=s) for t in sorted(TEMPLATES) for s in range(3)]

    dist_ok = True
    for _ in range(1000):
        scene = rng.choice(scenes)
        seat = rng.choice(scene.seats)
        feature = rng.choice(scene.features)
        oracle = boundary_sample_distance(seat.position, feature.geometry, samples=4000)
        if abs(distance_to(seat, feature) - oracle) > 1e-6:
            dist_ok = False

    fov_ok = True
    cases = 0
    while cases < 1000:
        scene = rng.choice(scenes)
        seat = rng.choice(scene.seats)
        feature = rng.choice(scene.features)
        target = feature.ref_point()
        within = (
            angle_diff(bearing(seat.position, target), seat.facing)
            <= scene.config.seat_fov / 2.0
        )
        visible = occlusion_oracle(seat.position, target, scene.walls)
        if in_field_of_view(seat, feature, scene) != (within and visible):
            fov_ok = False
        cases += 1

    verdict("geometry: distance oracle within 1e-6 on 1000 pairs", dist_ok)
    verdict("geometry: fov agrees with occlusion oracle on 1000 cases", fov_ok)


def test_dialogue_round_trip(world):
    """parse(render(x)) == x for 41 kinds x 3 strengths x 100 seeds."""
    failures = 0
    conflict_pairs = {}
    for kind in CONFLICT_KINDS:
        conflict_pairs[kind] = next(
            pair
            for r in world.relationships
            for pair in ((r.a, r.b), (r.b, r.a))
            if conflict_compatible(world, pair[0], pair[1], kind)
        )
    owner = world.residents[0].id
    for kind in ALL_KINDS:
        for strength in (1, 2, 3):
            if kind in CONFLICT_KINDS:
                a, b = conflict_pairs[kind]
                original = Conflict(a=a, b=b, kind=kind, strength=strength)
                speaker = a
            else:
                original = make_preference(owner, kind, strength)
                speaker = owner
            for seed in range(100):
                text = render_utterance(original, world, random.Random(seed))
                parsed = parse_utterance(text, world, speaker)
                if (
                    constraint_id(parsed) != constraint_id(original)
                    or parsed.strength != strength
                ):
                    failures += 1
    verdict(
        "dialogue round trip: 41 kinds x 3 strengths x 100 seeds",
        failures == 0,
        f"failures={failures}",
    )


def test_reflection_loop_improvement(world, seventy_set):
    """Best-so-far non-decreasing on all 70; strict improvement over
    iteration 0 on >= 60% of imperfect starts."""
    monotone = True
    imperfect = 0
    improved = 0
    for inst in seventy_set:
        _, trace = reflect_loop(RepairAgent(inst, world), inst, world)
        bests = [s.best_score for s in trace.steps]
        if any(b2 < b1 - 1e-9 for b1, b2 in zip(bests, bests[1:])):
            monotone = False
        first = trace.steps[0].score
        if first < 99.3 - 0.05:
            imperfect += 1
            if max(s.score for s in trace.steps) > first + 1e-9:
                improved += 1
    rate = improved / imperfect if imperfect else 1.0
    verdict(
        "reflection loop: monotone best, >= 60% strict improvement",
        monotone and rate >= 0.6,
        f"improved {improved}/{imperfect} ({100 * rate:.0f}%)",
    )


def test_distribution_consistency(world):
    """70 one-per-level instances vs a 7,000-instance run: total variation
    distance over the (kind, template) profile <= 0.15."""
    small = generate_dataset(list(range(1, 71)), 1, world, seed=0)
    big = generate_dataset(list(range(1, 71)), 100, world, seed=1)
    tv = total_variation_distance(small["kind_counts"], big["kind_counts"])
    verdict(
        "distribution consistency: TV(70-set, 7000-set) <= 0.15",
        tv <= 0.15,
        f"tv={tv:.4f}",
    )


def test_pg_metric_sanity(world, seventy_set):
    """Oracle PG within 1 point of zero; weight-aware greedy PG >= blind."""
    oracle_reports = [
        score_instance(inst, inst.ground_truth, world) for inst in seventy_set
    ]
    oracle_pg = prioritization_gap(oracle_reports)

    aware_reports = []
    blind_reports = []
    for i, inst in enumerate(seventy_set):
        aware_reports.append(
            score_instance(inst, solve_greedy(inst, world), world)
        )
        blind_reports.append(
            score_instance(
                inst,
                solve_greedy(
                    inst, world, rng=random.Random(i), weight_aware=False
                ),
                world,
            )
        )
    aware_pg = prioritization_gap(aware_reports)
    blind_pg = prioritization_gap(blind_reports)
    verdict(
        "PG sanity: oracle PG = 0 +/- 1 point",
        abs(oracle_pg) <= 1.0,
        f"oracle_pg={oracle_pg:.2f}",
    )
    verdict(
        "PG sanity: weight-aware greedy PG >= weight-blind",
        aware_pg >= blind_pg,
        f"aware={aware_pg:.2f}, blind={blind_pg:.2f}",
    )


def test_gt_perception_ablation_direction(world, seventy_set):
    """Observed-mode repair agent <= gt-perception repair agent on >= 90%."""
    ok = 0
    for inst in seventy_set:
        frames = [
            viewpoint_observe(inst.scene, vp.id, h)
            for vp in inst.scene.viewpoints
            for h in range(8)
        ]
        observed = reconstruct_digest_from_frames(inst.scene, frames)
        gt = export_ground_truth_features(inst.scene)
        a_obs, _ = reflect_loop(RepairAgent(inst, world, digest=observed), inst, world)
        a_gt, _ = reflect_loop(RepairAgent(inst, world, digest=gt), inst, world)
        s_obs = score_instance(inst, a_obs, world).scaled_score
        s_gt = score_instance(inst, a_gt, world).scaled_score
        if s_obs <= s_gt + 1e-9:
            ok += 1
    verdict(
        "gt-perception ablation: observed <= gt on >= 90% of 70-set",
        ok >= 63,
        f"{ok}/70",
    )


# --- secondary criteria -----------------------------------------------------

@pytest.fixture(scope="module")
def ui_client(world, tmp_path_factory):
    from fastapi.testclient import TestClient

    from seatbench.generator import write_instance
    from seatbench.server import create_app

    data_dir = tmp_path_factory.mktemp("ui-data")
    instances = [generate_instance(level, world, 77) for level in
                 (1, 8, 16, 24, 31, 38, 46, 53, 61, 68)]
    for inst in instances:
        write_instance(inst, data_dir)
    return TestClient(create_app(data_dir, w=world)), instances, data_dir


def test_ui_scoring_parity(world, ui_client, tmp_path):
    """10 scripted sessions: displayed score equals cmd_eval on the exported
    answer to all printed digits; reflection reasons byte-identical."""
    from seatbench.cli import main as cli_main
    from seatbench.scoring import reflect

    client, instances, data_dir = ui_client
    parity = True
    reasons_match = True
    for inst in instances:
        sid = client.post(
            "/api/v1/sessions", json={"instance_id": inst.id}
        ).json()["session_id"]
        assignment = inst.ground_truth
        ui_reflection = client.post(
            f"/api/v1/sessions/{sid}/propose", json={"assignment": assignment}
        ).json()
        cli_reflection = reflect(inst, assignment, world).to_dict()
        if ui_reflection["entries"] != cli_reflection["entries"]:
            reasons_match = False

        exported = client.get(f"/api/v1/sessions/{sid}/answer").json()
        answer_path = tmp_path / f"{inst.id}-answer.json"
        answer_path.write_text(json.dumps(exported))
        displayed = client.post(
            f"/api/v1/sessions/{sid}/finalize", json={"assignment": assignment}
        ).json()["scaled_score"]

        instance_path = data_dir / f"{inst.id}.json"
        report_path = tmp_path / f"{inst.id}-report.json"
        cli_main(["eval", str(instance_path), str(answer_path),
                  "--out", str(report_path)])
        evaluated = json.loads(report_path.read_text())["scaled_score"]
        if f"{displayed:.10f}" != f"{evaluated:.10f}":
            parity = False
    verdict("ui parity: finalize score equals cmd_eval on exported answer", parity)
    verdict("ui parity: reflection reasons byte-identical to CLI", reasons_match)


def test_ui_hygiene_scan(world, ui_client):
    """Full scripted session; no response contains a ground-truth pair."""
    client, instances, _ = ui_client
    inst = instances[0]
    bodies = [client.get("/api/v1/instances").text,
              client.get(f"/api/v1/instances/{inst.id}").text]
    opened = client.post("/api/v1/sessions", json={"instance_id": inst.id})
    bodies.append(opened.text)
    sid = opened.json()["session_id"]
    for npc in inst.party:
        slot = 0
        while True:
            reply = client.post(
                f"/api/v1/sessions/{sid}/query",
                json={"npc": npc, "slot": slot},
            )
            bodies.append(reply.text)
            if reply.status_code != 200 or reply.json().get("sentinel"):
                break
            slot += 1
    scrambled = dict(
        zip(sorted(inst.party), sorted(s.id for s in inst.scene.seats))
    )
    bodies.append(
        client.post(
            f"/api/v1/sessions/{sid}/propose", json={"assignment": scrambled}
        ).text
    )
    leaks = 0
    for body in bodies:
        for npc, seat in inst.ground_truth.items():
            if f'"{npc}": "{seat}"' in body or f'"{npc}":"{seat}"' in body:
                leaks += 1
    verdict("ui hygiene: zero ground-truth pairs in serve responses",
            leaks == 0, f"leaks={leaks}")
