"""Instance generation: solvability by construction, the difficulty ladder,
serialization, and dataset assembly."""

import json

import pytest

from seatbench.generator import (
    difficulty_level,
    generate_dataset,
    generate_instance,
    instance_from_dict,
    instance_kind_counts,
    instance_to_dict,
    load_instance,
    select_representative_subset,
    total_variation_distance,
    write_instance,
)
from seatbench.geometry import seat_adjacency, template_seat_count
from seatbench.scoring import score_instance
from seatbench.world import are_strangers


def test_level_to_template_mapping():
    assert difficulty_level(1).template_id == "A"
    assert difficulty_level(14).template_id == "A"
    assert difficulty_level(15).template_id == "B"
    assert difficulty_level(70).template_id == "E"


def test_level_range_enforced():
    with pytest.raises(ValueError):
        difficulty_level(0)
    with pytest.raises(ValueError):
        difficulty_level(71)


def test_difficulty_monotone_within_template():
    for base in (1, 15, 29, 43, 57):
        prev = difficulty_level(base)
        for level in range(base + 1, base + 14):
            cur = difficulty_level(level)
            assert cur.prefs_per_npc[1] >= prev.prefs_per_npc[1]
            assert cur.conflicts_total[1] >= prev.conflicts_total[1]
            prev = cur


def test_ground_truth_is_bijection(world, instances_per_template):
    for inst in instances_per_template:
        seats = set(inst.ground_truth.values())
        assert set(inst.ground_truth) == set(inst.party)
        assert len(seats) == len(inst.party)
        assert len(inst.party) == template_seat_count(inst.scene.template_id)


def test_ground_truth_satisfies_everything(world, instances_per_template):
    for inst in instances_per_template:
        report = score_instance(inst, inst.ground_truth, world)
        assert report.fully_satisfied
        assert report.scaled_score == pytest.approx(99.3, abs=0.05)


def test_preference_counts_respect_level(world):
    for level in (1, 14, 35, 70):
        spec = difficulty_level(level)
        inst = generate_instance(level, world, 5)
        lo, hi = spec.prefs_per_npc
        per_npc = {npc: 0 for npc in inst.party}
        for p in inst.preferences:
            per_npc[p.owner] += 1
        for npc, n in per_npc.items():
            assert lo <= n <= hi, (level, npc, n)


def test_conflicts_connect_non_strangers(world, instances_per_template):
    for inst in instances_per_template:
        for c in inst.conflicts:
            assert not are_strangers(world, c.a, c.b)


def test_conflict_pairs_unique_and_bounded(world, large_instance):
    pairs = [frozenset((c.a, c.b)) for c in large_instance.conflicts]
    assert len(pairs) == len(set(pairs))
    per_npc = {}
    for c in large_instance.conflicts:
        per_npc[c.a] = per_npc.get(c.a, 0) + 1
        per_npc[c.b] = per_npc.get(c.b, 0) + 1
    assert all(n <= 2 for n in per_npc.values())


def test_generation_deterministic(world):
    a = generate_instance(25, world, 9)
    b = generate_instance(25, world, 9)
    assert instance_to_dict(a, include_ground_truth=True) == instance_to_dict(
        b, include_ground_truth=True
    )


def test_instance_serialization_round_trip(world, medium_instance):
    data = instance_to_dict(medium_instance, include_ground_truth=True)
    clone = instance_from_dict(json.loads(json.dumps(data)))
    assert instance_to_dict(clone, include_ground_truth=True) == data


def test_write_and_load_with_sidecar(world, small_instance, tmp_path):
    instance_path, sidecar = write_instance(small_instance, tmp_path)
    assert instance_path.exists() and sidecar.exists()
    released = json.loads(instance_path.read_text())
    assert "ground_truth" not in released
    loaded = load_instance(instance_path)
    assert loaded.ground_truth == small_instance.ground_truth


def test_generate_dataset_manifest(world, tmp_path):
    manifest = generate_dataset([1, 2], 2, world, seed=0, out_dir=tmp_path)
    assert len(manifest["instances"]) == 4
    for entry in manifest["instances"]:
        assert (tmp_path / entry["path"]).name == entry["path"]
    total = sum(manifest["kind_counts"].values())
    recount = 0
    for entry in manifest["instances"]:
        inst = load_instance(tmp_path / entry["path"])
        recount += sum(instance_kind_counts(inst).values())
    assert total == recount


def test_total_variation_distance_properties():
    assert total_variation_distance({"a": 1}, {"a": 5}) == 0.0
    assert total_variation_distance({"a": 1}, {"b": 1}) == 1.0
    assert 0.0 < total_variation_distance({"a": 3, "b": 1}, {"a": 1, "b": 3}) < 1.0


def test_representative_subset_selection(world):
    manifest = generate_dataset(list(range(1, 11)), 3, world, seed=2)
    chosen = select_representative_subset(manifest, 10)
    assert len(chosen) == 10
    ids = {e["id"] for e in manifest["instances"]}
    assert set(chosen) <= ids
    # determinism
    assert chosen == select_representative_subset(manifest, 10)
