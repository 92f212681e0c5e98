"""Generation-by-construction of guaranteed-solvable scenario instances.

A ground-truth arrangement is fixed first; preferences are then sampled only
from kinds that hold at each NPC's ground-truth seat, and conflicts only
between pairs that ground truth keeps non-adjacent. A 70-step difficulty
ladder maps levels to scene templates and constraint budgets.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from . import geometry
from .constraints import (
    CONFLICT_KINDS,
    EMBODIED_KINDS,
    SOCIAL_GROUP_KINDS,
    SOCIAL_RELATION_KINDS,
    Conflict,
    Preference,
    check_embodied,
    check_social,
    conflict_compatible,
    constraint_from_dict,
    constraint_to_dict,
    make_preference,
)
from .geometry import SceneInstance, instantiate_scene, scene_from_dict, scene_to_dict, seat_adjacency, template_seat_count
from .world import TOPIC_TAGS, World, relation_between

SCHEMA_VERSION = 1
GENERATOR_VERSION = "seatbench-gen-1"

NUM_LEVELS = 70
LEVELS_PER_TEMPLATE = 14
TEMPLATE_ORDER = "ABCDE"

ARRANGEMENT_RETRY_BUDGET = 200
MAX_PREFS_PER_NPC = 5
MAX_CONFLICTS_PER_NPC = 2


@dataclass(frozen=True)
class DifficultyLevel:
    level: int
    template_id: str
    prefs_per_npc: tuple[int, int]       # inclusive range within 1..5
    conflicts_total: tuple[int, int]     # inclusive range of total conflicts
    strength_mix: tuple[float, float, float] = (1.0, 1.0, 1.0)


def difficulty_level(level: int) -> DifficultyLevel:
    """Map a level 1..70 onto (template, budgets); budgets are non-decreasing
    across the 14 steps of each template block."""
    if not 1 <= level <= NUM_LEVELS:
        raise ValueError(f"level {level} out of range 1..{NUM_LEVELS}")
    block = (level - 1) // LEVELS_PER_TEMPLATE
    step = (level - 1) % LEVELS_PER_TEMPLATE          # 0..13
    template_id = TEMPLATE_ORDER[block]
    n_seats = template_seat_count(template_id)
    pref_hi = 1 + (step * (MAX_PREFS_PER_NPC - 1)) // (LEVELS_PER_TEMPLATE - 1)
    pref_lo = max(1, pref_hi - 1)
    conflict_hi = (step * n_seats * 2) // (3 * (LEVELS_PER_TEMPLATE - 1))
    conflict_lo = conflict_hi // 2
    return DifficultyLevel(
        level=level,
        template_id=template_id,
        prefs_per_npc=(pref_lo, pref_hi),
        conflicts_total=(conflict_lo, conflict_hi),
    )


@dataclass(frozen=True)
class ScenarioInstance:
    id: str
    level: int
    seed: int
    scene: SceneInstance
    party: tuple[str, ...]
    preferences: tuple[Preference, ...]
    conflicts: tuple[Conflict, ...]
    ground_truth: dict[str, str]   # npc id -> seat id (withheld sidecar)

    @property
    def constraints(self) -> tuple:
        return self.preferences + self.conflicts


class GenerationError(Exception):
    """Instance generation exhausted its retry budget."""


def _satisfied_kinds_for(
    npc: str,
    assignment: dict[str, str],
    scene: SceneInstance,
    adjacency: dict[str, set[str]],
    w: World,
) -> list[str]:
    """Constraint kinds that grade 1 for this NPC under the assignment."""
    resident = w.resident(npc)
    seat = scene.seat(assignment[npc])
    kinds: list[str] = []
    for kind in EMBODIED_KINDS:
        pref = make_preference(npc, kind, 1)
        try:
            ok = check_embodied(pref, seat, scene, dominant_hand=resident.dominant_hand)
        except Exception:
            ok = 0
        if ok:
            kinds.append(kind)
    for kind in SOCIAL_RELATION_KINDS + SOCIAL_GROUP_KINDS:
        pref = make_preference(npc, kind, 1)
        if check_social(pref, assignment, adjacency, w):
            kinds.append(kind)
    for topic in TOPIC_TAGS:
        if topic not in resident.interests:
            continue   # only offer topics the NPC actually cares about
        pref = make_preference(npc, f"shared_interest_{topic}", 1)
        if check_social(pref, assignment, adjacency, w):
            kinds.append(f"shared_interest_{topic}")
    return kinds


def generate_instance(level: int, w: World, seed: int) -> ScenarioInstance:
    """Generate one guaranteed-solvable instance; deterministic given seed."""
    spec = difficulty_level(level)
    rng = random.Random(f"inst:{level}:{seed}")
    scene = instantiate_scene(spec.template_id, rng.randrange(2**31))
    adjacency = seat_adjacency(scene)
    seat_ids = [s.id for s in scene.seats]
    n = len(seat_ids)

    from .world import sample_party

    for _attempt in range(ARRANGEMENT_RETRY_BUDGET):
        party = sample_party(w, n, rng)
        seats_shuffled = list(seat_ids)
        rng.shuffle(seats_shuffled)
        ground_truth = dict(zip(party, seats_shuffled))

        preferences: list[Preference] = []
        feasible = True
        for npc in party:
            available = _satisfied_kinds_for(npc, ground_truth, scene, adjacency, w)
            lo, hi = spec.prefs_per_npc
            if len(available) < lo:
                feasible = False
                break
            count = min(rng.randint(lo, hi), len(available))
            chosen = rng.sample(available, count)
            for kind in chosen:
                strength = rng.choices((1, 2, 3), weights=spec.strength_mix)[0]
                preferences.append(make_preference(npc, kind, strength))
        if not feasible:
            continue

        conflicts = _sample_conflicts(spec, party, ground_truth, adjacency, w, rng)
        return ScenarioInstance(
            id=f"L{level:02d}-{seed}",
            level=level,
            seed=seed,
            scene=scene,
            party=tuple(party),
            preferences=tuple(preferences),
            conflicts=tuple(conflicts),
            ground_truth=ground_truth,
        )
    raise GenerationError(
        f"level {level}: no valid arrangement within {ARRANGEMENT_RETRY_BUDGET} retries"
    )


def _sample_conflicts(
    spec: DifficultyLevel,
    party: list[str],
    ground_truth: dict[str, str],
    adjacency: dict[str, set[str]],
    w: World,
    rng: random.Random,
) -> list[Conflict]:
    candidates: list[tuple[str, str, str]] = []
    for i in range(len(party)):
        for j in range(i + 1, len(party)):
            a, b = party[i], party[j]
            if ground_truth[b] in adjacency[ground_truth[a]]:
                continue   # ground truth must avoid every generated conflict
            if not relation_between(w, a, b):
                continue   # strangers have no conflicts
            for kind in CONFLICT_KINDS:
                if conflict_compatible(w, a, b, kind):
                    candidates.append((a, b, kind))
    lo, hi = spec.conflicts_total
    target = rng.randint(lo, hi) if hi > 0 else 0
    rng.shuffle(candidates)
    conflicts: list[Conflict] = []
    per_npc: dict[str, int] = {}
    used_pairs: set[frozenset] = set()
    for a, b, kind in candidates:
        if len(conflicts) >= target:
            break
        pair = frozenset((a, b))
        if pair in used_pairs:
            continue
        if per_npc.get(a, 0) >= MAX_CONFLICTS_PER_NPC:
            continue
        if per_npc.get(b, 0) >= MAX_CONFLICTS_PER_NPC:
            continue
        strength = rng.choices((1, 2, 3), weights=spec.strength_mix)[0]
        conflicts.append(Conflict(a=a, b=b, kind=kind, strength=strength))
        used_pairs.add(pair)
        per_npc[a] = per_npc.get(a, 0) + 1
        per_npc[b] = per_npc.get(b, 0) + 1
    return conflicts


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def instance_to_dict(inst: ScenarioInstance, include_ground_truth: bool = False) -> dict:
    data = {
        "schema_version": SCHEMA_VERSION,
        "id": inst.id,
        "level": inst.level,
        "seed": inst.seed,
        "scene": scene_to_dict(inst.scene),
        "party": list(inst.party),
        "preferences": [constraint_to_dict(p) for p in inst.preferences],
        "conflicts": [constraint_to_dict(c) for c in inst.conflicts],
    }
    if include_ground_truth:
        data["ground_truth"] = dict(inst.ground_truth)
    return data


def instance_from_dict(data: dict, ground_truth: dict[str, str] | None = None) -> ScenarioInstance:
    gt = data.get("ground_truth") or ground_truth or {}
    return ScenarioInstance(
        id=data["id"],
        level=data["level"],
        seed=data["seed"],
        scene=scene_from_dict(data["scene"]),
        party=tuple(data["party"]),
        preferences=tuple(
            constraint_from_dict(p) for p in data["preferences"]
        ),
        conflicts=tuple(constraint_from_dict(c) for c in data["conflicts"]),
        ground_truth=dict(gt),
    )


def dump_json(data: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_instance(inst: ScenarioInstance, out_dir: Path) -> tuple[Path, Path]:
    """Write the released instance file and the withheld ground-truth sidecar."""
    instance_path = out_dir / f"{inst.id}.json"
    sidecar_path = out_dir / f"{inst.id}.gt.json"
    dump_json(instance_to_dict(inst), instance_path)
    dump_json(
        {"schema_version": SCHEMA_VERSION, "id": inst.id, "ground_truth": dict(inst.ground_truth)},
        sidecar_path,
    )
    return instance_path, sidecar_path


def load_instance(path: str | Path, sidecar: str | Path | None = None) -> ScenarioInstance:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    gt = None
    if sidecar is not None:
        gt = json.loads(Path(sidecar).read_text(encoding="utf-8"))["ground_truth"]
    else:
        implied = Path(path).with_suffix("").with_suffix("")
        candidate = Path(str(path).replace(".json", ".gt.json"))
        if candidate.exists() and candidate != Path(path):
            gt = json.loads(candidate.read_text(encoding="utf-8"))["ground_truth"]
    return instance_from_dict(data, ground_truth=gt)


# ---------------------------------------------------------------------------
# Dataset assembly
# ---------------------------------------------------------------------------

def instance_kind_counts(inst: ScenarioInstance) -> dict[str, int]:
    counts: dict[str, int] = {}
    for c in inst.constraints:
        key = f"{c.kind}|{inst.scene.template_id}"
        counts[key] = counts.get(key, 0) + 1
    return counts


def iter_dataset(levels: list[int], per_level: int, w: World, seed: int):
    """Yield instances with per-instance seeds derived from the master seed."""
    for level in levels:
        for index in range(per_level):
            inst_seed = seed * 1_000_003 + level * 1_000 + index
            yield generate_instance(level, w, inst_seed)


def generate_dataset(
    levels: list[int],
    per_level: int,
    w: World,
    seed: int,
    out_dir: str | Path | None = None,
) -> dict:
    """Generate per_level instances per level; returns the dataset manifest."""
    if per_level < 1:
        raise ValueError("per_level must be >= 1")
    out = Path(out_dir) if out_dir is not None else None
    entries = []
    totals: dict[str, int] = {}
    for inst in iter_dataset(levels, per_level, w, seed):
        counts = instance_kind_counts(inst)
        for k, v in counts.items():
            totals[k] = totals.get(k, 0) + v
        entry = {
            "id": inst.id,
            "level": inst.level,
            "seed": inst.seed,
            "template": inst.scene.template_id,
            "kind_counts": counts,
        }
        if out is not None:
            instance_path, sidecar_path = write_instance(inst, out)
            entry["path"] = instance_path.name
            entry["sidecar"] = sidecar_path.name
        entries.append(entry)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "generator_version": GENERATOR_VERSION,
        "seed": seed,
        "levels": list(levels),
        "per_level": per_level,
        "instances": entries,
        "kind_counts": totals,
    }
    if out is not None:
        dump_json(manifest, out / "manifest.json")
    return manifest


# ---------------------------------------------------------------------------
# Distribution matching
# ---------------------------------------------------------------------------

def _normalize(counts: dict[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {k: v / total for k, v in counts.items()}


def total_variation_distance(counts_a: dict[str, int], counts_b: dict[str, int]) -> float:
    pa, pb = _normalize(counts_a), _normalize(counts_b)
    keys = set(pa) | set(pb)
    return 0.5 * sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in keys)


def _merge(counts_list) -> dict[str, int]:
    merged: dict[str, int] = {}
    for counts in counts_list:
        for k, v in counts.items():
            merged[k] = merged.get(k, 0) + v
    return merged


def select_representative_subset(manifest: dict, k: int) -> list[str]:
    """Pick k instances whose joint (kind, template) frequency profile is
    closest to the full set, by greedy marginal matching plus 2-swap
    refinement. Deterministic; ties break on instance id."""
    entries = manifest["instances"]
    if k == 0:
        raise ValueError("subset size must be positive")
    if k > len(entries):
        raise ValueError("subset size exceeds dataset size")
    full_profile = manifest["kind_counts"]
    by_id = {e["id"]: e["kind_counts"] for e in entries}
    ordered_ids = sorted(by_id)

    chosen: list[str] = []
    while len(chosen) < k:
        best_id, best_tv = None, None
        chosen_counts = _merge(by_id[i] for i in chosen)
        for cand in ordered_ids:
            if cand in chosen:
                continue
            tv = total_variation_distance(
                _merge([chosen_counts, by_id[cand]]), full_profile
            )
            if best_tv is None or tv < best_tv - 1e-12:
                best_id, best_tv = cand, tv
        chosen.append(best_id)

    # 2-swap refinement: exchange one member for one outsider while it helps.
    improved = True
    while improved:
        improved = False
        current_tv = total_variation_distance(
            _merge(by_id[i] for i in chosen), full_profile
        )
        for inside in list(chosen):
            for outside in ordered_ids:
                if outside in chosen:
                    continue
                trial = [i for i in chosen if i != inside] + [outside]
                tv = total_variation_distance(
                    _merge(by_id[i] for i in trial), full_profile
                )
                if tv < current_tv - 1e-12:
                    chosen = trial
                    current_tv = tv
                    improved = True
                    break
            if improved:
                break
    return sorted(chosen)
