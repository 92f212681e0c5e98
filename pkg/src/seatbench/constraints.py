"""Preference and conflict taxonomy with strength weights, plus the
evaluation predicates that grade each kind against a scene and assignment.

Grades are binary: 1 when satisfied (for conflicts: when avoided), else 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import geometry
from .geometry import SceneInstance, Seat
from .world import JOB_SECTORS, TOPIC_TAGS, World, relation_between

# --- Taxonomy --------------------------------------------------------------

EMBODIED_KINDS = (
    "near_window",
    "away_from_window",
    "tv_in_view",
    "near_air_conditioner",
    "away_from_air_conditioner",
    "near_kitchen",
    "away_from_kitchen",
    "near_exit",
    "tableware_chopsticks",
    "tableware_cutlery",
    "dominant_hand_clearance",
)

SOCIAL_RELATION_KINDS = (
    "adjacent_to_spouse",
    "adjacent_to_parent_or_child",
    "adjacent_to_sibling",
    "adjacent_to_grandparent_or_grandchild",
    "adjacent_to_in_law",
    "adjacent_to_friend",
    "adjacent_to_neighbor",
    "adjacent_to_colleague_or_superior",
    "adjacent_to_classmate_or_teacher",
)

SOCIAL_GROUP_KINDS = (
    "adjacent_to_peer_age_band",
    "adjacent_to_same_gender",
    "adjacent_to_same_job_sector",
    "adjacent_to_same_income_level",
    "adjacent_to_highly_educated",
)

SOCIAL_TOPIC_KINDS = tuple(f"shared_interest_{t}" for t in TOPIC_TAGS)

SOCIAL_KINDS = SOCIAL_RELATION_KINDS + SOCIAL_GROUP_KINDS + SOCIAL_TOPIC_KINDS

CONFLICT_KINDS = (
    "spousal_quarrel",
    "parent_child_dispute",
    "sibling_rivalry",
    "in_law_friction",
    "grandparent_generation_dispute",
    "friend_falling_out",
    "neighbor_property_dispute",
    "colleague_rivalry",
    "superior_subordinate_grievance",
    "teacher_student_tension",
    "classmate_rivalry",
    "workplace_income_dispute",
)

assert len(EMBODIED_KINDS) == 11
assert len(SOCIAL_KINDS) == 18
assert len(CONFLICT_KINDS) == 12

ALL_KINDS = EMBODIED_KINDS + SOCIAL_KINDS + CONFLICT_KINDS

# Social subcategories, used by the fine-grained scoring view.
SOCIAL_SUBCATEGORY = (
    {k: "relation" for k in SOCIAL_RELATION_KINDS}
    | {k: "group" for k in SOCIAL_GROUP_KINDS}
    | {k: "topic" for k in SOCIAL_TOPIC_KINDS}
)

# Relation kinds (from world.relation_between, including ":inverse" forms)
# that satisfy each adjacency preference.
RELATION_PREF_MATCHES: dict[str, frozenset[str]] = {
    "adjacent_to_spouse": frozenset({"spouse"}),
    "adjacent_to_parent_or_child": frozenset({"parent_of", "parent_of:inverse"}),
    "adjacent_to_sibling": frozenset({"sibling"}),
    "adjacent_to_grandparent_or_grandchild": frozenset(
        {"grandparent_of", "grandparent_of:inverse"}
    ),
    "adjacent_to_in_law": frozenset({"in_law"}),
    "adjacent_to_friend": frozenset({"friend"}),
    "adjacent_to_neighbor": frozenset({"neighbor"}),
    "adjacent_to_colleague_or_superior": frozenset(
        {"colleague", "superior_of", "superior_of:inverse"}
    ),
    "adjacent_to_classmate_or_teacher": frozenset(
        {"classmate", "teacher_of", "teacher_of:inverse"}
    ),
}

# Relation kinds a pair must share for each conflict kind to be plausible.
CONFLICT_COMPATIBILITY: dict[str, frozenset[str]] = {
    "spousal_quarrel": frozenset({"spouse"}),
    "parent_child_dispute": frozenset({"parent_of", "parent_of:inverse"}),
    "sibling_rivalry": frozenset({"sibling"}),
    "in_law_friction": frozenset({"in_law"}),
    "grandparent_generation_dispute": frozenset(
        {"grandparent_of", "grandparent_of:inverse"}
    ),
    "friend_falling_out": frozenset({"friend"}),
    "neighbor_property_dispute": frozenset({"neighbor"}),
    "colleague_rivalry": frozenset({"colleague"}),
    "superior_subordinate_grievance": frozenset(
        {"superior_of", "superior_of:inverse"}
    ),
    "teacher_student_tension": frozenset({"teacher_of", "teacher_of:inverse"}),
    "classmate_rivalry": frozenset({"classmate"}),
    "workplace_income_dispute": frozenset(
        {"colleague", "superior_of", "superior_of:inverse"}
    ),
}

PEER_AGE_BAND = 8           # years of age difference counted as "peers"
HIGH_EDUCATION_LEVEL = 3

STRENGTHS = (1, 2, 3)


@dataclass(frozen=True)
class Preference:
    owner: str
    category: str        # "embodied" | "social"
    kind: str
    strength: int
    topic: str | None = None   # set for shared_interest kinds

    def __post_init__(self):
        if self.category == "embodied":
            assert self.kind in EMBODIED_KINDS, self.kind
        elif self.category == "social":
            assert self.kind in SOCIAL_KINDS, self.kind
        else:
            raise ValueError(f"bad category {self.category}")
        assert self.strength in STRENGTHS
        if self.kind.startswith("shared_interest_"):
            assert self.topic == self.kind.removeprefix("shared_interest_")


@dataclass(frozen=True)
class Conflict:
    a: str
    b: str
    kind: str
    strength: int

    def __post_init__(self):
        assert self.kind in CONFLICT_KINDS, self.kind
        assert self.a != self.b
        assert self.strength in STRENGTHS


Constraint = Preference | Conflict


def make_preference(owner: str, kind: str, strength: int) -> Preference:
    if kind in EMBODIED_KINDS:
        return Preference(owner=owner, category="embodied", kind=kind, strength=strength)
    topic = kind.removeprefix("shared_interest_") if kind.startswith("shared_interest_") else None
    return Preference(
        owner=owner, category="social", kind=kind, strength=strength, topic=topic
    )


class MissingFeatureError(Exception):
    """The scene lacks a feature kind referenced by an embodied preference."""


# --- Embodied evaluation ---------------------------------------------------

_FEATURE_FOR_KIND = {
    "near_window": "window",
    "away_from_window": "window",
    "near_air_conditioner": "air_conditioner",
    "away_from_air_conditioner": "air_conditioner",
    "near_kitchen": "kitchen_zone",
    "away_from_kitchen": "kitchen_zone",
    "near_exit": "exit",
    "tv_in_view": "television",
}


def _min_feature_distance(seat: Seat, scene: SceneInstance, kind: str) -> float:
    feats = scene.features_of_kind(kind)
    if not feats:
        raise MissingFeatureError(f"scene has no feature of kind {kind}")
    return min(geometry.distance_to(seat, f) for f in feats)


def check_embodied(
    pref: Preference,
    seat: Seat,
    scene: SceneInstance,
    dominant_hand: str | None = None,
) -> int:
    """Grade an embodied preference for a seat. ``dominant_hand`` is the
    owner's hand, needed only for dominant_hand_clearance."""
    assert pref.category == "embodied"
    cfg = scene.config
    kind = pref.kind
    if kind in ("tableware_chopsticks", "tableware_cutlery"):
        want = "chopsticks" if kind.endswith("chopsticks") else "cutlery"
        return int(seat.tableware == want)
    if kind == "dominant_hand_clearance":
        hand = dominant_hand or "right"
        return int(geometry.neighbor_on_side(scene, seat, hand) is None)
    if kind == "tv_in_view":
        tvs = scene.features_of_kind("television")
        if not tvs:
            raise MissingFeatureError("scene has no television")
        return int(any(geometry.in_field_of_view(seat, tv, scene) for tv in tvs))
    feature_kind = _FEATURE_FOR_KIND[kind]
    d = _min_feature_distance(seat, scene, feature_kind)
    if kind.startswith("near_"):
        return int(d <= cfg.near_distance)
    return int(d >= cfg.away_distance)


# --- Social evaluation -----------------------------------------------------

def _social_match(pref: Preference, owner, neighbor, w: World) -> bool:
    kind = pref.kind
    if kind in RELATION_PREF_MATCHES:
        rels = relation_between(w, owner.id, neighbor.id)
        return bool(rels & RELATION_PREF_MATCHES[kind])
    if kind == "adjacent_to_peer_age_band":
        return abs(owner.age - neighbor.age) <= PEER_AGE_BAND
    if kind == "adjacent_to_same_gender":
        return owner.gender == neighbor.gender
    if kind == "adjacent_to_same_job_sector":
        return (
            JOB_SECTORS.get(owner.job) == JOB_SECTORS.get(neighbor.job)
            and JOB_SECTORS.get(owner.job) not in (None, "none")
        )
    if kind == "adjacent_to_same_income_level":
        return owner.income_level == neighbor.income_level
    if kind == "adjacent_to_highly_educated":
        return neighbor.education_level >= HIGH_EDUCATION_LEVEL
    if kind.startswith("shared_interest_"):
        return pref.topic in neighbor.interests
    raise ValueError(f"unknown social kind {kind}")


def check_social(
    pref: Preference,
    assignment: dict[str, str],
    adjacency: dict[str, set[str]],
    w: World,
) -> int:
    """Grade a social preference: some adjacent NPC must match the predicate."""
    assert pref.category == "social"
    owner = w.resident(pref.owner)
    seat_id = assignment[pref.owner]
    seat_to_npc = {s: n for n, s in assignment.items()}
    for neighbor_seat in adjacency.get(seat_id, ()):
        npc = seat_to_npc.get(neighbor_seat)
        if npc is None:
            continue
        if _social_match(pref, owner, w.resident(npc), w):
            return 1
    return 0


def check_conflict(
    conflict: Conflict,
    assignment: dict[str, str],
    adjacency: dict[str, set[str]],
) -> int:
    """1 when the conflict is avoided (the parties are not adjacent)."""
    seat_a = assignment[conflict.a]
    seat_b = assignment[conflict.b]
    return int(seat_b not in adjacency.get(seat_a, ()))


def conflict_compatible(w: World, a: str, b: str, kind: str) -> bool:
    """A conflict kind is only plausible between appropriately related NPCs."""
    rels = relation_between(w, a, b)
    if not rels:
        return False   # strangers have no conflicts
    return bool(rels & CONFLICT_COMPATIBILITY[kind])


# --- Grading dispatcher ----------------------------------------------------

def grade_constraint(
    constraint: Constraint,
    assignment: dict[str, str],
    scene: SceneInstance,
    adjacency: dict[str, set[str]],
    w: World,
) -> int:
    if isinstance(constraint, Conflict):
        return check_conflict(constraint, assignment, adjacency)
    if constraint.category == "embodied":
        seat = scene.seat(assignment[constraint.owner])
        hand = w.resident(constraint.owner).dominant_hand
        return check_embodied(constraint, seat, scene, dominant_hand=hand)
    return check_social(constraint, assignment, adjacency, w)


def grade_embodied_from_digest(
    pref: Preference, seat_id: str, digest: dict, dominant_hand: str | None = None
) -> int:
    """Grade an embodied preference using only a per-seat geometry digest
    (as produced by geometry.export_ground_truth_features)."""
    entry = digest["seats"][seat_id]
    cfg = digest["config"]
    kind = pref.kind
    if kind in ("tableware_chopsticks", "tableware_cutlery"):
        want = "chopsticks" if kind.endswith("chopsticks") else "cutlery"
        return int(entry["tableware"] == want)
    if kind == "dominant_hand_clearance":
        hand = dominant_hand or "right"
        return int(entry[f"seat_on_{hand}"] is None)
    if kind == "tv_in_view":
        return int(entry["tv_visible"])
    feature_kind = _FEATURE_FOR_KIND[kind]
    d = entry[f"dist_{feature_kind}"]
    if d is None or d == math.inf:
        raise MissingFeatureError(f"digest lacks feature {feature_kind}")
    if kind.startswith("near_"):
        return int(d <= cfg["near_distance"])
    return int(d >= cfg["away_distance"])


# --- Serialization ---------------------------------------------------------

def constraint_to_dict(c: Constraint) -> dict:
    if isinstance(c, Conflict):
        return {"type": "conflict", "a": c.a, "b": c.b, "kind": c.kind, "strength": c.strength}
    return {
        "type": "preference",
        "owner": c.owner,
        "category": c.category,
        "kind": c.kind,
        "strength": c.strength,
    }


def constraint_from_dict(data: dict) -> Constraint:
    if data["type"] == "conflict":
        return Conflict(a=data["a"], b=data["b"], kind=data["kind"], strength=data["strength"])
    return make_preference(data["owner"], data["kind"], data["strength"])


def constraint_id(c: Constraint) -> str:
    if isinstance(c, Conflict):
        return f"conflict:{c.a}:{c.b}:{c.kind}"
    return f"pref:{c.owner}:{c.kind}"
