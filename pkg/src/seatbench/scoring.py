"""Automatic evaluation: per-constraint grading, weighted category fractions,
the quintic penalty remap with clamping, 0-100 scaling, the prioritization
gap, and human-readable reflection reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geometry
from .constraints import (
    SOCIAL_SUBCATEGORY,
    Conflict,
    Constraint,
    Preference,
    constraint_id,
    grade_constraint,
)
from .generator import ScenarioInstance
from .geometry import seat_adjacency
from .world import World

# Penalty remap coefficients, highest power first (quintic through origin).
REMAP_COEFFS = (-10.87, 21.99, -12.65, 2.568, -0.045, 0.0)

DEFAULT_CATEGORIES = ("embodied", "social", "conflict")
FINE_CATEGORIES = ("embodied", "social.relation", "social.group", "social.topic", "conflict")


def remap_raw(x: float) -> float:
    """The printed quintic, unclamped."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"fraction {x} outside [0, 1]")
    acc = 0.0
    for c in REMAP_COEFFS:
        acc = acc * x + c
    return acc


def remap(x: float) -> float:
    """Penalty remap clamped to [0, 1]; partial credit drops off sharply for
    low satisfaction fractions."""
    return min(1.0, max(0.0, remap_raw(x)))


def constraint_category(c: Constraint, fine: bool = False) -> str:
    if isinstance(c, Conflict):
        return "conflict"
    if not fine:
        return c.category
    if c.category == "embodied":
        return "embodied"
    return "social." + SOCIAL_SUBCATEGORY[c.kind]


@dataclass
class GradedConstraint:
    ref: str
    constraint: Constraint
    weight: int
    grade: int
    category: str


@dataclass
class CategoryScore:
    category: str
    raw_fraction: float
    remapped: float
    weight: float      # sum of member constraint weights


@dataclass
class ScoreReport:
    instance_id: str
    per_constraint: list[GradedConstraint]
    per_category: list[CategoryScore]
    scaled_score: float
    fully_satisfied: bool
    categories: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "scaled_score": self.scaled_score,
            "fully_satisfied": self.fully_satisfied,
            "categories": list(self.categories),
            "per_category": [
                {
                    "category": c.category,
                    "raw_fraction": c.raw_fraction,
                    "remapped": c.remapped,
                    "weight": c.weight,
                }
                for c in self.per_category
            ],
            "per_constraint": [
                {
                    "ref": g.ref,
                    "category": g.category,
                    "weight": g.weight,
                    "grade": g.grade,
                }
                for g in self.per_constraint
            ],
        }

    def csv_row(self) -> str:
        cats = {c.category: c for c in self.per_category}
        cells = [self.instance_id, f"{self.scaled_score:.2f}"]
        for name in self.categories:
            c = cats.get(name)
            cells.append(f"{c.raw_fraction:.4f}" if c else "")
        return ",".join(cells)


class AssignmentError(Exception):
    """The candidate assignment is not a party-to-seat bijection."""


def validate_assignment(inst: ScenarioInstance, assignment: dict[str, str]) -> None:
    party = set(inst.party)
    missing = party - set(assignment)
    if missing:
        raise AssignmentError(f"unassigned NPCs: {sorted(missing)}")
    extra = set(assignment) - party
    if extra:
        raise AssignmentError(f"assignment names non-party NPCs: {sorted(extra)}")
    seats = list(assignment.values())
    if len(seats) != len(set(seats)):
        dup = sorted({s for s in seats if seats.count(s) > 1})
        raise AssignmentError(f"seat assigned more than once: {dup}")
    known = {s.id for s in inst.scene.seats}
    unknown = set(seats) - known
    if unknown:
        raise AssignmentError(f"unknown seats: {sorted(unknown)}")


def grade_all(
    inst: ScenarioInstance, assignment: dict[str, str], w: World, fine: bool = False
) -> list[GradedConstraint]:
    adjacency = seat_adjacency(inst.scene)
    graded = []
    for c in inst.constraints:
        graded.append(
            GradedConstraint(
                ref=constraint_id(c),
                constraint=c,
                weight=c.strength,
                grade=grade_constraint(c, assignment, inst.scene, adjacency, w),
                category=constraint_category(c, fine=fine),
            )
        )
    return graded


def score_instance(
    inst: ScenarioInstance,
    assignment: dict[str, str],
    w: World,
    fine: bool = False,
) -> ScoreReport:
    """Score a candidate assignment on the 0-100 scale.

    Category fractions are weight-averaged grades; each fraction passes
    through the clamped penalty remap; category contributions are weighted by
    the total member weight and normalized so a perfect answer scores
    100 * remap(1) = 99.3.
    """
    validate_assignment(inst, assignment)
    graded = grade_all(inst, assignment, w, fine=fine)
    categories = FINE_CATEGORIES if fine else DEFAULT_CATEGORIES

    per_category: list[CategoryScore] = []
    total_weighted = 0.0
    total_weight = 0.0
    for name in categories:
        members = [g for g in graded if g.category == name]
        if not members:
            continue
        weight_sum = float(sum(g.weight for g in members))
        raw = sum(g.weight * g.grade for g in members) / weight_sum
        remapped = remap(raw)
        per_category.append(
            CategoryScore(
                category=name, raw_fraction=raw, remapped=remapped, weight=weight_sum
            )
        )
        total_weighted += weight_sum * remapped
        total_weight += weight_sum

    scaled = 100.0 * total_weighted / total_weight if total_weight else 0.0
    return ScoreReport(
        instance_id=inst.id,
        per_constraint=graded,
        per_category=per_category,
        scaled_score=scaled,
        fully_satisfied=all(g.grade == 1 for g in graded),
        categories=categories,
    )


class UndefinedMetricError(Exception):
    """Prioritization gap needs both weight-3 and weight-1 constraints."""


def prioritization_gap(reports: list[ScoreReport]) -> float:
    """Satisfaction rate of weight-3 constraints minus that of weight-1
    constraints, pooled over all reports, in percentage points."""
    if not reports:
        raise UndefinedMetricError("no reports")
    high = [g for r in reports for g in r.per_constraint if g.weight == 3]
    low = [g for r in reports for g in r.per_constraint if g.weight == 1]
    if not high or not low:
        raise UndefinedMetricError(
            "prioritization gap undefined without both weight-3 and weight-1 constraints"
        )
    high_rate = sum(g.grade for g in high) / len(high)
    low_rate = sum(g.grade for g in low) / len(low)
    return 100.0 * (high_rate - low_rate)


# ---------------------------------------------------------------------------
# Reflection
# ---------------------------------------------------------------------------

@dataclass
class ReflectionEntry:
    ref: str
    satisfied: bool
    weight: int
    reason: str

    def to_dict(self) -> dict:
        return {
            "ref": self.ref,
            "satisfied": self.satisfied,
            "weight": self.weight,
            "reason": self.reason,
        }


@dataclass
class ReflectionReport:
    instance_id: str
    entries: list[ReflectionEntry]
    unmet: list[ReflectionEntry] = field(default_factory=list)

    def __post_init__(self):
        if not self.unmet:
            self.unmet = sorted(
                (e for e in self.entries if not e.satisfied),
                key=lambda e: (-e.weight, e.ref),
            )

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "entries": [e.to_dict() for e in self.entries],
            "unmet": [e.to_dict() for e in self.unmet],
        }


def _embodied_reason(pref: Preference, inst, assignment, w: World, grade: int) -> str:
    scene = inst.scene
    seat = scene.seat(assignment[pref.owner])
    cfg = scene.config
    kind = pref.kind
    name = w.resident(pref.owner).name
    if kind in ("tableware_chopsticks", "tableware_cutlery"):
        want = "chopsticks" if kind.endswith("chopsticks") else "cutlery"
        verdict = "has" if grade else "is set with " + seat.tableware + ", not"
        return f"{name}'s seat {seat.id} {verdict} {want}"
    if kind == "dominant_hand_clearance":
        hand = w.resident(pref.owner).dominant_hand
        blocker = geometry.neighbor_on_side(scene, seat, hand)
        if grade:
            return f"no seat on {name}'s {hand}-hand side at {seat.id}"
        return f"seat {blocker} sits on {name}'s {hand}-hand side"
    if kind == "tv_in_view":
        tv = scene.features_of_kind("television")[0]
        if grade:
            return f"the television {tv.id} is visible from seat {seat.id}"
        target = tv.ref_point()
        if geometry.angle_diff(
            geometry.bearing(seat.position, target), seat.facing
        ) > cfg.seat_fov / 2.0:
            return f"the television {tv.id} is outside the viewing angle of seat {seat.id}"
        return f"a wall blocks the line of sight from seat {seat.id} to the television {tv.id}"
    from .constraints import _FEATURE_FOR_KIND, _min_feature_distance

    feature_kind = _FEATURE_FOR_KIND[kind]
    d = _min_feature_distance(seat, scene, feature_kind)
    limit = cfg.near_distance if kind.startswith("near_") else cfg.away_distance
    relation = "within" if kind.startswith("near_") else "at least"
    verdict = "is" if grade else "is not"
    return (
        f"seat {seat.id} {verdict} {relation} {limit:.1f} m of the nearest "
        f"{feature_kind} ({d:.2f} m)"
    )


def _social_reason(pref: Preference, inst, assignment, adjacency, w: World, grade: int) -> str:
    name = w.resident(pref.owner).name
    seat_id = assignment[pref.owner]
    seat_to_npc = {s: n for n, s in assignment.items()}
    neighbors = [
        seat_to_npc[s] for s in sorted(adjacency.get(seat_id, ())) if s in seat_to_npc
    ]
    neighbor_names = ", ".join(w.resident(n).name for n in neighbors) or "nobody"
    want = pref.kind.replace("_", " ")
    if grade:
        from .constraints import _social_match

        owner = w.resident(pref.owner)
        match = next(
            n for n in neighbors if _social_match(pref, owner, w.resident(n), w)
        )
        return f"{w.resident(match).name} beside {name} satisfies '{want}'"
    return f"neither neighbor of {name} ({neighbor_names}) satisfies '{want}'"


def _conflict_reason(conflict: Conflict, inst, assignment, w: World, grade: int) -> str:
    name_a = w.resident(conflict.a).name
    name_b = w.resident(conflict.b).name
    if grade:
        return f"{name_a} and {name_b} are not seated next to each other"
    table = inst.scene.seat(assignment[conflict.a]).table_id
    return (
        f"{name_a} and {name_b} sit side by side at table {table} despite "
        f"their {conflict.kind.replace('_', ' ')}"
    )


def reflect(inst: ScenarioInstance, assignment: dict[str, str], w: World) -> ReflectionReport:
    """Annotate every constraint with its satisfaction status and a reason
    naming the blocking seat feature or neighbor."""
    validate_assignment(inst, assignment)
    adjacency = seat_adjacency(inst.scene)
    entries: list[ReflectionEntry] = []
    for c in inst.constraints:
        grade = grade_constraint(c, assignment, inst.scene, adjacency, w)
        if isinstance(c, Conflict):
            reason = _conflict_reason(c, inst, assignment, w, grade)
        elif c.category == "embodied":
            reason = _embodied_reason(c, inst, assignment, w, grade)
        else:
            reason = _social_reason(c, inst, assignment, adjacency, w, grade)
        entries.append(
            ReflectionEntry(
                ref=constraint_id(c),
                satisfied=bool(grade),
                weight=c.strength,
                reason=reason,
            )
        )
    return ReflectionReport(instance_id=inst.id, entries=entries)
