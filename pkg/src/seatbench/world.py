"""Persistent town model: residents, typed relationships, and family structure."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

SCHEMA_VERSION = 1

SYMMETRIC_KINDS = frozenset(
    {"spouse", "sibling", "neighbor", "friend", "colleague", "classmate", "in_law"}
)
DIRECTED_KINDS = frozenset({"parent_of", "grandparent_of", "superior_of", "teacher_of"})
RELATION_KINDS = SYMMETRIC_KINDS | DIRECTED_KINDS

GENDERS = ("female", "male")
HANDS = ("left", "right")

# Job tags group into sectors for the same-job-sector group preference.
JOB_SECTORS = {
    "teacher": "education",
    "professor": "education",
    "student": "education",
    "doctor": "healthcare",
    "nurse": "healthcare",
    "pharmacist": "healthcare",
    "engineer": "industry",
    "technician": "industry",
    "factory_worker": "industry",
    "shopkeeper": "commerce",
    "clerk": "commerce",
    "accountant": "commerce",
    "farmer": "agriculture",
    "gardener": "agriculture",
    "retired": "none",
    "homemaker": "none",
    "preschooler": "none",
}

# Topic tags usable by shared-interest preferences (exactly four).
TOPIC_TAGS = ("research", "sports", "cooking", "movies")

# Wider interest vocabulary; includes the four topic tags.
INTEREST_VOCABULARY = TOPIC_TAGS + ("gardening", "music", "chess", "travel", "painting")


@dataclass(frozen=True)
class Resident:
    id: str
    name: str
    age: int
    gender: str
    job: str
    workplace: str
    residence: str
    income_level: int
    education_level: int
    interests: frozenset[str]
    dominant_hand: str
    family_id: str
    avatar_tag: str


@dataclass(frozen=True)
class Relationship:
    a: str
    b: str
    kind: str


@dataclass(frozen=True)
class World:
    residents: tuple[Resident, ...]
    relationships: tuple[Relationship, ...]
    families: dict[str, tuple[str, ...]]
    by_id: dict[str, Resident] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {r.id: r for r in self.residents})

    def resident(self, rid: str) -> Resident:
        if rid not in self.by_id:
            raise KeyError(f"unknown resident id: {rid}")
        return self.by_id[rid]

    def name_index(self) -> dict[str, str]:
        """Map resident display name -> id (names are unique in shipped data)."""
        return {r.name: r.id for r in self.residents}


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    def add(self, message: str) -> None:
        self.violations.append(message)

    @property
    def ok(self) -> bool:
        return not self.violations


class WorldError(Exception):
    """Raised when a world file is malformed or fails validation."""


def _parent_map(relationships: Iterable[Relationship]) -> dict[str, list[str]]:
    parents: dict[str, list[str]] = {}
    for rel in relationships:
        if rel.kind == "parent_of":
            parents.setdefault(rel.b, []).append(rel.a)
    return parents


def generation_depths(w: World) -> dict[str, int]:
    """Depth below the oldest ancestor along parent_of chains (roots are 0)."""
    parents = _parent_map(w.relationships)
    depths: dict[str, int] = {}

    def depth(rid: str, seen: tuple[str, ...]) -> int:
        if rid in seen:
            raise WorldError(f"parent_of cycle involving {rid}")
        if rid in depths:
            return depths[rid]
        ps = parents.get(rid, [])
        d = 0 if not ps else 1 + max(depth(p, seen + (rid,)) for p in ps)
        depths[rid] = d
        return d

    for r in w.residents:
        depth(r.id, ())
    return depths


def validate_world(w: World) -> ValidationReport:
    """Check every structural invariant; violations are reported, not raised."""
    report = ValidationReport()
    ids = [r.id for r in w.residents]
    id_set = set(ids)
    if len(ids) != len(id_set):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        for d in dupes:
            report.add(f"duplicate resident id: {d}")

    family_of: dict[str, str] = {}
    for fid, members in w.families.items():
        for m in members:
            if m not in id_set:
                report.add(f"family {fid} references unknown resident {m}")
            elif m in family_of:
                report.add(f"resident {m} belongs to families {family_of[m]} and {fid}")
            else:
                family_of[m] = fid

    for r in w.residents:
        if r.age < 0:
            report.add(f"resident {r.id} has negative age")
        if not r.interests:
            report.add(f"resident {r.id} has no interests")
        if r.income_level not in (1, 2, 3):
            report.add(f"resident {r.id} income_level out of range")
        if r.education_level not in (1, 2, 3):
            report.add(f"resident {r.id} education_level out of range")
        if r.dominant_hand not in HANDS:
            report.add(f"resident {r.id} has invalid dominant_hand")
        if r.family_id not in w.families:
            report.add(f"resident {r.id} references unknown family {r.family_id}")
        elif r.id not in w.families[r.family_id]:
            report.add(f"resident {r.id} missing from family {r.family_id} roster")

    for rel in w.relationships:
        if rel.a == rel.b:
            report.add(f"self-relationship on {rel.a}")
        if rel.kind not in RELATION_KINDS:
            report.add(f"unknown relationship kind: {rel.kind}")
        for endpoint in (rel.a, rel.b):
            if endpoint not in id_set:
                report.add(f"relationship endpoint {endpoint} does not exist")

    # Kinship sanity: acyclic parent chains, parents older than children,
    # family depth at most 4 generations.
    try:
        depths = generation_depths(w)
    except WorldError as exc:
        report.add(str(exc))
        depths = {}
    if depths:
        for fid, members in w.families.items():
            in_family = [depths[m] for m in members if m in depths]
            if in_family and max(in_family) - min(in_family) > 3:
                report.add(f"family {fid} spans more than 4 generations")
        for rel in w.relationships:
            if rel.kind not in ("parent_of", "grandparent_of"):
                continue
            if rel.a not in w.by_id or rel.b not in w.by_id:
                continue
            if w.by_id[rel.a].age <= w.by_id[rel.b].age:
                report.add(
                    f"{rel.kind} from {rel.a} to {rel.b} violates age ordering"
                )
    return report


def relation_between(w: World, a: str, b: str) -> set[str]:
    """All relation kinds linking a and b, viewed from a.

    Symmetric kinds appear regardless of storage order; directed kinds are
    reported as the kind itself when a is the source and as ``child_of``-style
    inverses (``kind + ':inverse'``) when a is the target. An empty set means
    the two residents are strangers.
    """
    w.resident(a)
    w.resident(b)
    kinds: set[str] = set()
    for rel in w.relationships:
        if rel.kind in SYMMETRIC_KINDS:
            if {rel.a, rel.b} == {a, b}:
                kinds.add(rel.kind)
        else:
            if rel.a == a and rel.b == b:
                kinds.add(rel.kind)
            elif rel.a == b and rel.b == a:
                kinds.add(rel.kind + ":inverse")
    return kinds


def are_strangers(w: World, a: str, b: str) -> bool:
    return not relation_between(w, a, b)


def sample_party(w: World, n: int, rng, bias: bool = True) -> list[str]:
    """Draw n distinct residents, biased toward socially connected groups.

    With bias on, at least n-2 of the returned residents have a relationship
    with someone else in the party. Pure function of (world, n, bias, seed).
    """
    if not 1 <= n <= len(w.residents):
        raise ValueError(f"party size {n} out of range 1..{len(w.residents)}")
    ids = [r.id for r in w.residents]
    if n == len(ids):
        return list(ids)
    if not bias:
        return rng.sample(ids, n)

    neighbors: dict[str, set[str]] = {i: set() for i in ids}
    for rel in w.relationships:
        neighbors[rel.a].add(rel.b)
        neighbors[rel.b].add(rel.a)

    for _ in range(1000):
        party = rng.sample(ids, n)
        if _tie_count(party, neighbors) >= n - 2:
            return party
    # Constructive fallback: grow the party along relationship edges.
    party = [rng.choice(ids)]
    while len(party) < n:
        frontier = sorted(
            {nb for p in party for nb in neighbors[p]} - set(party)
        )
        pool = frontier if frontier else sorted(set(ids) - set(party))
        party.append(rng.choice(pool))
    return party


def _tie_count(party: list[str], neighbors: dict[str, set[str]]) -> int:
    members = set(party)
    return sum(1 for p in party if neighbors[p] & members)


def world_to_dict(w: World) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "residents": [
            {
                "id": r.id,
                "name": r.name,
                "age": r.age,
                "gender": r.gender,
                "job": r.job,
                "workplace": r.workplace,
                "residence": r.residence,
                "income_level": r.income_level,
                "education_level": r.education_level,
                "interests": sorted(r.interests),
                "dominant_hand": r.dominant_hand,
                "family_id": r.family_id,
                "avatar_tag": r.avatar_tag,
            }
            for r in w.residents
        ],
        "relationships": [
            {"a": rel.a, "b": rel.b, "kind": rel.kind} for rel in w.relationships
        ],
        "families": {fid: list(members) for fid, members in w.families.items()},
    }


def world_from_dict(data: dict) -> World:
    if "schema_version" not in data:
        raise WorldError("world file missing schema_version")
    try:
        residents = tuple(
            Resident(
                id=r["id"],
                name=r["name"],
                age=int(r["age"]),
                gender=r["gender"],
                job=r["job"],
                workplace=r["workplace"],
                residence=r["residence"],
                income_level=int(r["income_level"]),
                education_level=int(r["education_level"]),
                interests=frozenset(r["interests"]),
                dominant_hand=r["dominant_hand"],
                family_id=r["family_id"],
                avatar_tag=r.get("avatar_tag", ""),
            )
            for r in data["residents"]
        )
        relationships = tuple(
            Relationship(a=rel["a"], b=rel["b"], kind=rel["kind"])
            for rel in data["relationships"]
        )
        families = {
            fid: tuple(members) for fid, members in data["families"].items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise WorldError(f"malformed world file: {exc}") from exc
    return World(residents=residents, relationships=relationships, families=families)


def default_world_path() -> Path:
    return Path(__file__).parent / "data" / "world.json"


def load_world(path: str | Path | None = None) -> World:
    """Load and validate a world file; raises WorldError on any problem."""
    path = Path(path) if path is not None else default_world_path()
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise WorldError(f"cannot read world file {path}: {exc}") from exc
    w = world_from_dict(data)
    report = validate_world(w)
    if not report.ok:
        raise WorldError(f"world file invalid: {report.violations[0]}")
    return w
