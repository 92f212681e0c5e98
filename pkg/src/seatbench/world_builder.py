"""Deterministic construction of the shipped town: 59 residents, 11 families.

The town content is synthesized (names, ages, jobs) but honors the structural
requirements: up to four generations per family, a mix of nuclear,
single-parent, reconstituted, only-child, and multi-child households, and at
least one instance of every relationship kind.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .world import (
    INTEREST_VOCABULARY,
    JOB_SECTORS,
    TOPIC_TAGS,
    Relationship,
    Resident,
    World,
    world_to_dict,
)

FIRST_NAMES = [
    "Ada", "Ben", "Cora", "Dev", "Elsa", "Finn", "Gwen", "Hugo", "Iris",
    "Jonas", "Kira", "Liam", "Mara", "Nils", "Opal", "Pavel", "Quinn",
    "Rosa", "Sven", "Tess", "Ulric", "Vera", "Wade", "Xenia", "Yara",
    "Zane", "Anke", "Boris", "Celia", "Dario", "Edith", "Felix", "Greta",
    "Henri", "Ilya", "June", "Karl", "Lena", "Milo", "Nora", "Oscar",
    "Petra", "Rex", "Stella", "Tomas", "Una", "Viktor", "Willa", "Yusuf",
    "Zora", "Arlo", "Bria", "Caleb", "Dana", "Emil", "Freya", "Gil",
    "Hana", "Ivo",
]

SURNAMES = [
    "Hart", "Vance", "Okafor", "Lindqvist", "Moreau", "Takeda", "Silva",
    "Novak", "Reyes", "Kowalski", "Brandt",
]

RESIDENCES = ["Elm Street", "Oak Street", "Mill Lane", "River Road", "Hill Close"]
WORKPLACES = ["town_school", "clinic", "machine_plant", "market_row", "orchard_coop"]

# Family layout: (surname index, residence, generation roster).
# Each generation entry is a list of member slots; slots marked "spouse" marry
# the preceding slot, "kid" slots attach to the couple (or single parent) of
# the previous generation. Sizes sum to 59.
_ADULT_JOBS = [
    "teacher", "professor", "doctor", "nurse", "pharmacist", "engineer",
    "technician", "factory_worker", "shopkeeper", "clerk", "accountant",
    "farmer", "gardener",
]


def _job_for(age: int, rng: random.Random) -> str:
    if age < 6:
        return "preschooler"
    if age < 22:
        return "student"
    if age >= 68:
        return "retired"
    return rng.choice(_ADULT_JOBS)


def build_default_world(seed: int = 20259) -> World:
    rng = random.Random(seed)
    residents: list[Resident] = []
    relationships: list[Relationship] = []
    families: dict[str, list[str]] = {}
    name_iter = iter(FIRST_NAMES)

    def new_resident(fid: str, surname: str, age: int, residence: str) -> Resident:
        rid = f"r{len(residents):02d}"
        first = next(name_iter)
        gender = rng.choice(("female", "male"))
        job = _job_for(age, rng)
        workplace = (
            "home" if JOB_SECTORS[job] == "none"
            else ("town_school" if job in ("student", "teacher", "professor")
                  else rng.choice(WORKPLACES))
        )
        n_interests = rng.randint(1, 3)
        interests = frozenset(rng.sample(INTEREST_VOCABULARY, n_interests))
        r = Resident(
            id=rid,
            name=f"{first} {surname}",
            age=age,
            gender=gender,
            job=job,
            workplace=workplace,
            residence=residence,
            income_level=rng.randint(1, 3),
            education_level=rng.randint(1, 3),
            interests=interests,
            dominant_hand="left" if rng.random() < 0.2 else "right",
            family_id=fid,
            avatar_tag=f"avatar_{len(residents):02d}",
        )
        residents.append(r)
        families[fid].append(rid)
        return r

    def add(kind: str, a: Resident, b: Resident) -> None:
        relationships.append(Relationship(a=a.id, b=b.id, kind=kind))

    def couple(fid, surname, age_a, age_b, residence):
        a = new_resident(fid, surname, age_a, residence)
        b = new_resident(fid, surname, age_b, residence)
        add("spouse", a, b)
        return a, b

    def children(fid, surname, parents, ages, residence):
        kids = [new_resident(fid, surname, age, residence) for age in ages]
        for kid in kids:
            for parent in parents:
                add("parent_of", parent, kid)
        for i in range(len(kids)):
            for j in range(i + 1, len(kids)):
                add("sibling", kids[i], kids[j])
        return kids

    def grandparent_edges(grandparents, grandkids):
        for gp in grandparents:
            for gk in grandkids:
                add("grandparent_of", gp, gk)

    def in_law_edges(spouse, partner_kin):
        for kin in partner_kin:
            add("in_law", spouse, kin)

    # --- 11 families -------------------------------------------------------
    # F0 (8, four generations, twins in the youngest).
    fid = "f00"
    families[fid] = []
    s = SURNAMES[0]
    g0a, g0b = couple(fid, s, 84, 82, RESIDENCES[0])
    (g1,) = children(fid, s, (g0a, g0b), [60], RESIDENCES[0])
    g1w = new_resident(fid, s, 58, RESIDENCES[0])
    add("spouse", g1, g1w)
    in_law_edges(g1w, [g0a, g0b])
    (g2,) = children(fid, s, (g1, g1w), [34], RESIDENCES[0])
    g2w = new_resident(fid, s, 33, RESIDENCES[0])
    add("spouse", g2, g2w)
    in_law_edges(g2w, [g1, g1w])
    twins = children(fid, s, (g2, g2w), [7, 7], RESIDENCES[0])
    grandparent_edges([g0a, g0b], [g2])
    grandparent_edges([g1, g1w], twins)

    # F1 (7, three generations, two adult siblings).
    fid = "f01"
    families[fid] = []
    s = SURNAMES[1]
    p0a, p0b = couple(fid, s, 72, 70, RESIDENCES[1])
    son1, son2 = children(fid, s, (p0a, p0b), [46, 43], RESIDENCES[1])
    wife1 = new_resident(fid, s, 45, RESIDENCES[1])
    add("spouse", son1, wife1)
    in_law_edges(wife1, [p0a, p0b, son2])
    kids = children(fid, s, (son1, wife1), [17, 13], RESIDENCES[1])
    grandparent_edges([p0a, p0b], kids)

    # F2 (7, three generations, multi-child, single grandmother).
    fid = "f02"
    families[fid] = []
    s = SURNAMES[2]
    gm = new_resident(fid, s, 75, RESIDENCES[2])
    (dau,) = children(fid, s, (gm,), [48], RESIDENCES[2])
    husb = new_resident(fid, s, 50, RESIDENCES[2])
    add("spouse", dau, husb)
    in_law_edges(husb, [gm])
    kids = children(fid, s, (dau, husb), [21, 18, 15, 12], RESIDENCES[2])
    grandparent_edges([gm], kids)

    # F3 (6, nuclear, four children).
    fid = "f03"
    families[fid] = []
    s = SURNAMES[3]
    pa, pb = couple(fid, s, 44, 42, RESIDENCES[3])
    children(fid, s, (pa, pb), [16, 14, 11, 8], RESIDENCES[3])

    # F4 (6, three generations, single-parent middle generation).
    fid = "f04"
    families[fid] = []
    s = SURNAMES[4]
    ga, gb = couple(fid, s, 69, 67, RESIDENCES[4])
    (single,) = children(fid, s, (ga, gb), [40], RESIDENCES[4])
    kids = children(fid, s, (single,), [12, 9, 7], RESIDENCES[4])
    grandparent_edges([ga, gb], kids)

    # F5 (5, nuclear, three children).
    fid = "f05"
    families[fid] = []
    s = SURNAMES[5]
    pa, pb = couple(fid, s, 39, 38, RESIDENCES[0])
    children(fid, s, (pa, pb), [13, 10, 5], RESIDENCES[0])

    # F6 (5, reconstituted: one child from a prior marriage, two shared).
    fid = "f06"
    families[fid] = []
    s = SURNAMES[6]
    dad = new_resident(fid, s, 47, RESIDENCES[1])
    wife = new_resident(fid, s, 41, RESIDENCES[1])
    add("spouse", dad, wife)
    (elder,) = children(fid, s, (dad,), [19], RESIDENCES[1])
    shared = children(fid, s, (dad, wife), [10, 6], RESIDENCES[1])
    for kid in shared:
        add("sibling", elder, kid)

    # F7 (5, parents, two children, one live-in grandfather).
    fid = "f07"
    families[fid] = []
    s = SURNAMES[7]
    gp = new_resident(fid, s, 78, RESIDENCES[2])
    (pa,) = children(fid, s, (gp,), [49], RESIDENCES[2])
    pb = new_resident(fid, s, 47, RESIDENCES[2])
    add("spouse", pa, pb)
    in_law_edges(pb, [gp])
    kids = children(fid, s, (pa, pb), [20, 16], RESIDENCES[2])
    grandparent_edges([gp], kids)

    # F8 (4, only child plus a grandmother).
    fid = "f08"
    families[fid] = []
    s = SURNAMES[8]
    gm = new_resident(fid, s, 71, RESIDENCES[3])
    (pa,) = children(fid, s, (gm,), [37], RESIDENCES[3])
    pb = new_resident(fid, s, 36, RESIDENCES[3])
    add("spouse", pa, pb)
    in_law_edges(pb, [gm])
    (only,) = children(fid, s, (pa, pb), [9], RESIDENCES[3])
    grandparent_edges([gm], [only])

    # F9 (3, single parent with two children; the parent works away).
    fid = "f09"
    families[fid] = []
    s = SURNAMES[9]
    mom = new_resident(fid, s, 38, RESIDENCES[4])
    children(fid, s, (mom,), [14, 11], RESIDENCES[4])

    # F10 (3, couple with an only child).
    fid = "f10"
    families[fid] = []
    s = SURNAMES[10]
    pa, pb = couple(fid, s, 31, 30, RESIDENCES[0])
    children(fid, s, (pa, pb), [4], RESIDENCES[0])

    assert len(residents) == 59, len(residents)
    assert len(families) == 11

    by_id = {r.id: r for r in residents}
    existing = {frozenset((rel.a, rel.b)) for rel in relationships}

    def add_cross(kind: str, a: Resident, b: Resident) -> None:
        key = frozenset((a.id, b.id))
        if key in existing:
            return
        existing.add(key)
        relationships.append(Relationship(a=a.id, b=b.id, kind=kind))

    adults = [r for r in residents if r.age >= 22]
    minors = [r for r in residents if 6 <= r.age < 22]

    # Neighbors: adult pairs from different families on the same street.
    by_street: dict[str, list[Resident]] = {}
    for r in adults:
        by_street.setdefault(r.residence, []).append(r)
    for street, group in sorted(by_street.items()):
        fams = sorted({r.family_id for r in group})
        for i in range(len(fams) - 1):
            a = next(r for r in group if r.family_id == fams[i])
            b = next(r for r in group if r.family_id == fams[i + 1])
            add_cross("neighbor", a, b)

    # Colleagues and one superior per workplace.
    by_work: dict[str, list[Resident]] = {}
    for r in adults:
        if r.workplace not in ("home",):
            by_work.setdefault(r.workplace, []).append(r)
    for work, group in sorted(by_work.items()):
        group = sorted(group, key=lambda r: r.id)
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if group[i].family_id != group[j].family_id:
                    add_cross("colleague", group[i], group[j])
        if len(group) >= 2:
            boss = max(group, key=lambda r: (r.age, r.id))
            for other in group:
                if other is not boss and other.family_id != boss.family_id:
                    key = frozenset((boss.id, other.id))
                    relationships.append(
                        Relationship(a=boss.id, b=other.id, kind="superior_of")
                    )

    # Teachers and their school-age students; classmates by age band.
    teachers = sorted(
        (r for r in adults if r.job in ("teacher", "professor")),
        key=lambda r: r.id,
    )
    students = sorted((r for r in minors if r.job == "student"), key=lambda r: r.id)
    for idx, student in enumerate(students):
        if teachers and student.family_id != teachers[idx % len(teachers)].family_id:
            relationships.append(
                Relationship(
                    a=teachers[idx % len(teachers)].id,
                    b=student.id,
                    kind="teacher_of",
                )
            )
    for i in range(len(students)):
        for j in range(i + 1, len(students)):
            a, b = students[i], students[j]
            if abs(a.age - b.age) <= 1 and a.family_id != b.family_id:
                add_cross("classmate", a, b)

    # Friends: a handful of cross-family adult pairs of similar age.
    candidates = sorted(adults, key=lambda r: (r.age, r.id))
    made = 0
    for i in range(len(candidates) - 1):
        a, b = candidates[i], candidates[i + 1]
        if a.family_id != b.family_id and abs(a.age - b.age) <= 6:
            add_cross("friend", a, b)
            made += 1
            if made >= 10:
                break

    return World(
        residents=tuple(residents),
        relationships=tuple(relationships),
        families={fid: tuple(m) for fid, m in families.items()},
    )


def write_default_world(path: str | Path) -> None:
    w = build_default_world()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(
        json.dumps(world_to_dict(w), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else str(
        Path(__file__).parent / "data" / "world.json"
    )
    write_default_world(target)
    print(f"wrote {target}")
