"""Solvers for scenario instances: exact branch-and-bound, weight-ordered
greedy seeding, simulated-annealing local search, and a generate-and-reflect
iteration loop with a built-in repair agent."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from .constraints import (
    Conflict,
    MissingFeatureError,
    Preference,
    _social_match,
    check_embodied,
    grade_embodied_from_digest,
)
from .generator import ScenarioInstance
from .geometry import export_ground_truth_features, seat_adjacency
from .scoring import remap, score_instance
from .world import World


@dataclass
class TraceStep:
    iteration: int
    assignment_digest: tuple
    score: float
    best_score: float
    unmet: int


@dataclass
class SolverTrace:
    steps: list[TraceStep] = field(default_factory=list)
    wall_time: float = 0.0
    nodes: int = 0
    moves: int = 0
    termination: str = ""
    optimal: bool = False

    def record(self, iteration: int, assignment: dict, score: float, unmet: int):
        best = max(score, self.steps[-1].best_score) if self.steps else score
        self.steps.append(
            TraceStep(
                iteration=iteration,
                assignment_digest=tuple(sorted(assignment.items())),
                score=score,
                best_score=best,
                unmet=unmet,
            )
        )

    def to_dict(self) -> dict:
        return {
            "steps": [
                {
                    "iteration": s.iteration,
                    "score": s.score,
                    "best_score": s.best_score,
                    "unmet": s.unmet,
                    "assignment": dict(s.assignment_digest),
                }
                for s in self.steps
            ],
            "wall_time": self.wall_time,
            "nodes": self.nodes,
            "moves": self.moves,
            "termination": self.termination,
            "optimal": self.optimal,
        }


class Evaluator:
    """Shared grading core used by every solver.

    The embodied grade table can come from true geometry or from a perception
    digest, so an agent's belief about the scene is swappable without touching
    the search code.
    """

    def __init__(self, inst: ScenarioInstance, w: World, digest: dict | None = None):
        self.inst = inst
        self.world = w
        if digest is not None:
            # Belief mode: everything spatial comes from the digest, not the
            # true scene, so solver quality reflects perception quality.
            self.seat_ids = sorted(digest["seats"])
            self.adjacency = {
                sid: set(entry["neighbors"])
                for sid, entry in digest["seats"].items()
            }
        else:
            self.seat_ids = [s.id for s in inst.scene.seats]
            self.adjacency = seat_adjacency(inst.scene)
        self.constraints = list(inst.constraints)

        self.embodied: list[Preference] = []
        self.social: list[Preference] = []
        self.conflicts: list[Conflict] = []
        for c in self.constraints:
            if isinstance(c, Conflict):
                self.conflicts.append(c)
            elif c.category == "embodied":
                self.embodied.append(c)
            else:
                self.social.append(c)

        # Embodied grades per (preference index, seat id).
        self.embodied_grade: dict[tuple[int, str], int] = {}
        for i, pref in enumerate(self.embodied):
            hand = w.resident(pref.owner).dominant_hand
            for sid in self.seat_ids:
                if digest is not None:
                    try:
                        g = grade_embodied_from_digest(pref, sid, digest, hand)
                    except (KeyError, MissingFeatureError):
                        g = 0
                else:
                    g = check_embodied(pref, inst.scene.seat(sid), inst.scene, hand)
                self.embodied_grade[(i, sid)] = g

        # Social match table per (preference index, candidate neighbor npc).
        self.social_match: dict[tuple[int, str], bool] = {}
        for i, pref in enumerate(self.social):
            owner = w.resident(pref.owner)
            for npc in inst.party:
                if npc == pref.owner:
                    continue
                self.social_match[(i, npc)] = _social_match(
                    pref, owner, w.resident(npc), w
                )

        self.total_weight_by_npc: dict[str, float] = {npc: 0.0 for npc in inst.party}
        for c in self.constraints:
            if isinstance(c, Conflict):
                self.total_weight_by_npc[c.a] += c.strength
                self.total_weight_by_npc[c.b] += c.strength
            else:
                self.total_weight_by_npc[c.owner] += c.strength

    # -- grading ------------------------------------------------------------

    def grades(self, assignment: dict[str, str]) -> list[int]:
        """Grades in constraint order for a complete assignment."""
        seat_to_npc = {s: n for n, s in assignment.items()}
        out: list[int] = []
        for i, pref in enumerate(self.embodied):
            out.append(self.embodied_grade[(i, assignment[pref.owner])])
        for i, pref in enumerate(self.social):
            sid = assignment[pref.owner]
            ok = any(
                self.social_match.get((i, seat_to_npc[nb]), False)
                for nb in self.adjacency[sid]
                if nb in seat_to_npc
            )
            out.append(int(ok))
        for c in self.conflicts:
            out.append(int(assignment[c.b] not in self.adjacency[assignment[c.a]]))
        return out

    def _scaled(self, triples) -> float:
        by_cat: dict[str, list[tuple[int, int]]] = {}
        for cat, weight, grade in triples:
            by_cat.setdefault(cat, []).append((weight, grade))
        total_weighted = 0.0
        total_weight = 0.0
        for members in by_cat.values():
            weight_sum = float(sum(wt for wt, _ in members))
            raw = sum(wt * g for wt, g in members) / weight_sum
            total_weighted += weight_sum * remap(raw)
            total_weight += weight_sum
        return 100.0 * total_weighted / total_weight if total_weight else 0.0

    def _triples(self, grades: list[int]):
        ordered = self.embodied + self.social + self.conflicts
        for c, g in zip(ordered, grades):
            cat = "conflict" if isinstance(c, Conflict) else c.category
            yield cat, c.strength, g

    def score(self, assignment: dict[str, str]) -> float:
        return self._scaled(self._triples(self.grades(assignment)))

    def unmet_count(self, assignment: dict[str, str]) -> int:
        return sum(1 for g in self.grades(assignment) if g == 0)

    def bound(self, partial: dict[str, str]) -> float:
        """Admissible upper bound: every constraint not definitely violated
        under the partial assignment is assumed satisfied."""
        seat_to_npc = {s: n for n, s in partial.items()}
        grades: list[int] = []
        for i, pref in enumerate(self.embodied):
            if pref.owner in partial:
                grades.append(self.embodied_grade[(i, partial[pref.owner])])
            else:
                grades.append(1)
        for i, pref in enumerate(self.social):
            if pref.owner not in partial:
                grades.append(1)
                continue
            sid = partial[pref.owner]
            neighbor_seats = self.adjacency[sid]
            decided = all(nb in seat_to_npc for nb in neighbor_seats)
            ok = any(
                self.social_match.get((i, seat_to_npc[nb]), False)
                for nb in neighbor_seats
                if nb in seat_to_npc
            )
            grades.append(1 if (ok or not decided) else 0)
        for c in self.conflicts:
            if c.a in partial and c.b in partial:
                grades.append(int(partial[c.b] not in self.adjacency[partial[c.a]]))
            else:
                grades.append(1)
        return self._scaled(self._triples(grades))

    def placement_gain(self, partial: dict[str, str], npc: str, seat_id: str) -> float:
        """Satisfied constraint weight newly decided by seating npc here."""
        trial = dict(partial)
        trial[npc] = seat_id
        seat_to_npc = {s: n for n, s in trial.items()}
        gain = 0.0
        for i, pref in enumerate(self.embodied):
            if pref.owner == npc:
                gain += pref.strength * self.embodied_grade[(i, seat_id)]
        for i, pref in enumerate(self.social):
            if pref.owner not in trial:
                continue
            sid = trial[pref.owner]
            if pref.owner != npc and seat_id not in self.adjacency[sid]:
                continue
            ok = any(
                self.social_match.get((i, seat_to_npc[nb]), False)
                for nb in self.adjacency[sid]
                if nb in seat_to_npc
            )
            gain += pref.strength * int(ok)
        for c in self.conflicts:
            if npc in (c.a, c.b) and c.a in trial and c.b in trial:
                gain += c.strength * int(
                    trial[c.b] not in self.adjacency[trial[c.a]]
                )
        return gain


# ---------------------------------------------------------------------------
# Exact branch and bound
# ---------------------------------------------------------------------------

class BudgetExhausted(Exception):
    """Node budget ran out before any complete assignment was found."""


def solve_exact(
    inst: ScenarioInstance,
    w: World,
    node_budget: int = 2_000_000,
    evaluator: Evaluator | None = None,
) -> tuple[dict[str, str], SolverTrace]:
    """Branch-and-bound over partial assignments, maximizing the scaled score.

    NPCs are ordered by descending constraint weight; seats by descending
    incremental gain. The bound assumes every undecided constraint satisfied,
    so it never underestimates a completion."""
    ev = evaluator or Evaluator(inst, w)
    trace = SolverTrace()
    start = time.perf_counter()
    order = sorted(
        inst.party, key=lambda n: (-ev.total_weight_by_npc[n], n)
    )
    best: dict[str, str] | None = None
    best_score = -1.0
    nodes = 0
    exhausted = False

    def recurse(depth: int, partial: dict[str, str], used: set[str]) -> None:
        nonlocal best, best_score, nodes, exhausted
        if exhausted:
            return
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            return
        if depth == len(order):
            score = ev.score(partial)
            if score > best_score:
                best, best_score = dict(partial), score
                trace.record(nodes, partial, score, ev.unmet_count(partial))
            return
        if ev.bound(partial) <= best_score + 1e-9 and best is not None:
            return
        npc = order[depth]
        seats = [s for s in ev.seat_ids if s not in used]
        seats.sort(key=lambda s: (-ev.placement_gain(partial, npc, s), s))
        for sid in seats:
            partial[npc] = sid
            used.add(sid)
            recurse(depth + 1, partial, used)
            del partial[npc]
            used.discard(sid)

    recurse(0, {}, set())
    trace.wall_time = time.perf_counter() - start
    trace.nodes = nodes
    if best is None:
        trace.termination = "budget"
        raise BudgetExhausted(
            f"no complete assignment within {node_budget} nodes"
        )
    trace.optimal = not exhausted
    trace.termination = "converged" if not exhausted else "budget"
    return best, trace


def solve_brute_force(
    inst: ScenarioInstance, w: World, evaluator: Evaluator | None = None
) -> tuple[dict[str, str], float]:
    """Exhaustive scan over all bijections (oracle for small instances)."""
    import itertools

    ev = evaluator or Evaluator(inst, w)
    best, best_score = None, -1.0
    party = sorted(inst.party)
    for perm in itertools.permutations(ev.seat_ids, len(party)):
        assignment = dict(zip(party, perm))
        score = ev.score(assignment)
        if score > best_score:
            best, best_score = assignment, score
    return best, best_score


# ---------------------------------------------------------------------------
# Greedy
# ---------------------------------------------------------------------------

def solve_greedy(
    inst: ScenarioInstance,
    w: World,
    rng: random.Random | None = None,
    weight_aware: bool = True,
    evaluator: Evaluator | None = None,
) -> dict[str, str]:
    """Place NPCs one by one on the seat with the best incremental gain.

    Weight-aware mode processes NPCs in descending total-constraint-weight
    order; the weight-blind baseline uses a seeded random order instead."""
    ev = evaluator or Evaluator(inst, w)
    rng = rng or random.Random(0)
    if weight_aware:
        order = sorted(inst.party, key=lambda n: (-ev.total_weight_by_npc[n], n))
    else:
        order = list(inst.party)
        rng.shuffle(order)
    partial: dict[str, str] = {}
    used: set[str] = set()
    for npc in order:
        candidates = sorted(s for s in ev.seat_ids if s not in used)
        best_seat = max(
            candidates, key=lambda s: (ev.placement_gain(partial, npc, s), s)
        )
        # max() with a (gain, id) key prefers the lexicographically larger id
        # on ties; flip to smallest id for a stable, documented rule.
        best_gain = ev.placement_gain(partial, npc, best_seat)
        for s in candidates:
            if ev.placement_gain(partial, npc, s) == best_gain:
                best_seat = s
                break
        partial[npc] = best_seat
        used.add(best_seat)
    return partial


# ---------------------------------------------------------------------------
# Simulated annealing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnealSchedule:
    cooling: float = 0.995
    moves: int = 4000
    initial_temperature: float | None = None   # None: calibrated per instance


def solve_local_search(
    inst: ScenarioInstance,
    w: World,
    schedule: AnnealSchedule = AnnealSchedule(),
    rng: random.Random | None = None,
    evaluator: Evaluator | None = None,
) -> tuple[dict[str, str], SolverTrace]:
    """Swap-move annealing from a greedy start; zero temperature degenerates
    to hill climbing."""
    ev = evaluator or Evaluator(inst, w)
    rng = rng or random.Random(0)
    trace = SolverTrace()
    start = time.perf_counter()

    current = solve_greedy(inst, w, evaluator=ev)
    current_score = ev.score(current)
    best, best_score = dict(current), current_score
    trace.record(0, current, current_score, ev.unmet_count(current))

    party = sorted(inst.party)
    if len(party) < 2:
        trace.wall_time = time.perf_counter() - start
        trace.termination = "converged"
        return best, trace

    temperature = schedule.initial_temperature
    if temperature is None:
        deltas = []
        probe = dict(current)
        for _ in range(100):
            a, b = rng.sample(party, 2)
            probe[a], probe[b] = probe[b], probe[a]
            deltas.append(abs(ev.score(probe) - current_score))
            probe[a], probe[b] = probe[b], probe[a]
        temperature = max(sum(deltas) / len(deltas), 1e-6)

    for move in range(1, schedule.moves + 1):
        a, b = rng.sample(party, 2)
        current[a], current[b] = current[b], current[a]
        new_score = ev.score(current)
        delta = new_score - current_score
        accept = delta >= 0 or (
            temperature > 1e-12 and rng.random() < math.exp(delta / temperature)
        )
        if accept:
            current_score = new_score
            if new_score > best_score:
                best, best_score = dict(current), new_score
                trace.record(move, current, new_score, ev.unmet_count(current))
        else:
            current[a], current[b] = current[b], current[a]
        temperature *= schedule.cooling
    trace.moves = schedule.moves
    trace.wall_time = time.perf_counter() - start
    trace.termination = "budget"
    if not trace.steps or trace.steps[-1].assignment_digest != tuple(sorted(best.items())):
        trace.record(schedule.moves, best, best_score, ev.unmet_count(best))
    return best, trace


# ---------------------------------------------------------------------------
# Generate-and-reflect loop
# ---------------------------------------------------------------------------

class RepairAgent:
    """Built-in proposer: greedy start, then the best single swap that the
    agent believes fixes the highest-weight unmet constraint."""

    def __init__(self, inst: ScenarioInstance, w: World, digest: dict | None = None):
        self.inst = inst
        self.world = w
        self.evaluator = Evaluator(inst, w, digest=digest)

    def propose(self, previous: dict | None, reflection) -> dict[str, str]:
        if previous is None:
            return solve_greedy(self.inst, self.world, evaluator=self.evaluator)
        unmet = list(reflection.unmet) if reflection is not None else []
        believed = self.evaluator.score(previous)
        party = sorted(self.inst.party)
        for entry in unmet:
            parties = self._constraint_parties(entry.ref)
            best_swap, best_score = None, believed
            for npc in parties:
                for other in party:
                    if other == npc:
                        continue
                    trial = dict(previous)
                    trial[npc], trial[other] = trial[other], trial[npc]
                    score = self.evaluator.score(trial)
                    if score > best_score + 1e-9:
                        best_swap, best_score = trial, score
            if best_swap is not None:
                return best_swap
        return dict(previous)

    def _constraint_parties(self, ref: str) -> list[str]:
        parts = ref.split(":")
        if parts[0] == "conflict":
            return [parts[1], parts[2]]
        return [parts[1]]


def reflect_loop(
    agent,
    inst: ScenarioInstance,
    w: World,
    max_iters: int = 10,
) -> tuple[dict[str, str], SolverTrace]:
    """Iterate propose -> score -> reflect until the proposal stops changing
    or the iteration limit is reached. Reflection reports (not numeric
    scores) are the only dynamic feedback the agent receives."""
    from .scoring import AssignmentError, reflect, validate_assignment

    trace = SolverTrace()
    start = time.perf_counter()
    previous: dict[str, str] | None = None
    reflection = None
    best: dict[str, str] | None = None

    for iteration in range(max_iters + 1):
        proposal = agent.propose(previous, reflection)
        try:
            validate_assignment(inst, proposal)
        except AssignmentError:
            proposal = agent.propose(previous, reflection)
            validate_assignment(inst, proposal)
        report = score_instance(inst, proposal, w)
        reflection = reflect(inst, proposal, w)
        trace.record(
            iteration, proposal, report.scaled_score, len(reflection.unmet)
        )
        if best is None or report.scaled_score >= trace.steps[-1].best_score:
            if best is None or report.scaled_score == trace.steps[-1].best_score:
                best = dict(proposal)
        if previous is not None and proposal == previous:
            trace.termination = "converged"
            break
        previous = proposal
        if iteration == max_iters:
            trace.termination = "iteration_limit"
            break
    else:
        trace.termination = "iteration_limit"
    trace.wall_time = time.perf_counter() - start

    best_step = max(trace.steps, key=lambda s: s.score)
    return dict(best_step.assignment_digest), trace
