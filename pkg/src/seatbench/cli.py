"""Command-line harness: generate datasets, evaluate answers, run solvers,
summarize distributions, render plans, and serve the HTTP protocol."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import random
import sys
import time
from pathlib import Path

from . import __version__
from .generator import (
    generate_dataset,
    instance_kind_counts,
    load_instance,
    total_variation_distance,
)
from .scoring import AssignmentError, prioritization_gap, score_instance
from .world import load_world

ANSWER_SCHEMA_VERSION = 1


def _dump_json(data: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _config_digest(args: argparse.Namespace) -> str:
    material = json.dumps(
        {k: v for k, v in sorted(vars(args).items()) if k != "func"},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(material.encode()).hexdigest()[:16]


def run_manifest(args, command: str, seeds: list[int], inputs: list[str],
                 outputs: list[str], started: float) -> dict:
    return {
        "command": command,
        "config_digest": _config_digest(args),
        "seeds": seeds,
        "input_ids": inputs,
        "output_paths": outputs,
        "tool_version": __version__,
        "wall_time": time.time() - started,
    }


def _parse_levels(spec: str) -> list[int]:
    levels: list[int] = []
    for part in spec.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            levels.extend(range(int(lo), int(hi) + 1))
        else:
            levels.append(int(part))
    return levels


def load_answer(path: Path) -> dict:
    data = json.loads(path.read_text(encoding="utf-8"))
    # Ground-truth sidecars are accepted directly as answer files.
    if "assignment" not in data and "ground_truth" in data:
        data["assignment"] = data["ground_truth"]
    if "assignment" not in data:
        raise AssignmentError("answer file has no 'assignment' field")
    return data


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    started = time.time()
    w = load_world()
    levels = _parse_levels(args.levels)
    out_dir = Path(args.out)
    manifest = generate_dataset(levels, args.per_level, w, args.seed, out_dir=out_dir)
    outputs = [e["path"] for e in manifest["instances"]]
    outputs += [e["sidecar"] for e in manifest["instances"]]
    rm = run_manifest(args, "gen", [args.seed],
                      [e["id"] for e in manifest["instances"]],
                      outputs + [str(out_dir / "manifest.json")], started)
    _dump_json(rm, out_dir / "run-manifest.json")
    print(f"generated {len(manifest['instances'])} instances in {out_dir}")
    return 0


def cmd_eval(args) -> int:
    started = time.time()
    w = load_world()
    inst = load_instance(args.instance)
    try:
        answer = load_answer(Path(args.answer))
        report = score_instance(inst, answer["assignment"], w, fine=args.fine)
    except AssignmentError as exc:
        print(f"invalid answer: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out) if args.out else Path(args.answer).with_suffix(".report.json")
    _dump_json(report.to_dict(), out)
    csv_path = out.with_suffix(".csv")
    header = ["instance_id", "scaled_score"] + list(report.categories)
    csv_path.write_text(
        ",".join(header) + "\n" + report.csv_row() + "\n", encoding="utf-8"
    )
    rm = run_manifest(args, "eval", [], [inst.id], [str(out), str(csv_path)], started)
    _dump_json(rm, out.with_suffix(".manifest.json"))
    print(f"{inst.id}: scaled score {report.scaled_score:.2f} "
          f"(fully satisfied: {report.fully_satisfied})")
    return 0


def cmd_solve(args) -> int:
    from .solvers import (
        AnnealSchedule,
        RepairAgent,
        reflect_loop,
        solve_exact,
        solve_greedy,
        solve_local_search,
    )

    started = time.time()
    w = load_world()
    inst = load_instance(args.instance)
    rng = random.Random(args.seed)
    trace = None
    if args.solver == "exact":
        assignment, trace = solve_exact(inst, w, node_budget=args.node_budget)
    elif args.solver == "greedy":
        assignment = solve_greedy(inst, w, rng=rng, weight_aware=not args.weight_blind)
    elif args.solver == "anneal":
        schedule = AnnealSchedule(cooling=args.cooling, moves=args.moves)
        assignment, trace = solve_local_search(inst, w, schedule=schedule, rng=rng)
    elif args.solver == "reflect":
        agent = RepairAgent(inst, w)
        assignment, trace = reflect_loop(agent, inst, w, max_iters=args.max_iters)
    else:
        print(f"unknown solver {args.solver!r}", file=sys.stderr)
        return 2

    report = score_instance(inst, assignment, w)
    out = Path(args.out) if args.out else Path(f"{inst.id}-{args.solver}-answer.json")
    _dump_json(
        {
            "schema_version": ANSWER_SCHEMA_VERSION,
            "instance_id": inst.id,
            "solver": args.solver,
            "assignment": assignment,
        },
        out,
    )
    outputs = [str(out)]
    if trace is not None:
        trace_path = out.with_suffix(".trace.json")
        _dump_json(trace.to_dict(), trace_path)
        outputs.append(str(trace_path))
    rm = run_manifest(args, "solve", [args.seed], [inst.id], outputs, started)
    _dump_json(rm, out.with_suffix(".manifest.json"))
    print(f"{inst.id}: {args.solver} scored {report.scaled_score:.2f}")
    return 0


def cmd_stats(args) -> int:
    started = time.time()
    dataset = Path(args.dataset)
    kind_counts: dict[str, int] = {}
    level_counts: dict[int, int] = {}
    instance_ids = []
    for path in sorted(dataset.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if "scene" not in data or "party" not in data:
            continue   # sidecars, manifests, reports
        inst = load_instance(path)
        instance_ids.append(inst.id)
        for key, n in instance_kind_counts(inst).items():
            kind_counts[key] = kind_counts.get(key, 0) + n
        level_counts[inst.level] = level_counts.get(inst.level, 0) + 1

    out = Path(args.out) if args.out else dataset / "stats.csv"
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "template", "count"])
        for key in sorted(kind_counts):
            kind, template = key.split("|")
            writer.writerow([kind, template, kind_counts[key]])
    levels_path = out.with_suffix(".levels.csv")
    with levels_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "instances"])
        for level in sorted(level_counts):
            writer.writerow([level, level_counts[level]])

    outputs = [str(out), str(levels_path)]
    if args.compare:
        other = json.loads(Path(args.compare).read_text(encoding="utf-8"))
        tv = total_variation_distance(kind_counts, other["kind_counts"])
        print(f"total variation distance vs {args.compare}: {tv:.4f}")
    rm = run_manifest(args, "stats", [], instance_ids, outputs, started)
    _dump_json(rm, out.with_suffix(".manifest.json"))
    print(f"{len(instance_ids)} instances, "
          f"{sum(kind_counts.values())} constraints; tables in {out}")
    return 0


def cmd_render(args) -> int:
    from .render_svg import render_instance

    started = time.time()
    w = load_world()
    inst = load_instance(args.instance)
    assignment = None
    if args.answer:
        assignment = load_answer(Path(args.answer))["assignment"]
    svg = render_instance(inst, w, assignment)
    out = Path(args.out) if args.out else Path(f"{inst.id}.svg")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    rm = run_manifest(args, "render", [], [inst.id], [str(out)], started)
    _dump_json(rm, out.with_suffix(".manifest.json"))
    print(f"wrote {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    try:
        app = create_app(args.data, static_dir=args.static)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seatbench",
        description="Seat-ordering benchmark harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a dataset of instances")
    p.add_argument("--levels", default="1..70", help="e.g. 1..70 or 1,5,12")
    p.add_argument("--per-level", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", help="score an answer file against an instance")
    p.add_argument("instance")
    p.add_argument("answer")
    p.add_argument("--fine", action="store_true", help="split social subcategories")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("solve", help="run a built-in solver on an instance")
    p.add_argument("instance")
    p.add_argument("--solver", default="exact",
                   choices=["exact", "greedy", "anneal", "reflect"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-budget", type=int, default=2_000_000)
    p.add_argument("--cooling", type=float, default=0.995)
    p.add_argument("--moves", type=int, default=4000)
    p.add_argument("--max-iters", type=int, default=10)
    p.add_argument("--weight-blind", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stats", help="frequency tables for a dataset directory")
    p.add_argument("dataset")
    p.add_argument("--compare", help="manifest.json to compare distributions against")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", help="render an instance (and answer) to SVG")
    p.add_argument("instance")
    p.add_argument("--answer")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve the HTTP protocol and console UI")
    p.add_argument("--data", required=True, help="directory of instance files")
    p.add_argument("--static", help="directory of UI static assets")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
