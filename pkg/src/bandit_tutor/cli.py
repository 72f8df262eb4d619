"""Command-line entry point: simulate, derive-difficulty, validate, plot, serve."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from .curriculum import (
    CurriculumError,
    generate_synthetic_curriculum,
    load_curriculum,
)
from .seeding import derive_seed


def _parse_curriculum_arg(value: str, seed: int):
    match = re.fullmatch(r"synthetic:(\d+)x(\d+)x(\d+)", value)
    if match:
        sections, concepts, problems = (int(g) for g in match.groups())
        return generate_synthetic_curriculum(
            sections, concepts, problems, seed=derive_seed(seed, "curriculum")
        )
    return load_curriculum(value)


def _cmd_simulate(args: argparse.Namespace) -> int:
    from .experiment import ALL_GROUPS, ExperimentPlan, emit, run_experiment
    from .students import load_bkt_params

    seed = args.seed
    env_seed = os.environ.get("BANDIT_TUTOR_SEED")
    if env_seed is not None:
        seed = int(env_seed)
    curriculum = _parse_curriculum_arg(args.curriculum, seed)
    groups = tuple(g.strip() for g in args.groups.split(",") if g.strip())
    unknown = set(groups) - set(ALL_GROUPS)
    if unknown:
        print(f"unknown group(s): {', '.join(sorted(unknown))}", file=sys.stderr)
        return 2
    params = load_bkt_params(args.bkt_params) if args.bkt_params else None
    plan = ExperimentPlan(
        curriculum=curriculum,
        groups=groups,
        students_per_group=args.students,
        base_seed=seed,
        bkt_params=params,
        mcm_enabled=args.mcm,
    )
    result = run_experiment(plan)
    paths = emit(result, args.out)
    print(f"seed={seed} students={args.students} groups={','.join(groups)}")
    for group, curve in result.curves.items():
        print(f"  {group}: final mean mastery {curve.mean[-1]:.4f} "
              f"over {len(curve.mean) - 1} questions")
    print(f"wrote {paths['curves']}, {paths['counts']}, {paths['plot']}, "
          f"logs under {paths['logs']}")
    return 0


def _cmd_derive_difficulty(args: argparse.Namespace) -> int:
    from .students import fit_difficulties_from_responses, read_response_table

    rows = read_response_table(args.responses)
    difficulties = fit_difficulties_from_responses(rows)
    Path(args.out).write_text(
        json.dumps(difficulties, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote difficulties for {len(difficulties)} problems to {args.out}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        curriculum = load_curriculum(args.curriculum)
    except CurriculumError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    sections = len(curriculum.sections)
    print(
        f"ok: {sections} section(s), {len(curriculum.concepts)} concept(s), "
        f"{len(curriculum.problems)} problem(s)"
    )
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    from .experiment import load_curves
    from .plotting import render_curves

    curves = load_curves(args.input)
    path = render_curves(curves, Path(args.input) / "curves.png")
    print(f"wrote {path}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    curriculum = load_curriculum(args.curriculum)
    app = create_app(
        curriculum,
        data_dir=args.data_dir,
        curriculum_id=Path(args.curriculum).stem,
        ui_dir=args.ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandit-tutor",
        description="Hierarchical bandit tutoring: simulation harness and live service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the three-group student simulation")
    sim.add_argument("--curriculum", required=True,
                     help="curriculum file, or synthetic:SxCxP (e.g. synthetic:5x3x10)")
    sim.add_argument("--students", type=int, default=500)
    sim.add_argument("--groups", default="random,agnostic,full")
    sim.add_argument("--seed", type=int, default=0,
                     help="base seed (BANDIT_TUTOR_SEED overrides)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--mcm", action="store_true",
                     help="enable memory-decay review weights")
    sim.add_argument("--bkt-params", default=None,
                     help="JSON file of per-concept BKT parameters")
    sim.set_defaults(func=_cmd_simulate)

    derive = sub.add_parser("derive-difficulty",
                            help="fit problem difficulties from a response table")
    derive.add_argument("--responses", required=True,
                        help="CSV with columns problem_id, correct")
    derive.add_argument("--out", required=True, help="output JSON file")
    derive.set_defaults(func=_cmd_derive_difficulty)

    val = sub.add_parser("validate", help="check a curriculum file")
    val.add_argument("--curriculum", required=True)
    val.set_defaults(func=_cmd_validate)

    plot = sub.add_parser("plot", help="re-render the figure from emitted CSVs")
    plot.add_argument("--in", dest="input", required=True,
                      help="directory containing curves.csv")
    plot.set_defaults(func=_cmd_plot)

    serve = sub.add_parser("serve", help="run the live tutoring service")
    serve.add_argument("--curriculum", required=True)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", required=True,
                       help="directory for session snapshots")
    serve.add_argument("--ui-dir", default=None,
                       help="directory with the built web UI (served at /)")
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CurriculumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
