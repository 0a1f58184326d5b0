"""Command line: ``plan``, ``bench`` and ``validate``.

Exit codes: 0 success, 1 usage or configuration error, 2 planning failure
(or, for ``validate``, a rejected path).
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, se3
from .bench import export, metrics, replay, runner, scene as scene_mod, tasks as tasks_mod
from .planner import InvalidQuery, PlanningTimeout, tcbirrt_plan

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pose(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if len(vals) != 6:
        raise argparse.ArgumentTypeError("a pose needs 6 values: x,y,z,roll,pitch,yaw")
    return np.array(vals)


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser():
    p = _Parser(prog="tcbirrt", description="Closed-chain dual-arm planning and benchmarking.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pl = sub.add_parser("plan", help="plan one query")
    pl.add_argument("--scene", required=True, help="scene file or bundled name (desk_tier1..3)")
    pl.add_argument("--start-pose", required=True, type=_pose)
    pl.add_argument("--goal-pose", required=True, type=_pose)
    pl.add_argument("--seed", type=_seed, default=0)
    pl.add_argument("--timeout", type=_nonneg, default=60.0)
    pl.add_argument("--out", required=True)
    pl.add_argument("--clock", choices=("wall", "work"), default="wall")

    be = sub.add_parser("bench", help="run a randomized benchmark")
    be.add_argument("--scene", required=True)
    be.add_argument("--tasks", type=int, required=True)
    be.add_argument("--seed", type=_seed, default=0)
    be.add_argument("--timeout", type=_nonneg, default=60.0)
    be.add_argument("--out", required=True)
    be.add_argument("--clock", choices=("wall", "work"), default="wall",
                    help="'work' makes recorded times deterministic")
    be.add_argument("--n-t-min", type=int, default=None,
                    help="trimmed-statistics sample size (default by scene tier)")
    be.add_argument("--quiet", action="store_true")

    va = sub.add_parser("validate", help="replay a path file against a scene")
    va.add_argument("--path", required=True)
    va.add_argument("--scene", required=True)
    return p


def _load(name):
    try:
        return scene_mod.load_scene(name)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    except scene_mod.SceneError as exc:
        raise UsageError(f"{name}: {exc}") from None


def _solve(scn, world, xi, q_seed, label):
    q = tasks_mod.solve_endpoint(world, xi, q_seed, scn.ik_params(), scn.planner_params().constraint_tol)
    if q is None:
        raise UsageError(f"{label} pose has no valid collision-free IK solution from the nominal seed")
    return q


def cmd_plan(args):
    scn = _load(args.scene)
    world = scn.world()
    xi_s = se3.transform_to_deviation(se3.pose_to_transform(args.start_pose))
    xi_g = se3.transform_to_deviation(se3.pose_to_transform(args.goal_pose))
    q_s = _solve(scn, world, xi_s, scn.nominal_start_q, "start")
    q_g = _solve(scn, world, xi_g, scn.nominal_goal_q, "goal")
    params = scn.planner_params(timeout=args.timeout, seed=args.seed, clock=args.clock)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = tcbirrt_plan(q_s, xi_s, q_g, xi_g, world, params)
    except PlanningTimeout as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except InvalidQuery as exc:
        raise UsageError(str(exc)) from None
    export.write_path_file(result, out / "path.json", runner.path_metadata(scn, args.seed))
    stats = dict(result.stats, path_len_rad=result.path_length())
    (out / "stats.json").write_text(json.dumps(stats, indent=2, default=_jsonable) + "\n")
    print(f"planned in {stats['planning_time']:.3f} s, {len(result.segments)} segment(s), "
          f"regrasp={'yes' if result.regrasp else 'no'} -> {out / 'path.json'}")
    return EXIT_OK


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(type(v))


def cmd_bench(args):
    if args.tasks < 1:
        raise UsageError("--tasks must be at least 1")
    scn = _load(args.scene)
    world = scn.world()
    try:
        task_list = tasks_mod.generate_tasks(scn, args.tasks, np.random.default_rng(args.seed), world=world)
    except tasks_mod.GenerationExhausted as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)

    def progress(rec):
        if not args.quiet:
            status = "ok  " if rec.success else "FAIL"
            print(f"task {rec.task_id:4d} {status} {rec.time_s:8.3f} s", flush=True)

    records = runner.run_benchmark(scn, task_list, args.timeout, args.seed, out, args.clock, world, progress)
    n_t_min = args.n_t_min
    if n_t_min is None:
        n_t_min = metrics.N_T_MIN_BY_TIER.get(scn.tier)
    report = metrics.summarize(records, args.timeout, n_t_min) if args.timeout > 0 else \
        metrics.summarize(records, 0.0, None, grid=[0.0])
    export.write_curve_csv(report, out / "curve.csv")
    summary = {
        "scene": scn.name,
        "tasks": len(records),
        "successes": sum(r.success for r in records),
        "success_fraction": report.extra["success_fraction"],
        "median_time_s": report.extra.get("median_time"),
        "n_t_min": report.n_t_min,
        "trimmed_mean_s": report.mean_time,
        "trimmed_std_s": report.std_time,
        "note": report.extra.get("insufficient"),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"{summary['successes']}/{summary['tasks']} succeeded; median time "
          f"{summary['median_time_s'] if summary['median_time_s'] is not None else float('nan'):.3f} s")
    return EXIT_OK


def cmd_validate(args):
    scn = _load(args.scene)
    try:
        rep = replay.validate_path_file(args.path, scn)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read path file: {exc}") from None
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if rep.ok:
        print(f"valid: {rep.states_checked} states checked")
        return EXIT_OK
    for e in rep.errors:
        print(f"invalid: {e}")
    return EXIT_FAILED


COMMANDS = {"plan": cmd_plan, "bench": cmd_bench, "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
