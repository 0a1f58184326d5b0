"""Run the planner over a task list and record one trial per task."""

import time
from pathlib import Path

from .. import __version__
from ..planner import InvalidQuery, PlanningTimeout, tcbirrt_plan
from .export import TrialsWriter, write_path_file
from .metrics import TrialRecord
from .scene import scene_hash


def task_seed(seed, task_id):
    return int(seed) ^ int(task_id)


def path_metadata(scene, seed, task_id=None):
    meta = {"scene": scene.name, "scene_hash": scene_hash(scene), "seed": int(seed), "version": __version__}
    if task_id is not None:
        meta["task_id"] = int(task_id)
    return meta


def run_trial(world, scene, task, timeout, seed, clock="wall"):
    """Plan one task; returns ``(TrialRecord, PlanResult or None)``."""
    params = scene.planner_params(timeout=float(timeout), seed=task_seed(seed, task.id), clock=clock)
    t0 = time.perf_counter()
    try:
        result = tcbirrt_plan(task.q_start, task.start_pose, task.q_goal, task.goal_pose, world, params)
    except (PlanningTimeout, InvalidQuery):
        result = None
    wall = time.perf_counter() - t0
    if result is not None:
        elapsed = wall if clock == "wall" else result.stats["planning_time"]
        if elapsed <= timeout:
            return TrialRecord(task.id, True, elapsed, result.stats["iterations"],
                               result.path_length(), result.regrasp), result
    return TrialRecord(task.id, False, float(timeout)), None


def run_benchmark(scene, tasks, timeout, seed=None, out_dir=None, clock="wall", world=None,
                  progress=None):
    """One :class:`TrialRecord` per task.

    With ``out_dir`` the rows of ``trials.csv`` are written as trials finish
    and each successful plan goes to ``paths/task_XXXX.json``.
    """
    if not tasks:
        raise ValueError("no tasks")
    seed = scene.seed if seed is None else seed
    world = scene.world() if world is None else world
    writer = None
    if out_dir is not None:
        out = Path(out_dir)
        (out / "paths").mkdir(parents=True, exist_ok=True)
        writer = TrialsWriter(out / "trials.csv")
    records = []
    try:
        for task in tasks:
            rec, result = run_trial(world, scene, task, timeout, seed, clock)
            records.append(rec)
            if writer is not None:
                writer.write(rec)
                if result is not None:
                    write_path_file(result, out / "paths" / f"task_{task.id:04d}.json",
                                    path_metadata(scene, task_seed(seed, task.id), task.id))
            if progress is not None:
                progress(rec)
    finally:
        if writer is not None:
            writer.close()
    return records
