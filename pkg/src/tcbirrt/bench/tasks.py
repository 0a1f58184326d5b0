"""Randomized start/goal tasks around a scene's nominal object poses."""

from dataclasses import dataclass

import numpy as np

from .. import kinematics, se3

POSITION_RANGE = 0.2
ANGLE_RANGE = 0.5
RESAMPLE_FACTOR = 100


class GenerationExhausted(RuntimeError):
    """Too many perturbation draws were rejected; the nominal pose is likely infeasible."""


@dataclass
class TaskInstance:
    id: int
    start_pose: np.ndarray
    goal_pose: np.ndarray
    q_start: np.ndarray
    q_goal: np.ndarray
    start_perturbation: np.ndarray
    goal_perturbation: np.ndarray
    resamples: int = 0


def sample_perturbation(rng, position_range=POSITION_RANGE, angle_range=ANGLE_RANGE):
    """``[p_e, e_u]`` with components uniform in ``[-r, r]``."""
    p = rng.uniform(-position_range, position_range, 3) if position_range > 0 else np.zeros(3)
    u = rng.uniform(-angle_range, angle_range, 3) if angle_range > 0 else np.zeros(3)
    return np.concatenate([p, u])


def perturbed_pose(nominal, perturbation):
    """Object pose ``T_nominal @ T_e`` as a 6-vector."""
    T = se3.pose_to_transform(nominal) @ se3.pose_to_transform(perturbation)
    return se3.transform_to_deviation(T)


def solve_endpoint(world, xi, q_seed, ik_params, constraint_tol=(2e-3, 2e-3)):
    """Joint solution holding the object at ``xi`` that passes every task check, or ``None``."""
    system = world.system
    T_o = se3.pose_to_transform(xi)
    try:
        q = kinematics.ik_dual(system, q_seed, T_o, ik_params)
    except kinematics.Unreachable:
        return None
    if not system.within_limits(q):
        return None
    h = kinematics.closed_chain_deviation(system, q)
    if np.linalg.norm(h[:3]) > constraint_tol[0] or np.linalg.norm(h[3:]) > constraint_tol[1]:
        return None
    if world.configuration_in_collision(q, T_o):
        return None
    return q


def generate_tasks(scene, count, rng=None, position_range=POSITION_RANGE, angle_range=ANGLE_RANGE,
                   world=None):
    """Draw ``count`` tasks; invalid draws are resampled up to ``100 * count`` times in total."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(scene.seed if rng is None else int(rng))
    world = scene.world() if world is None else world
    ik_params = scene.ik_params()
    tol = scene.planner_params().constraint_tol
    budget = RESAMPLE_FACTOR * count
    rejected = 0
    tasks = []
    for task_id in range(count):
        local = 0
        ends = []
        for nominal, q_nom in ((scene.nominal_start, scene.nominal_start_q),
                               (scene.nominal_goal, scene.nominal_goal_q)):
            while True:
                e = sample_perturbation(rng, position_range, angle_range)
                xi = perturbed_pose(nominal, e)
                q = solve_endpoint(world, xi, q_nom, ik_params, tol)
                if q is not None:
                    ends.append((xi, q, e))
                    break
                rejected += 1
                local += 1
                if rejected > budget:
                    raise GenerationExhausted(
                        f"{rejected} draws rejected while generating {count} tasks")
        (xs, qs, es), (xg, qg, eg) = ends
        tasks.append(TaskInstance(task_id, xs, xg, qs, qg, es, eg, local))
    return tasks
