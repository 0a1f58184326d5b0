"""Replay a stored plan against a scene and report every violated invariant."""

from dataclasses import dataclass, field

import numpy as np

from .. import kinematics, se3
from ..collision import interpolate_joints
from .export import read_path_file
from .scene import scene_hash


@dataclass
class ReplayReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    states_checked: int = 0

    @property
    def ok(self):
        return not self.errors


def _grip_error(system, q, T_o):
    worst = (0.0, 0.0)
    for Tg, Te in zip(kinematics.object_to_ee_targets(T_o, system), system.end_effectors(q)):
        e_p, e_o = kinematics.pose_error(Tg[:3, 3], Tg[:3, :3], Te)
        worst = (max(worst[0], float(np.linalg.norm(e_p))), max(worst[1], float(np.linalg.norm(e_o))))
    return worst


def validate_plan(data, scene, world=None, max_errors=20):
    """Check a path dict (see :func:`read_path_file`) against ``scene``.

    Transport states must satisfy the closed-chain bound, hold the object at
    their recorded pose, be collision-free and move at most the continuity
    bound per step.  Regrasp segments keep one object pose and are checked
    at the collision step between consecutive states.
    """
    world = scene.world() if world is None else world
    system = world.system
    params = scene.planner_params()
    tol_p, tol_o = params.constraint_tol
    dof = sum(system.dofs)
    rep = ReplayReport()

    def err(msg):
        rep.errors.append(msg)
        return len(rep.errors) >= max_errors

    expected = data.get("metadata", {}).get("scene_hash")
    if expected and expected != scene_hash(scene):
        rep.warnings.append("scene hash differs from the one recorded in the path file")
    segments = data.get("segments", [])
    if not segments:
        err("path has no segments")
        return rep
    prev_last = None
    for s, seg in enumerate(segments):
        kind = seg.get("kind")
        joints = [np.asarray(q, dtype=float) for q in seg.get("joints", [])]
        if kind not in ("transport", "regrasp"):
            if err(f"segment {s}: unknown kind {kind!r}"):
                return rep
            continue
        if not joints:
            if err(f"segment {s}: no joint states"):
                return rep
            continue
        if any(q.shape != (dof,) for q in joints):
            if err(f"segment {s}: joint states must have {dof} values"):
                return rep
            continue
        if prev_last is not None and np.max(np.abs(joints[0] - prev_last)) > 1e-12:
            if err(f"segment {s}: does not start where segment {s - 1} ends"):
                return rep
        prev_last = joints[-1]
        poses = np.asarray(seg.get("object_pose"), dtype=float)
        if kind == "transport":
            if poses.shape != (len(joints), 6):
                if err(f"segment {s}: transport needs one object pose per joint state"):
                    return rep
                continue
            for k, (q, xi) in enumerate(zip(joints, poses)):
                rep.states_checked += 1
                where = f"segment {s} state {k}"
                if not system.within_limits(q, 1e-9):
                    if err(f"{where}: joint limits violated"):
                        return rep
                h = kinematics.closed_chain_deviation(system, q)
                hp, ho = float(np.linalg.norm(h[:3])), float(np.linalg.norm(h[3:]))
                if hp > tol_p or ho > tol_o:
                    if err(f"{where}: constraint violated (|h| position {hp:.3g} m, orientation {ho:.3g} rad)"):
                        return rep
                T_o = se3.pose_to_transform(xi)
                gp, go = _grip_error(system, q, T_o)
                if gp > tol_p or go > tol_o:
                    if err(f"{where}: grasp off the recorded object pose ({gp:.3g} m, {go:.3g} rad)"):
                        return rep
                if world.configuration_in_collision(q, T_o):
                    if err(f"{where}: collision"):
                        return rep
                if k and np.max(np.abs(q - joints[k - 1])) > params.continuity_tol:
                    if err(f"{where}: joint jump above {params.continuity_tol} rad"):
                        return rep
        else:
            if poses.shape != (6,):
                if err(f"segment {s}: regrasp needs a single held object pose"):
                    return rep
                continue
            T_o = se3.pose_to_transform(poses)
            for end, q in (("first", joints[0]), ("last", joints[-1])):
                gp, go = _grip_error(system, q, T_o)
                if gp > tol_p or go > tol_o:
                    if err(f"segment {s}: {end} regrasp state does not hold the object"):
                        return rep
            checks = [joints[0]]
            for a, b in zip(joints[:-1], joints[1:]):
                checks.extend(interpolate_joints(a, b, params.collision_step)[1:])
            for k, q in enumerate(checks):
                rep.states_checked += 1
                if not system.within_limits(q, 1e-9):
                    if err(f"segment {s} check {k}: joint limits violated"):
                        return rep
                if world.configuration_in_collision(q, T_o):
                    if err(f"segment {s} check {k}: collision during regrasp"):
                        return rep
    return rep


def validate_path_file(path, scene, world=None):
    return validate_plan(read_path_file(path), scene, world)
