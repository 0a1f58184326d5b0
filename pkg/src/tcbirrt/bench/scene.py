"""Scene files: robot, object, obstacles, nominal poses and planner settings.

A scene is one JSON document::

    {
      "name": "...", "tier": 1, "seed": 0,
      "robot": {"arms": [ARM, ARM], "grasp_links": 1},
      "object": {"half_extents": [hx, hy, hz]},
      "obstacles": [SHAPE, ...],
      "nominal_poses": {"start": {"pose": [6], "q": [14]}, "goal": {...}},
      "planner": {...PlannerParams fields..., "ik": {...IKParams fields...}}
    }

with ``ARM = {"dh": [[theta0, alpha, d, a], ...], "joint_limits": [[lo, hi], ...],
"base": [6], "grasp": [6], "link_radii": [...], "base_shape": SHAPE | null}``.
Poses are ``[x, y, z, roll, pitch, yaw]``; angles in radians, lengths in meters.
Shapes are ``{"type": "box", "half": [3], "pose": [6]}``,
``{"type": "sphere", "radius": r, "center": [3]}`` or
``{"type": "capsule", "radius": r, "p0": [3], "p1": [3]}``.
"""

import copy
import hashlib
import json
import math
import re
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .. import collision, kinematics, se3
from ..planner import PlannerParams

BUNDLED_SCENES = ("desk_tier1", "desk_tier2", "desk_tier3")

_PLANNER_KEYS = {f.name for f in fields(PlannerParams)} - {"ik", "seed", "clock", "max_iterations"}
_IK_KEYS = {f.name for f in fields(kinematics.IKParams)}


class SceneError(ValueError):
    pass


class ParseError(SceneError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ValidationError(SceneError):
    """Invalid scene content; ``field`` is a dotted path such as ``robot.arms[0].joint_limits[3]``."""

    def __init__(self, field, reason, line=None):
        self.field = field
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{field}: {reason}")


@dataclass
class SceneConfig:
    data: dict

    @property
    def name(self):
        return self.data.get("name", "scene")

    @property
    def tier(self):
        return self.data.get("tier")

    @property
    def seed(self):
        return int(self.data.get("seed", 0))

    @property
    def nominal_start(self):
        return np.array(self.data["nominal_poses"]["start"]["pose"], dtype=float)

    @property
    def nominal_goal(self):
        return np.array(self.data["nominal_poses"]["goal"]["pose"], dtype=float)

    @property
    def nominal_start_q(self):
        return np.array(self.data["nominal_poses"]["start"]["q"], dtype=float)

    @property
    def nominal_goal_q(self):
        return np.array(self.data["nominal_poses"]["goal"]["q"], dtype=float)

    def to_dict(self):
        return copy.deepcopy(self.data)

    def system(self):
        arms, grasps = [], []
        for arm in self.data["robot"]["arms"]:
            arms.append(kinematics.ManipulatorModel(
                [tuple(r) for r in arm["dh"]], arm["joint_limits"], se3.pose_to_transform(arm["base"])))
            grasps.append(se3.pose_to_transform(arm["grasp"]))
        return kinematics.DualArmSystem(tuple(arms), tuple(grasps))

    def world(self):
        robot = self.data["robot"]
        geometry = collision.RobotGeometry(
            link_radii=tuple(tuple(a["link_radii"]) for a in robot["arms"]),
            object_half=tuple(self.data["object"]["half_extents"]),
            bases=tuple(None if a.get("base_shape") is None else shape_from_dict(a["base_shape"])
                        for a in robot["arms"]),
            grasp_links=int(robot.get("grasp_links", 1)),
        )
        obstacles = [shape_from_dict(s) for s in self.data.get("obstacles", [])]
        return collision.WorldModel(self.system(), geometry, obstacles)

    def ik_params(self):
        return kinematics.IKParams(**_ik_kwargs(self.data.get("planner", {}).get("ik", {})))

    def planner_params(self, **overrides):
        cfg = self.data.get("planner", {})
        kw = {k: _tupled(v) for k, v in cfg.items() if k in _PLANNER_KEYS}
        kw["ik"] = self.ik_params()
        kw.update(overrides)
        return PlannerParams(**kw)

    def digest(self):
        return scene_hash(self)


def _tupled(v):
    return tuple(v) if isinstance(v, list) else v


def _ik_kwargs(cfg):
    return {k: _tupled(v) for k, v in cfg.items()}


def shape_from_dict(d):
    kind = d["type"]
    if kind == "box":
        return collision.Box(d["half"], se3.pose_to_transform(d.get("pose", [0.0] * 6)))
    if kind == "sphere":
        return collision.Sphere(d["radius"], d["center"])
    if kind == "capsule":
        return collision.Capsule(d["radius"], d["p0"], d["p1"])
    raise KeyError(kind)


def scene_hash(scene):
    """SHA-256 of the canonical JSON form; independent of file formatting."""
    text = json.dumps(scene.data if isinstance(scene, SceneConfig) else scene,
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


# -- validation -------------------------------------------------------------


def _num_list(value, n, field, finite=True):
    if not isinstance(value, list) or len(value) != n:
        raise ValidationError(field, f"expected a list of {n} numbers")
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError(field, "expected numbers")
        if finite and not math.isfinite(v):
            raise ValidationError(field, "values must be finite")
    return value


def _positive(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ValidationError(field, "must be a positive number")


def _require(d, key, field, kind=dict):
    if not isinstance(d, dict) or key not in d:
        raise ValidationError(field, "missing")
    if kind is not None and not isinstance(d[key], kind):
        raise ValidationError(field, f"expected {kind.__name__}")
    return d[key]


def _validate_shape(d, field):
    if not isinstance(d, dict):
        raise ValidationError(field, "expected a shape object")
    kind = d.get("type")
    if kind == "box":
        _num_list(_require(d, "half", f"{field}.half", list), 3, f"{field}.half")
        if not all(h > 0 for h in d["half"]):
            raise ValidationError(f"{field}.half", "half-extents must be positive")
        if "pose" in d:
            _num_list(d["pose"], 6, f"{field}.pose")
    elif kind == "sphere":
        _positive(d.get("radius"), f"{field}.radius")
        _num_list(_require(d, "center", f"{field}.center", list), 3, f"{field}.center")
    elif kind == "capsule":
        _positive(d.get("radius"), f"{field}.radius")
        _num_list(_require(d, "p0", f"{field}.p0", list), 3, f"{field}.p0")
        _num_list(_require(d, "p1", f"{field}.p1", list), 3, f"{field}.p1")
    else:
        raise ValidationError(f"{field}.type", f"unknown shape type {kind!r}")


def _validate_arm(arm, field):
    if not isinstance(arm, dict):
        raise ValidationError(field, "expected an arm object")
    dh = _require(arm, "dh", f"{field}.dh", list)
    if not dh:
        raise ValidationError(f"{field}.dh", "needs at least one row")
    for i, row in enumerate(dh):
        _num_list(row, 4, f"{field}.dh[{i}]")
    n = len(dh)
    limits = _require(arm, "joint_limits", f"{field}.joint_limits", list)
    if len(limits) != n:
        raise ValidationError(f"{field}.joint_limits", f"expected {n} limit pairs, got {len(limits)}")
    for i, pair in enumerate(limits):
        _num_list(pair, 2, f"{field}.joint_limits[{i}]")
        if pair[0] >= pair[1]:
            raise ValidationError(f"{field}.joint_limits[{i}]",
                                  f"joint {i}: lower limit {pair[0]} is not below upper limit {pair[1]}")
    _num_list(_require(arm, "base", f"{field}.base", list), 6, f"{field}.base")
    _num_list(_require(arm, "grasp", f"{field}.grasp", list), 6, f"{field}.grasp")
    radii = _require(arm, "link_radii", f"{field}.link_radii", list)
    _num_list(radii, n, f"{field}.link_radii")
    for i, r in enumerate(radii):
        _positive(r, f"{field}.link_radii[{i}]")
    if arm.get("base_shape") is not None:
        _validate_shape(arm["base_shape"], f"{field}.base_shape")
    return n


def validate_scene_dict(data):
    """Raise :class:`ValidationError` on the first problem found."""
    if not isinstance(data, dict):
        raise ValidationError("<root>", "expected a JSON object")
    robot = _require(data, "robot", "robot")
    arms = _require(robot, "arms", "robot.arms", list)
    if len(arms) != 2:
        raise ValidationError("robot.arms", f"expected exactly 2 arms, got {len(arms)}")
    dofs = [_validate_arm(a, f"robot.arms[{i}]") for i, a in enumerate(arms)]
    gl = robot.get("grasp_links", 1)
    if isinstance(gl, bool) or not isinstance(gl, int) or gl < 0 or gl > min(dofs):
        raise ValidationError("robot.grasp_links", "must be an integer between 0 and the link count")
    obj = _require(data, "object", "object")
    half = _num_list(_require(obj, "half_extents", "object.half_extents", list), 3, "object.half_extents")
    if not all(h > 0 for h in half):
        raise ValidationError("object.half_extents", "must be positive")
    obstacles = data.get("obstacles", [])
    if not isinstance(obstacles, list):
        raise ValidationError("obstacles", "expected a list")
    for i, s in enumerate(obstacles):
        _validate_shape(s, f"obstacles[{i}]")
    nominal = _require(data, "nominal_poses", "nominal_poses")
    for which in ("start", "goal"):
        entry = _require(nominal, which, f"nominal_poses.{which}")
        _num_list(_require(entry, "pose", f"nominal_poses.{which}.pose", list), 6, f"nominal_poses.{which}.pose")
        _num_list(_require(entry, "q", f"nominal_poses.{which}.q", list), sum(dofs), f"nominal_poses.{which}.q")
        for j, (v, (arm, k)) in enumerate(zip(entry["q"], [(a, k) for a in range(2) for k in range(dofs[a])])):
            lo, hi = arms[arm]["joint_limits"][k]
            if not lo <= v <= hi:
                raise ValidationError(f"nominal_poses.{which}.q[{j}]",
                                      f"joint {k} of arm {arm + 1} outside its limits")
    planner = data.get("planner", {})
    if not isinstance(planner, dict):
        raise ValidationError("planner", "expected an object")
    unknown = set(planner) - _PLANNER_KEYS - {"ik", "timeout"}
    if unknown:
        raise ValidationError(f"planner.{sorted(unknown)[0]}", "unknown planner setting")
    ik = planner.get("ik", {})
    if not isinstance(ik, dict) or set(ik) - _IK_KEYS:
        raise ValidationError("planner.ik", f"unknown IK setting(s) {sorted(set(ik) - _IK_KEYS)}")
    try:
        kinematics.IKParams(**_ik_kwargs(ik))
        PlannerParams(**{k: _tupled(v) for k, v in planner.items() if k in _PLANNER_KEYS})
    except (TypeError, ValueError) as exc:
        raise ValidationError("planner", str(exc)) from None
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValidationError("seed", "must be a non-negative integer")


def _anchor_line(text, field):
    """Best-effort source line of a dotted field path such as ``a.b[2].c``."""
    pos = 0
    for key, index in re.findall(r"([A-Za-z_]+)(?:\[(\d+)\])?", field):
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            break
        pos = m.end()
        if index:
            pos = _nth_container(text, pos, int(index))
    return text.count("\n", 0, pos) + 1


def _nth_container(text, pos, n):
    # position of the n-th object/array element of the array starting after pos
    start = text.find("[", pos)
    if start < 0:
        return pos
    depth, count = 0, 0
    for i in range(start, len(text)):
        ch = text[i]
        if ch in "[{":
            depth += 1
            if depth == 2:
                if count == n:
                    return i
                count += 1
        elif ch in "]}":
            depth -= 1
            if depth == 0:
                break
    return pos


def parse_scene(text):
    """Parse and validate scene JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    try:
        validate_scene_dict(data)
    except ValidationError as exc:
        raise ValidationError(exc.field, exc.reason, _anchor_line(text, exc.field)) from None
    return SceneConfig(data)


def bundled_scene_path(name):
    return Path(str(resources.files("tcbirrt.scenes").joinpath(f"{name}.json")))


def resolve_scene_path(name_or_path):
    """A file path, or the name of a bundled scene such as ``desk_tier1``."""
    p = Path(name_or_path)
    if p.exists():
        return p
    if name_or_path in BUNDLED_SCENES:
        return bundled_scene_path(name_or_path)
    raise FileNotFoundError(f"scene not found: {name_or_path}")


def load_scene(path):
    path = resolve_scene_path(path)
    return parse_scene(Path(path).read_text())


def dump_scene(scene):
    data = scene.data if isinstance(scene, SceneConfig) else scene
    return json.dumps(data, indent=2) + "\n"


def save_scene(scene, path):
    Path(path).write_text(dump_scene(scene))
