"""Primitive-geometry world model and discrete collision queries.

Obstacles, robot links and the carried object are boxes, capsules and
spheres.  Two shapes collide when their distance is <= 0, so touching counts.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kinematics


@dataclass(frozen=True, eq=False)
class Sphere:
    radius: float
    center: np.ndarray

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    def bounding_sphere(self):
        return self.center, self.radius


@dataclass(frozen=True, eq=False)
class Capsule:
    radius: float
    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("capsule radius must be positive")
        object.__setattr__(self, "p0", np.asarray(self.p0, dtype=float))
        object.__setattr__(self, "p1", np.asarray(self.p1, dtype=float))

    def bounding_sphere(self):
        c = 0.5 * (self.p0 + self.p1)
        d = self.p1 - self.p0
        return c, 0.5 * math.sqrt(d @ d) + self.radius


@dataclass(frozen=True, eq=False)
class Box:
    """Oriented box given by half-extents and the pose of its center."""

    half: np.ndarray
    pose: np.ndarray = field(default_factory=lambda: np.eye(4))

    def __post_init__(self):
        half = np.asarray(self.half, dtype=float)
        if half.shape != (3,) or not np.all(half > 0):
            raise ValueError("box half-extents must be three positive values")
        object.__setattr__(self, "half", half)
        object.__setattr__(self, "pose", np.asarray(self.pose, dtype=float))

    @property
    def center(self):
        return self.pose[:3, 3]

    @property
    def axes(self):
        return self.pose[:3, :3]

    def bounding_sphere(self):
        return self.center, math.sqrt(self.half @ self.half)

    def moved(self, T):
        """Same box with its pose pre-multiplied by ``T``."""
        return Box(self.half, T @ self.pose)


# -- distance kernels ------------------------------------------------------


def point_segment_distance(p, a, b):
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0.0 else min(1.0, max(0.0, ((p - a) @ ab) / denom))
    d = p - (a + t * ab)
    return math.sqrt(d @ d)


def segment_segment_distance(p1, q1, p2, q2):
    """Closest distance between segments ``p1q1`` and ``p2q2``."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = d1 @ d1
    e = d2 @ d2
    f = d2 @ r
    eps = 1e-15
    if a <= eps and e <= eps:
        return math.sqrt(r @ r)
    if a <= eps:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = d1 @ r
        if e <= eps:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = d1 @ d2
            denom = a * e - b * b
            s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > eps else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    d = (p1 + s * d1) - (p2 + t * d2)
    return math.sqrt(d @ d)


def point_box_distance(p, box):
    local = box.axes.T @ (p - box.center)
    excess = np.maximum(np.abs(local) - box.half, 0.0)
    return math.sqrt(excess @ excess)


def segment_box_distance(a, b, box):
    """Exact distance between segment ``ab`` and an oriented box.

    Along the segment the squared distance is convex and piecewise quadratic
    with breakpoints where a coordinate crosses a face plane; each piece is
    minimized in closed form.
    """
    R = box.axes
    la = R.T @ (a - box.center)
    d = R.T @ (b - a)
    h = box.half
    cuts = [0.0, 1.0]
    for k in range(3):
        if d[k] != 0.0:
            for bound in (-h[k], h[k]):
                t = (bound - la[k]) / d[k]
                if 0.0 < t < 1.0:
                    cuts.append(t)
    cuts.sort()
    best = math.inf
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        tm = 0.5 * (t0 + t1)
        # quadratic A t^2 + B t + C on this piece
        A = B = C = 0.0
        for k in range(3):
            x = la[k] + tm * d[k]
            if x > h[k]:
                off = la[k] - h[k]
            elif x < -h[k]:
                off = la[k] + h[k]
            else:
                continue
            A += d[k] * d[k]
            B += 2.0 * d[k] * off
            C += off * off
        if A > 0.0:
            t = min(t1, max(t0, -B / (2.0 * A)))
        else:
            t = t0
        best = min(best, A * t * t + B * t + C)
        if best <= 0.0:
            return 0.0
    return math.sqrt(max(best, 0.0))


def boxes_overlap(a, b):
    """Separating-axis test; boxes touching on a face count as overlapping."""
    Ra, Rb = a.axes, b.axes
    t = b.center - a.center
    axes = [Ra[:, i] for i in range(3)] + [Rb[:, i] for i in range(3)]
    for i in range(3):
        for j in range(3):
            c = np.cross(Ra[:, i], Rb[:, j])
            n = math.sqrt(c @ c)
            if n > 1e-9:
                axes.append(c / n)
    for L in axes:
        ra = np.sum(a.half * np.abs(Ra.T @ L))
        rb = np.sum(b.half * np.abs(Rb.T @ L))
        if abs(t @ L) > ra + rb:
            return False
    return True


def _bounds_disjoint(a, b):
    ca, ra = a.bounding_sphere()
    cb, rb = b.bounding_sphere()
    d = ca - cb
    return d @ d > (ra + rb) ** 2


def shapes_intersect(a, b):
    """True when the minimum distance between two primitives is <= 0."""
    if _bounds_disjoint(a, b):
        return False
    if isinstance(a, Box) and not isinstance(b, Box):
        a, b = b, a
    if isinstance(a, Sphere):
        if isinstance(b, Sphere):
            d = a.center - b.center
            return math.sqrt(d @ d) <= a.radius + b.radius
        if isinstance(b, Capsule):
            return point_segment_distance(a.center, b.p0, b.p1) <= a.radius + b.radius
        return point_box_distance(a.center, b) <= a.radius
    if isinstance(a, Capsule):
        if isinstance(b, Sphere):
            return point_segment_distance(b.center, a.p0, a.p1) <= a.radius + b.radius
        if isinstance(b, Capsule):
            return segment_segment_distance(a.p0, a.p1, b.p0, b.p1) <= a.radius + b.radius
        return segment_box_distance(a.p0, a.p1, b) <= a.radius
    return boxes_overlap(a, b)


# -- world model -----------------------------------------------------------


@dataclass(frozen=True)
class RobotGeometry:
    """Link radii per arm, optional base shapes and the carried object box.

    Base shapes are given in the arm's base frame.  ``grasp_links`` is the
    number of distal links per arm that touch the object at the grasp and are
    therefore not tested against it.
    """

    link_radii: tuple
    object_half: tuple = (1.0, 0.4, 0.4)
    bases: tuple = (None, None)
    grasp_links: int = 1


def default_self_pairs(system, geometry):
    """All arm-vs-arm link pairs plus each arm against its own base.

    Links are indexed 1..n, the base is index 0.  The link adjacent to the
    base (index 1) is not paired with it.
    """
    n1, n2 = system.dofs
    pairs = []
    has_base = [b is not None for b in geometry.bases]
    for i in range(0 if has_base[0] else 1, n1 + 1):
        for j in range(0 if has_base[1] else 1, n2 + 1):
            if i == 0 and j == 0:
                continue
            pairs.append(((0, i), (1, j)))
    for arm, n in enumerate((n1, n2)):
        if has_base[arm]:
            pairs.extend(((arm, 0), (arm, k)) for k in range(2, n + 1))
    return tuple(pairs)


class WorldModel:
    """Obstacles plus the dual-arm robot, queried one configuration at a time."""

    def __init__(self, system, geometry, obstacles=(), self_collision_pairs=None):
        self.system = system
        self.geometry = geometry
        self.obstacles = tuple(obstacles)
        n1, n2 = system.dofs
        if len(geometry.link_radii) != 2 or len(geometry.link_radii[0]) != n1 or len(geometry.link_radii[1]) != n2:
            raise ValueError("link_radii must give one radius per link of each arm")
        if self_collision_pairs is None:
            self_collision_pairs = default_self_pairs(system, geometry)
        for (a, i), (b, j) in self_collision_pairs:
            if a == b and abs(i - j) <= 1:
                raise ValueError(f"self-collision pair ({a},{i})-({b},{j}) joins adjacent links")
        self.self_collision_pairs = tuple(self_collision_pairs)
        self._bases = tuple(
            None if shape is None else _place(shape, arm.base)
            for shape, arm in zip(geometry.bases, system.arms)
        )
        self._object_box = Box(geometry.object_half)

    def link_shapes(self, q):
        """Per-arm lists indexed like DH links; index 0 is the base (or None)."""
        out = []
        for arm, model, qi in zip(range(2), self.system.arms, self.system.split(q)):
            frames, _ = kinematics.forward_kinematics(model, qi)
            pts = kinematics.joint_origins(model, frames)
            radii = self.geometry.link_radii[arm]
            shapes = [self._bases[arm]]
            shapes.extend(Capsule(radii[k], pts[k], pts[k + 1]) for k in range(model.n))
            out.append(shapes)
        return out

    def attached_object_pose(self, q):
        return self.system.object_pose(q, arm=0)

    def object_shape(self, T_o):
        return self._object_box.moved(T_o)

    def configuration_in_collision(self, q, object_pose="attached"):
        """Collision status of ``q`` with the object at ``object_pose``.

        ``object_pose`` is a 4x4 transform, ``"attached"`` to place it from
        arm 1's end effector, or ``None`` to ignore the object.
        """
        links = self.link_shapes(q)
        if isinstance(object_pose, str):
            object_pose = self.attached_object_pose(q)
        obj = None if object_pose is None else self.object_shape(object_pose)
        movers = [s for arm in links for s in arm[1:]]
        if obj is not None:
            movers.append(obj)
        for obs in self.obstacles:
            for s in movers:
                if shapes_intersect(s, obs):
                    return True
        if obj is not None:
            skip = self.geometry.grasp_links
            for arm in links:
                for k, s in enumerate(arm):
                    if s is None or k > len(arm) - 1 - skip:
                        continue
                    if shapes_intersect(s, obj):
                        return True
        for (a, i), (b, j) in self.self_collision_pairs:
            if shapes_intersect(links[a][i], links[b][j]):
                return True
        return False

    def path_collision_free(self, Q, object_poses="attached"):
        """AND of per-configuration checks; ``object_poses`` is one pose per state,
        a single shared pose, or ``"attached"``."""
        if len(Q) == 0:
            raise ValueError("empty configuration sequence")
        if isinstance(object_poses, str) or object_poses is None or np.ndim(object_poses) == 2:
            object_poses = [object_poses] * len(Q)
        return not any(self.configuration_in_collision(q, T) for q, T in zip(Q, object_poses))

    def joint_segment_collision_free(self, q_from, q_to, step=0.2, object_pose=None):
        """Check the straight joint-space segment at max-norm spacing <= ``step``.

        Both endpoints are always checked; the object stays at ``object_pose``.
        """
        if step <= 0:
            raise ValueError("step must be positive")
        for q in interpolate_joints(q_from, q_to, step):
            if self.configuration_in_collision(q, object_pose):
                return False
        return True


def interpolate_joints(q_from, q_to, step):
    """States from ``q_from`` to ``q_to`` inclusive, max-norm spacing <= ``step``."""
    q_from = np.asarray(q_from, dtype=float)
    q_to = np.asarray(q_to, dtype=float)
    span = float(np.max(np.abs(q_to - q_from))) if q_from.size else 0.0
    k = max(1, math.ceil(span / step - 1e-12))
    if span == 0.0:
        return [q_from]
    return [q_from + (q_to - q_from) * (i / k) for i in range(k + 1)]


def _place(shape, T):
    if isinstance(shape, Box):
        return shape.moved(T)
    if isinstance(shape, Sphere):
        return Sphere(shape.radius, T[:3, :3] @ shape.center + T[:3, 3])
    return Capsule(shape.radius, T[:3, :3] @ shape.p0 + T[:3, 3], T[:3, :3] @ shape.p1 + T[:3, 3])


# module-level aliases for the query API
def configuration_in_collision(world, q, object_pose="attached"):
    return world.configuration_in_collision(q, object_pose)


def path_collision_free(world, Q, object_poses="attached"):
    return world.path_collision_free(Q, object_poses)


def joint_segment_collision_free(world, q_from, q_to, step=0.2, object_pose=None):
    return world.joint_segment_collision_free(q_from, q_to, step, object_pose)
