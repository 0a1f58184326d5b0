"""Task-space constrained bidirectional RRT for a dual-arm closed chain.

Trees grow in the 6-D space of object poses.  Every edge is realized by
interpolating the object pose, solving IK waypoint by waypoint (each seeded by
the previous solution) and checking the resulting joint states for
collisions.  When the two trees meet at one object pose with different joint
solutions, an unconstrained RRT-Connect "regrasp" joins them while the object
stays put.
"""

import enum
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import kinematics, se3
from .collision import interpolate_joints

DEFAULT_LOWER = (-2.0, -3.0, 0.0, -3.14, -3.14, -3.14)
DEFAULT_UPPER = (2.0, 3.0, 4.0, 3.14, 3.14, 3.14)


class Extend(enum.Enum):
    TRAPPED = "trapped"
    ADVANCED = "advanced"
    REACHED = "reached"


class PlanningTimeout(Exception):
    pass


class InvalidQuery(ValueError):
    pass


class ExpCoordBranch(ValueError):
    """Endpoint rotations are (nearly) antipodal; the interpolation is ambiguous."""


@dataclass(frozen=True)
class PlannerParams:
    step: float = 0.6
    lower: tuple = DEFAULT_LOWER
    upper: tuple = DEFAULT_UPPER
    interp: int = 5
    timeout: float = 1000.0
    seed: int = 0
    regrasp_budget: float = 5.0
    eq_tol: float = 1e-9
    nn_weights: tuple = (1.0,) * 6
    ik: kinematics.IKParams = kinematics.IKParams()
    # largest joint jump (max norm) allowed between consecutive waypoints
    continuity_tol: float = 0.5
    # |h| bound (position m, orientation rad) accepted on every waypoint
    constraint_tol: tuple = (2e-3, 2e-3)
    regrasp_edge_step: float = 0.3
    collision_step: float = 0.2
    # "joint": one 14-D RRT-Connect; "sequential": one arm after the other
    regrasp_mode: str = "joint"
    # arms whose regrasp endpoints differ by less than this stay put
    freeze_tol: float = 1e-6
    # "wall": perf_counter seconds; "work": deterministic work meter
    clock: str = "wall"
    max_iterations: int = 0

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != (6,) or hi.shape != (6,):
            raise ValueError("sampling bounds must have 6 components")
        if np.any(lo > hi):
            raise ValueError("sampling lower bound exceeds upper bound")
        if self.interp < 1:
            raise ValueError("interp must be >= 1")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.regrasp_mode not in ("joint", "sequential"):
            raise ValueError(f"unknown regrasp_mode {self.regrasp_mode!r}")
        if self.clock not in ("wall", "work"):
            raise ValueError(f"unknown clock {self.clock!r}")

    def with_(self, **kw):
        return replace(self, **kw)


class WorkMeter:
    """Counts planner work; doubles as a deterministic clock.

    Unit costs are rough per-operation timings on a desktop CPU so that
    "work seconds" and wall seconds have the same order of magnitude.
    """

    IK_ITER_COST = 1.5e-4
    COLLISION_COST = 2.5e-3

    def __init__(self):
        self.ik_iterations = 0
        self.collision_checks = 0

    def seconds(self):
        return self.ik_iterations * self.IK_ITER_COST + self.collision_checks * self.COLLISION_COST


@dataclass(eq=False)
class PlanNode:
    q: np.ndarray
    xi: np.ndarray
    parent: int = None
    # joint states from the parent's q to this q, with matching object poses
    edge_path: list = field(default_factory=list)
    edge_poses: list = field(default_factory=list)
    # joint path from this q to the other tree's q at the connection
    regrasp: list = None
    id: int = 0


@dataclass(eq=False)
class Target:
    """Extension goal: an object pose, optionally with a known configuration."""

    xi: np.ndarray
    q: np.ndarray = None


class Tree:
    def __init__(self, root):
        self.nodes = []
        self._xi = np.empty((64, 6))
        self.add(root)

    @property
    def root(self):
        return self.nodes[0]

    def __len__(self):
        return len(self.nodes)

    def add(self, node):
        node.id = len(self.nodes)
        if node.id == len(self._xi):
            self._xi = np.concatenate([self._xi, np.empty_like(self._xi)])
        self._xi[node.id] = node.xi
        self.nodes.append(node)
        return node

    def xis(self):
        return self._xi[: len(self.nodes)]

    def path_to_root(self, node):
        out = []
        while node is not None:
            out.append(node)
            node = None if node.parent is None else self.nodes[node.parent]
        return out


@dataclass
class Segment:
    """One piece of a plan.

    ``transport`` segments carry one object pose per joint state; a
    ``regrasp`` segment holds the object still at ``object_poses[0]``.
    """

    kind: str
    joints: list
    object_poses: list


@dataclass
class PlanResult:
    segments: list
    stats: dict

    @property
    def regrasp(self):
        return any(s.kind == "regrasp" for s in self.segments)

    def joint_path(self):
        """All joint states in order, without repeated segment boundaries."""
        out = []
        for seg in self.segments:
            states = seg.joints if not out else seg.joints[1:]
            out.extend(states)
        return out

    def path_length(self):
        """Joint-space length, regrasp included (radians, L2 per step)."""
        Q = self.joint_path()
        return float(sum(np.linalg.norm(b - a) for a, b in zip(Q[:-1], Q[1:])))


# -- task-space primitives -------------------------------------------------


def random_sample_t(params, rng):
    return rng.uniform(np.asarray(params.lower, dtype=float), np.asarray(params.upper, dtype=float))


def weighted_distance(a, b, weights):
    d = np.asarray(weights) * (np.asarray(a) - np.asarray(b))
    return math.sqrt(d @ d)


def nearest_neighbor_t(tree, xi, weights=(1.0,) * 6):
    """Node minimizing the weighted Euclidean pose distance; lowest id wins ties."""
    d = (tree.xis() - np.asarray(xi)) * np.asarray(weights)
    return tree.nodes[int(np.argmin(np.einsum("ij,ij->i", d, d)))]


def step_toward(xi_near, xi_rand, step, eq_tol=1e-9):
    """Move at most ``step`` from ``xi_near`` toward ``xi_rand``."""
    xi_near = np.asarray(xi_near, dtype=float)
    xi_rand = np.asarray(xi_rand, dtype=float)
    d = xi_rand - xi_near
    dist = math.sqrt(d @ d)
    if dist <= max(step, eq_tol):
        return xi_rand.copy()
    return xi_near + d * (step / dist)


def interpolate_pose(xi_near, xi_s, n):
    """Positions and rotations at ``j = 0..n`` between two poses.

    Position is linear; orientation is linear in exponential coordinates.
    The far endpoint's coordinates are taken on the branch nearest the near
    endpoint's, so the sweep never takes the long way around.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xi_near = np.asarray(xi_near, dtype=float)
    xi_s = np.asarray(xi_s, dtype=float)
    R0 = se3.euler_to_rotation(xi_near[3:])
    R1 = se3.euler_to_rotation(xi_s[3:])
    if math.pi - se3.rotation_angle(R0.T @ R1) < se3.PI_ANGLE_TOL:
        raise ExpCoordBranch("endpoint rotations are antipodal")
    phi0 = se3.rotation_to_expcoords(R0)
    phi1 = _nearest_branch(se3.rotation_to_expcoords(R1), phi0)
    P = [xi_near[:3] + (j / n) * (xi_s[:3] - xi_near[:3]) for j in range(n + 1)]
    O = [R0] + [se3.expcoords_to_rotation(phi0 + (j / n) * (phi1 - phi0)) for j in range(1, n)] + [R1]
    P[-1] = xi_s[:3].copy()
    return P, O


def _nearest_branch(phi, ref):
    theta = math.sqrt(phi @ phi)
    if theta < 1e-12:
        return phi
    axis = phi / theta
    cands = [axis * (theta + 2.0 * math.pi * k) for k in (-1, 0)]
    return min(cands, key=lambda c: float((c - ref) @ (c - ref)))


def path_inverse_kinematics(system, P_o, O_o, q_init, ik_params=kinematics.IKParams(), meter=None):
    """Solve IK along an object-pose sequence, seeding each waypoint with the last.

    Returns ``(Q, q_final)``; on failure ``Q`` holds the solved prefix and
    ``q_final`` is ``None``.
    """
    if len(P_o) != len(O_o):
        raise ValueError("position and orientation sequences differ in length")
    Q = []
    q = np.asarray(q_init, dtype=float)
    for p, R in zip(P_o, O_o):
        T_o = se3.make_transform(R, p)
        try:
            q = _ik_dual(system, q, T_o, ik_params, meter)
        except kinematics.Unreachable:
            return Q, None
        Q.append(q)
    return Q, q


def _ik_dual(system, q_seed, T_o, params, meter):
    q1, q2 = system.split(q_seed)
    out = []
    for i, (model, qi, Tg) in enumerate(zip(system.arms, (q1, q2), kinematics.object_to_ee_targets(T_o, system))):
        q, iters = kinematics.ik_single_counted(model, qi, Tg[:3, 3], Tg[:3, :3], params, arm=i + 1)
        if meter is not None:
            meter.ik_iterations += iters
        if q is None:
            raise kinematics.Unreachable(i + 1)
        out.append(q)
    return np.concatenate(out)


# -- the planner -----------------------------------------------------------


class TCBiRRT:
    """One planning query's worth of state: trees, rng, clock and counters."""

    def __init__(self, world, params=PlannerParams()):
        self.world = world
        self.system = world.system
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.meter = WorkMeter()
        self._t0 = 0.0
        self.iterations = 0
        self.regrasp_attempts = 0

    # clock
    def _now(self):
        if self.params.clock == "work":
            return self.meter.seconds()
        return time.perf_counter()

    def elapsed(self):
        return self._now() - self._t0

    def _in_collision(self, q, T_o):
        self.meter.collision_checks += 1
        return self.world.configuration_in_collision(q, T_o)

    # validity helpers
    def constraint_ok(self, q):
        h = kinematics.closed_chain_deviation(self.system, q)
        return (np.linalg.norm(h[:3]) <= self.params.constraint_tol[0]
                and np.linalg.norm(h[3:]) <= self.params.constraint_tol[1])

    def _check_endpoint(self, name, q, xi):
        q = np.asarray(q, dtype=float)
        if q.shape != (sum(self.system.dofs),):
            raise InvalidQuery(f"{name}: expected {sum(self.system.dofs)} joint values")
        if not self.system.within_limits(q, 1e-9):
            raise InvalidQuery(f"{name}: configuration outside joint limits")
        if not self.constraint_ok(q):
            raise InvalidQuery(f"{name}: closed-chain constraint violated")
        T_o = se3.pose_to_transform(xi)
        if not self._holds(q, T_o):
            raise InvalidQuery(f"{name}: the arms do not hold the object at the given pose")
        if self.world.configuration_in_collision(q, T_o):
            raise InvalidQuery(f"{name}: configuration in collision")

    # one extension step
    def constrained_extend(self, tree, x_near, target):
        p = self.params
        d = weighted_distance(target.xi, x_near.xi, p.nn_weights)
        if d <= p.eq_tol:
            if target.q is None or _frozen_all(x_near.q, target.q, p.freeze_tol):
                return x_near, Extend.REACHED
            T_o = se3.pose_to_transform(x_near.xi)
            if self.same_branch(x_near.q, target.q, T_o):
                return x_near, Extend.REACHED
            path = self.regrasp(x_near.q, target.q, T_o)
            if path is None:
                return x_near, Extend.TRAPPED
            node = PlanNode(q=x_near.q, xi=x_near.xi, parent=x_near.id,
                            edge_path=[x_near.q], edge_poses=[x_near.xi], regrasp=path)
            return tree.add(node), Extend.REACHED

        xi_s = step_toward(x_near.xi, target.xi, p.step, p.eq_tol)
        try:
            P, O = interpolate_pose(x_near.xi, xi_s, p.interp)
        except ExpCoordBranch:
            return x_near, Extend.TRAPPED
        Q, q_s = path_inverse_kinematics(self.system, P, O, x_near.q, p.ik, self.meter)
        if q_s is None:
            return x_near, Extend.TRAPPED
        prev = x_near.q
        for q in Q:
            if np.max(np.abs(q - prev)) > p.continuity_tol or not self.constraint_ok(q):
                return x_near, Extend.TRAPPED
            prev = q
        poses = [se3.make_transform(R, pos) for pos, R in zip(P, O)]
        for q, T_o in zip(Q, poses):
            if self._in_collision(q, T_o):
                return x_near, Extend.TRAPPED

        reached = weighted_distance(xi_s, target.xi, p.nn_weights) <= p.eq_tol
        xi_s = target.xi.copy() if reached else xi_s
        edge_poses = [se3.transform_to_deviation(T) for T in poses]
        edge_poses[0] = x_near.xi
        edge_poses[-1] = xi_s
        node = PlanNode(q=q_s, xi=xi_s, parent=x_near.id,
                        edge_path=[x_near.q] + Q[1:] if _same(Q[0], x_near.q) else [x_near.q] + Q,
                        edge_poses=edge_poses if _same(Q[0], x_near.q) else [x_near.xi] + edge_poses)
        if (reached and target.q is not None and not _frozen_all(q_s, target.q, p.freeze_tol)
                and not self.same_branch(q_s, target.q, poses[-1])):
            path = self.regrasp(q_s, target.q, poses[-1])
            if path is None:
                return x_near, Extend.TRAPPED
            node.regrasp = path
        tree.add(node)
        return node, Extend.REACHED if reached else Extend.ADVANCED

    def same_branch(self, q_from, q_to, T_o):
        """True when the two closures of one object pose join without a regrasp.

        That is the case when they are within the continuity bound and every
        joint-space interpolant at the collision step keeps the chain closed,
        holds the object at ``T_o`` and is collision-free.
        """
        p = self.params
        if np.max(np.abs(np.asarray(q_to) - np.asarray(q_from))) > p.continuity_tol:
            return False
        for q in interpolate_joints(q_from, q_to, p.collision_step)[1:-1]:
            if not self.constraint_ok(q) or not self._holds(q, T_o) or self._in_collision(q, T_o):
                return False
        return True

    def _holds(self, q, T_o):
        tol_p, tol_o = self.params.constraint_tol
        for Tg, Te in zip(kinematics.object_to_ee_targets(T_o, self.system), self.system.end_effectors(q)):
            e_p, e_o = kinematics.pose_error(Tg[:3, 3], Tg[:3, :3], Te)
            if np.linalg.norm(e_p) > tol_p or np.linalg.norm(e_o) > tol_o:
                return False
        return True

    def regrasp(self, q_from, q_to, T_o):
        self.regrasp_attempts += 1
        budget = min(self.params.regrasp_budget, self.params.timeout - self.elapsed())
        if budget <= 0:
            return None
        try:
            return rrt_connect(q_from, q_to, self.world, T_o, budget, self.params, self.rng,
                               clock=self._now, meter=self.meter)
        except PlanningTimeout:
            return None

    def plan(self, q_init, xi_init, q_goal, xi_goal):
        p = self.params
        self._t0 = self._now()
        q_init = np.asarray(q_init, dtype=float)
        q_goal = np.asarray(q_goal, dtype=float)
        xi_init = np.asarray(xi_init, dtype=float)
        xi_goal = np.asarray(xi_goal, dtype=float)
        self._check_endpoint("start", q_init, xi_init)
        self._check_endpoint("goal", q_goal, xi_goal)

        ta = Tree(PlanNode(q=q_init, xi=xi_init, edge_path=[q_init], edge_poses=[xi_init]))
        tb = Tree(PlanNode(q=q_goal, xi=xi_goal, edge_path=[q_goal], edge_poses=[xi_goal]))
        self.trees = (ta, tb)
        a_is_start = True

        # start and goal share the object pose: the trees already touch
        if weighted_distance(xi_init, xi_goal, p.nn_weights) <= p.eq_tol:
            reach_b, res = self.constrained_extend(tb, tb.root, Target(ta.root.xi, ta.root.q))
            if res is Extend.REACHED:
                return self._result(ta, ta.root, tb, reach_b, True)

        while True:
            if self.elapsed() >= p.timeout or (p.max_iterations and self.iterations >= p.max_iterations):
                raise PlanningTimeout(f"no plan after {self.iterations} iterations")
            self.iterations += 1
            xi_rand = random_sample_t(p, self.rng)
            near_a = nearest_neighbor_t(ta, xi_rand, p.nn_weights)
            reach_a, res = self.constrained_extend(ta, near_a, Target(xi_rand))
            if res is not Extend.TRAPPED:
                target = Target(reach_a.xi, reach_a.q)
                res = Extend.ADVANCED
                while res is Extend.ADVANCED and self.elapsed() < p.timeout:
                    near_b = nearest_neighbor_t(tb, target.xi, p.nn_weights)
                    reach_b, res = self.constrained_extend(tb, near_b, target)
                if res is Extend.REACHED:
                    return self._result(ta, reach_a, tb, reach_b, a_is_start)
            ta, tb = tb, ta
            a_is_start = not a_is_start

    def _result(self, ta, reach_a, tb, reach_b, a_is_start):
        segments = extract_path(ta, reach_a, tb, reach_b, a_is_start)
        trees = (ta, tb) if a_is_start else (tb, ta)
        stats = {
            "planning_time": self.elapsed(),
            "tree_sizes": (len(trees[0]), len(trees[1])),
            "iterations": self.iterations,
            "regrasp": any(s.kind == "regrasp" for s in segments),
            "regrasp_attempts": self.regrasp_attempts,
            "ik_iterations": self.meter.ik_iterations,
            "collision_checks": self.meter.collision_checks,
        }
        return PlanResult(segments, stats)


def _same(a, b):
    return a is b or np.array_equal(a, b)


def _frozen_all(q_a, q_b, tol):
    return bool(np.max(np.abs(np.asarray(q_a) - np.asarray(q_b))) <= tol)


def _transport_states(tree, node):
    """Joint states and object poses from the root down to ``node``."""
    chain = tree.path_to_root(node)[::-1]
    joints, poses = [chain[0].q], [chain[0].xi]
    for nd in chain[1:]:
        joints.extend(nd.edge_path[1:])
        poses.extend(nd.edge_poses[1:])
    return joints, poses


def extract_path(tree_a, reach_a, tree_b, reach_b, a_is_start=True):
    """Assemble start-to-goal segments from two trees that met.

    ``a_is_start`` tells whether ``tree_a`` is rooted at the start (the
    trees swap roles every iteration).
    """
    ja, pa = _transport_states(tree_a, reach_a)
    jb, pb = _transport_states(tree_b, reach_b)
    jb, pb = jb[::-1], pb[::-1]
    segs = []
    regrasp = reach_b.regrasp
    if regrasp is not None and len(regrasp) > 1:
        # stored from tree b's q to tree a's q
        path = regrasp[::-1]
        segs = [Segment("transport", ja, pa),
                Segment("regrasp", list(path), [reach_b.xi]),
                Segment("transport", jb, pb)]
        segs = [s for s in segs if s.kind == "regrasp" or len(s.joints) > 1]
    else:
        # same-branch junction: keep both closures unless they coincide
        k = 1 if _same(ja[-1], jb[0]) else 0
        segs = [Segment("transport", ja + jb[k:], pa + pb[k:])]
    if not a_is_start:
        segs = [Segment(s.kind, s.joints[::-1], s.object_poses[::-1]) for s in segs[::-1]]
    return segs


def tcbirrt_plan(q_init, xi_init, q_goal, xi_goal, world, params=PlannerParams()):
    """Plan a closed-chain motion; raises :class:`PlanningTimeout` or :class:`InvalidQuery`."""
    return TCBiRRT(world, params).plan(q_init, xi_init, q_goal, xi_goal)


# -- regrasp: plain RRT-Connect in joint space -----------------------------


def rrt_connect(q_a, q_b, world, object_pose, budget, params=PlannerParams(), rng=None,
                clock=time.perf_counter, meter=None):
    """Joint-space path from ``q_a`` to ``q_b`` with the object held static.

    Arms whose endpoints agree within ``params.freeze_tol`` are not moved.
    Raises :class:`PlanningTimeout` when ``budget`` seconds of ``clock`` pass.
    """
    q_a = np.asarray(q_a, dtype=float)
    q_b = np.asarray(q_b, dtype=float)
    rng = np.random.default_rng(params.seed) if rng is None else rng
    system = world.system
    n1 = system.dofs[0]
    arm_slices = (slice(0, n1), slice(n1, None))
    moving = [i for i, s in enumerate(arm_slices)
              if np.max(np.abs(q_a[s] - q_b[s])) > params.freeze_tol]
    if not moving:
        return [q_a]
    deadline = clock() + budget
    if params.regrasp_mode == "sequential" and len(moving) == 2:
        mid = q_a.copy()
        mid[arm_slices[0]] = q_b[arm_slices[0]]
        first = _rrt_connect_active(q_a, mid, [arm_slices[0]], world, object_pose, deadline, params, rng, clock, meter)
        second = _rrt_connect_active(mid, q_b, [arm_slices[1]], world, object_pose, deadline, params, rng, clock, meter)
        return first + second[1:]
    return _rrt_connect_active(q_a, q_b, [arm_slices[i] for i in moving], world, object_pose,
                               deadline, params, rng, clock, meter)


def _rrt_connect_active(q_a, q_b, slices, world, object_pose, deadline, params, rng, clock, meter):
    system = world.system
    lower = np.concatenate([a.lower for a in system.arms])
    upper = np.concatenate([a.upper for a in system.arms])
    mask = np.zeros(len(q_a), dtype=bool)
    for s in slices:
        mask[s] = True

    def free(q):
        if meter is not None:
            meter.collision_checks += 1
        return not world.configuration_in_collision(q, object_pose)

    def edge_free(q0, q1):
        states = interpolate_joints(q0, q1, params.collision_step)
        return all(free(q) for q in states[1:])

    if not free(q_a) or not free(q_b):
        raise PlanningTimeout("regrasp endpoint in collision")
    if edge_free(q_a, q_b):
        return [q_a, q_b]

    trees = ([q_a], [None]), ([q_b], [None])

    def nearest(tree, q):
        pts = np.array(tree[0])
        d = pts[:, mask] - q[mask]
        return int(np.argmin(np.einsum("ij,ij->i", d, d)))

    def extend(tree, q):
        i = nearest(tree, q)
        q_near = tree[0][i]
        d = q - q_near
        dist = float(np.linalg.norm(d))
        if dist <= params.regrasp_edge_step:
            q_new, reached = q, True
        else:
            q_new, reached = q_near + d * (params.regrasp_edge_step / dist), False
        if not edge_free(q_near, q_new):
            return None, False
        tree[0].append(q_new)
        tree[1].append(i)
        return len(tree[0]) - 1, reached

    def trace(tree, i):
        out = []
        while i is not None:
            out.append(tree[0][i])
            i = tree[1][i]
        return out

    ta, tb = trees
    a_is_first = True
    while clock() < deadline:
        q_rand = q_a.copy()
        q_rand[mask] = rng.uniform(lower[mask], upper[mask])
        i_new, _ = extend(ta, q_rand)
        if i_new is not None:
            q_new = ta[0][i_new]
            while clock() < deadline:
                j, reached = extend(tb, q_new)
                if j is None:
                    break
                if reached:
                    path_a = trace(ta, i_new)[::-1]
                    path_b = trace(tb, j)
                    path = path_a + path_b[1:]
                    return path if a_is_first else path[::-1]
        ta, tb = tb, ta
        a_is_first = not a_is_first
    raise PlanningTimeout("regrasp budget exhausted")
