"""DH manipulator models, forward kinematics, Jacobians and numerical IK.

Joint vectors for the dual-arm system are concatenations ``[q1, q2]``.  All
poses are expressed in the common base frame.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import se3

# DH parameters of the 7-DOF space manipulator used throughout the bundled scenes:
# (theta offset [rad], alpha [rad], d [m], a [m]), classic distal convention.
SPACE_ARM_DH = (
    (0.0, math.pi / 2, 0.0, 0.0),
    (0.0, math.pi / 2, 0.24, 0.0),
    (0.0, 0.0, -0.17, 0.0),
    (0.0, 0.0, -0.18, 1.08),
    (0.0, math.pi / 2, -0.17, 1.08),
    (0.0, math.pi / 2, -0.24, 0.0),
    (0.0, 0.0, -0.1, 0.0),
)


class Unreachable(Exception):
    """IK did not converge within its iteration budget."""

    def __init__(self, arm=None, message="IK did not converge"):
        self.arm = arm
        if arm is not None:
            message = f"{message} (arm {arm})"
        super().__init__(message)


@dataclass(frozen=True)
class DHRow:
    theta_offset: float
    alpha: float
    d: float
    a: float


def dh_transform(theta, alpha, d, a):
    """``Rz(theta) Tz(d) Tx(a) Rx(alpha)``."""
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array([
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


class ManipulatorModel:
    """Serial revolute arm described by DH rows, joint limits and a base mount."""

    def __init__(self, dh, joint_limits=None, base=None):
        rows = [r if isinstance(r, DHRow) else DHRow(*r) for r in dh]
        self.dh = tuple(rows)
        self.n = len(rows)
        if self.n == 0:
            raise ValueError("manipulator needs at least one joint")
        table = np.array([[r.theta_offset, r.alpha, r.d, r.a] for r in rows], dtype=float)
        if not np.all(np.isfinite(table)):
            raise ValueError("DH parameters must be finite")
        if joint_limits is None:
            joint_limits = [(-math.pi, math.pi)] * self.n
        limits = np.array(joint_limits, dtype=float).reshape(-1, 2)
        if len(limits) != self.n:
            raise ValueError(f"expected {self.n} joint limits, got {len(limits)}")
        bad = np.nonzero(limits[:, 0] >= limits[:, 1])[0]
        if len(bad):
            raise ValueError(f"joint {int(bad[0])}: lower limit must be below upper limit")
        self.joint_limits = limits
        self.base = np.eye(4) if base is None else np.array(base, dtype=float)
        self._theta0 = table[:, 0].copy()
        self._ca = np.cos(table[:, 1])
        self._sa = np.sin(table[:, 1])
        self._d = table[:, 2].copy()
        self._a = table[:, 3].copy()

    @property
    def lower(self):
        return self.joint_limits[:, 0]

    @property
    def upper(self):
        return self.joint_limits[:, 1]

    def reach(self):
        """Upper bound on the distance from the base to the end effector."""
        return float(np.sum(np.abs(self._a)) + np.sum(np.abs(self._d)))

    def within_limits(self, q, tol=0.0):
        q = np.asarray(q)
        return bool(np.all(q >= self.lower - tol) and np.all(q <= self.upper + tol))

    def clamp(self, q):
        return np.clip(q, self.lower, self.upper)


def forward_kinematics(model, q):
    """Link frames and end-effector transform of one arm.

    Returns ``(frames, T_ee)`` where ``frames[j]`` is the pose of DH frame
    ``j + 1`` in the base frame and ``T_ee is frames[-1]``.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (model.n,):
        raise ValueError(f"expected {model.n} joint values, got shape {q.shape}")
    theta = model._theta0 + q
    ct = np.cos(theta)
    st = np.sin(theta)
    A = np.zeros((model.n, 4, 4))
    A[:, 0, 0] = ct
    A[:, 0, 1] = -st * model._ca
    A[:, 0, 2] = st * model._sa
    A[:, 0, 3] = model._a * ct
    A[:, 1, 0] = st
    A[:, 1, 1] = ct * model._ca
    A[:, 1, 2] = -ct * model._sa
    A[:, 1, 3] = model._a * st
    A[:, 2, 1] = model._sa
    A[:, 2, 2] = model._ca
    A[:, 2, 3] = model._d
    A[:, 3, 3] = 1.0
    T = model.base
    frames = []
    for j in range(model.n):
        T = T @ A[j]
        frames.append(T)
    return frames, T


def end_effector(model, q):
    return forward_kinematics(model, q)[1]


def joint_origins(model, frames):
    """Origins of the base frame and every DH frame, shape ``(n + 1, 3)``."""
    pts = np.empty((model.n + 1, 3))
    pts[0] = model.base[:3, 3]
    for j, T in enumerate(frames):
        pts[j + 1] = T[:3, 3]
    return pts


def _jacobian_from_frames(model, frames):
    F = np.stack([model.base] + frames[:-1])
    z = F[:, :3, 2]
    r = frames[-1][:3, 3] - F[:, :3, 3]
    J = np.empty((6, model.n))
    J[0] = z[:, 1] * r[:, 2] - z[:, 2] * r[:, 1]
    J[1] = z[:, 2] * r[:, 0] - z[:, 0] * r[:, 2]
    J[2] = z[:, 0] * r[:, 1] - z[:, 1] * r[:, 0]
    J[3:] = z.T
    return J


def jacobian(model, q):
    """Geometric Jacobian ``[v; w]`` of the end effector in the base frame."""
    frames, _ = forward_kinematics(model, q)
    return _jacobian_from_frames(model, frames)


@dataclass(frozen=True)
class IKParams:
    """Settings of the pseudoinverse IK iteration.

    ``gain`` is the diagonal of the 6x6 gain matrix applied to the stacked
    ``[position; orientation]`` error, ``step`` scales each joint update.
    """

    gain: tuple = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    step: float = 0.5
    max_iters: int = 200
    eps_p: float = 1e-3
    eps_o: float = 1e-3
    damping: float = 1e-4
    sv_cutoff: float = 1e-8

    def __post_init__(self):
        if self.eps_p <= 0 or self.eps_o <= 0:
            raise ValueError("IK tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if len(self.gain) != 6 or min(self.gain) <= 0:
            raise ValueError("gain must be 6 positive values")
        if self.damping < 0:
            raise ValueError("damping must be non-negative")


def damped_pinv(J, damping=1e-4, cutoff=1e-8):
    """SVD pseudoinverse with ``s / (s^2 + mu^2)`` damping and a hard cutoff."""
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    inv = np.where(s > cutoff, s / (s * s + damping * damping), 0.0)
    return (Vt.T * inv) @ U.T


def pose_error(p_goal, R_goal, T):
    """Position error and rotation error vector of ``T`` w.r.t. a goal pose.

    The rotation error is ``R_goal @ log(R_t^T R_goal)``, a base-frame
    rotation vector taking the current orientation to the goal.
    """
    e_p = p_goal - T[:3, 3]
    R_t = T[:3, :3]
    e_o = R_goal @ se3.rotation_to_expcoords(R_t.T @ R_goal)
    return e_p, e_o


def ik_single_counted(model, q_seed, p_goal, R_goal, params=IKParams(), arm=None):
    """Like :func:`ik_single` but returns ``(q or None, iterations used)``."""
    q = np.array(q_seed, dtype=float)
    gain = np.asarray(params.gain, dtype=float)
    for k in range(params.max_iters):
        frames, T = forward_kinematics(model, q)
        e_p, e_o = pose_error(p_goal, R_goal, T)
        if math.sqrt(e_p @ e_p) < params.eps_p and math.sqrt(e_o @ e_o) < params.eps_o:
            return q, k + 1
        J = _jacobian_from_frames(model, frames)
        e = gain * np.concatenate([e_p, e_o])
        dq = damped_pinv(J, params.damping, params.sv_cutoff) @ e
        q_new = model.clamp(q + params.step * dq)
        if np.max(np.abs(q_new - q)) < 1e-12:
            # stalled, typically pinned against a joint limit
            return None, k + 1
        q = q_new
    return None, params.max_iters


def ik_single(model, q_seed, p_goal, R_goal, params=IKParams(), arm=None):
    """Iterative pseudoinverse IK for one arm.

    Converged iterates are returned immediately, so a seed that already meets
    the target comes back unchanged.  Raises :class:`Unreachable` when the
    iteration budget runs out or the clamped iterate stalls at a joint limit.
    """
    q, _ = ik_single_counted(model, q_seed, np.asarray(p_goal, dtype=float),
                             np.asarray(R_goal, dtype=float), params, arm)
    if q is None:
        raise Unreachable(arm)
    return q


@dataclass
class DualArmSystem:
    """Two arms rigidly holding one object.

    ``grasps[i]`` is the constant pose of arm ``i``'s end-effector frame in
    the object frame.
    """

    arms: tuple
    grasps: tuple
    _rel: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.arms) != 2 or len(self.grasps) != 2:
            raise ValueError("a dual-arm system has exactly two arms and two grasps")
        self.arms = tuple(self.arms)
        self.grasps = tuple(np.array(g, dtype=float) for g in self.grasps)
        # pose of arm 2's end-effector frame seen from arm 1's
        self._rel = se3.inverse(self.grasps[0]) @ self.grasps[1]

    @property
    def dofs(self):
        return (self.arms[0].n, self.arms[1].n)

    @property
    def relative_grasp(self):
        return self._rel

    def split(self, q):
        q = np.asarray(q, dtype=float)
        n1 = self.arms[0].n
        return q[:n1], q[n1:]

    def within_limits(self, q, tol=0.0):
        q1, q2 = self.split(q)
        return self.arms[0].within_limits(q1, tol) and self.arms[1].within_limits(q2, tol)

    def end_effectors(self, q):
        q1, q2 = self.split(q)
        return end_effector(self.arms[0], q1), end_effector(self.arms[1], q2)

    def object_pose(self, q, arm=0):
        """Object transform implied by one arm's end effector and its grasp."""
        q1, q2 = self.split(q)
        qi = q1 if arm == 0 else q2
        return end_effector(self.arms[arm], qi) @ se3.inverse(self.grasps[arm])


def closed_chain_deviation(system, q):
    """Deviation vector ``h(q)`` of the closed chain; zero when it closes exactly.

    ``T2^-1 T1 T21`` maps to ``[x, y, z, roll, pitch, yaw]``.
    """
    T1, T2 = system.end_effectors(q)
    return se3.transform_to_deviation(se3.inverse(T2) @ T1 @ system.relative_grasp)


def object_to_ee_targets(T_o, system):
    """End-effector goal transforms ``T_o @ grasp_i`` for both arms."""
    return T_o @ system.grasps[0], T_o @ system.grasps[1]


def ik_dual(system, q_seed, T_o, params=IKParams()):
    """Solve both arms for an object pose; raises :class:`Unreachable` naming the arm."""
    T_o = np.asarray(T_o, dtype=float)
    q1, q2 = system.split(q_seed)
    out = []
    for i, (model, qi, Tg) in enumerate(zip(system.arms, (q1, q2), object_to_ee_targets(T_o, system))):
        out.append(ik_single(model, qi, Tg[:3, 3], Tg[:3, :3], params, arm=i + 1))
    return np.concatenate(out)
