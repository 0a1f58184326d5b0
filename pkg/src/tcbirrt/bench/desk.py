"""Construction of the bundled desk scenes.

Two 7-DOF arms stand on pedestals 1.1 m apart and hold a 2 m x 0.8 m x
0.8 m object at its two ends.  The object is carried from a low pose in front
of the robot to a raised pose closer to it.  Tiers add 0, 5 and 10 boxes
around that transport corridor.  The nominal joint vectors were found offline
by a clearance-penalized least-squares IK search and are stored as constants.
"""

import math

from ..kinematics import SPACE_ARM_DH

HALF_PI = math.pi / 2

ARM_BASES = ([0.0, 0.55, 0.0, 0.0, 0.0, 0.0], [0.0, -0.55, 0.0, 0.0, 0.0, math.pi])
# each end effector grips the object's +y face next to one end; the tool
# axis points into that face
GRASPS = ([1.0, 0.4, 0.0, -HALF_PI, 0.0, 0.0], [-1.0, 0.4, 0.0, HALF_PI, 0.0, math.pi])
LINK_RADII = (0.08, 0.08, 0.08, 0.08, 0.05, 0.05, 0.05)
PEDESTAL = {"type": "box", "half": [0.15, 0.15, 0.2], "pose": [0.0, 0.0, -0.35, 0.0, 0.0, 0.0]}
OBJECT_HALF = [1.0, 0.4, 0.4]
JOINT_LIMITS = [[-math.pi, math.pi]] * 7

NOMINAL_START = [1.0, 0.0, 1.0, 0.0, 0.0, HALF_PI]
NOMINAL_START_Q = [0.21746, 0.57585, -1.43053, -0.09187, 1.78, -1.01016, 1.70997,
                   1.26448, -1.31749, 1.45757, 1.45692, 1.7188, -1.27455, -0.26511]
NOMINAL_GOAL = [0.6, 0.0, 1.8, 0.0, 0.0, HALF_PI]
NOMINAL_GOAL_Q = [-0.01793, 1.2271, 0.17995, -1.12281, 0.88969, -0.34414, 1.52074,
                  -0.01189, 1.3367, -0.35071, -0.59087, 0.89035, 2.9072, 1.62062]

PLANNER = {
    "step": 0.6,
    "lower": [-2.0, -3.0, 0.0, -3.14, -3.14, -3.14],
    "upper": [2.0, 3.0, 4.0, 3.14, 3.14, 3.14],
    "interp": 5,
    "timeout": 60.0,
    "regrasp_budget": 5.0,
    "continuity_tol": 0.5,
    "constraint_tol": [0.002, 0.002],
    "regrasp_edge_step": 0.3,
    "collision_step": 0.2,
    "ik": {"step": 0.5, "max_iters": 200, "eps_p": 0.0004, "eps_o": 0.0004},
}


def _box(center, half):
    return {"type": "box", "half": list(half), "pose": list(center) + [0.0, 0.0, 0.0]}


# boxes placed around the corridor; tier 2 uses the first five
OBSTACLES = [
    _box([-0.24, 1.46, 1.42], [0.22, 0.09, 0.18]),
    _box([0.91, 1.51, 2.23], [0.18, 0.15, 0.23]),
    _box([0.21, -1.77, 0.99], [0.21, 0.12, 0.15]),
    _box([1.96, 0.54, 1.71], [0.14, 0.15, 0.12]),
    _box([1.54, 1.61, 0.82], [0.18, 0.17, 0.09]),
    _box([-0.5, -0.36, 1.73], [0.12, 0.14, 0.18]),
    _box([1.45, 1.33, 2.04], [0.21, 0.13, 0.11]),
    _box([1.0, -1.62, 1.78], [0.12, 0.11, 0.23]),
    _box([-0.41, 0.07, 2.27], [0.11, 0.13, 0.17]),
    _box([1.57, 1.51, 0.38], [0.11, 0.22, 0.19]),
]

N_OBSTACLES = {1: 0, 2: 5, 3: 10}


def desk_scene(tier):
    if tier not in N_OBSTACLES:
        raise ValueError(f"unknown tier {tier}")
    arms = []
    for base, grasp in zip(ARM_BASES, GRASPS):
        arms.append({
            "dh": [list(row) for row in SPACE_ARM_DH],
            "joint_limits": [list(lim) for lim in JOINT_LIMITS],
            "base": list(base),
            "grasp": list(grasp),
            "link_radii": list(LINK_RADII),
            "base_shape": dict(PEDESTAL),
        })
    return {
        "name": f"desk_tier{tier}",
        "tier": tier,
        "seed": 0,
        "robot": {"arms": arms, "grasp_links": 1},
        "object": {"half_extents": list(OBJECT_HALF)},
        "obstacles": [dict(o) for o in OBSTACLES[: N_OBSTACLES[tier]]],
        "nominal_poses": {
            "start": {"pose": list(NOMINAL_START), "q": list(NOMINAL_START_Q)},
            "goal": {"pose": list(NOMINAL_GOAL), "q": list(NOMINAL_GOAL_Q)},
        },
        "planner": {k: (dict(v) if isinstance(v, dict) else v) for k, v in PLANNER.items()},
    }
