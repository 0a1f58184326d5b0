"""Closed-chain motion planning for two arms rigidly holding one object."""

from . import collision, kinematics, planner, se3
from .kinematics import DualArmSystem, IKParams, ManipulatorModel, SPACE_ARM_DH, Unreachable
from .collision import Box, Capsule, RobotGeometry, Sphere, WorldModel
from .planner import (
    InvalidQuery,
    PlannerParams,
    PlanningTimeout,
    PlanResult,
    Segment,
    TCBiRRT,
    rrt_connect,
    tcbirrt_plan,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "Capsule",
    "DualArmSystem",
    "IKParams",
    "InvalidQuery",
    "ManipulatorModel",
    "PlanResult",
    "PlannerParams",
    "PlanningTimeout",
    "RobotGeometry",
    "SPACE_ARM_DH",
    "Segment",
    "Sphere",
    "TCBiRRT",
    "Unreachable",
    "WorldModel",
    "collision",
    "kinematics",
    "planner",
    "rrt_connect",
    "se3",
    "tcbirrt_plan",
]
