# %% [markdown]
# # Poses, exponential coordinates and the dual-arm chain
#
# Object poses are 6-vectors `[x, y, z, roll, pitch, yaw]`; the planner
# interpolates orientation in exponential coordinates.

# %%
import math

import numpy as np

from tcbirrt import se3
from tcbirrt.bench import load_scene
from tcbirrt.kinematics import closed_chain_deviation, forward_kinematics, ik_dual, jacobian

np.set_printoptions(precision=4, suppress=True)

# %%
T = se3.pose_to_transform([0.5, -0.2, 1.0, 0.1, -0.3, math.pi / 2])
print(T)
print("back to pose-6:", se3.transform_to_deviation(T))

# %% [markdown]
# A half turn is the awkward case for the matrix log: the axis has to be
# recovered from the symmetric part of R.

# %%
R = se3.rotx(math.pi) @ se3.rotz(1e-8)
phi = se3.rotation_to_expcoords(R)
print("phi:", phi, "|phi| - pi =", np.linalg.norm(phi) - math.pi)
print("round trip error:", np.linalg.norm(se3.expcoords_to_rotation(phi) - R))

# %% [markdown]
# ## One arm of the bundled desk scene

# %%
scene = load_scene("desk_tier1")
system = scene.system()
arm = system.arms[0]
q1 = scene.nominal_start_q[:7]
_, T_ee = forward_kinematics(arm, q1)
print("arm 1 end effector:\n", T_ee)
print("Jacobian rank:", np.linalg.matrix_rank(jacobian(arm, q1)))

# %% [markdown]
# ## Closing the chain
#
# `ik_dual` solves each arm for its grasp on the object; the closed-chain
# deviation `h(q)` measures how far the two grasps disagree.

# %%
T_o = se3.pose_to_transform(scene.nominal_start)
q = ik_dual(system, scene.nominal_start_q, T_o, scene.ik_params())
print("h(q) =", closed_chain_deviation(system, q))

q_bad = q.copy()
q_bad[3] += 0.05
print("after nudging one joint, |h| =", np.linalg.norm(closed_chain_deviation(system, q_bad)))
