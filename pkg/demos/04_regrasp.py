# %% [markdown]
# # Regrasping between IK branches
#
# The same object pose can be held with different arm postures.  When the
# two trees meet on different branches the object is parked and the arms
# reconfigure with an unconstrained joint-space RRT-Connect.

# %%
import numpy as np

from tcbirrt import tcbirrt_plan
from tcbirrt.bench import load_scene, solve_endpoint

scene = load_scene("desk_tier1")
world = scene.world()
ikp = scene.ik_params()
xi = scene.nominal_start

q_a = solve_endpoint(world, xi, scene.nominal_start_q, ikp)
q_b = solve_endpoint(world, xi, scene.nominal_goal_q, ikp)
print("branch difference per joint:", np.round(q_b - q_a, 2))

# %%
result = tcbirrt_plan(q_a, xi, q_b, xi, world, scene.planner_params(seed=0))
for seg in result.segments:
    print(seg.kind, "with", len(seg.joints), "states; object poses stored:", len(seg.object_poses))

# %% [markdown]
# If only one arm differs, the other is frozen during the regrasp.

# %%
q_c = q_a.copy()
q_c[7:] = q_b[7:]
if solve_endpoint(world, xi, q_c, ikp) is not None and not world.configuration_in_collision(q_c, "attached"):
    res = tcbirrt_plan(q_a, xi, q_c, xi, world, scene.planner_params(seed=0))
    for seg in res.segments:
        J = np.array(seg.joints)
        print(seg.kind, "- largest joint excursion, arm 1: %.3f rad, arm 2: %.3f rad"
              % (np.ptp(J[:, :7], axis=0).max(), np.ptp(J[:, 7:], axis=0).max()))
else:
    print("mixed-branch posture is not a valid grasp here")
