# %% [markdown]
# # Planning one transfer
#
# Draw a random start/goal pair around the scene's nominal poses, plan it and
# replay the result through the validator.

# %%
import numpy as np

from tcbirrt import tcbirrt_plan
from tcbirrt.bench import generate_tasks, load_scene, plan_to_dict, validate_plan
from tcbirrt.kinematics import closed_chain_deviation

# %%
scene = load_scene("desk_tier3")
world = scene.world()
task = generate_tasks(scene, 1, rng=5, world=world)[0]
print("start pose:", np.round(task.start_pose, 3))
print("goal pose: ", np.round(task.goal_pose, 3))

# %%
result = tcbirrt_plan(task.q_start, task.start_pose, task.q_goal, task.goal_pose, world,
                      scene.planner_params(seed=1))
for key, value in result.stats.items():
    print(f"{key:>18}: {value}")
print("segments:", [(s.kind, len(s.joints)) for s in result.segments])
print("joint path length: %.2f rad" % result.path_length())

# %% [markdown]
# Every transport waypoint stays on the constraint manifold.

# %%
worst = max(np.linalg.norm(closed_chain_deviation(world.system, q)[:3])
            for s in result.segments if s.kind == "transport" for q in s.joints)
print("worst position deviation: %.2e m" % worst)

report = validate_plan(plan_to_dict(result), scene, world)
print("replay ok:", report.ok, "-", report.states_checked, "states checked")
