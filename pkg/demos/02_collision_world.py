# %% [markdown]
# # Primitive collision world
#
# Links are capsules, obstacles and the carried object are boxes.  Touching
# counts as a collision.

# %%
import numpy as np

from tcbirrt import se3
from tcbirrt.bench import load_scene
from tcbirrt.collision import Box, Capsule, Sphere, segment_box_distance, shapes_intersect

# %%
unit = Box([1, 1, 1])
for dx in (1.999, 2.0, 2.001):
    print(f"unit boxes {dx} apart intersect:", shapes_intersect(unit, Box([1, 1, 1], se3.translation(dx))))

rod = Capsule(0.1, [0, 0, 3], [4, 0, 3])
print("capsule axis to box distance:", segment_box_distance(rod.p0, rod.p1, Box([1, 1, 1])))
print("capsule vs sphere:", shapes_intersect(rod, Sphere(0.5, [2, 0, 3.55])))

# %% [markdown]
# ## The cluttered desk
#
# Tier 3 places ten boxes around the transport corridor.

# %%
scene = load_scene("desk_tier3")
world = scene.world()
q = scene.nominal_start_q
T_o = se3.pose_to_transform(scene.nominal_start)
print("obstacles:", len(world.obstacles))
print("nominal start in collision:", world.configuration_in_collision(q, T_o))

# %% [markdown]
# Moving the object into an obstacle while the arms stay put is caught.

# %%
first = world.obstacles[0]
print("object on obstacle 0:", world.configuration_in_collision(q, first.pose))

links = world.link_shapes(q)
print("arm 1 capsule lengths:", [round(float(np.linalg.norm(c.p1 - c.p0)), 3) for c in links[0][1:]])
