"""Published reference values for parts, grasps, placements and spaces.

Sizes are symbolic in the source; rows here are functions of the sizes so
they can be checked for any box.
"""

import math

pi = math.pi

# part -> centroid as a function of (dx, dy, dz)
CENTROID_ROWS = {
    "on": lambda dx, dy, dz: (0, 0, dz / 2),
    "under": lambda dx, dy, dz: (0, 0, -dz / 2),
    "left": lambda dx, dy, dz: (0, dy / 2, 0),
    "right": lambda dx, dy, dz: (0, -dy / 2, 0),
    "front": lambda dx, dy, dz: (dx / 2, 0, 0),
    "back": lambda dx, dy, dz: (-dx / 2, 0, 0),
}

# row -> ((palm, f1, f2), hand rpy in the object frame)
GRASP_ROWS = {
    "A": (("on", "left", "right"), (pi, 0, 0)),
    "B": (("on", "back", "front"), (pi, 0, -pi / 2)),
    "C": (("right", "back", "front"), (-pi / 2, 0, 0)),
    "D": (("right", "under", "on"), (-pi, 0, -pi / 2)),
}

# row -> ((placed, support), position(d1, d2), rpy); d1 placed size, d2 support size
PLACEMENT_ROWS = {
    "A": (("under", "on"), lambda d1, d2: (0, 0, (d2[2] + d1[2]) / 2), (0, 0, 0)),
    "B": (("left", "under"), lambda d1, d2: (0, 0, -(d2[2] + d1[1]) / 2), (pi / 2, 0, 0)),
    "C": (("on", "left"), lambda d1, d2: (0, (d2[1] + d1[2]) / 2, 0), (pi / 2, 0, 0)),
    "D": (("in", "in"), lambda d1, d2: (0, 0, 0), (0, 0, 0)),
}

# part -> associated space centre in the owner frame
SPACE_ROWS = {
    "on": lambda dx, dy, dz: (0, 0, dz),
    "under": lambda dx, dy, dz: (0, 0, -dz),
    "left": lambda dx, dy, dz: (0, dy, 0),
    "right": lambda dx, dy, dz: (0, -dy, 0),
    "front": lambda dx, dy, dz: (dx, 0, 0),
    "back": lambda dx, dy, dz: (-dx, 0, 0),
    "in": lambda dx, dy, dz: (0, 0, 0),
}
