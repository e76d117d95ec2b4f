"""Small block worlds for exhaustive planner checks."""

import itertools

from utamp.bench import _grid, _with_clearance
from utamp.geom import BBox, Kind, PhysicalObject, Pose
from utamp.perception import Scene, make_problem
from utamp.symbolic import CONTAINER, SUPPORT, builtin_domain, ground

CUBE = BBox(0.05, 0.05, 0.05)
SLAB = BBox(0.08, 0.08, 0.03)
TOP = 0.4
FRONT = (("front", "left", "right"),)


def _slab(oid, y):
    return PhysicalObject(oid, Pose((0.6, y, TOP - SLAB.dz / 2)), SLAB, Kind.SOLID, movable=False)


def _cube(oid, x, y, level=0):
    return PhysicalObject(oid, Pose((x, y, TOP + CUBE.dz * (level + 0.5))), CUBE, Kind.SOLID)


def support_world(n_locations, stacks, goal):
    """``stacks`` maps a location index to the bottom-up list of blocks on it."""
    slabs = [_slab(f"t{i}", 0.2 * i) for i in range(n_locations)]
    cubes = [_cube(b, 0.6, 0.2 * i, lvl)
             for i, blocks in stacks.items() for lvl, b in enumerate(blocks)]
    return Scene(tuple(slabs + cubes)), SUPPORT, goal


def container_world(n_locations, occupants, goal):
    """Container spaces in a row, flanked and fronted by clearance spaces."""
    spaces = _grid(_with_clearance([[f"s{i}"] for i in range(n_locations)]), x_front=0.65, y0=0.0)
    where = {s.id: s.pose.position for s in spaces}
    cubes = [_cube(b, *where[f"s{i}"][:2]) for i, b in occupants.items()]
    return Scene(tuple(cubes), tuple(spaces)), CONTAINER, goal


def task_for(world):
    scene, kind, goal = world
    dom, statics = builtin_domain(kind, FRONT)
    return ground(dom, make_problem(scene, goal, dom.name, statics))


def _support_worlds():
    for n in (2, 3):
        for k in (1, 2):
            blocks = [f"b{j + 1}" for j in range(k)]
            # every placement of the blocks as stacks over n locations
            for where in itertools.product(range(n), repeat=k):
                stacks = {}
                for b, loc in zip(blocks, where):
                    stacks.setdefault(loc, []).append(b)
                for target in range(n):
                    goal = (("oc", "on", f"t{target}", blocks[0]),)
                    yield ("support", n, dict(stacks), goal)
                if k == 2:
                    yield ("support", n, dict(stacks), (("oc", "on", "b2", "b1"),))


def _container_worlds():
    for n in (2, 3):
        for k in (1, 2):
            blocks = [f"b{j + 1}" for j in range(k)]
            for where in itertools.permutations(range(n), k):
                occ = dict(zip(where, blocks))
                for target in itertools.permutations(range(n), k):
                    goal = tuple(("oc", "in", f"s{t}", b) for t, b in zip(target, blocks))
                    yield ("container", n, occ, goal)


def micro_worlds():
    """Every generated world as ``(label, world)``; at most 2 blocks, 3 locations."""
    for kind, n, layout, goal in _support_worlds():
        yield f"support-{n}-{sorted(layout.items())}-{goal}", support_world(n, layout, goal)
    for kind, n, layout, goal in _container_worlds():
        yield f"container-{n}-{sorted(layout.items())}-{goal}", container_world(n, layout, goal)
    # a goal that needs an empty location that does not exist
    yield "container-full", container_world(2, {0: "b1", 1: "b2"}, (("oc", "in", "s0", "b2"), ("oc", "in", "s1", "b2")))
