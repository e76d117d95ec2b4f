"""Unified task and motion planning for block worlds.

Modules: ``geom`` (poses, boxes), ``abstraction`` (parts, grasps,
placements), ``symbolic`` (domains, grounding, validation), ``planner``
(greedy best-first search), ``perception`` (scene to atoms), ``executor``
(plans to trajectories, simulation), ``bench`` (benchmark scenarios),
``pddl`` and ``scenefile`` (I/O), ``cli``.
"""

__version__ = "0.1.0"
