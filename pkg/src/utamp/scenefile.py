"""JSON scene files.

Layout (``format`` and ``version`` are mandatory)::

    {
      "format": "utamp-scene",
      "version": 1,
      "robot_base": {"position": [x, y, z], "rpy": [r, p, y]},
      "reference_normal": [0, 0, 1],
      "hand": {"id": "hand", "position": ..., "rpy": ..., "size": [dx, dy, dz]},
      "holding": null,
      "objects": [{"id", "kind", "position", "rpy", "size", "movable"}],
      "spaces":  [{"id", "position", "rpy", "size", "container"}],
      "planning": {                     # optional
        "domain": "object-container",
        "grasps": [["front", "left", "right"]],
        "placements": [["under", "on"]],   # optional
        "extensions": ["clean", "cook"],
        "facts": [["cleaner", "dishw"]],
        "goal": [["oc", "in", "s1", "b1"]]   # optional
      }
    }

Lengths are metres, angles radians.  Output is key-sorted and uses ``repr``
floats, so a load/save cycle is byte-stable.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Optional, Tuple

from .geom import BBox, Kind, PhysicalObject, Pose
from .perception import Scene

FORMAT = "utamp-scene"
VERSION = 1


class SceneFormatError(ValueError):
    pass


def _pose_dict(p: Pose) -> Dict[str, Any]:
    return {"position": list(p.position), "rpy": list(p.rpy)}


def _obj_dict(o: PhysicalObject) -> Dict[str, Any]:
    d = {"id": o.id, "kind": o.kind.value, "size": list(o.size.as_tuple())}
    d.update(_pose_dict(o.pose))
    if o.kind == Kind.SPACE:
        d["container"] = o.container
    else:
        d["movable"] = o.movable
    return d


def scene_to_dict(scene: Scene, planning: Optional[dict] = None) -> Dict[str, Any]:
    d = {
        "format": FORMAT,
        "version": VERSION,
        "robot_base": _pose_dict(scene.robot_base),
        "reference_normal": list(scene.reference_normal),
        "hand": _obj_dict(scene.hand) if scene.hand is not None else None,
        "holding": scene.holding,
        "objects": [_obj_dict(o) for o in scene.objects],
        "spaces": [_obj_dict(s) for s in scene.spaces],
    }
    if planning is not None:
        d["planning"] = planning
    return d


def _vec(d, key, n=3):
    v = d.get(key)
    if not isinstance(v, list) or len(v) != n or not all(isinstance(x, (int, float)) for x in v):
        raise SceneFormatError(f"{key!r} must be a list of {n} numbers")
    return tuple(float(x) for x in v)


def _obj(d: Dict[str, Any], default_kind: str) -> PhysicalObject:
    try:
        kind = Kind(d.get("kind", default_kind))
        return PhysicalObject(
            str(d["id"]), Pose(_vec(d, "position"), _vec(d, "rpy")), BBox(*_vec(d, "size")), kind,
            container=bool(d.get("container", True)), movable=bool(d.get("movable", True)))
    except KeyError as e:
        raise SceneFormatError(f"object entry lacks {e}") from None
    except ValueError as e:
        raise SceneFormatError(str(e)) from None


def scene_from_dict(d: Dict[str, Any]) -> Tuple[Scene, Optional[dict]]:
    if not isinstance(d, dict) or d.get("format") != FORMAT:
        raise SceneFormatError(f"not a {FORMAT} document")
    if d.get("version") != VERSION:
        raise SceneFormatError(f"unsupported version {d.get('version')!r}")
    base = d.get("robot_base", {"position": [0, 0, 0], "rpy": [0, 0, 0]})
    hand = _obj(d["hand"], "hand") if d.get("hand") else None
    try:
        scene = Scene(
            tuple(_obj(o, "solid") for o in d.get("objects", [])),
            tuple(_obj(s, "space") for s in d.get("spaces", [])),
            Pose(_vec(base, "position"), _vec(base, "rpy")),
            _vec(d, "reference_normal") if "reference_normal" in d else (0.0, 0.0, 1.0),
            hand, d.get("holding"))
    except ValueError as e:
        raise SceneFormatError(str(e)) from None
    return scene, d.get("planning")


def dumps(scene: Scene, planning: Optional[dict] = None) -> str:
    return json.dumps(scene_to_dict(scene, planning), indent=1, sort_keys=True) + "\n"


def loads(text: str) -> Tuple[Scene, Optional[dict]]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneFormatError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return scene_from_dict(d)


def load(path) -> Tuple[Scene, Optional[dict]]:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


def save(path, scene: Scene, planning: Optional[dict] = None):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(scene, planning))
