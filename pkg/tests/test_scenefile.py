import json

import pytest

from utamp import scenefile
from utamp.bench import SCENARIOS
from utamp.geom import BBox, Kind, PhysicalObject, Pose
from utamp.perception import Scene, perceive


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scene_round_trip_is_byte_stable(name, tmp_path):
    sc = SCENARIOS[name]()
    text = scenefile.dumps(sc.scene, sc.planning())
    scene, planning = scenefile.loads(text)
    assert scene == sc.scene
    assert planning == sc.planning()
    assert scenefile.dumps(scene, planning) == text
    path = tmp_path / "scene.json"
    scenefile.save(path, scene, planning)
    assert path.read_text() == text
    assert scenefile.load(path) == (scene, planning)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenarios_build_identically(name):
    a, b = SCENARIOS[name](), SCENARIOS[name]()
    assert scenefile.dumps(a.scene, a.planning()) == scenefile.dumps(b.scene, b.planning())


def test_held_object_survives_round_trip():
    hand = PhysicalObject("hand", Pose((0.625, 0, 0.425), (0, -1.5707963267948966, 0)),
                          BBox(0.04, 0.07, 0.085), Kind.HAND)
    s = Scene((PhysicalObject("b1", Pose((0.6, 0, 0.425)), BBox(0.05, 0.05, 0.05)),),
              hand=hand, holding="b1")
    back, planning = scenefile.loads(scenefile.dumps(s))
    assert planning is None
    assert perceive(back) == perceive(s)


@pytest.mark.parametrize("doc, message", [
    ("{", "line 1"),
    ("[]", "not a utamp-scene"),
    ('{"format": "utamp-scene", "version": 9}', "unsupported version"),
    ('{"format": "utamp-scene", "version": 1, "objects": [{"id": "a"}]}', "position"),
    ('{"format": "utamp-scene", "version": 1, "objects": [{"position": [0,0,0], "rpy": [0,0,0], "size": [1,1,1]}]}', "lacks"),
    ('{"format": "utamp-scene", "version": 1, "objects": [{"id": "a", "position": [0,0,0], "rpy": [0,0,0], "size": [1,0,1]}]}', "positive"),
    ('{"format": "utamp-scene", "version": 1, "objects": [{"id": "a", "kind": "ghost", "position": [0,0,0], "rpy": [0,0,0], "size": [1,1,1]}]}', "ghost"),
])
def test_format_errors(doc, message):
    with pytest.raises(scenefile.SceneFormatError) as e:
        scenefile.loads(doc)
    assert message in str(e.value)


def test_output_is_sorted_json():
    sc = SCENARIOS["task1"]()
    d = json.loads(scenefile.dumps(sc.scene))
    assert d["format"] == "utamp-scene" and d["version"] == 1
    assert "planning" not in d
