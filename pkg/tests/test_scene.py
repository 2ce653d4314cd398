import json

import numpy as np
import pytest

from infconvkit.convex_bodies import NormBall, VPolytope
from infconvkit.errors import InputError
from infconvkit.fields import HalfspaceIntersection, PointCloud, Table, Union
from infconvkit.infconv import ConvexProgram, ExactEnumeration, GridSearch
from infconvkit.scene import SceneError, format_path, load_scene, parse_json, scene_from_obj

BASE = {"dimension": 2, "F": {"kind": "ball"}, "Omega": {"kind": "points", "points": [[0, 0]]}}


def parse(obj, indent=2):
    return parse_json(json.dumps(obj, indent=indent), scene_from_obj)


def with_(**kw):
    return {**BASE, **kw}


def test_bundled_scenes_load(scene_dir):
    kinds = {}
    for p in sorted(scene_dir.glob("*.json")):
        sc = load_scene(p)
        kinds[p.stem] = type(sc.convolution().strategy)
    assert kinds["two_points"] is ExactEnumeration
    assert kinds["halfplane"] is ConvexProgram
    assert kinds["grid_l1"] is GridSearch


def test_scene_contents(scene_dir):
    sc = load_scene(scene_dir / "two_points.json")
    assert isinstance(sc.F, NormBall) and isinstance(sc.Omega, PointCloud) and isinstance(sc.J, Table)
    assert sc.convolution()([0, 0]) == 4
    sc = load_scene(scene_dir / "square_triangle.json")
    assert isinstance(sc.F, VPolytope) and sc.plan.levels == 20


def test_union_and_halfspaces():
    sc = parse(with_(Omega={"kind": "union", "members": [
        {"kind": "halfspaces", "A": [[0, 1]], "b": [0], "box": 4},
        {"kind": "vpolytope", "vertices": [[0, 1], [1, 1], [0, 2]]}]}))
    assert isinstance(sc.Omega, Union)
    assert isinstance(sc.Omega.members[0], HalfspaceIntersection) and sc.Omega.members[0].box == 4


def test_format_path():
    assert format_path(["Omega", "members", 1, "vertices"]) == "Omega.members[1].vertices"
    assert format_path([]) == ""


@pytest.mark.parametrize("obj, path", [
    (with_(F={"kind": "blob"}), "F.kind"),
    (with_(F={"kind": "ball", "p": 3}), "F.p"),
    (with_(F={"kind": "ball", "radius": -1}), "F.radius"),
    (with_(F={"kind": "vpolytope", "vertices": [[0, 0, 1]]}), "F.vertices[0]"),
    (with_(Omega={"kind": "union", "members": [{"kind": "points", "points": [[0, 0]]},
                                               {"kind": "vpolytope", "vertices": [[0, "x"]]}]}),
     "Omega.members[1].vertices[0][1]"),
    (with_(J={"kind": "table", "entries": [{"point": [0, 0]}]}), "J.entries[0]"),
    (with_(extra=1), "extra"),
    (with_(dimension=0), "dimension"),
    (with_(dimension=2.5), "dimension"),
    (with_(plan={"levels": 1}), "plan"),
    (with_(plan={"decay": "fast"}), "plan.decay"),
    (with_(strategy={"kind": "grid", "lower": [0, 0], "upper": [0, 1]}), "strategy"),
    (with_(zero_body_constant=0), "zero_body_constant"),
    (with_(phi={"kind": "norm", "weight": 0}), "phi.weight"),
])
def test_errors_name_the_key(obj, path):
    with pytest.raises(SceneError) as e:
        parse(obj)
    assert e.value.path and format_path(e.value.path) == path
    assert str(e.value).startswith(path)
    assert e.value.position is not None


def test_missing_key_and_position():
    text = '{\n  "dimension": 2,\n  "F": {"kind": "ball"},\n  "Omega": {"kind": "points", "points": [[0, 0]]},\n' \
           '  "J": {"kind": "table", "entries": [{"point": [1, 2, 3], "value": 1}]}\n}'
    with pytest.raises(SceneError) as e:
        parse_json(text, scene_from_obj)
    assert format_path(e.value.path) == "J.entries[0].point"
    line, col = e.value.position
    assert line == 5
    assert text.splitlines()[4][col - 1:].startswith("[1, 2, 3]")
    with pytest.raises(SceneError, match="missing key 'Omega'"):
        parse({"dimension": 2, "F": {"kind": "ball"}})


def test_invalid_json_position():
    with pytest.raises(SceneError) as e:
        parse_json('{"dimension": 2,\n "F": }', scene_from_obj)
    assert e.value.position == (2, 7)


def test_scene_error_is_input_error(tmp_path):
    with pytest.raises(InputError, match="cannot read scene"):
        load_scene(tmp_path / "missing.json")
    assert issubclass(SceneError, InputError)


def test_length_mismatch_is_located():
    # length mismatches caught by the reader point at the shorter array
    obj = with_(Omega={"kind": "halfspaces", "A": [[0, 1], [1, 0]], "b": [0]})
    with pytest.raises(SceneError) as e:
        parse(obj)
    assert format_path(e.value.path) == "Omega.b"
    sc = parse(with_(F={"kind": "singleton", "point": [1, 0]}))
    assert np.array_equal(sc.F.point, [1, 0])
