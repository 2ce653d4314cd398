"""Scene files: JSON descriptions of F, Omega, J and phi.

Parse errors name the key path (``Omega.members[1].vertices``) and the
line/column of the offending value in the source text.
"""
from dataclasses import dataclass
import functools
import json
from json.decoder import scanstring
import math

import numpy as np

from .convex_bodies import NormBall, Singleton, VPolytope
from .errors import InputError
from .fields import (
    GaugeField, HalfspaceIntersection, Indicator, NormField, Perturbed, PointCloud, Table, Union,
    VPolytopeRegion, Zero,
)
from .gauge import Gauge
from .infconv import GridSearch, InfConvolution
from .subdiff import SamplingPlan


class SceneError(InputError):
    def __init__(self, path, message, position=None):
        self.path = path
        self.position = position
        where = f" (line {position[0]}, column {position[1]})" if position else ""
        super().__init__(f"{format_path(path) or '<root>'}{where}: {message}")


def format_path(path):
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out


class _SpecError(Exception):
    def __init__(self, path, message):
        self.path = list(path)
        self.message = message


# --------------------------------------------------------------------------- locating values in text

_WS = " \t\n\r"


def _skip(text, i):
    while i < len(text) and text[i] in _WS:
        i += 1
    return i


def _value_start(text, path):
    """Offset of the value at ``path`` (or of its deepest existing ancestor)."""
    dec = json.JSONDecoder()
    i = _skip(text, 0)
    for key in path:
        if i >= len(text):
            break
        if text[i] == "{" and isinstance(key, str):
            j = _skip(text, i + 1)
            found = None
            while j < len(text) and text[j] == '"':
                k, j = scanstring(text, j + 1)
                j = _skip(text, j)
                j = _skip(text, j + 1)  # past ':'
                if k == key:
                    found = j
                    break
                _, j = dec.raw_decode(text, j)
                j = _skip(text, j)
                if j < len(text) and text[j] == ",":
                    j = _skip(text, j + 1)
            if found is None:
                return i
            i = found
        elif text[i] == "[" and isinstance(key, int):
            j = _skip(text, i + 1)
            for _ in range(key):
                _, j = dec.raw_decode(text, j)
                j = _skip(text, j)
                j = _skip(text, j + 1)  # past ','
            i = j
        else:
            return i
    return i


def _line_col(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


# --------------------------------------------------------------------------- spec readers


def _expect_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise _SpecError(path, "expected an object")
    for k in obj:
        if k not in required and k not in optional:
            raise _SpecError(path + [k], f"unknown key {k!r}")
    for k in required:
        if k not in obj:
            raise _SpecError(path, f"missing key {k!r}")


def _number(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise _SpecError(path, f"expected a finite number, got {v!r}")
    return float(v)


def _integer(v, path):
    if isinstance(v, bool) or not isinstance(v, int):
        raise _SpecError(path, f"expected an integer, got {v!r}")
    return v


def _vector(v, path, dim):
    if not isinstance(v, list) or not v:
        raise _SpecError(path, "expected a nonempty list of numbers")
    out = [_number(x, path + [i]) for i, x in enumerate(v)]
    if dim is not None and len(out) != dim:
        raise _SpecError(path, f"expected dimension {dim}, got {len(out)}")
    return np.array(out)


def _matrix(v, path, dim):
    if not isinstance(v, list) or not v:
        raise _SpecError(path, "expected a nonempty list of points")
    return np.array([_vector(r, path + [i], dim) for i, r in enumerate(v)])


def _located(reader):
    # constructor-level InputErrors are attributed to the spec being read
    @functools.wraps(reader)
    def wrapped(obj, path, *args):
        try:
            return reader(obj, path, *args)
        except InputError as e:
            raise _SpecError(path, str(e)) from None

    return wrapped


def _kind(obj, path, kinds):
    if not isinstance(obj, dict):
        raise _SpecError(path, "expected an object")
    k = obj.get("kind")
    if k not in kinds:
        raise _SpecError(path + ["kind"], f"kind must be one of {sorted(kinds)}, got {k!r}")
    return k


@_located
def read_body(obj, path, dim):
    k = _kind(obj, path, {"vpolytope", "ball", "singleton"})
    if k == "vpolytope":
        _expect_keys(obj, path, ("kind", "vertices"))
        return VPolytope(_matrix(obj["vertices"], path + ["vertices"], dim))
    if k == "ball":
        _expect_keys(obj, path, ("kind",), ("p", "radius"))
        p = obj.get("p", 2)
        if p not in (1, 2, "inf"):
            raise _SpecError(path + ["p"], f"p must be 1, 2 or \"inf\", got {p!r}")
        r = _number(obj.get("radius", 1.0), path + ["radius"])
        if r <= 0:
            raise _SpecError(path + ["radius"], "radius must be positive")
        return NormBall(p, r, dim)
    _expect_keys(obj, path, ("kind", "point"))
    return Singleton(_vector(obj["point"], path + ["point"], dim))


@_located
def read_region(obj, path, dim):
    k = _kind(obj, path, {"points", "vpolytope", "halfspaces", "union"})
    if k == "points":
        _expect_keys(obj, path, ("kind", "points"))
        return PointCloud(_matrix(obj["points"], path + ["points"], dim))
    if k == "vpolytope":
        _expect_keys(obj, path, ("kind", "vertices"))
        return VPolytopeRegion(_matrix(obj["vertices"], path + ["vertices"], dim))
    if k == "halfspaces":
        _expect_keys(obj, path, ("kind", "A", "b"), ("box",))
        A = _matrix(obj["A"], path + ["A"], dim)
        b = _vector(obj["b"], path + ["b"], len(A))
        box = _number(obj.get("box", 10.0), path + ["box"])
        return HalfspaceIntersection(A, b, box)
    _expect_keys(obj, path, ("kind", "members"))
    members = obj["members"]
    if not isinstance(members, list) or not members:
        raise _SpecError(path + ["members"], "expected a nonempty list of regions")
    return Union(tuple(read_region(m, path + ["members", i], dim) for i, m in enumerate(members)))


@_located
def read_field(obj, path, dim):
    k = _kind(obj, path, {"zero", "table"})
    if k == "zero":
        _expect_keys(obj, path, ("kind",))
        return Zero(dim)
    _expect_keys(obj, path, ("kind", "entries"))
    entries = obj["entries"]
    if not isinstance(entries, list) or not entries:
        raise _SpecError(path + ["entries"], "expected a nonempty list of entries")
    pts, vals = [], []
    for i, e in enumerate(entries):
        _expect_keys(e, path + ["entries", i], ("point", "value"))
        pts.append(_vector(e["point"], path + ["entries", i, "point"], dim))
        vals.append(_number(e["value"], path + ["entries", i, "value"]))
    return Table(np.array(pts), np.array(vals))


@_located
def read_phi(obj, path, dim, F, zero_body_constant):
    k = _kind(obj, path, {"gauge", "norm"})
    if k == "gauge":
        _expect_keys(obj, path, ("kind",))
        return GaugeField(Gauge(F, zero_body_constant))
    _expect_keys(obj, path, ("kind",), ("p", "weight"))
    p = obj.get("p", 2)
    if p not in (1, 2, "inf"):
        raise _SpecError(path + ["p"], f"p must be 1, 2 or \"inf\", got {p!r}")
    w = _number(obj.get("weight", 1.0), path + ["weight"])
    if w <= 0:
        raise _SpecError(path + ["weight"], "weight must be positive")
    return NormField(p, dim, w)


_PLAN_KEYS = ("base_radius", "decay", "levels", "directions", "seed", "quotient_tolerance")


def read_plan(obj, path):
    _expect_keys(obj, path, (), _PLAN_KEYS)
    kw = {}
    for k, v in obj.items():
        kw[k] = _integer(v, path + [k]) if k in ("levels", "directions", "seed") else _number(v, path + [k])
    try:
        return SamplingPlan(**kw)
    except InputError as e:
        raise _SpecError(path, str(e)) from None


def read_strategy(obj, path, dim):
    _kind(obj, path, {"grid"})
    _expect_keys(obj, path, ("kind", "lower", "upper"), ("resolution", "levels"))
    try:
        return GridSearch(_vector(obj["lower"], path + ["lower"], dim), _vector(obj["upper"], path + ["upper"], dim),
                          _integer(obj.get("resolution", 64), path + ["resolution"]),
                          _integer(obj.get("levels", 3), path + ["levels"]))
    except InputError as e:
        raise _SpecError(path, str(e)) from None


@dataclass(frozen=True, eq=False)
class Scene:
    dimension: int
    F: object
    Omega: object
    J: object = None
    phi: object = None
    plan: SamplingPlan = SamplingPlan()
    strategy: object = None
    seed: int = 0

    @property
    def f(self):
        return Indicator(self.Omega) if self.J is None else Perturbed(self.J, self.Omega)

    def convolution(self):
        return InfConvolution(self.phi, self.f, self.strategy)


_SCENE_KEYS = ("dimension", "F", "Omega")
_SCENE_OPTIONAL = ("J", "phi", "plan", "strategy", "seed", "zero_body_constant")


def scene_from_obj(obj, path=()):
    path = list(path)
    _expect_keys(obj, path, _SCENE_KEYS, _SCENE_OPTIONAL)
    dim = _integer(obj["dimension"], path + ["dimension"])
    if not 1 <= dim <= 16:
        raise _SpecError(path + ["dimension"], "dimension must be in 1..16")
    zbc = _number(obj.get("zero_body_constant", 1.0), path + ["zero_body_constant"])
    if zbc <= 0:
        raise _SpecError(path + ["zero_body_constant"], "must be positive")
    F = read_body(obj["F"], path + ["F"], dim)
    Omega = read_region(obj["Omega"], path + ["Omega"], dim)
    J = read_field(obj["J"], path + ["J"], dim) if "J" in obj else None
    phi = read_phi(obj.get("phi", {"kind": "gauge"}), path + ["phi"], dim, F, zbc)
    plan = read_plan(obj["plan"], path + ["plan"]) if "plan" in obj else SamplingPlan()
    strategy = read_strategy(obj["strategy"], path + ["strategy"], dim) if "strategy" in obj else None
    seed = _integer(obj.get("seed", 0), path + ["seed"])
    return Scene(dim, F, Omega, J, phi, plan, strategy, seed)


def parse_json(text, reader):
    """Decode ``text`` and apply ``reader``; every failure becomes a located SceneError."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneError([], f"invalid JSON: {e.msg}", (e.lineno, e.colno)) from None
    try:
        return reader(obj)
    except _SpecError as e:
        raise SceneError(e.path, e.message, _line_col(text, _value_start(text, e.path))) from None


def load_scene(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read scene {path}: {e.strerror}") from None
    return parse_json(text, scene_from_obj)
