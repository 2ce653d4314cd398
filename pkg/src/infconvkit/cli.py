"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or parse error.
Values that start with a minus sign may be passed as ``--point -1,0``.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import InputError, PreconditionError
from .fields import field_eval
from .gauge import Gauge, gauge_eval
from .infconv import infconv_eval, is_in_S0
from .scene import load_scene
from .subdiff import (
    Frechet, Holder, boundary_polygon_2d, frechet_test, holder_test, rhs_frechet, rhs_holder,
    rhs_predicate,
)
from .verifier import BOUNDARY_TOL, FAIL, dumps, format_number, parse_config, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
_VALUE_FLAGS = ("--point", "--covector")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _vector_arg(text, dim, name):
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"--{name}: expected comma-separated numbers, got {text!r}") from None
    if v.size != dim or not np.all(np.isfinite(v)):
        raise InputError(f"--{name}: expected {dim} finite numbers, got {text!r}")
    return v


def parse_kind(text):
    """``frechet:eps`` or ``holder:s``."""
    name, _, arg = text.partition(":")
    try:
        val = float(arg)
    except ValueError:
        raise InputError(f"--kind: bad parameter in {text!r}") from None
    if name == "frechet":
        return Frechet(val)
    if name == "holder":
        return Holder(val)
    raise InputError(f"--kind must be frechet:eps or holder:s, got {text!r}")


def _glue_negative_values(argv):
    # argparse reads "-1,0" as an option; attach it to its flag instead
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def build_parser():
    p = _Parser(prog="infconvkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def scene_cmd(name, help_, point=True):
        c = sub.add_parser(name, help=help_)
        c.add_argument("--scene", required=True)
        if point:
            c.add_argument("--point", required=True)
        return c

    scene_cmd("gauge", "gauge of F at a point")
    c = scene_cmd("infconv", "infimal convolution value and minimizers")
    c.add_argument("--slack", type=float, default=1e-9)
    scene_cmd("s0", "membership of a point in S0")
    c = scene_cmd("subdiff", "subdifferential membership of a covector")
    c.add_argument("--covector", required=True)
    c.add_argument("--kind", default="frechet:0")
    c = scene_cmd("emit-ball", "gauge unit ball polyline as CSV", point=False)
    c.add_argument("--resolution", type=int, default=360)
    c = scene_cmd("emit-subdiff", "boundary polygon of the right-hand-side set as CSV")
    c.add_argument("--resolution", type=int, default=720)
    c.add_argument("--kind", default="frechet:0")
    c = sub.add_parser("verify", help="run a verification suite")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--suite", choices=["bundled"], default="bundled")
    g.add_argument("--config")
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    return p


def _emit(obj, out):
    out.write(dumps(obj) + "\n")


def _csv(header, rows, out):
    out.write(header + "\n")
    for a, b in rows:
        out.write(f"{format_number(a)},{format_number(b)}\n")


def _require_2d(scene, what):
    if scene.dimension != 2:
        raise InputError(f"{what} needs a 2-dimensional scene, got dimension {scene.dimension}")


def cmd_gauge(args, out):
    scene = load_scene(args.scene)
    x = _vector_arg(args.point, scene.dimension, "point")
    _emit({"value": gauge_eval(Gauge(scene.F), x)}, out)
    return EXIT_OK


def cmd_infconv(args, out):
    scene = load_scene(args.scene)
    x = _vector_arg(args.point, scene.dimension, "point")
    T = scene.convolution()
    res = infconv_eval(T, x, args.slack)
    _emit({"value": res.value, "minimizers": [{"point": y, "objective": v} for y, v in res.minimizers],
           "approximate": res.approximate}, out)
    return EXIT_OK


def cmd_s0(args, out):
    scene = load_scene(args.scene)
    x = _vector_arg(args.point, scene.dimension, "point")
    T = scene.convolution()
    _emit({"in_S0": is_in_S0(T, x), "T": infconv_eval(T, x).value, "f": field_eval(T.f, x)}, out)
    return EXIT_OK


def cmd_subdiff(args, out):
    scene = load_scene(args.scene)
    x = _vector_arg(args.point, scene.dimension, "point")
    c = _vector_arg(args.covector, scene.dimension, "covector")
    kind = parse_kind(args.kind)
    T = scene.convolution()
    if isinstance(kind, Frechet):
        lhs = frechet_test(T, x, c, kind.epsilon, scene.plan)
    else:
        lhs = holder_test(T, x, c, kind.s, scene.plan)
    rhs = None
    if is_in_S0(T, x):
        r = rhs_frechet(T, x, c, kind.epsilon, scene.plan) if isinstance(kind, Frechet) \
            else rhs_holder(T, x, c, kind.s, scene.plan)
        rhs = r.verdict
    _emit({"verdict": lhs.verdict, "witness": lhs.witness, "worst_quotient": lhs.worst_quotient,
           "rhs_verdict": rhs}, out)
    return EXIT_OK


def cmd_emit_ball(args, out):
    scene = load_scene(args.scene)
    _require_2d(scene, "emit-ball")
    if args.resolution < 3:
        raise InputError("--resolution must be at least 3")
    g = Gauge(scene.F)
    rows = []
    for a in 2 * math.pi * np.arange(args.resolution) / args.resolution:
        u = np.array([math.cos(a), math.sin(a)])
        v = gauge_eval(g, u)
        # rays outside the cone of F meet the unit ball only at 0
        r = 1.0 / v if v > 0 and math.isfinite(v) else (0.0 if v > 0 else math.inf)
        rows.append((r * u[0], r * u[1]) if math.isfinite(r) else (math.inf, math.inf))
    _csv("x,y", rows, out)
    return EXIT_OK


def cmd_emit_subdiff(args, out):
    scene = load_scene(args.scene)
    _require_2d(scene, "emit-subdiff")
    x = _vector_arg(args.point, scene.dimension, "point")
    kind = parse_kind(args.kind)
    T = scene.convolution()
    if not is_in_S0(T, x):
        raise PreconditionError(f"point {x.tolist()} is not in S0")
    try:
        pred = rhs_predicate(T, x, kind, scene.plan, tol=BOUNDARY_TOL)
        vec = True
    except InputError:
        # no exact right-hand side: fall back to the per-covector numeric test
        if isinstance(kind, Frechet):
            pred = lambda c: rhs_frechet(T, x, c, kind.epsilon, scene.plan)
        else:
            pred = lambda c: rhs_holder(T, x, c, kind.s, scene.plan)
        vec = False
    _csv("angle,radius", boundary_polygon_2d(pred, args.resolution, vectorized=vec), out)
    return EXIT_OK


def cmd_verify(args, out):
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as e:
            raise InputError(f"cannot read config {args.config}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise InputError(f"{args.config} (line {e.lineno}, column {e.colno}): invalid JSON: {e.msg}") from None
        if not isinstance(config, dict):
            raise InputError(f"{args.config}: config must be an object")
    else:
        config = {}
    if args.seed is not None:
        config = dict(config, seed=args.seed)
    report = run_suite(parse_config(config))
    text = report.to_lines()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    _emit({"summary": report.verdict, **report.counts()}, out)
    return EXIT_FAIL if report.verdict == FAIL else EXIT_OK


COMMANDS = {
    "gauge": cmd_gauge, "infconv": cmd_infconv, "s0": cmd_s0, "subdiff": cmd_subdiff,
    "emit-ball": cmd_emit_ball, "emit-subdiff": cmd_emit_subdiff, "verify": cmd_verify,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_negative_values(argv))
        return COMMANDS[args.command](args, out)
    except (InputError, PreconditionError) as e:
        print(f"infconvkit: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
