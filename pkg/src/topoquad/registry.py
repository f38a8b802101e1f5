"""Named analytic maps, fields and surfaces shared by the library tests and the CLI.

Targets are written ``name`` or ``name:key=value,key=value``.
"""

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .degree import CircleMapLift, SphereMap2
from .errors import UsageError
from .field_index import ClosedHypersurface, VectorFieldEval
from .gauge import (
    HiggsBoundaryField,
    MAX_POWER,
    bpst_gauge_field,
    build_omega_k,
    qpow,
    twist_field,
    zero_gauge_field,
)
from .poincare_hopf import ChartedSurface, TangentFieldChart
from .surfaces import SurfaceOfRevolution

__all__ = ["parse_target", "Entry", "REGISTRIES", "resolve", "describe"]


def parse_target(spec):
    """Split ``name:key=value,...`` into ``(name, {key: value})`` (values are strings)."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if not name:
        raise UsageError(f"empty target name in {spec!r}")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq or not key.strip():
                raise UsageError(f"malformed parameter {item!r} in {spec!r} (expected key=value)")
            params[key.strip()] = value.strip()
    return name, params


@dataclass(frozen=True)
class Entry:
    build: Callable
    params: dict  # name -> (type, default)
    check: Callable = None
    help: str = ""


def _coerce(name, params, schema):
    unknown = set(params) - set(schema)
    if unknown:
        raise UsageError(f"{name}: unknown parameter(s) {sorted(unknown)}; accepted: {sorted(schema)}")
    out = {}
    for key, (typ, default) in schema.items():
        if key in params:
            try:
                out[key] = typ(params[key])
            except ValueError:
                raise UsageError(f"{name}: parameter {key}={params[key]!r} is not a valid {typ.__name__}") from None
        elif default is None:
            raise UsageError(f"{name}: missing required parameter {key!r}")
        else:
            out[key] = default
    return out


def _bound(key, limit):
    def check(p):
        if abs(p[key]) > limit:
            raise UsageError(f"|{key}| must be <= {limit}, got {p[key]}")

    return check


def _positive(*keys):
    def check(p):
        for k in keys:
            if not p[k] > 0:
                raise UsageError(f"{k} must be positive, got {p[k]}")

    return check


# -- circle maps -------------------------------------------------------------------


def _power_lift(n):
    return CircleMapLift(lambda x: n * np.asarray(x, float), lambda x: np.full(np.shape(x), float(n)))


def _perturbed_lift(n, a, m):
    return CircleMapLift(
        lambda x: n * np.asarray(x, float) + a * np.sin(m * np.asarray(x, float)),
        lambda x: n + a * m * np.cos(m * np.asarray(x, float)),
    )


CIRCLE_MAPS = {
    "power": Entry(lambda p: _power_lift(p["n"]), {"n": (int, None)}, _bound("n", 100), "f(x) = n x"),
    "perturbed": Entry(
        lambda p: _perturbed_lift(p["n"], p["a"], p["m"]),
        {"n": (int, None), "a": (float, 0.3), "m": (int, 1)},
        _bound("n", 100),
        "f(x) = n x + a sin(m x)",
    ),
}

# -- sphere maps -------------------------------------------------------------------

SPHERE_MAPS = {
    "identity": Entry(lambda p: SphereMap2(lambda t, f: t, lambda t, f: f), {}, help="(theta, phi)"),
    "antipodal": Entry(
        lambda p: SphereMap2(lambda t, f: math.pi - t, lambda t, f: f + math.pi), {}, help="(pi - theta, phi + pi)"
    ),
    "twist": Entry(
        lambda p: SphereMap2(lambda t, f: t, lambda t, f: p["k"] * f),
        {"k": (int, None)},
        _bound("k", 64),
        "(theta, k phi)",
    ),
    "shear": Entry(
        lambda p: SphereMap2(lambda t, f: t, lambda t, f: f + p["t"] * math.pi * np.sin(t)),
        {"t": (float, 1.0)},
        help="(theta, phi + t pi sin theta)",
    ),
    "cap": Entry(
        lambda p: SphereMap2(lambda t, f: 0.5 * np.sin(t) ** 2, lambda t, f: f), {}, help="image inside a polar cap"
    ),
}

# -- vector fields on R^n ------------------------------------------------------------


def _linear_field(diag):
    diag = np.asarray(diag, dtype=float)
    dim = len(diag)
    return VectorFieldEval(
        dim,
        lambda x: x * diag,
        lambda x: np.broadcast_to(np.diag(diag), np.shape(x)[:-1] + (dim, dim)),
        zeros=(tuple([0.0] * dim),),
    )


def _complex_field(fn, zeros=()):
    def V(x):
        z = fn(x[..., 0] + 1j * x[..., 1])
        return np.stack([z.real, z.imag], axis=-1)

    return VectorFieldEval(2, V, zeros=tuple(zeros))


def _dim_check(p):
    if p["dim"] not in (2, 3, 4):
        raise UsageError("dim must be 2, 3 or 4")


def _omega_field(k):
    return VectorFieldEval(4, lambda x: qpow(x, k), zeros=((0.0, 0.0, 0.0, 0.0),))


FIELDS = {
    "source": Entry(lambda p: _linear_field([1.0] * p["dim"]), {"dim": (int, 2)}, _dim_check, "V = x"),
    "sink": Entry(lambda p: _linear_field([-1.0] * p["dim"]), {"dim": (int, 2)}, _dim_check, "V = -x"),
    "saddle": Entry(
        lambda p: _linear_field([1.0] * (p["dim"] - 1) + [-1.0]), {"dim": (int, 2)}, _dim_check, "flip last axis"
    ),
    "hedgehog": Entry(lambda p: _linear_field([1.0, 1.0, 1.0]), {}, help="V = x in R^3"),
    "constant": Entry(
        lambda p: VectorFieldEval(p["dim"], lambda x: np.broadcast_to(np.eye(p["dim"])[0], np.shape(x))),
        {"dim": (int, 2)},
        _dim_check,
        "V = e_1",
    ),
    "power": Entry(
        lambda p: _complex_field(lambda z: z ** p["n"], [(0.0, 0.0)]),
        {"n": (int, None)},
        _bound("n", 32),
        "z^n on R^2",
    ),
    "inverse": Entry(
        lambda p: _complex_field(lambda z: 1.0 / z, [(0.0, 0.0)]),
        {},
        help="(x, -y)/(x^2 + y^2), singular at 0",
    ),
    "twozero": Entry(
        lambda p: _complex_field(lambda z: (z - p["a"]) * (z + p["a"]), [(p["a"], 0.0), (-p["a"], 0.0)]),
        {"a": (float, 1.0)},
        _positive("a"),
        "(z - a)(z + a)",
    ),
    "dipole": Entry(
        lambda p: _complex_field(
            lambda z: 1.0 / np.conj(z - p["a"]) - 1.0 / np.conj(z + p["a"]), [(p["a"], 0.0), (-p["a"], 0.0)]
        ),
        {"a": (float, 1.0)},
        _positive("a"),
        "source at +a minus source at -a",
    ),
    "shifted": Entry(
        lambda p: VectorFieldEval(
            3, lambda x: x - np.array([p["x"], p["y"], p["z"]]), zeros=((p["x"], p["y"], p["z"]),)
        ),
        {"x": (float, 0.5), "y": (float, -0.25), "z": (float, 1.0)},
        help="V = x - p0 in R^3",
    ),
    "omega": Entry(lambda p: _omega_field(p["k"]), {"k": (int, None)}, _bound("k", MAX_POWER), "omega_(1)^k on R^4"),
}

# -- hypersurfaces -------------------------------------------------------------------


def _center(p, dim):
    return tuple(p.get(k, 0.0) for k in ("cx", "cy", "cz", "cw")[:dim])


_CENTER = {"cx": (float, 0.0), "cy": (float, 0.0), "cz": (float, 0.0), "cw": (float, 0.0)}

SURFACES = {
    "sphere": Entry(
        lambda p, dim: ClosedHypersurface.sphere(_center(p, dim), p["r"]), {"r": (float, 1.0), **_CENTER}, _positive("r")
    ),
    "ellipsoid": Entry(
        lambda p, dim: ClosedHypersurface.ellipsoid(_center(p, dim), (p["a"], p["b"], p["c"])[:dim]),
        {"a": (float, 1.0), "b": (float, 1.5), "c": (float, 0.75), **_CENTER},
        _positive("a", "b", "c"),
    ),
}

# -- gauge theory ---------------------------------------------------------------------

HIGGS = {
    "hedgehog": Entry(
        lambda p: twist_field(p["k"], p["F"]), {"k": (int, 1), "F": (float, 1.0)}, _bound("k", 64), "twist-k Higgs field"
    ),
    "constant": Entry(
        lambda p: HiggsBoundaryField(lambda t, f: np.broadcast_to(np.array([0.0, 0.0, p["F"]]), np.shape(t) + (3,))),
        {"F": (float, 1.0)},
        _positive("F"),
    ),
}

SU2_MAPS = {
    "omega": Entry(lambda p: build_omega_k(p["k"]), {"k": (int, None)}, _bound("k", MAX_POWER), "omega_(1)^k"),
}

SU2_PAIRS = {
    "pair": Entry(
        lambda p: (build_omega_k(p["k1"]), build_omega_k(p["k2"])),
        {"k1": (int, None), "k2": (int, None)},
        lambda p: (_bound("k1", MAX_POWER)(p), _bound("k2", MAX_POWER)(p)),
        "(omega_(k1), omega_(k2))",
    ),
}

GAUGE_FIELDS = {
    "bpst": Entry(lambda p: bpst_gauge_field(p["rho"]), {"rho": (float, 1.0)}, _positive("rho")),
    "zero": Entry(lambda p: zero_gauge_field(), {}),
}

REVOLUTION = {
    "sphere": Entry(lambda p: SurfaceOfRevolution.sphere(p["scale"]), {"scale": (float, 1.0)}, _positive("scale")),
    "torus": Entry(
        lambda p: SurfaceOfRevolution.torus(p["R"], p["r"]),
        {"R": (float, 2.0), "r": (float, 1.0)},
        lambda p: None if p["R"] > p["r"] > 0 else (_ for _ in ()).throw(UsageError("need R > r > 0")),
    ),
}

# -- tangent fields on charted surfaces ---------------------------------------------------


def _tangent_gradient(axis):
    e = np.eye(3)[axis]
    return lambda p: np.broadcast_to(e, np.shape(p))


def _sphere_field(W, name):
    return TangentFieldChart.from_ambient(ChartedSurface.sphere(), W, name)


def _torus_constant(p):
    surface = ChartedSurface.torus(p["R"], p["r"])

    def comps(u, v):
        u, v = np.broadcast_arrays(u, v)
        return np.stack([np.full(u.shape, p["a"]), np.full(u.shape, p["b"])], axis=-1)

    return TangentFieldChart(surface, {"T": comps}, name="torus-constant")


_EXPR_CHARS = re.compile(r"^[0-9a-z.+\-*/() ]*$")
_EXPR_NAMES = {"x", "y", "z", "sin", "cos", "tan", "exp", "log", "sqrt", "pi", "e"}


def _check_expression(text):
    # sympify evaluates its input, so only plain arithmetic is let through
    if not _EXPR_CHARS.match(text):
        raise UsageError(f"field expression {text!r} contains disallowed characters")
    bad = set(re.findall(r"[a-z]+", text)) - _EXPR_NAMES
    if bad:
        raise UsageError(f"field expression {text!r} uses unknown names {sorted(bad)}; allowed: {sorted(_EXPR_NAMES)}")


def _expression_field(p):
    import sympy

    surface = ChartedSurface.sphere() if p["surface"] == "sphere" else ChartedSurface.torus()
    x, y, z = sympy.symbols("x y z")
    for k in ("vx", "vy", "vz"):
        _check_expression(p[k])
    try:
        exprs = [sympy.sympify(p[k], locals={"x": x, "y": y, "z": z}) for k in ("vx", "vy", "vz")]
    except (sympy.SympifyError, TypeError) as exc:
        raise UsageError(f"cannot parse field expression: {exc}") from None
    if any(e.free_symbols - {x, y, z} for e in exprs):
        raise UsageError("field expressions may only use x, y, z")
    fns = [sympy.lambdify((x, y, z), e, "numpy") for e in exprs]

    def W(pts):
        a, b, c = pts[..., 0], pts[..., 1], pts[..., 2]
        return np.stack([np.broadcast_to(np.asarray(f(a, b, c), float), a.shape) for f in fns], axis=-1)

    return TangentFieldChart.from_ambient(surface, W, "expr")


def _surface_choice(p):
    if p["surface"] not in ("sphere", "torus"):
        raise UsageError("surface must be 'sphere' or 'torus'")


TANGENT_FIELDS = {
    "sphere-gradient-z": Entry(lambda p: _sphere_field(_tangent_gradient(2), "sphere-gradient-z"), {}),
    "sphere-gradient-x": Entry(lambda p: _sphere_field(_tangent_gradient(0), "sphere-gradient-x"), {}),
    "sphere-rotation-z": Entry(
        lambda p: _sphere_field(lambda q: np.cross(np.array([0.0, 0.0, 1.0]), q), "sphere-rotation-z"), {}
    ),
    "torus-constant": Entry(
        _torus_constant, {"a": (float, 1.0), "b": (float, 0.0), "R": (float, 2.0), "r": (float, 1.0)}
    ),
    "torus-height-gradient": Entry(
        lambda p: TangentFieldChart.from_ambient(ChartedSurface.torus(p["R"], p["r"]), _tangent_gradient(0), "torus-height-gradient"),
        {"R": (float, 2.0), "r": (float, 1.0)},
    ),
    "expr": Entry(
        _expression_field,
        {"surface": (str, "sphere"), "vx": (str, "0"), "vy": (str, "0"), "vz": (str, "0")},
        _surface_choice,
        "ambient field from expressions in x, y, z",
    ),
}

REGISTRIES = {
    "circle": CIRCLE_MAPS,
    "sphere2": SPHERE_MAPS,
    "field": FIELDS,
    "surface": SURFACES,
    "higgs": HIGGS,
    "su2": SU2_MAPS,
    "su2pair": SU2_PAIRS,
    "gauge": GAUGE_FIELDS,
    "revolution": REVOLUTION,
    "tangent": TANGENT_FIELDS,
}


def resolve(kind, spec, *args):
    """Build the registry object named by ``spec``; raises :class:`UsageError`."""
    registry = REGISTRIES[kind]
    if kind == "tangent" and spec.endswith(".json"):
        try:
            cfg = json.loads(Path(spec).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read field config {spec!r}: {exc}") from None
        name, params = "expr", {k: str(v) for k, v in cfg.items()}
    else:
        name, params = parse_target(spec)
    if name not in registry:
        raise UsageError(f"unknown {kind} target {name!r}; choose from {sorted(registry)}")
    entry = registry[name]
    values = _coerce(name, params, entry.params)
    if entry.check is not None:
        entry.check(values)
    try:
        return entry.build(values, *args)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"{spec}: {exc}") from None


def describe(kind):
    return {name: e.help for name, e in REGISTRIES[kind].items()}
