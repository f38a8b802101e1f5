"""Command-line front end: one subcommand per invariant.

Exit codes are 0 on success, 1 when a computation or check fails (the raw
value and residual are still reported) and 2 on usage errors.
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import degree, field_index, forms, gauge, poincare_hopf, surfaces
from .errors import NotNearIntegerError, TopoError, UsageError
from .meshes import CORPUS, corpus_mesh
from .quadrature import DEFAULT_TOL, PeriodicGrid1D, SphereGrid2, SphereGrid3
from .registry import resolve

__all__ = ["CommandPlan", "parse_args", "execute", "main", "SUBCOMMANDS"]

MC_TOL = 1e-7
CHERN_TOL = 0.05
MC_SEED = 0

# subcommand -> (target flag, registry kind, accepted grid arities, default grid)
SUBCOMMANDS = {
    "winding": ("map", "circle", (1,), (64,)),
    "sphere-degree": ("map", "sphere2", (2,), (32, 64)),
    "vf-index": ("field", "field", (1, 2, 3), None),
    "vf-point-index": ("field", "field", (1,), (64,)),
    "additivity": ("field", "field", (1, 2, 3), None),
    "monopole": ("field", "higgs", (2,), (32, 64)),
    "instanton": ("map", "su2", (3,), (24, 24, 48)),
    "mc-identity": ("map", "su2", (1,), (100,)),
    "product-charge": ("map", "su2pair", (3,), (24, 24, 48)),
    "chern-ball": ("field", "gauge", (1, 4), (48, 16, 16, 32)),
    "euler": ("mesh", "mesh", (), None),
    "angle-defect": ("mesh", "mesh", (), None),
    "genus": ("mesh", "mesh", (), None),
    "gauss-bonnet-rev": ("surface", "revolution", (2,), (64, 64)),
    "poincare-hopf": ("field", "tangent", (1,), (256,)),
    "omega-normalize": (None, None, (1, 2, 3), None),
}


@dataclass(frozen=True)
class CommandPlan:
    subcommand: str
    target: str
    grid: tuple = None
    tol: float = DEFAULT_TOL
    output: str = "text"
    surface: str = None
    radius: float = None
    regular_value: float = None
    center: tuple = None
    dim: int = None
    extras: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    p = _Parser(prog="topoquad", description="Integer topological invariants by quadrature.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--map")
        s.add_argument("--field")
        s.add_argument("--mesh")
        s.add_argument("--surface")
        s.add_argument("--grid", help="comma-separated node counts")
        s.add_argument("--tol", type=float)
        s.add_argument("--json", action="store_true")
        s.add_argument("--radius", type=float)
        s.add_argument("--regular-value", type=float)
        s.add_argument("--center", help="comma-separated coordinates")
        s.add_argument("--dim", type=int)
    return p


def _floats(text, what):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _parse_grid(text, arities):
    try:
        counts = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--grid must be comma-separated integers, got {text!r}") from None
    if any(c <= 0 for c in counts):
        raise UsageError("grid counts must be positive")
    if len(counts) not in arities:
        raise UsageError(f"--grid takes {' or '.join(map(str, arities))} count(s) here, got {len(counts)}")
    return counts


def _sphere_grid(counts):
    if len(counts) == 1:
        return PeriodicGrid1D(counts[0])
    if len(counts) == 2:
        return SphereGrid2(*counts)
    return SphereGrid3(*counts)


def _default_tol():
    env = os.environ.get("TOPO_DEFAULT_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        return float(env)
    except ValueError:
        raise UsageError(f"TOPO_DEFAULT_TOL must be a number, got {env!r}") from None


def _load_mesh(spec):
    if spec.endswith(".off"):
        path = Path(spec)
        if not path.is_file():
            raise UsageError(f"mesh file {spec!r} not found")
        return spec
    if spec not in CORPUS:
        raise UsageError(f"unknown mesh {spec!r}: give an .off path or one of {sorted(CORPUS)}")
    return spec


def parse_args(argv):
    """Validate ``argv`` into a :class:`CommandPlan`; raises :class:`UsageError`."""
    args = _build_parser().parse_args(list(argv))
    cmd = args.subcommand
    flag, kind, arities, _ = SUBCOMMANDS[cmd]
    given = {f: getattr(args, f) for f in ("map", "field", "mesh", "surface") if getattr(args, f) is not None}
    extras = {}

    if cmd == "omega-normalize":
        if given:
            raise UsageError("omega-normalize takes --dim, not a target")
        if args.dim not in (1, 2, 3):
            raise UsageError("omega-normalize needs --dim 1, 2 or 3")
        target = f"S^{args.dim}"
    else:
        if flag not in given:
            raise UsageError(f"{cmd} needs --{flag}")
        allowed = {flag, "surface"} if cmd in ("vf-index", "additivity") else {flag}
        extra = set(given) - allowed
        if extra:
            raise UsageError(f"{cmd} takes exactly one target; unexpected --{sorted(extra)[0]}")
        target = given[flag]
        if args.dim is not None:
            raise UsageError("--dim only applies to omega-normalize")

    if kind == "mesh":
        _load_mesh(target)
    elif kind is not None:
        obj = resolve(kind, target)
        if kind == "field":
            extras["field_dim"] = obj.dim
            if cmd == "vf-point-index" and obj.dim != 2:
                raise UsageError("vf-point-index works on planar (2D) fields")
        if args.surface is not None and cmd in ("vf-index", "additivity"):
            resolve("surface", args.surface, obj.dim)

    grid = None
    if args.grid is not None:
        if not arities:
            raise UsageError(f"{cmd} takes no --grid")
        if cmd in ("vf-index", "additivity"):
            arities = (extras["field_dim"] - 1,)
        elif cmd == "omega-normalize":
            arities = (args.dim,)
        grid = _parse_grid(args.grid, arities)
        if cmd not in ("mc-identity", "chern-ball", "poincare-hopf", "gauss-bonnet-rev", "vf-point-index"):
            try:
                _sphere_grid(grid)
            except ValueError as exc:
                raise UsageError(f"invalid --grid: {exc}") from None
        elif cmd == "vf-point-index":
            try:
                PeriodicGrid1D(grid[0])
            except ValueError as exc:
                raise UsageError(f"invalid --grid: {exc}") from None

    tol = args.tol if args.tol is not None else _default_tol()
    if not 0 < tol < 0.5:
        raise UsageError(f"tolerance must lie in (0, 0.5), got {tol}")
    if args.radius is not None and not args.radius > 0:
        raise UsageError("--radius must be positive")
    if args.radius is not None and cmd not in ("chern-ball", "vf-point-index", "additivity"):
        raise UsageError(f"--radius does not apply to {cmd}")
    if args.regular_value is not None and cmd != "winding":
        raise UsageError("--regular-value only applies to winding")
    center = None
    if args.center is not None:
        if cmd not in ("vf-point-index",):
            raise UsageError("--center only applies to vf-point-index")
        center = _floats(args.center, "--center")
        if len(center) != 2:
            raise UsageError("--center needs two coordinates")

    return CommandPlan(
        subcommand=cmd,
        target=target,
        grid=grid,
        tol=tol,
        output="json" if args.json else "text",
        surface=args.surface,
        radius=args.radius,
        regular_value=args.regular_value,
        center=center,
        dim=args.dim,
        extras=extras,
    )


# -- execution ------------------------------------------------------------------------


class _Failed(Exception):
    """A check failed after the value was computed."""


def _check(name, value, ok):
    return {"name": name, "value": value, "ok": bool(ok)}


def _snap_fields(res):
    return {"raw": res.raw, "integer": res.snapped, "residual": res.residual}


def _grid_or_default(plan):
    return plan.grid if plan.grid is not None else SUBCOMMANDS[plan.subcommand][3]


def _run_winding(plan):
    lift = resolve("circle", plan.target)
    grid = _grid_or_default(plan)
    res = degree.winding_number(lift, PeriodicGrid1D(grid[0]), plan.tol)
    checks = [_check("endpoint degree", lift.endpoint_degree, lift.endpoint_degree == res.snapped)]
    if plan.regular_value is not None:
        count = degree.degree_circle_preimage(lift, plan.regular_value)
        checks.append(_check(f"preimage count at {plan.regular_value:g}", count, count == res.snapped))
    return "degree", _snap_fields(res), grid, checks


def _run_sphere_degree(plan):
    smap = resolve("sphere2", plan.target)
    grid = _grid_or_default(plan)
    res = degree.degree_sphere2(smap, SphereGrid2(*grid), plan.tol)
    return "degree", _snap_fields(res), grid, []


def _surface_for(plan, dim, default):
    return resolve("surface", plan.surface or default, dim)


def _run_vf_index(plan):
    fld = resolve("field", plan.target)
    surf = _surface_for(plan, fld.dim, "sphere:r=1")
    grid = plan.grid
    res = field_index.index_wrt_surface(fld, surf, _sphere_grid(grid) if grid else None, plan.tol)
    return "index", _snap_fields(res), grid, []


def _run_vf_point_index(plan):
    fld = resolve("field", plan.target)
    center = plan.center or (fld.zeros[0] if fld.zeros else (0.0, 0.0))
    radius = plan.radius or 0.5
    samples = _grid_or_default(plan)[0]
    res = field_index.index_at_point_2d(
        lambda x, y: fld(np.stack([x, y], axis=-1))[..., 0],
        lambda x, y: fld(np.stack([x, y], axis=-1))[..., 1],
        center,
        radius,
        samples,
        plan.tol,
    )
    return "index", _snap_fields(res), (samples,), [_check("center", list(map(float, center)), True)]


def _run_additivity(plan):
    fld = resolve("field", plan.target)
    outer = _surface_for(plan, fld.dim, "sphere:r=3")
    small = plan.radius or 0.25
    grid = _sphere_grid(plan.grid) if plan.grid else None
    rep = field_index.index_additivity_report(fld, outer, fld.zeros, small, grid, grid, plan.tol)
    checks = [
        _check(f"index at {list(map(float, p))}", i, True) for p, i in zip(fld.zeros, rep.point_indices)
    ]
    checks.append(_check("sum of point indices", rep.total, rep.balanced))
    return "index", {"raw": rep.outer_raw, "integer": rep.outer_index,
                     "residual": abs(rep.outer_raw - rep.outer_index)}, plan.grid, checks


def _run_monopole(plan):
    fld = resolve("higgs", plan.target)
    grid = _grid_or_default(plan)
    res = gauge.monopole_charge(fld, SphereGrid2(*grid), plan.tol)
    return "Q", _snap_fields(res), grid, []


def _run_instanton(plan):
    smap = resolve("su2", plan.target)
    grid = _grid_or_default(plan)
    res = gauge.instanton_charge_boundary(smap, SphereGrid3(*grid), plan.tol)
    return "Q", _snap_fields(res), grid, []


def _run_mc_identity(plan):
    smap = resolve("su2", plan.target)
    grid = _grid_or_default(plan)
    pts, frames = gauge.random_tangent_frames(grid[0], MC_SEED)
    resid = gauge.maurer_cartan_residual(smap, pts, frames)
    checks = [_check(f"max residual below {MC_TOL:g}", resid, resid < MC_TOL)]
    return "max residual", {"raw": resid, "integer": None, "residual": resid}, grid, checks


def _run_product_charge(plan):
    m1, m2 = resolve("su2pair", plan.target)
    grid = _grid_or_default(plan)
    g = SphereGrid3(*grid)
    q1 = gauge.instanton_charge_boundary(m1, g, plan.tol)
    q2 = gauge.instanton_charge_boundary(m2, g, plan.tol)
    q12 = gauge.instanton_charge_boundary(gauge.product_map(m1, m2), g, plan.tol)
    checks = [
        _check("Q1", q1.snapped, True),
        _check("Q2", q2.snapped, True),
        _check("Q1 + Q2", q1.snapped + q2.snapped, q12.snapped == q1.snapped + q2.snapped),
    ]
    return "Q", _snap_fields(q12), grid, checks


def _run_chern_ball(plan):
    fld = resolve("gauge", plan.target)
    grid = _grid_or_default(plan)
    n_radial = grid[0]
    sgrid = SphereGrid3(*grid[1:]) if len(grid) == 4 else SphereGrid3(16, 16, 32)
    radius = plan.radius or 8.0
    raw = gauge.chern_number_ball(fld, radius, n_radial, sgrid)
    nearest = int(round(raw))
    resid = abs(raw - nearest)
    checks = [_check("radius", radius, True), _check(f"within {CHERN_TOL:g} of an integer", resid, resid < CHERN_TOL)]
    return "Q", {"raw": raw, "integer": nearest, "residual": resid}, (n_radial,) + tuple(sgrid.shape), checks


def _mesh(plan):
    if plan.target.endswith(".off"):
        return surfaces.load_off(plan.target)
    return corpus_mesh(plan.target)


def _run_euler(plan):
    rep = surfaces.euler_characteristic(_mesh(plan))
    checks = [_check("F", rep.F, True), _check("E", rep.E, True), _check("V", rep.V, True),
              _check("3F=2E", rep.three_f_equals_two_e, rep.three_f_equals_two_e)]
    return "chi", {"raw": float(rep.chi), "integer": rep.chi, "residual": 0.0}, None, checks


def _run_angle_defect(plan):
    mesh = _mesh(plan)
    res = surfaces.angle_defect_chi(mesh, plan.tol)
    chi = surfaces.euler_characteristic(mesh).chi
    return "chi", _snap_fields(res), None, [_check("F - E + V", chi, chi == res.snapped)]


def _run_genus(plan):
    mesh = _mesh(plan)
    chi = surfaces.euler_characteristic(mesh).chi
    g = surfaces.genus(mesh)
    return "genus", {"raw": (2 - chi) / 2, "integer": g, "residual": 0.0}, None, [_check("chi", chi, True)]


def _run_gauss_bonnet(plan):
    surf = resolve("revolution", plan.target)
    grid = _grid_or_default(plan)
    res = surfaces.gauss_bonnet_revolution(surf, grid, plan.tol)
    return "chi", _snap_fields(res), grid, []


def _run_poincare_hopf(plan):
    fld = resolve("tangent", plan.target)
    grid = _grid_or_default(plan)
    surf = fld.surface
    zeros = poincare_hopf.find_zeros(fld, surf, grid[0])
    results = [poincare_hopf.zero_index(fld, surf, z, others=zeros, tol=plan.tol) for z in zeros]
    total = sum(r.snapped for r in results)
    raw = math.fsum(r.raw for r in results)
    checks = [
        _check(f"zero at {[round(float(c), 9) + 0.0 for c in z.point]}", r.snapped, True) for z, r in zip(zeros, results)
    ]
    checks.append(_check("chi", surf.chi, total == surf.chi))
    return "sum of indices", {"raw": raw, "integer": total, "residual": abs(raw - total)}, grid, checks


def _run_omega_normalize(plan):
    grid = plan.grid
    res = forms.integrate_omega_over_sphere(plan.dim, _sphere_grid(grid) if grid else None, plan.tol)
    return "integral", _snap_fields(res), grid, [_check("equals 1", res.snapped, res.snapped == 1)]


_RUNNERS = {
    "winding": _run_winding,
    "sphere-degree": _run_sphere_degree,
    "vf-index": _run_vf_index,
    "vf-point-index": _run_vf_point_index,
    "additivity": _run_additivity,
    "monopole": _run_monopole,
    "instanton": _run_instanton,
    "mc-identity": _run_mc_identity,
    "product-charge": _run_product_charge,
    "chern-ball": _run_chern_ball,
    "euler": _run_euler,
    "angle-defect": _run_angle_defect,
    "genus": _run_genus,
    "gauss-bonnet-rev": _run_gauss_bonnet,
    "poincare-hopf": _run_poincare_hopf,
    "omega-normalize": _run_omega_normalize,
}


def _input(plan):
    out = {"target": plan.target}
    if plan.surface:
        out["surface"] = plan.surface
    for key in ("radius", "regular_value", "center"):
        value = getattr(plan, key)
        if value is not None:
            out[key] = list(value) if isinstance(value, tuple) else value
    out["tol"] = plan.tol
    return out


def _fmt_value(v):
    if isinstance(v, bool):
        return "ok" if v else "failed"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _text(label, report):
    if report.get("error"):
        line = f"error: {report['error']}"
        if report["raw"] is not None:
            line += f" (raw {report['raw']:.6f}, residual {report['residual']:.1e})"
        return line
    if report["command"] == "euler":
        c = {ch["name"]: ch["value"] for ch in report["checks"]}
        status = "ok" if c["3F=2E"] else "failed"
        return f"chi = {report['integer']} (F={c['F']} E={c['E']} V={c['V']}, 3F=2E {status})"
    if report["integer"] is None:
        head = f"{label} = {report['raw']:.3e}"
    else:
        head = f"{label} = {report['integer']} (raw {report['raw']:.6f}, residual {report['residual']:.1e})"
    lines = [head]
    for ch in report["checks"]:
        mark = "" if ch["ok"] else "  [FAILED]"
        lines.append(f"  {ch['name']}: {_fmt_value(ch['value'])}{mark}")
    return "\n".join(lines)


def execute(plan):
    """Run ``plan``; returns ``(exit_code, report_dict, text)``."""
    start = time.perf_counter()
    report = {
        "command": plan.subcommand,
        "input": _input(plan),
        "raw": None,
        "integer": None,
        "residual": None,
        "grid": list(plan.grid) if plan.grid else None,
        "elapsed_ms": None,
        "checks": [],
    }
    label = ""
    code = 0
    try:
        label, values, grid, checks = _RUNNERS[plan.subcommand](plan)
        report.update(values)
        report["grid"] = list(grid) if grid is not None else None
        report["checks"] = checks
        if not all(ch["ok"] for ch in checks):
            code = 1
    except NotNearIntegerError as exc:
        report.update(raw=exc.raw, residual=exc.residual, error=str(exc))
        code = 1
    except UsageError:
        raise
    except (TopoError, AssertionError, ValueError) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        code = 1
    report["elapsed_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    if plan.output == "json":
        text = json.dumps(report, sort_keys=True)
    else:
        text = _text(label, report)
    return code, report, text


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse_args(argv)
        code, _, text = execute(plan)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
