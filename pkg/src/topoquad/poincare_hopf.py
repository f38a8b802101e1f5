"""Zeros and indices of tangent vector fields on the sphere and the torus.

The sphere is covered by two stereographic charts: chart ``"S"`` is
centred on the south pole (projection from the north pole) and chart
``"N"`` on the north pole. The torus of revolution uses the single
doubly periodic chart ``"T"`` with coordinates ``(u, v) in [0, 2pi)^2``.
Indices are computed in charts as the winding of ``(V_u, V_v)`` around a
small coordinate circle.
"""

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import GeometryError, ZeroRefinementError
from .field_index import index_at_point_2d
from .quadrature import DEFAULT_TOL

__all__ = [
    "ChartedSurface",
    "TangentFieldChart",
    "Zero",
    "PoincareHopfReport",
    "find_zeros",
    "zero_index",
    "poincare_hopf_report",
]

NEWTON_TOL = 1e-12
NEWTON_STEPS = 50
MERGE_DIST = 1e-8
SPHERE_WINDOW = 1.25
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ChartedSurface:
    kind: str
    R: float = 2.0
    r: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sphere", "torus"):
            raise ValueError("kind must be 'sphere' or 'torus'")
        if self.kind == "torus" and not self.R > self.r > 0:
            raise ValueError("torus needs R > r > 0")

    @classmethod
    def sphere(cls):
        return cls("sphere")

    @classmethod
    def torus(cls, R=2.0, r=1.0):
        return cls("torus", R, r)

    @property
    def chi(self):
        return 2 if self.kind == "sphere" else 0

    @property
    def charts(self):
        return ("S", "N") if self.kind == "sphere" else ("T",)

    @property
    def periodic(self):
        return self.kind == "torus"

    def window(self, chart):
        if self.kind == "sphere":
            return (-SPHERE_WINDOW, SPHERE_WINDOW), (-SPHERE_WINDOW, SPHERE_WINDOW)
        return (0.0, TWO_PI), (0.0, TWO_PI)

    def embed(self, chart, u, v):
        """Ambient point and the two chart tangent vectors, each ``(..., 3)``."""
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        if self.kind == "torus":
            cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
            ring = self.R + self.r * cv
            p = np.stack([ring * cu, ring * su, self.r * sv], axis=-1)
            pu = np.stack([-ring * su, ring * cu, np.zeros_like(u)], axis=-1)
            pv = np.stack([-self.r * sv * cu, -self.r * sv * su, self.r * cv], axis=-1)
            return p, pu, pv
        s = 1.0 if chart == "S" else -1.0
        rho2 = u * u + v * v
        d = 1.0 + rho2
        p = np.stack([2 * u / d, 2 * v / d, s * (rho2 - 1) / d], axis=-1)
        pu = np.stack([2 * (d - 2 * u * u), -4 * u * v, s * 4 * u], axis=-1) / (d * d)[..., None]
        pv = np.stack([-4 * u * v, 2 * (d - 2 * v * v), s * 4 * v], axis=-1) / (d * d)[..., None]
        return p, pu, pv

    def to_chart(self, chart, point):
        """Chart coordinates of an ambient point, or ``None`` if not covered."""
        x, y, z = (float(c) for c in point)
        if self.kind == "torus":
            u = math.atan2(y, x) % TWO_PI
            v = math.atan2(z, math.hypot(x, y) - self.R) % TWO_PI
            return np.array([u, v])
        denom = 1.0 - z if chart == "S" else 1.0 + z
        if denom < 1e-12:
            return None
        return np.array([x / denom, y / denom])

    def transition(self, w):
        """Map coordinates between the two sphere charts (inversion in the unit circle)."""
        w = np.asarray(w, dtype=float)
        return w / np.sum(w * w, axis=-1, keepdims=True)

    def chart_distance(self, a, b):
        d = np.asarray(a, float) - np.asarray(b, float)
        if self.periodic:
            d = (d + math.pi) % TWO_PI - math.pi
        return float(np.hypot(*d))


@dataclass(frozen=True)
class TangentFieldChart:
    """Tangent field given by chart components ``(u, v) -> (V_u, V_v)`` per chart."""

    surface: ChartedSurface
    chart_fns: Mapping[str, Callable]
    declared_zeros: Sequence = ()
    name: str = "field"
    windows: Optional[Mapping] = dc_field(default=None, compare=False)

    def __post_init__(self):
        missing = set(self.surface.charts) - set(self.chart_fns)
        if missing:
            raise ValueError(f"missing chart components for {sorted(missing)}")

    @classmethod
    def from_ambient(cls, surface, W, name="field", declared_zeros=()):
        """Field from an ambient ``W: (..., 3) -> (..., 3)``, projected onto tangent planes."""

        def make(chart):
            def comps(u, v):
                p, pu, pv = surface.embed(chart, u, v)
                w = np.asarray(W(p), dtype=float)
                guu = np.sum(pu * pu, -1)
                guv = np.sum(pu * pv, -1)
                gvv = np.sum(pv * pv, -1)
                bu = np.sum(w * pu, -1)
                bv = np.sum(w * pv, -1)
                det = guu * gvv - guv * guv
                return np.stack([(gvv * bu - guv * bv) / det, (guu * bv - guv * bu) / det], axis=-1)

            return comps

        return cls(surface, {c: make(c) for c in surface.charts}, tuple(declared_zeros), name)

    def window(self, chart):
        if self.windows and chart in self.windows:
            return self.windows[chart]
        return self.surface.window(chart)

    def components(self, chart, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        out = np.asarray(self.chart_fns[chart](u, v), dtype=float)
        return np.broadcast_to(out, u.shape + (2,))

    def perturbed(self, eps, direction=(1.0, 0.0)):
        """Copy with the constant chart vector ``eps * direction`` added in every chart."""
        add = eps * np.asarray(direction, dtype=float)
        fns = {c: (lambda f: lambda u, v: np.asarray(f(u, v)) + add)(fn) for c, fn in self.chart_fns.items()}
        return TangentFieldChart(self.surface, fns, self.declared_zeros, self.name + "+perturbation", self.windows)


@dataclass(frozen=True)
class Zero:
    chart: str
    u: float
    v: float
    point: tuple

    @property
    def coords(self):
        return np.array([self.u, self.v])


def _newton(field, chart, w0, window, periodic):
    fd = 1e-7

    def F(w):
        return field.components(chart, w[0], w[1])

    w = np.array(w0, dtype=float)
    f = F(w)
    for _ in range(NEWTON_STEPS):
        norm = float(np.hypot(*f))
        if norm < NEWTON_TOL:
            return w
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = fd
            J[:, j] = (F(w + e) - F(w - e)) / (2 * fd)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            step = -f
        lam = 1.0
        for _ in range(30):
            trial = w + lam * step
            ft = F(trial)
            if np.hypot(*ft) < norm:
                break
            lam *= 0.5
        w, f = trial, ft
        if not periodic:
            (a0, a1), (b0, b1) = window
            margin = 0.25 * max(a1 - a0, b1 - b0)
            if not (a0 - margin <= w[0] <= a1 + margin and b0 - margin <= w[1] <= b1 + margin):
                return None
    if float(np.hypot(*f)) < NEWTON_TOL:
        return w
    raise ZeroRefinementError(
        f"Newton refinement did not reach |V| < {NEWTON_TOL:g} in chart {chart} (|V| = {np.hypot(*f):.3g})",
        location=(chart, w0),
    )


def _candidates(field, chart, scan):
    (a0, a1), (b0, b1) = field.window(chart)
    periodic = field.surface.periodic
    if periodic:
        u = a0 + (a1 - a0) * np.arange(scan + 1) / scan
        v = b0 + (b1 - b0) * np.arange(scan + 1) / scan
    else:
        u = np.linspace(a0, a1, scan + 1)
        v = np.linspace(b0, b1, scan + 1)
    U, V = np.meshgrid(u, v, indexing="ij")
    C = field.components(chart, U, V)
    hits = np.ones((scan, scan), dtype=bool)
    for k in range(2):
        c = C[..., k]
        corners = np.stack([c[:-1, :-1], c[1:, :-1], c[:-1, 1:], c[1:, 1:]])
        hits &= (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)
    ii, jj = np.nonzero(hits)
    du, dv = u[1] - u[0], v[1] - v[0]
    return [(u[i] + 0.5 * du, v[j] + 0.5 * dv) for i, j in zip(ii.tolist(), jj.tolist())]


def find_zeros(field, surface=None, scan=256):
    """Locate the zeros of a tangent field by a per-chart scan plus Newton refinement.

    Candidates are cells in which both chart components change sign. Zeros
    found in several charts (or from several cells) are merged when their
    ambient points are within 1e-8.
    """
    surface = surface or field.surface
    found = []
    for chart in surface.charts:
        window = field.window(chart)
        for w0 in _candidates(field, chart, scan):
            w = _newton(field, chart, w0, window, surface.periodic)
            if w is None:
                continue
            if surface.periodic:
                w = w % TWO_PI
            p, _, _ = surface.embed(chart, w[0], w[1])
            found.append(Zero(chart, float(w[0]), float(w[1]), tuple(float(c) for c in p)))
    for point in field.declared_zeros:
        chart, w = _best_chart(surface, point)
        found.append(Zero(chart, float(w[0]), float(w[1]), tuple(float(c) for c in point)))

    merged = []
    for z in sorted(found, key=lambda z: (float(np.hypot(z.u, z.v)) if not surface.periodic else 0.0)):
        if all(np.linalg.norm(np.subtract(z.point, m.point)) >= MERGE_DIST for m in merged):
            merged.append(z)
    return sorted(merged, key=lambda z: tuple(np.round(z.point, 9)))


def _best_chart(surface, point):
    best = None
    for chart in surface.charts:
        w = surface.to_chart(chart, point)
        if w is not None and (best is None or np.hypot(*w) < np.hypot(*best[1])):
            best = (chart, w)
    return best


def _others_in_chart(surface, chart, zero, others):
    out = []
    for o in others:
        if np.linalg.norm(np.subtract(o.point, zero.point)) < MERGE_DIST:
            continue
        w = surface.to_chart(chart, o.point)
        if w is not None:
            out.append(w)
    return out


def zero_index(field, surface, zero, radius=None, others=(), samples=64, tol=DEFAULT_TOL, chart=None):
    """Index of ``field`` at ``zero``: winding of the chart components around a circle.

    ``radius`` defaults to half the chart distance to the nearest other
    zero, capped at 0.5. ``chart`` overrides the chart the zero was found in.
    """
    surface = surface or field.surface
    chart = chart or zero.chart
    center = surface.to_chart(chart, zero.point) if chart != zero.chart else zero.coords
    if center is None:
        raise GeometryError(f"zero {zero.point} is not covered by chart {chart}")
    dists = [surface.chart_distance(center, w) for w in _others_in_chart(surface, chart, zero, others)]
    if radius is None:
        radius = min([0.5] + [0.5 * d for d in dists])
    if any(d <= radius for d in dists):
        raise GeometryError(f"another zero lies within radius {radius} of {zero.point}")

    def P(x, y):
        return field.components(chart, x, y)[..., 0]

    def Q(x, y):
        return field.components(chart, x, y)[..., 1]

    return index_at_point_2d(P, Q, tuple(center), radius, samples, tol)


@dataclass(frozen=True)
class PoincareHopfReport:
    zeros: tuple
    indices: tuple
    chi: int

    @property
    def total(self):
        return sum(self.indices)

    @property
    def match(self):
        return self.total == self.chi


def poincare_hopf_report(field, surface=None, scan=256, tol=DEFAULT_TOL):
    """Zeros, their indices, and the comparison of the index sum with chi."""
    surface = surface or field.surface
    zeros = find_zeros(field, surface, scan)
    indices = tuple(zero_index(field, surface, z, others=zeros, tol=tol).snapped for z in zeros)
    return PoincareHopfReport(tuple(zeros), indices, surface.chi)
