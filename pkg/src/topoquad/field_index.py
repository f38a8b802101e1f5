"""Index of a vector field relative to a closed hypersurface and at a point."""

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from ._diff import partial
from .errors import GeometryError, UnsupportedDimensionError, ZeroOnSurfaceError
from .forms import (
    default_grid,
    grid_coords,
    integrate_pullback,
    solid_angle_pullback_density,
    sphere_embedding,
)
from .quadrature import DEFAULT_TOL, PeriodicGrid1D, integrate_periodic_1d, snap_integer

__all__ = [
    "VectorFieldEval",
    "ClosedHypersurface",
    "AdditivityReport",
    "index_wrt_surface",
    "index_at_point_2d",
    "index_additivity_report",
]

ZERO_THRESHOLD = 1e-10


@dataclass(frozen=True)
class VectorFieldEval:
    """Vector field on R^dim.

    ``V`` maps an array of points ``(..., dim)`` to vectors ``(..., dim)``;
    ``jacobian`` (optional) returns ``(..., dim, dim)`` with
    ``J[..., i, j] = dV^i/dx^j``. ``zeros`` lists known zeros or
    singular points.
    """

    dim: int
    V: Callable
    jacobian: Optional[Callable] = None
    zeros: Sequence = ()

    def __post_init__(self):
        if self.dim not in (2, 3, 4):
            raise UnsupportedDimensionError(f"field dimension must be 2, 3 or 4, got {self.dim}")

    def __call__(self, x):
        return np.asarray(self.V(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class ClosedHypersurface:
    """Closed, outward-oriented hypersurface in R^dim.

    Build with :meth:`sphere`, :meth:`ellipsoid` or :meth:`parametrized`.
    """

    kind: str
    dim: int
    center: tuple = ()
    radius: float = 1.0
    semi_axes: tuple = ()
    embed: Optional[Callable] = None
    tangents: Optional[Callable] = None
    grid: object = dc_field(default=None, compare=False)

    @classmethod
    def sphere(cls, center, radius):
        center = tuple(float(c) for c in center)
        if radius <= 0:
            raise GeometryError("radius must be positive")
        return cls("sphere", len(center), center=center, radius=float(radius))

    @classmethod
    def ellipsoid(cls, center, semi_axes):
        center = tuple(float(c) for c in center)
        semi_axes = tuple(float(a) for a in semi_axes)
        if len(semi_axes) != len(center) or min(semi_axes) <= 0:
            raise GeometryError("need one positive semi-axis per coordinate")
        if len(center) == 4:
            raise UnsupportedDimensionError("4D surfaces are limited to round spheres")
        return cls("ellipsoid", len(center), center=center, semi_axes=semi_axes)

    @classmethod
    def parametrized(cls, dim, embed, grid, tangents=None):
        """Surface given by ``embed(*coords) -> (..., dim)`` over a chart grid.

        The parametrization must be positively oriented (outward normal).
        """
        if dim == 4:
            raise UnsupportedDimensionError("4D surfaces are limited to round spheres")
        return cls("parametrized", dim, embed=embed, tangents=tangents, grid=grid)

    def __post_init__(self):
        if self.dim not in (2, 3, 4):
            raise UnsupportedDimensionError(f"surface dimension must be 2, 3 or 4, got {self.dim}")

    @property
    def scale(self):
        if self.kind == "sphere":
            return self.radius
        if self.kind == "ellipsoid":
            return max(self.semi_axes)
        return 1.0

    def default_grid(self):
        return self.grid if self.grid is not None else default_grid(self.dim - 1)

    def sample(self, grid=None):
        """Points ``(..., dim)`` and tangent rows ``(..., dim-1, dim)`` on the grid."""
        grid = grid or self.default_grid()
        coords = grid_coords(grid)
        n = self.dim - 1
        if self.kind == "sphere":
            e, J = sphere_embedding(n, *coords)
            return np.asarray(self.center) + self.radius * e, self.radius * J
        if self.kind == "ellipsoid":
            e, J = sphere_embedding(n, *coords)
            a = np.asarray(self.semi_axes)
            return np.asarray(self.center) + a * e, a * J
        x = np.asarray(self.embed(*coords), dtype=float)
        if self.tangents is not None:
            T = np.asarray(self.tangents(*coords), dtype=float)
        else:
            T = np.stack([partial(self.embed, coords, i, 1e-5) for i in range(n)], axis=-2)
        return x, T

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "sphere":
            return float(np.linalg.norm(p - self.center)) < self.radius
        if self.kind == "ellipsoid":
            return float(np.sum(((p - self.center) / self.semi_axes) ** 2)) < 1.0
        # solid angle subtended at p: 1 inside, 0 outside
        x, T = self.sample()
        return integrate_pullback(self.dim - 1, x - p, T, self.default_grid()) > 0.5

    def contains_ball(self, p, r):
        p = np.asarray(p, dtype=float)
        if self.kind == "sphere":
            return float(np.linalg.norm(p - self.center)) + r < self.radius
        if self.kind == "ellipsoid":
            e, _ = sphere_embedding(self.dim - 1, *grid_coords(default_grid(self.dim - 1)))
            pts = ((p + r * e) - self.center) / self.semi_axes
            return bool(np.all(np.sum(pts**2, axis=-1) < 1.0))
        return self.contains(p)


def _field_tangent_derivatives(field, x, T, h):
    """``dV/dt^i`` for each tangent row of ``T``: shape ``(..., n, dim)``."""
    n = T.shape[-2]
    if field.jacobian is not None:
        Jv = np.asarray(field.jacobian(x), dtype=float)
        return np.einsum("...ij,...kj->...ki", Jv, T)
    out = []
    for i in range(n):
        t = T[..., i, :]
        norm = np.linalg.norm(t, axis=-1, keepdims=True)
        unit = np.divide(t, norm, out=np.zeros_like(t), where=norm > 0)
        d = (field(x + h * unit) - field(x - h * unit)) / (2 * h)
        out.append(d * norm)
    return np.stack(out, axis=-2)


def _surface_integral(field, surface, grid):
    grid = grid or surface.default_grid()
    x, T = surface.sample(grid)
    V = field(x)
    mag = np.linalg.norm(V, axis=-1)
    if np.any(mag <= ZERO_THRESHOLD):
        idx = np.unravel_index(int(np.argmin(mag)), mag.shape)
        raise ZeroOnSurfaceError(
            f"|V| = {mag[idx]:.3g} at surface point {np.round(x[idx], 9).tolist()}"
        )
    dV = _field_tangent_derivatives(field, x, T, 1e-5 * surface.scale)
    return integrate_pullback(surface.dim - 1, V, dV, grid)


def index_wrt_surface(field, surface, grid=None, tol=DEFAULT_TOL):
    """Degree of the Gauss map ``V/|V|`` restricted to ``surface``."""
    if field.dim != surface.dim:
        raise GeometryError(f"field is {field.dim}D but surface lives in {surface.dim}D")
    return snap_integer(_surface_integral(field, surface, grid), tol)


def index_at_point_2d(P, Q, center=(0.0, 0.0), radius=1.0, samples=64, tol=DEFAULT_TOL):
    """``(1/2pi) * loop integral of (P dQ - Q dP)/(P^2 + Q^2)`` on a circle.

    ``P`` and ``Q`` take ``(x, y)`` arrays. The circle is traversed
    counter-clockwise.
    """
    cx, cy = (float(c) for c in center)
    grid = PeriodicGrid1D(samples)

    def along(fn):
        return lambda t: np.asarray(fn(cx + radius * np.cos(t), cy + radius * np.sin(t)), dtype=float)

    p_t, q_t = along(P), along(Q)
    h = 1e-4

    def integrand(t):
        p, q = p_t(t), q_t(t)
        mag2 = p * p + q * q
        if np.any(mag2 <= ZERO_THRESHOLD**2):
            raise ZeroOnSurfaceError(f"(P, Q) vanishes on the circle of radius {radius}")
        dp = partial(p_t, (t,), 0, h)
        dq = partial(q_t, (t,), 0, h)
        return (p * dq - q * dp) / mag2

    raw = integrate_periodic_1d(integrand, grid) / (2 * math.pi)
    return snap_integer(raw, tol)


@dataclass(frozen=True)
class AdditivityReport:
    outer_index: int
    point_indices: tuple
    outer_raw: float
    point_raws: tuple

    @property
    def total(self):
        return sum(self.point_indices)

    @property
    def balanced(self):
        return self.outer_index == self.total


def index_additivity_report(field, outer, zero_points, small_radius, grid=None, small_grid=None, tol=DEFAULT_TOL):
    """Index on ``outer`` next to the indices on small spheres about each zero."""
    pts = [np.asarray(p, dtype=float) for p in zero_points]
    for p in pts:
        if p.shape != (field.dim,):
            raise GeometryError(f"zero point {p.tolist()} is not {field.dim}-dimensional")
        if not outer.contains_ball(p, small_radius):
            raise GeometryError(f"ball of radius {small_radius} about {p.tolist()} is not inside the outer surface")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.linalg.norm(pts[i] - pts[j]) <= 2 * small_radius:
                raise GeometryError(f"small spheres about {pts[i].tolist()} and {pts[j].tolist()} overlap")
    outer_res = index_wrt_surface(field, outer, grid, tol)
    inner = [index_wrt_surface(field, ClosedHypersurface.sphere(p, small_radius), small_grid, tol) for p in pts]
    return AdditivityReport(
        outer_res.snapped,
        tuple(r.snapped for r in inner),
        outer_res.raw,
        tuple(r.raw for r in inner),
    )
