"""Degrees of circle maps and S^2 -> S^2 maps.

Two independent routes are provided for circle maps: the quadrature of the
pulled-back angle form (:func:`winding_number`) and the signed count of
preimages of a regular value (:func:`degree_circle_preimage`).
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._diff import partial
from .errors import CriticalValueError, LiftConsistencyError, NumericalDomainError
from .quadrature import (
    DEFAULT_TOL,
    PeriodicGrid1D,
    SphereGrid2,
    integrate_periodic_1d,
    integrate_sphere2,
    snap_integer,
)

__all__ = [
    "CircleMapLift",
    "SphereMap2",
    "winding_number",
    "degree_sphere2",
    "degree_circle_preimage",
    "degree_along_homotopy",
    "compose_lifts",
]

TWO_PI = 2 * math.pi
LIFT_TOL = 1e-9
PREIMAGE_CELLS = 4096
BISECT_TOL = 1e-12
CRITICAL_SLOPE = 1e-8


@dataclass(frozen=True)
class CircleMapLift:
    """Lift ``f: R -> R`` of a circle map, ``f(x + 2pi) = f(x) + 2pi n``.

    ``f`` (and ``df`` when given) must accept numpy arrays.
    """

    f: Callable
    df: Optional[Callable] = None

    def __post_init__(self):
        shift = (float(self.f(TWO_PI)) - float(self.f(0.0))) / TWO_PI
        if not math.isfinite(shift) or abs(shift - round(shift)) * TWO_PI >= LIFT_TOL:
            raise LiftConsistencyError(
                f"f(2pi) - f(0) = {shift * TWO_PI:.12g} is not a multiple of 2pi"
            )

    @property
    def endpoint_degree(self):
        return int(round((float(self.f(TWO_PI)) - float(self.f(0.0))) / TWO_PI))

    def derivative(self, x, h=1e-6):
        if self.df is not None:
            return np.asarray(self.df(x), dtype=float)
        return (np.asarray(self.f(x + h)) - np.asarray(self.f(x - h))) / (2 * h)


@dataclass(frozen=True)
class SphereMap2:
    """Map of S^2 given by image angles ``(f1, f2)`` as functions of ``(theta, phi)``.

    ``f1`` is the polar angle of the image point and ``f2`` its azimuth.
    ``grad1`` / ``grad2`` optionally return the pair of partials
    ``(d/dtheta, d/dphi)``.
    """

    f1: Callable
    f2: Callable
    grad1: Optional[Callable] = None
    grad2: Optional[Callable] = None

    def __post_init__(self):
        theta = np.linspace(0.1, math.pi - 0.1, 8)[:, None]
        phi = np.linspace(0.0, TWO_PI, 8, endpoint=False)[None, :]
        a = self.image(theta, phi)
        b = self.image(theta, phi + TWO_PI)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise NumericalDomainError("image angles are not finite at sample points")
        if np.max(np.abs(a - b)) > 1e-9:
            raise ValueError("image point is not 2pi-periodic in phi")

    def image(self, theta, phi):
        """Image point on the unit sphere in R^3."""
        f1 = np.asarray(self.f1(theta, phi), dtype=float)
        f2 = np.asarray(self.f2(theta, phi), dtype=float)
        f1, f2 = np.broadcast_arrays(f1, f2)
        return np.stack([np.sin(f1) * np.cos(f2), np.sin(f1) * np.sin(f2), np.cos(f1)], axis=-1)


def _as_array_fn(fn):
    def wrapped(*args):
        shape = np.broadcast_shapes(*(np.shape(a) for a in args))
        return np.broadcast_to(np.asarray(fn(*args), dtype=float), shape)

    return wrapped


def winding_number(lift, grid=None, tol=DEFAULT_TOL):
    """``(1/2pi) * integral of f'`` over one period, snapped to an integer.

    Uses the analytic derivative when the lift provides one, otherwise a
    central difference with step ``period / (8 * samples)``.
    """
    grid = grid or PeriodicGrid1D()
    if lift.df is not None:
        deriv = _as_array_fn(lift.df)
    else:
        h = grid.period / (8 * grid.samples)

        def deriv(x):
            return (np.asarray(lift.f(x + h)) - np.asarray(lift.f(x - h))) / (2 * h)

    raw = integrate_periodic_1d(deriv, grid) / TWO_PI
    return snap_integer(raw, tol)


def _sphere_partials(smap, theta, phi, h):
    if smap.grad1 is not None:
        f1t, f1p = (np.broadcast_to(np.asarray(g, float), theta.shape) for g in smap.grad1(theta, phi))
    else:
        fn = _as_array_fn(smap.f1)
        f1t, f1p = partial(fn, (theta, phi), 0, h), partial(fn, (theta, phi), 1, h)
    if smap.grad2 is not None:
        f2t, f2p = (np.broadcast_to(np.asarray(g, float), theta.shape) for g in smap.grad2(theta, phi))
    else:
        fn = _as_array_fn(smap.f2)
        f2t, f2p = partial(fn, (theta, phi), 0, h), partial(fn, (theta, phi), 1, h)
    return f1t, f1p, f2t, f2p


def degree_sphere2(smap, grid=None, tol=DEFAULT_TOL):
    """Degree of an S^2 map: ``(1/4pi) * sum sin(f1) * D(f1, f2)/D(theta, phi)``."""
    grid = grid or SphereGrid2()
    h = (TWO_PI / grid.n_phi) / 8

    def density(theta, phi):
        f1 = np.broadcast_to(np.asarray(smap.f1(theta, phi), float), theta.shape)
        f1t, f1p, f2t, f2p = _sphere_partials(smap, theta, phi, h)
        jac = f1t * f2p - f1p * f2t
        if not np.all(np.isfinite(jac)):
            raise NumericalDomainError("non-finite Jacobian of the sphere map")
        return np.sin(f1) * jac / (4 * math.pi)

    return snap_integer(integrate_sphere2(density, grid), tol)


def degree_circle_preimage(lift, regular_value, cells=PREIMAGE_CELLS):
    """Signed count of solutions of ``f(x) = value (mod 2pi)`` on ``[0, 2pi)``.

    Preimages are bracketed by a scan of ``cells`` uniform cells and refined
    by bisection. Maps whose preimages are closer together than a cell are
    not resolved (roughly, |degree| above ~100).
    """
    x = np.arange(cells + 1) * (TWO_PI / cells)
    s = (np.asarray(lift.f(x), dtype=float) - regular_value) / TWO_PI

    def level_fn(level):
        return lambda t: (float(lift.f(t)) - regular_value) / TWO_PI - level

    roots = []
    for i in range(cells):
        a, b = s[i], s[i + 1]
        if a <= b:
            levels = range(math.ceil(a), math.ceil(b))
        else:
            levels = range(math.floor(a), math.floor(b), -1)
        for level in levels:
            g = level_fn(level)
            lo, hi = x[i], x[i + 1]
            glo = g(lo)
            if glo == 0.0:
                roots.append(lo)
                continue
            while hi - lo > BISECT_TOL:
                mid = 0.5 * (lo + hi)
                gm = g(mid)
                if (gm > 0) == (glo > 0) and gm != 0.0:
                    lo, glo = mid, gm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))

    total = 0
    for r in roots:
        slope = float(lift.derivative(np.float64(r)))
        if abs(slope) <= CRITICAL_SLOPE:
            raise CriticalValueError(
                f"value {regular_value!r} is critical: f'({r:.12g}) = {slope:.3g}"
            )
        total += 1 if slope > 0 else -1
    return total


def degree_along_homotopy(family, t_samples, grid=None, tol=DEFAULT_TOL):
    """Degree of each member ``family(t)`` of a homotopy, in sample order."""
    results = []
    for t in t_samples:
        member = family(t)
        if isinstance(member, CircleMapLift):
            results.append(winding_number(member, grid, tol))
        elif isinstance(member, SphereMap2):
            results.append(degree_sphere2(member, grid, tol))
        else:
            raise TypeError(f"unsupported family member {type(member).__name__}")
    return results


def compose_lifts(outer, inner):
    """Lift of the composition ``outer o inner``."""
    df = None
    if outer.df is not None and inner.df is not None:

        def df(x):
            return outer.df(inner.f(x)) * inner.df(x)

    return CircleMapLift(lambda x: outer.f(inner.f(x)), df)
