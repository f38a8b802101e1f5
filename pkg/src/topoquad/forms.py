"""The normalized solid-angle form and its pullbacks along immersions.

For an immersion ``t -> x(t)`` of an n-manifold into ``R^{n+1} \\ {0}`` the
pullback of the solid-angle form is

    det[x | dx/dt^1 | ... | dx/dt^n] / (vol(S^n) |x|^{n+1})  dt^1 ... dt^n,

which is the one density every degree and index computation integrates.
"""

import math

import numpy as np

from .errors import SingularPointError, UnsupportedDimensionError
from .quadrature import (
    DEFAULT_TOL,
    PeriodicGrid1D,
    SphereGrid2,
    SphereGrid3,
    snap_integer,
    weighted_sum,
)

__all__ = [
    "sphere_volume",
    "det_rows",
    "solid_angle_pullback_density",
    "sphere_embedding",
    "grid_coords",
    "default_grid",
    "grid_weights",
    "integrate_pullback",
    "integrate_omega_over_sphere",
]

SINGULAR_RADIUS = 1e-12


def _double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def sphere_volume(n):
    """Area of the unit n-sphere, for n in {1, 2, 3}."""
    if n not in (1, 2, 3):
        raise UnsupportedDimensionError(f"sphere dimension must be 1, 2 or 3, got {n!r}")
    r, odd = divmod(n, 2)
    if odd:
        # n = 2r + 1
        return 2 * math.pi ** (r + 1) / math.factorial(r)
    return 2 ** (r + 1) * math.pi**r / _double_factorial(2 * r - 1)


_EVEN = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
_ODD = ((0, 2, 1), (2, 1, 0), (1, 0, 2))


def _sorted_sum3(terms):
    s = np.sort(np.stack(np.broadcast_arrays(*terms), axis=-1), axis=-1)
    return (s[..., 0] + s[..., 1]) + s[..., 2]


def _det3(a, b, c):
    """Leibniz expansion that is bit-for-bit antisymmetric in its rows.

    Each product's factors and each signed group are combined in sorted
    order, so permuting rows only relabels identical float operations.
    """

    def term(p):
        f = np.sort(np.stack(np.broadcast_arrays(a[..., p[0]], b[..., p[1]], c[..., p[2]]), axis=-1), axis=-1)
        return (f[..., 0] * f[..., 1]) * f[..., 2]

    return _sorted_sum3([term(p) for p in _EVEN]) - _sorted_sum3([term(p) for p in _ODD])


def det_rows(rows):
    """Determinant of the square matrix whose rows are ``rows[0..k-1]``.

    Cofactor expansion along the first row over exactly antisymmetric 3x3
    minors, so exchanging two of the later rows negates the result bit-for-bit.
    """
    k = len(rows)
    if k == 2:
        a, b = rows
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    if k == 3:
        return _det3(*rows)
    if k == 4:
        x, a, b, c = rows
        total = 0.0
        for col in range(4):
            keep = [j for j in range(4) if j != col]
            minor = _det3(a[..., keep], b[..., keep], c[..., keep])
            term = x[..., col] * minor
            total = total + term if col % 2 == 0 else total - term
        return total
    raise UnsupportedDimensionError(f"determinant size must be 2..4, got {k}")


def solid_angle_pullback_density(n, x, J):
    """Coefficient of ``dt^1 ^ ... ^ dt^n`` in the pulled-back solid-angle form.

    Parameters
    ----------
    n : int
        Sphere dimension (1, 2 or 3).
    x : array_like, shape (..., n+1)
        Points of the immersion.
    J : array_like, shape (..., n, n+1)
        Tangent vectors ``dx/dt^i``, one per row.
    """
    vol = sphere_volume(n)
    x = np.asarray(x, dtype=float)
    J = np.asarray(J, dtype=float)
    if x.shape[-1] != n + 1 or J.shape[-2:] != (n, n + 1):
        raise ValueError(f"expected x (..., {n + 1}) and J (..., {n}, {n + 1})")
    r = np.sqrt(np.sum(x * x, axis=-1))
    if np.any(r < SINGULAR_RADIUS):
        raise SingularPointError("solid-angle form evaluated at the origin")
    rows = [x] + [J[..., i, :] for i in range(n)]
    return det_rows(rows) / (vol * r ** (n + 1))


def sphere_embedding(n, *coords):
    """Standard positively oriented immersion of the unit n-sphere.

    Returns ``(x, J)`` with ``x`` of shape ``(..., n+1)`` and the tangent
    rows ``J`` of shape ``(..., n, n+1)``. Coordinates are ``(t,)`` on the
    circle, ``(theta, phi)`` on S^2, and ``(chi, theta, phi)`` on S^3 where
    chi is the polar angle measured from ``(0, 0, 0, -1)``.
    """
    coords = [np.asarray(c, dtype=float) for c in coords]
    if n == 1:
        (t,) = coords
        c, s = np.cos(t), np.sin(t)
        x = np.stack([c, s], axis=-1)
        J = np.stack([-s, c], axis=-1)[..., None, :]
        return x, J
    if n == 2:
        theta, phi = np.broadcast_arrays(*coords)
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        zero = np.zeros_like(theta)
        x = np.stack([st * cp, st * sp, ct], axis=-1)
        d_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
        d_phi = np.stack([-st * sp, st * cp, zero], axis=-1)
        return x, np.stack([d_theta, d_phi], axis=-2)
    if n == 3:
        chi, theta, phi = np.broadcast_arrays(*coords)
        sc, cc = np.sin(chi), np.cos(chi)
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        zero = np.zeros_like(chi)
        x = np.stack([sc * st * cp, sc * st * sp, sc * ct, -cc], axis=-1)
        d_chi = np.stack([cc * st * cp, cc * st * sp, cc * ct, sc], axis=-1)
        d_theta = np.stack([sc * ct * cp, sc * ct * sp, -sc * st, zero], axis=-1)
        d_phi = np.stack([-sc * st * sp, sc * st * cp, zero, zero], axis=-1)
        return x, np.stack([d_chi, d_theta, d_phi], axis=-2)
    raise UnsupportedDimensionError(f"sphere dimension must be 1, 2 or 3, got {n!r}")


def default_grid(n):
    if n == 1:
        return PeriodicGrid1D()
    if n == 2:
        return SphereGrid2()
    if n == 3:
        return SphereGrid3()
    raise UnsupportedDimensionError(f"sphere dimension must be 1, 2 or 3, got {n!r}")


def grid_coords(grid):
    """Node coordinate arrays of a grid, in chart order."""
    if isinstance(grid, PeriodicGrid1D):
        return (grid.nodes,)
    return tuple(grid.mesh)


def grid_weights(grid):
    if isinstance(grid, PeriodicGrid1D):
        return np.full(grid.shape, grid.weight)
    return grid.weights


def integrate_pullback(n, x, J, grid):
    """Quadrature of the pulled-back solid-angle form sampled on ``grid``."""
    return weighted_sum(grid_weights(grid), solid_angle_pullback_density(n, x, J))


def integrate_omega_over_sphere(n, grid=None, tol=DEFAULT_TOL):
    """Integral of the solid-angle form over the unit n-sphere, snapped (to 1)."""
    grid = grid or default_grid(n)
    x, J = sphere_embedding(n, *grid_coords(grid))
    return snap_integer(integrate_pullback(n, x, J, grid), tol)
