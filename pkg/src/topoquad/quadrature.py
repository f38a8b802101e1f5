"""Deterministic tensor-product quadrature on the circle, S^2 and S^3.

Periodic directions use the uniform trapezoid rule, polar directions use
Gauss-Legendre nodes so that chart poles are never sampled. All sums go
through :func:`math.fsum`, which makes every result independent of the
summation order and therefore bit-reproducible.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NotNearIntegerError, NumericalDomainError

__all__ = [
    "DEFAULT_TOL",
    "PeriodicGrid1D",
    "SphereGrid2",
    "SphereGrid3",
    "IntegerSnapResult",
    "gauss_legendre",
    "integrate_periodic_1d",
    "integrate_sphere2",
    "integrate_sphere3",
    "snap_integer",
    "weighted_sum",
]

DEFAULT_TOL = 1e-3


def gauss_legendre(n, a, b):
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _periodic_nodes(n, period):
    return np.arange(n) * (period / n)


@dataclass(frozen=True)
class PeriodicGrid1D:
    samples: int = 64
    period: float = 2 * math.pi

    def __post_init__(self):
        s = self.samples
        if not isinstance(s, (int, np.integer)) or s < 8 or s & (s - 1):
            raise ValueError(f"samples must be a power of two >= 8, got {s!r}")
        if not self.period > 0:
            raise ValueError("period must be positive")

    @cached_property
    def nodes(self):
        return _periodic_nodes(self.samples, self.period)

    @property
    def weight(self):
        return self.period / self.samples

    @property
    def shape(self):
        return (self.samples,)


@dataclass(frozen=True)
class SphereGrid2:
    """Gauss-Legendre in theta on [0, pi] times trapezoid in phi on [0, 2pi)."""

    n_theta: int = 32
    n_phi: int = 64

    def __post_init__(self):
        # 2 is the smallest count that still defines a rule; coarse grids are
        # allowed so that under-resolution shows up as a snapping failure.
        if self.n_theta < 2 or self.n_phi < 2:
            raise ValueError("grid counts must be >= 2")

    @cached_property
    def _axes(self):
        theta, w_theta = gauss_legendre(self.n_theta, 0.0, math.pi)
        phi = _periodic_nodes(self.n_phi, 2 * math.pi)
        w_phi = np.full(self.n_phi, 2 * math.pi / self.n_phi)
        return theta, w_theta, phi, w_phi

    @cached_property
    def mesh(self):
        theta, _, phi, _ = self._axes
        return np.meshgrid(theta, phi, indexing="ij")

    @cached_property
    def weights(self):
        _, w_theta, _, w_phi = self._axes
        return np.multiply.outer(w_theta, w_phi)

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)


@dataclass(frozen=True)
class SphereGrid3:
    """Hyperspherical grid: Gauss-Legendre in chi and theta, trapezoid in phi."""

    n_chi: int = 24
    n_theta: int = 24
    n_phi: int = 48

    def __post_init__(self):
        if min(self.n_chi, self.n_theta, self.n_phi) < 2:
            raise ValueError("grid counts must be >= 2")

    @cached_property
    def _axes(self):
        chi, w_chi = gauss_legendre(self.n_chi, 0.0, math.pi)
        theta, w_theta = gauss_legendre(self.n_theta, 0.0, math.pi)
        phi = _periodic_nodes(self.n_phi, 2 * math.pi)
        w_phi = np.full(self.n_phi, 2 * math.pi / self.n_phi)
        return chi, w_chi, theta, w_theta, phi, w_phi

    @cached_property
    def mesh(self):
        chi, _, theta, _, phi, _ = self._axes
        return np.meshgrid(chi, theta, phi, indexing="ij")

    @cached_property
    def weights(self):
        _, w_chi, _, w_theta, _, w_phi = self._axes
        return np.multiply.outer(np.multiply.outer(w_chi, w_theta), w_phi)

    @property
    def shape(self):
        return (self.n_chi, self.n_theta, self.n_phi)


@dataclass(frozen=True)
class IntegerSnapResult:
    raw: float
    snapped: int
    residual: float

    def __int__(self):
        return self.snapped

    def as_dict(self):
        return {"raw": self.raw, "integer": self.snapped, "residual": self.residual}


def _check_finite(values, coords, names):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        where = ", ".join(f"{n}={float(c[idx]):.6g}" for n, c in zip(names, coords))
        raise NumericalDomainError(f"non-finite sample at node {idx} ({where})")


def weighted_sum(weights, values):
    """Correctly rounded sum of ``weights * values`` (order independent)."""
    return math.fsum(np.ravel(np.asarray(weights) * values).tolist())


def integrate_periodic_1d(f, grid=None):
    """Trapezoid rule for a periodic integrand on ``[0, grid.period)``.

    Exact for trigonometric polynomials of degree below ``samples / 2``.
    ``f`` is called once with the full node array.
    """
    grid = grid or PeriodicGrid1D()
    t = grid.nodes
    values = np.broadcast_to(np.asarray(f(t), dtype=float), t.shape)
    _check_finite(values, (t,), ("t",))
    return grid.weight * math.fsum(values.tolist())


def integrate_sphere2(density, grid=None):
    """Sum of ``w_theta * w_phi * density(theta, phi)`` over the grid.

    The weights carry no ``sin(theta)`` factor; the density must include the
    full measure.
    """
    grid = grid or SphereGrid2()
    theta, phi = grid.mesh
    values = np.broadcast_to(np.asarray(density(theta, phi), dtype=float), theta.shape)
    _check_finite(values, (theta, phi), ("theta", "phi"))
    return weighted_sum(grid.weights, values)


def integrate_sphere3(density, grid=None):
    """Analogue of :func:`integrate_sphere2` on the (chi, theta, phi) grid."""
    grid = grid or SphereGrid3()
    chi, theta, phi = grid.mesh
    values = np.broadcast_to(np.asarray(density(chi, theta, phi), dtype=float), chi.shape)
    _check_finite(values, (chi, theta, phi), ("chi", "theta", "phi"))
    return weighted_sum(grid.weights, values)


def snap_integer(raw, tol=DEFAULT_TOL):
    """Round ``raw`` to the nearest integer, refusing if it is farther than ``tol``."""
    if not 0 < tol < 0.5:
        raise ValueError(f"tol must lie in (0, 0.5), got {tol!r}")
    raw = float(raw)
    if not math.isfinite(raw):
        raise NumericalDomainError(f"cannot snap non-finite value {raw!r}")
    snapped = int(round(raw))
    residual = abs(raw - snapped)
    if residual > tol:
        raise NotNearIntegerError(raw, residual, tol)
    return IntegerSnapResult(raw, snapped, residual)
