"""Monopole and instanton charges for SU(2) configurations.

SU(2) elements are stored as real 4-vectors ``(V1, V2, V3, V4)`` meaning
``V1 (i sigma_1) + V2 (i sigma_2) + V3 (i sigma_3) + V4 * 1``. In this basis

    (a4 + a.isigma)(b4 + b.isigma) = (a4 b4 - a.b) + (a4 b + b4 a - a x b).isigma

and ``tr`` of an element is twice its scalar part, so all traces below are
evaluated without forming 2x2 complex matrices. Lie-algebra valued fields
(gauge potentials, curvatures) keep only the three ``i sigma`` coefficients.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._diff import partial
from .errors import NumericalDomainError, ZeroHiggsError
from .forms import det_rows, sphere_embedding, sphere_volume
from .quadrature import (
    DEFAULT_TOL,
    SphereGrid2,
    SphereGrid3,
    gauss_legendre,
    integrate_sphere2,
    integrate_sphere3,
    snap_integer,
    weighted_sum,
)

__all__ = [
    "UnitQuaternion",
    "HiggsBoundaryField",
    "SU2Map",
    "GaugeFieldR4",
    "ProductChargeReport",
    "qmul",
    "qinv",
    "qpow",
    "quaternion_mul",
    "omega_one",
    "build_omega_k",
    "constant_map",
    "product_map",
    "hedgehog_field",
    "twist_field",
    "monopole_charge",
    "instanton_charge_boundary",
    "random_tangent_frames",
    "maurer_cartan_residual",
    "product_charge_report",
    "bpst_gauge_field",
    "pure_gauge_field",
    "zero_gauge_field",
    "chern_number_ball",
]

UNIT_TOL = 1e-12
MAP_UNIT_TOL = 1e-10
HIGGS_THRESHOLD = 1e-10
MAX_POWER = 16
IDENTITY = np.array([0.0, 0.0, 0.0, 1.0])


# -- quaternion algebra in the (i sigma_1, i sigma_2, i sigma_3, 1) basis ---------


def qmul(a, b):
    """Pointwise SU(2) product of arrays ``(..., 4)`` (no normalization)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    av, a4 = a[..., :3], a[..., 3:]
    bv, b4 = b[..., :3], b[..., 3:]
    scalar = a4 * b4 - np.sum(av * bv, axis=-1, keepdims=True)
    vector = a4 * bv + b4 * av - np.cross(av, bv)
    return np.concatenate([vector, scalar], axis=-1)


def qinv(a):
    """Inverse of unit elements (the conjugate)."""
    a = np.asarray(a, dtype=float)
    return np.concatenate([-a[..., :3], a[..., 3:]], axis=-1)


def qpow(a, k):
    """Integer power by repeated squaring; negative ``k`` uses the inverse."""
    a = np.asarray(a, dtype=float)
    if k < 0:
        a, k = qinv(a), -k
    result = np.broadcast_to(IDENTITY, a.shape).copy()
    base = a
    while k:
        if k & 1:
            result = qmul(result, base)
        base = qmul(base, base)
        k >>= 1
    return result


def _trace_product(*factors):
    """``tr`` of a product of SU(2)-algebra elements given as ``(..., 4)`` arrays."""
    out = factors[0]
    for f in factors[1:]:
        out = qmul(out, f)
    return 2.0 * out[..., 3]


@dataclass(frozen=True)
class UnitQuaternion:
    V1: float
    V2: float
    V3: float
    V4: float

    def __post_init__(self):
        norm2 = self.V1**2 + self.V2**2 + self.V3**2 + self.V4**2
        if abs(norm2 - 1.0) > UNIT_TOL:
            raise ValueError(f"quaternion is not unit: |V|^2 = {norm2!r}")

    @classmethod
    def from_array(cls, a, renormalize=False):
        a = np.asarray(a, dtype=float)
        if renormalize:
            a = a / np.linalg.norm(a)
        return cls(*(float(c) for c in a))

    @classmethod
    def identity(cls):
        return cls(0.0, 0.0, 0.0, 1.0)

    def as_array(self):
        return np.array([self.V1, self.V2, self.V3, self.V4])

    def inverse(self):
        return UnitQuaternion(-self.V1, -self.V2, -self.V3, self.V4)

    def __mul__(self, other):
        return quaternion_mul(self, other)


def quaternion_mul(a, b):
    """Group product of two unit quaternions, renormalized if it drifted."""
    p = qmul(a.as_array(), b.as_array())
    drift = abs(float(np.dot(p, p)) - 1.0)
    return UnitQuaternion.from_array(p, renormalize=drift > UNIT_TOL)


# -- boundary maps -----------------------------------------------------------------


@dataclass(frozen=True)
class HiggsBoundaryField:
    """Higgs field on the sphere at infinity, ``(theta, phi) -> (phi^1, phi^2, phi^3)``."""

    phi: Callable

    def __call__(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        out = np.asarray(self.phi(theta, phi), dtype=float)
        return np.broadcast_to(out, theta.shape + (3,))


@dataclass(frozen=True)
class SU2Map:
    """Map ``S^3 -> SU(2)``: unit 4-vectors ``(..., 4)`` to unit quaternions ``(..., 4)``."""

    omega: Callable

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.omega(x), dtype=float), x.shape)

    def inverse(self):
        return SU2Map(lambda x: qinv(self(x)))


def omega_one(x):
    """The identity map of S^3 read as an SU(2) element."""
    return np.asarray(x, dtype=float)


def build_omega_k(k):
    """``x -> omega_(1)(x)^k`` for ``|k| <= 16``."""
    k = int(k)
    if abs(k) > MAX_POWER:
        raise ValueError(f"|k| must be <= {MAX_POWER}, got {k}")
    if k == 0:
        return constant_map(IDENTITY)
    if k == 1:
        return SU2Map(omega_one)
    return SU2Map(lambda x: qpow(omega_one(x), k))


def constant_map(q):
    q = np.asarray(q.as_array() if isinstance(q, UnitQuaternion) else q, dtype=float)
    return SU2Map(lambda x: np.broadcast_to(q, np.shape(x)))


def product_map(m1, m2):
    return SU2Map(lambda x: qmul(m1(x), m2(x)))


def hedgehog_field(F=1.0):
    """Asymptotic hedgehog ``F * (sin t cos p, sin t sin p, cos t)``."""
    return twist_field(1, F)


def twist_field(k, F=1.0):
    """Boundary Higgs field with image angles ``(theta, k * phi)``."""

    def phi_fn(t, p):
        return F * np.stack([np.sin(t) * np.cos(k * p), np.sin(t) * np.sin(k * p), np.cos(t)], axis=-1)

    return HiggsBoundaryField(phi_fn)


# -- charges -----------------------------------------------------------------------


def monopole_charge(field, grid=None, tol=DEFAULT_TOL, h=1e-4):
    """Degree of ``phi / |phi|`` over the sphere at infinity, snapped."""
    grid = grid or SphereGrid2()

    def density(theta, phi):
        val = field(theta, phi)
        mag = np.linalg.norm(val, axis=-1)
        if np.any(mag <= HIGGS_THRESHOLD):
            raise ZeroHiggsError(f"|phi| = {mag.min():.3g} on the sphere at infinity")
        d_theta = partial(field, (theta, phi), 0, h)
        d_phi = partial(field, (theta, phi), 1, h)
        return det_rows([val, d_theta, d_phi]) / (sphere_volume(2) * mag**3)

    return snap_integer(integrate_sphere2(density, grid), tol)


def _chart_map(smap):
    def on_chart(chi, theta, phi):
        x, _ = sphere_embedding(3, chi, theta, phi)
        return smap(x)

    return on_chart


def _check_unit(values):
    dev = np.abs(np.sum(values * values, axis=-1) - 1.0)
    if np.any(dev > MAP_UNIT_TOL):
        raise NumericalDomainError(f"SU(2) map output is not unit (max deviation {dev.max():.3g})")


def instanton_raw(smap, grid=None, h=1e-3):
    grid = grid or SphereGrid3()
    on_chart = _chart_map(smap)

    def density(chi, theta, phi):
        coords = (chi, theta, phi)
        V = on_chart(*coords)
        _check_unit(V)
        rows = [V] + [partial(on_chart, coords, i, h) for i in range(3)]
        return det_rows(rows) / (sphere_volume(3) * np.sum(V * V, axis=-1) ** 2)

    return integrate_sphere3(density, grid)


def instanton_charge_boundary(smap, grid=None, tol=DEFAULT_TOL):
    """Winding number of an S^3 -> SU(2) map via the solid-angle density."""
    return snap_integer(instanton_raw(smap, grid), tol)


def random_tangent_frames(count, rng=None):
    """Random points of S^3 with orthonormal tangent frames.

    Returns ``(points (count, 4), frames (count, 3, 4))``.
    """
    rng = np.random.default_rng(rng)
    pts = rng.standard_normal((count, 4))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    frames = np.empty((count, 3, 4))
    for n in range(count):
        basis = [pts[n]]
        while len(basis) < 4:
            v = rng.standard_normal(4)
            for b in basis:
                v -= np.dot(v, b) * b
            norm = np.linalg.norm(v)
            if norm > 1e-6:
                basis.append(v / norm)
        frames[n] = basis[1:]
    return pts, frames


def maurer_cartan_residual(smap, points, frames, h=1e-5):
    """Largest pointwise mismatch between the two sides of the trace identity.

    At each point, evaluates ``tr[(d w w^-1)^3]`` and
    ``-2 eps V dV dV dV`` on the three frame vectors. Derivatives are
    central differences along great circles with step ``h``.
    """
    points = np.asarray(points, dtype=float)
    frames = np.asarray(frames, dtype=float)
    W = smap(points)
    W_inv = qinv(W)
    dW = []
    for i in range(3):
        t = frames[:, i, :]
        plus = smap(np.cos(h) * points + np.sin(h) * t)
        minus = smap(np.cos(h) * points - np.sin(h) * t)
        dW.append((plus - minus) / (2 * h))
    M = [qmul(d, W_inv) for d in dW]
    lhs = np.zeros(len(points))
    for perm in itertools.permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[list(perm)])
        lhs = lhs + sign * _trace_product(*(M[p] for p in perm))
    rhs = -2.0 * 6.0 * det_rows([W] + dW)
    return float(np.max(np.abs(lhs - rhs))) if len(points) else 0.0


@dataclass(frozen=True)
class ProductChargeReport:
    q1: int
    q2: int
    q_product: int

    @property
    def additive(self):
        return self.q_product == self.q1 + self.q2


def product_charge_report(m1, m2, grid=None, tol=DEFAULT_TOL):
    q1 = instanton_charge_boundary(m1, grid, tol).snapped
    q2 = instanton_charge_boundary(m2, grid, tol).snapped
    q12 = instanton_charge_boundary(product_map(m1, m2), grid, tol).snapped
    return ProductChargeReport(q1, q2, q12)


# -- gauge potentials on R^4 and the Chern number ------------------------------------


@dataclass(frozen=True)
class GaugeFieldR4:
    """Gauge potential ``x (..., 4) -> A (..., 4, 3)``: component mu, i sigma coefficients."""

    A: Callable
    name: str = "gauge"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.A(x), dtype=float), x.shape[:-1] + (4, 3))


def bpst_gauge_field(rho=1.0, center=(0.0, 0.0, 0.0, 0.0)):
    """Regular one-instanton potential ``r^2/(r^2+rho^2) * (-d w) w^-1``, w = omega_(1).

    With ``y = x - center`` this is ``A_mu = (y_mu - e_mu conj(y)) / (|y|^2 + rho^2)``,
    which is purely imaginary (in the i sigma span) by construction. The
    interior profile is the standard BPST one; only its behaviour at
    infinity enters the boundary charge.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    c = np.asarray(center, dtype=float)
    eye = np.eye(4)

    def A(x):
        y = x - c
        denom = np.sum(y * y, axis=-1)[..., None, None] + rho * rho
        prod = qmul(eye, qinv(y)[..., None, :])  # e_mu * conj(y), shape (..., 4, 4)
        out = y[..., :, None] * eye[None, 3] - prod
        return out[..., :3] / denom

    return GaugeFieldR4(A, f"bpst:rho={rho:g}")


def pure_gauge_field(omega_r4, h=1e-6):
    """``A_mu = (-d_mu w) w^-1`` for a map ``w: R^4 -> SU(2)`` (central differences)."""

    def A(x):
        W_inv = qinv(omega_r4(x))
        comps = []
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = h
            dW = (np.asarray(omega_r4(x + e)) - np.asarray(omega_r4(x - e))) / (2 * h)
            comps.append(-qmul(dW, W_inv)[..., :3])
        return np.stack(comps, axis=-2)

    return GaugeFieldR4(A, "pure-gauge")


def zero_gauge_field():
    return GaugeFieldR4(lambda x: np.zeros(np.shape(x)[:-1] + (4, 3)), "zero")


def _charge_density(field, x, h):
    """``-(1/8 pi^2)`` times the coefficient of ``d^4x`` in ``tr F ^ F``."""
    A = field(x)
    dA = []
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        dA.append((field(x + e) - field(x - e)) / (2 * h))  # dA[mu][..., nu, a]

    def F(mu, nu):
        # [X, Y] = -2 X x Y for purely imaginary elements
        return dA[mu][..., nu, :] - dA[nu][..., mu, :] - 2.0 * np.cross(A[..., mu, :], A[..., nu, :])

    def tr(X, Y):
        return -2.0 * np.sum(X * Y, axis=-1)

    tr_ff = 2.0 * (tr(F(0, 1), F(2, 3)) - tr(F(0, 2), F(1, 3)) + tr(F(0, 3), F(1, 2)))
    return -tr_ff / (8 * math.pi**2)


def chern_number_ball(field, radius, n_radial=48, sphere_grid=None):
    """``-(1/8 pi^2) * integral of tr F ^ F`` over the ball ``|x| <= radius``.

    Returned raw: truncating R^4 to a ball leaves a tail that only vanishes
    as the radius grows.
    """
    sphere_grid = sphere_grid or SphereGrid3(16, 16, 32)
    h = 1e-4 * radius / n_radial
    r_nodes, r_weights = gauss_legendre(n_radial, 0.0, radius)
    chi, theta, phi = sphere_grid.mesh
    unit, _ = sphere_embedding(3, chi, theta, phi)
    ang_w = sphere_grid.weights * np.sin(chi) ** 2 * np.sin(theta)
    terms = []
    for r, wr in zip(r_nodes, r_weights):
        q = _charge_density(field, r * unit, h)
        if not np.all(np.isfinite(q)):
            raise NumericalDomainError(f"non-finite charge density on the shell r = {r:.6g}")
        terms.append((wr * r**3) * ang_w * q)
    return weighted_sum(1.0, np.concatenate([t.ravel() for t in terms]))
