import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoquad.errors import NotNearIntegerError, NumericalDomainError
from topoquad.quadrature import (
    PeriodicGrid1D,
    SphereGrid2,
    SphereGrid3,
    gauss_legendre,
    integrate_periodic_1d,
    integrate_sphere2,
    integrate_sphere3,
    snap_integer,
)


@pytest.mark.parametrize(
    "f, samples, expected, tol",
    [
        (lambda p: np.sin(p) ** 2, 64, math.pi, 1e-12),
        (lambda p: np.ones_like(p), 8, 2 * math.pi, 0.0),
        (lambda p: np.cos(3 * p) + 2, 16, 4 * math.pi, 1e-12),
    ],
)
def test_periodic_examples(f, samples, expected, tol):
    assert abs(integrate_periodic_1d(f, PeriodicGrid1D(samples)) - expected) <= tol


def test_sphere2_examples():
    g = SphereGrid2(16, 32)
    assert abs(integrate_sphere2(lambda t, p: np.sin(t), g) - 4 * math.pi) < 1e-10
    assert integrate_sphere2(lambda t, p: np.zeros_like(t), g) == 0.0
    assert abs(integrate_sphere2(lambda t, p: np.sin(t) * np.cos(p) ** 2, g) - 2 * math.pi) < 1e-10


def test_sphere3_examples():
    g = SphereGrid3(16, 16, 32)
    assert abs(integrate_sphere3(lambda c, t, p: np.sin(c) ** 2 * np.sin(t), g) - 2 * math.pi**2) < 1e-9
    assert integrate_sphere3(lambda c, t, p: np.zeros_like(c), g) == 0.0
    val = integrate_sphere3(lambda c, t, p: np.sin(c) ** 2 * np.sin(t) * np.cos(p) ** 2, g)
    assert abs(val - math.pi**2) < 1e-9


def test_snap_examples():
    r = snap_integer(2.0000003, 1e-3)
    assert r.snapped == 2 and abs(r.residual - 3e-7) < 1e-12
    r = snap_integer(-1.0004, 1e-3)
    assert r.snapped == -1 and abs(r.residual - 4e-4) < 1e-12
    with pytest.raises(NotNearIntegerError) as info:
        snap_integer(0.4, 1e-3)
    assert info.value.raw == 0.4 and abs(info.value.residual - 0.4) < 1e-15


def test_snap_rejects_bad_tolerance_and_nan():
    with pytest.raises(ValueError):
        snap_integer(1.0, 0.0)
    with pytest.raises(NumericalDomainError):
        snap_integer(float("nan"))


def test_non_finite_sample_names_node():
    with pytest.raises(NumericalDomainError, match="node"):
        integrate_periodic_1d(lambda p: np.where(p == p[3], np.nan, 1.0), PeriodicGrid1D(8))
    with pytest.raises(NumericalDomainError, match="theta"):
        integrate_sphere2(lambda t, p: np.where(t > 3.0, np.inf, 1.0), SphereGrid2(8, 8))


@pytest.mark.parametrize("samples", [0, 4, 12, 100])
def test_periodic_grid_rejects_bad_counts(samples):
    with pytest.raises(ValueError):
        PeriodicGrid1D(samples)


def test_gauss_legendre_interval():
    x, w = gauss_legendre(8, 0.0, 2.0)
    assert np.all((x > 0) & (x < 2)) and abs(w.sum() - 2.0) < 1e-14
    assert abs(np.dot(w, x**5) - 2.0**6 / 6) < 1e-12


def test_sums_are_bit_reproducible():
    g = SphereGrid3(12, 12, 24)
    f = lambda c, t, p: np.sin(c) ** 2 * np.sin(t) * np.exp(np.cos(p))
    assert integrate_sphere3(f, g) == integrate_sphere3(f, g)


coef = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(coef, coef)
def test_linearity(a, b):
    g = SphereGrid2(16, 32)
    f = lambda t, p: np.sin(t) * np.cos(p) ** 2
    h = lambda t, p: np.sin(t) ** 3 + np.cos(t)
    lhs = integrate_sphere2(lambda t, p: a * f(t, p) + b * h(t, p), g)
    rhs = a * integrate_sphere2(f, g) + b * integrate_sphere2(h, g)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(a) + abs(b)) * 4 * math.pi


@settings(max_examples=30, deadline=None)
@given(coef, coef)
def test_linearity_periodic(a, b):
    g = PeriodicGrid1D(32)
    lhs = integrate_periodic_1d(lambda p: a * np.sin(p) ** 2 + b * np.exp(np.sin(p)), g)
    rhs = a * integrate_periodic_1d(lambda p: np.sin(p) ** 2, g) + b * integrate_periodic_1d(
        lambda p: np.exp(np.sin(p)), g
    )
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(a) + abs(b)) * 2 * math.pi
