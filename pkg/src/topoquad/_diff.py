"""Finite-difference stencils on vectorized callables."""

import numpy as np


def partial(fn, coords, i, h, order=4):
    """Derivative of ``fn(*coords)`` with respect to ``coords[i]``.

    ``order`` selects the 2-point (order 2) or 4-point (order 4) central
    stencil. The output of ``fn`` may carry trailing axes.
    """

    def shifted(s):
        c = list(coords)
        c[i] = c[i] + s
        return np.asarray(fn(*c), dtype=float)

    if order == 2:
        return (shifted(h) - shifted(-h)) / (2 * h)
    if order == 4:
        return (8 * (shifted(h) - shifted(-h)) - (shifted(2 * h) - shifted(-2 * h))) / (12 * h)
    raise ValueError("order must be 2 or 4")


def directional(fn, x, direction, h, order=2):
    """Derivative of ``fn`` at points ``x`` along ``direction`` (last axis = coords)."""

    def at(s):
        return np.asarray(fn(x + s * direction), dtype=float)

    if order == 2:
        return (at(h) - at(-h)) / (2 * h)
    if order == 4:
        return (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h)
    raise ValueError("order must be 2 or 4")


def second_derivative(fn, t, h):
    """Five-point central second derivative of a scalar function."""
    f0 = np.asarray(fn(t), dtype=float)
    f1 = np.asarray(fn(t + h), dtype=float) + np.asarray(fn(t - h), dtype=float)
    f2 = np.asarray(fn(t + 2 * h), dtype=float) + np.asarray(fn(t - 2 * h), dtype=float)
    return (16 * f1 - f2 - 30 * f0) / (12 * h * h)
