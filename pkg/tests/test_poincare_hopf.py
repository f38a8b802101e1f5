import math

import numpy as np
import pytest

from topoquad.errors import GeometryError, ZeroRefinementError
from topoquad.poincare_hopf import (
    ChartedSurface,
    TangentFieldChart,
    Zero,
    find_zeros,
    poincare_hopf_report,
    zero_index,
)
from topoquad.registry import resolve

# frozen zero locations (ambient points) for the corpus fields
EXPECTED = {
    "sphere-gradient-z": ([(0.0, 0.0, -1.0), (0.0, 0.0, 1.0)], (1, 1), 2),
    "sphere-rotation-z": ([(0.0, 0.0, -1.0), (0.0, 0.0, 1.0)], (1, 1), 2),
    "sphere-gradient-x": ([(-1.0, 0.0, 0.0), (1.0, 0.0, 0.0)], (1, 1), 2),
    "torus-constant": ([], (), 0),
    "torus-height-gradient": (
        [(-3.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (1.0, 0.0, 0.0), (3.0, 0.0, 0.0)],
        (1, -1, -1, 1),
        0,
    ),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_corpus_reports(name):
    points, indices, chi = EXPECTED[name]
    field = resolve("tangent", name)
    rep = poincare_hopf_report(field)
    assert np.allclose([z.point for z in rep.zeros], points, atol=1e-9) if points else rep.zeros == ()
    assert rep.indices == indices
    assert rep.total == rep.chi == chi and rep.match


def test_expression_field_matches_builtin():
    rep = poincare_hopf_report(resolve("tangent", "expr:surface=sphere,vx=-y,vy=x,vz=0"))
    assert rep.indices == (1, 1) and rep.match


def test_sum_is_field_independent():
    sums = {poincare_hopf_report(resolve("tangent", n)).total for n in EXPECTED if n.startswith("sphere")}
    assert sums == {2}
    sums = {poincare_hopf_report(resolve("tangent", n)).total for n in EXPECTED if n.startswith("torus")}
    assert sums == {0}


def test_stereographic_charts_agree_on_overlap():
    surface = ChartedSurface.sphere()
    field = resolve("tangent", "sphere-gradient-x")
    zeros = find_zeros(field)
    for z in zeros:
        a = zero_index(field, surface, z, radius=0.3, others=zeros, chart="S").snapped
        b = zero_index(field, surface, z, radius=0.3, others=zeros, chart="N").snapped
        assert a == b == 1


def test_chart_transition_is_inversion():
    surface = ChartedSurface.sphere()
    w = np.array([0.3, -0.7])
    p, _, _ = surface.embed("S", *w)
    assert np.allclose(surface.to_chart("N", p), surface.transition(w), atol=1e-15)


@pytest.mark.parametrize("name", ["sphere-gradient-z", "sphere-gradient-x", "torus-height-gradient"])
@pytest.mark.parametrize("direction", [(1.0, 0.0), (0.6, -0.8)])
def test_perturbation_stability(name, direction):
    field = resolve("tangent", name)
    zeros = find_zeros(field)
    base = [zero_index(field, field.surface, z, others=zeros).snapped for z in zeros]
    bumped = field.perturbed(1e-3, direction)
    moved = [zero_index(bumped, field.surface, z, radius=0.3).snapped for z in zeros]
    assert moved == base


def test_perturbed_torus_report():
    field = resolve("tangent", "torus-height-gradient").perturbed(1e-3, (0.6, 0.8))
    rep = poincare_hopf_report(field)
    assert sorted(rep.indices) == [-1, -1, 1, 1] and rep.match


def test_source_and_saddle_indices():
    surface = ChartedSurface.torus()
    src = TangentFieldChart(surface, {"T": lambda u, v: np.stack([np.sin(u), np.sin(v)], -1)})
    zeros = find_zeros(src)
    assert len(zeros) == 4
    idx = {(round(z.u, 6), round(z.v, 6)): zero_index(src, surface, z, others=zeros).snapped for z in zeros}
    assert idx[(0.0, 0.0)] == 1 and idx[(round(math.pi, 6), 0.0)] == -1
    assert sum(idx.values()) == 0


def test_other_zero_inside_circle():
    field = resolve("tangent", "torus-height-gradient")
    zeros = find_zeros(field)
    with pytest.raises(GeometryError):
        zero_index(field, field.surface, zeros[0], radius=4.0, others=zeros)


def test_newton_failure_reports_location():
    surface = ChartedSurface.torus()
    jump = TangentFieldChart(surface, {"T": lambda u, v: np.stack([np.where(u < 1.0, -1.0, 1.0), v - math.pi], -1)})
    with pytest.raises(ZeroRefinementError) as info:
        find_zeros(jump, scan=16)
    assert info.value.location is not None


def test_torus_constant_has_no_zeros():
    assert find_zeros(resolve("tangent", "torus-constant:a=0.3,b=-1.0")) == []
