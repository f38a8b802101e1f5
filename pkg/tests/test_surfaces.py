import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoquad.errors import (
    DegenerateFaceError,
    MeshError,
    NonManifoldError,
    NotClosedError,
    NotOrientableError,
    OffParseError,
)
from topoquad.meshes import CORPUS, corpus_mesh, genus2, icosphere, tetrahedron, torus_grid
from topoquad.surfaces import (
    SurfaceOfRevolution,
    TriMesh,
    angle_defect_chi,
    connected_sum_chi,
    euler_characteristic,
    gauss_bonnet_revolution,
    genus,
    load_off,
    parse_off,
    subdivide,
    write_off,
)

TETRA_OFF = """OFF
# regular tetrahedron
4 4 6
1 1 1
1 -1 -1
-1 1 -1
-1 -1 1
3 0 1 2
3 0 3 1
3 0 2 3
3 1 3 2
"""

# frozen (F, E, V, chi, genus) for the bundled corpus
CORPUS_COUNTS = {
    "tetrahedron": (4, 6, 4, 2, 0),
    "octahedron": (8, 12, 6, 2, 0),
    "icosahedron": (20, 30, 12, 2, 0),
    "icosphere-L3": (1280, 1920, 642, 2, 0),
    "torus-8x8": (128, 192, 64, 0, 1),
    "genus2": (100, 150, 48, -2, 2),
}


def test_load_tetrahedron(tmp_path):
    path = tmp_path / "tetra.off"
    path.write_text(TETRA_OFF)
    mesh = load_off(path)
    assert (mesh.n_vertices, mesh.n_faces) == (4, 4)
    rep = euler_characteristic(mesh)
    assert (rep.chi, rep.F, rep.E, rep.V) == (2, 4, 6, 4) and rep.three_f_equals_two_e


def test_flipped_face_is_not_orientable():
    with pytest.raises(NotOrientableError):
        parse_off(TETRA_OFF.replace("3 0 1 2", "3 0 2 1"))


def test_missing_face_is_not_closed():
    text = TETRA_OFF.replace("4 4 6", "4 3 6").replace("3 1 3 2\n", "")
    with pytest.raises(NotClosedError):
        parse_off(text)


def test_non_manifold_edge():
    v = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0], [1, 1, 1]]
    f = [[0, 1, 2], [1, 0, 3], [0, 1, 4], [0, 1, 5]]
    with pytest.raises(NonManifoldError):
        TriMesh(np.array(v, float), np.array(f))


def test_degenerate_face():
    with pytest.raises(DegenerateFaceError):
        parse_off(TETRA_OFF.replace("-1 -1 1", "0 0 0").replace("1 -1 -1", "0 0 0"))


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("PLY\n", 1),
        ("OFF\n4 x\n", 2),
        ("OFF\n1 1 0\n1 2\n3 0 0 0\n", 3),
        (TETRA_OFF.replace("3 0 1 2", "4 0 1 2 3"), 8),
        (TETRA_OFF.replace("3 0 1 2", "3 0 1 9"), 8),
        (TETRA_OFF + "junk\n", 12),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(OffParseError) as info:
        parse_off(text)
    assert info.value.line == line


def test_counts_on_header_line():
    text = TETRA_OFF.replace("OFF\n# regular tetrahedron\n4 4 6\n", "OFF 4 4 6\n")
    assert parse_off(text).n_faces == 4


def test_round_trip(tmp_path):
    mesh = genus2()
    write_off(mesh, tmp_path / "g2.off")
    back = load_off(tmp_path / "g2.off")
    assert np.array_equal(back.vertices, mesh.vertices) and np.array_equal(back.faces, mesh.faces)


def test_mesh_arrays_read_only():
    with pytest.raises(ValueError):
        tetrahedron().vertices[0, 0] = 5.0


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus(name):
    mesh = corpus_mesh(name)
    F, E, V, chi, g = CORPUS_COUNTS[name]
    rep = euler_characteristic(mesh)
    assert (rep.F, rep.E, rep.V, rep.chi) == (F, E, V, chi)
    assert 3 * rep.F == 2 * rep.E
    res = angle_defect_chi(mesh)
    assert res.snapped == chi and res.residual < 1e-9
    assert genus(mesh) == g


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_bundled_files_match_generators(name):
    made, bundled = CORPUS[name](), corpus_mesh(name)
    assert np.array_equal(made.faces, bundled.faces) and np.array_equal(made.vertices, bundled.vertices)


def test_regular_tetrahedron_defects():
    mesh = tetrahedron()
    assert angle_defect_chi(mesh).snapped == 2
    from topoquad.surfaces import corner_angles

    assert np.allclose(corner_angles(mesh), math.pi / 3, atol=1e-14)


@pytest.mark.parametrize("name", ["tetrahedron", "octahedron", "torus-8x8", "genus2"])
def test_subdivision_invariance(name):
    mesh = corpus_mesh(name)
    fine = subdivide(mesh)
    a, b = euler_characteristic(mesh), euler_characteristic(fine)
    assert a.chi == b.chi and (a.F, a.E, a.V) != (b.F, b.E, b.V)
    assert angle_defect_chi(fine).snapped == a.chi


def test_connected_sums():
    assert connected_sum_chi(2, 2) == 2
    assert connected_sum_chi(0, 0) == -2
    assert connected_sum_chi(2, 0) == 0
    with pytest.raises(ValueError):
        connected_sum_chi(1, 0)


def test_fine_torus_tube():
    res = angle_defect_chi(torus_grid(24, 16))
    assert res.snapped == 0 and res.residual < 1e-9


@pytest.mark.parametrize(
    "surface, expected",
    [
        (SurfaceOfRevolution.sphere(1.0), 2),
        (SurfaceOfRevolution.sphere(3.0), 2),
        (SurfaceOfRevolution.sphere(0.2), 2),
        (SurfaceOfRevolution.torus(2.0, 1.0), 0),
        (SurfaceOfRevolution.torus(5.0, 0.5), 0),
    ],
)
def test_gauss_bonnet_revolution(surface, expected):
    res = gauss_bonnet_revolution(surface)
    assert res.snapped == expected and res.residual < 1e-6


def test_revolution_torus_agrees_with_mesh():
    assert gauss_bonnet_revolution(SurfaceOfRevolution.torus(2.0, 1.0)).snapped == angle_defect_chi(
        torus_grid(32, 32)
    ).snapped


def test_revolution_profile_validation():
    with pytest.raises(ValueError):
        SurfaceOfRevolution(lambda u: 2 * np.sin(u), lambda u: -np.cos(u), math.pi)
    with pytest.raises(ValueError):
        SurfaceOfRevolution.torus(1.0, 2.0)


def _rotation(angles):
    a, b, c = angles
    Rz = np.array([[math.cos(a), -math.sin(a), 0], [math.sin(a), math.cos(a), 0], [0, 0, 1]])
    Ry = np.array([[math.cos(b), 0, math.sin(b)], [0, 1, 0], [-math.sin(b), 0, math.cos(b)]])
    Rx = np.array([[1, 0, 0], [0, math.cos(c), -math.sin(c)], [0, math.sin(c), math.cos(c)]])
    return Rz @ Ry @ Rx


angle = st.floats(-math.pi, math.pi)
coord = st.floats(-100, 100)


@settings(max_examples=20, deadline=None)
@given(st.tuples(angle, angle, angle), st.floats(1e-2, 1e2), st.tuples(coord, coord, coord),
       st.sampled_from(["icosahedron", "torus-8x8", "genus2"]))
def test_rigid_motion_invariance(angles, scale, shift, name):
    mesh = corpus_mesh(name)
    moved = mesh.transformed(_rotation(angles), scale, shift)
    a, b = angle_defect_chi(mesh), angle_defect_chi(moved)
    assert a.snapped == b.snapped and b.residual < 1e-9


def test_generic_mesh_error_for_unused_vertex():
    with pytest.raises(MeshError):
        parse_off(TETRA_OFF.replace("4 4 6", "5 4 6").replace("-1 -1 1\n", "-1 -1 1\n9 9 9\n"))


def test_icosphere_levels():
    assert euler_characteristic(icosphere(1)).F == 80
