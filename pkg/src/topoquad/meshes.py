"""Generators for the bundled mesh corpus."""

import math
from importlib import resources

import numpy as np

from .surfaces import TriMesh, parse_off, subdivide

__all__ = [
    "tetrahedron",
    "octahedron",
    "icosahedron",
    "icosphere",
    "torus_grid",
    "genus2",
    "CORPUS",
    "corpus_mesh",
    "build_corpus",
]


def _orient_outward(vertices, faces):
    """Flip faces of a star-shaped (about the origin) mesh so normals point out."""
    v = np.asarray(vertices, dtype=float)
    out = []
    for a, b, c in faces:
        n = np.cross(v[b] - v[a], v[c] - v[a])
        out.append((a, b, c) if np.dot(n, v[a] + v[b] + v[c]) > 0 else (a, c, b))
    return np.array(out)


def tetrahedron():
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    f = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return TriMesh(v, _orient_outward(v, f))


def octahedron():
    v = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    f = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return TriMesh(v, _orient_outward(v, f))


def icosahedron():
    p = (1 + math.sqrt(5)) / 2
    v = np.array(
        [[-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
         [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
         [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1]],
        dtype=float,
    )
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return TriMesh(v, _orient_outward(v, f))


def icosphere(level=3):
    """Icosahedron refined ``level`` times, vertices pushed to the unit sphere."""
    mesh = icosahedron()
    for _ in range(level):
        fine = subdivide(mesh)
        v = fine.vertices / np.linalg.norm(fine.vertices, axis=1, keepdims=True)
        mesh = TriMesh(v, fine.faces)
    return mesh


def torus_grid(n_u=8, n_v=8, R=2.0, r=1.0):
    """Doubly periodic ``n_u x n_v`` grid on the torus of revolution, two triangles per cell."""
    u = 2 * math.pi * np.arange(n_u) / n_u
    v = 2 * math.pi * np.arange(n_v) / n_v
    U, V = np.meshgrid(u, v, indexing="ij")
    pts = np.stack([(R + r * np.cos(V)) * np.cos(U), (R + r * np.cos(V)) * np.sin(U), r * np.sin(V)], axis=-1)

    def idx(i, j):
        return (i % n_u) * n_v + (j % n_v)

    faces = []
    for i in range(n_u):
        for j in range(n_v):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(pts.reshape(-1, 3), np.array(faces))


def _polycube_boundary(cells):
    """Outward-oriented, triangulated boundary of a union of unit cubes."""
    cells = set(cells)
    index = {}
    faces = []

    def vid(p):
        if p not in index:
            index[p] = len(index)
        return index[p]

    for cell in sorted(cells):
        for axis in range(3):
            b, c = (axis + 1) % 3, (axis + 2) % 3
            for sign in (1, -1):
                nb = list(cell)
                nb[axis] += sign
                if tuple(nb) in cells:
                    continue
                base = list(cell)
                base[axis] += 1 if sign > 0 else 0
                corners = []
                for db, dc in ((0, 0), (1, 0), (1, 1), (0, 1)):
                    p = list(base)
                    p[b] += db
                    p[c] += dc
                    corners.append(vid(tuple(p)))
                if sign < 0:
                    corners.reverse()
                q0, q1, q2, q3 = corners
                faces += [(q0, q1, q2), (q0, q2, q3)]
    verts = np.zeros((len(index), 3))
    for p, i in index.items():
        verts[i] = p
    return TriMesh(verts, np.array(faces))


def genus2():
    """Boundary of a 5x3x1 slab of cubes with two square holes (chi = -2)."""
    holes = {(1, 1, 0), (3, 1, 0)}
    cells = [(i, j, 0) for i in range(5) for j in range(3) if (i, j, 0) not in holes]
    return _polycube_boundary(cells)


CORPUS = {
    "tetrahedron": tetrahedron,
    "octahedron": octahedron,
    "icosahedron": icosahedron,
    "icosphere-L3": lambda: icosphere(3),
    "torus-8x8": lambda: torus_grid(8, 8),
    "genus2": genus2,
}


def corpus_mesh(name):
    """Load a bundled corpus mesh from its OFF file."""
    if name not in CORPUS:
        raise KeyError(f"unknown corpus mesh {name!r}; choose from {sorted(CORPUS)}")
    text = resources.files("topoquad").joinpath("data").joinpath(f"{name}.off").read_text()
    return parse_off(text)


def build_corpus(directory):
    """Regenerate the bundled OFF files into ``directory``."""
    from pathlib import Path

    from .surfaces import write_off

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, make in CORPUS.items():
        write_off(make(), directory / f"{name}.off")
