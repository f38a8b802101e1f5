"""Closed oriented triangle meshes, Euler characteristic and Gauss-Bonnet checks."""

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ._diff import second_derivative
from .errors import (
    DegenerateFaceError,
    MeshError,
    NonManifoldError,
    NotClosedError,
    NotOrientableError,
    NotOrientableSurfaceError,
    OffParseError,
)
from .quadrature import DEFAULT_TOL, gauss_legendre, snap_integer, weighted_sum

__all__ = [
    "TriMesh",
    "EulerReport",
    "SurfaceOfRevolution",
    "load_off",
    "parse_off",
    "write_off",
    "euler_characteristic",
    "corner_angles",
    "angle_defect_chi",
    "genus",
    "connected_sum_chi",
    "gauss_bonnet_revolution",
    "subdivide",
]

MIN_AREA = 1e-14


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Closed, consistently oriented triangle mesh; validated on construction."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        f = np.array(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError("vertices must have shape (V, 3)")
        if f.ndim != 2 or f.shape[1] != 3 or len(f) == 0:
            raise MeshError("faces must have shape (F, 3) with F > 0")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        _validate(v, f)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    def edges(self):
        """Undirected edges as sorted vertex pairs, in first-seen order."""
        seen = {}
        for a, b, c in self.faces.tolist():
            for e in ((a, b), (b, c), (c, a)):
                seen.setdefault(tuple(sorted(e)), None)
        return list(seen)

    def transformed(self, rotation=None, scale=1.0, shift=(0.0, 0.0, 0.0)):
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        return TriMesh(scale * self.vertices @ R.T + np.asarray(shift), self.faces)


def _validate(v, f):
    n = len(v)
    if f.min() < 0 or f.max() >= n:
        raise MeshError("face references a vertex index out of range")
    for i, (a, b, c) in enumerate(f.tolist()):
        if a == b or b == c or a == c:
            raise DegenerateFaceError(f"face {i} repeats a vertex: {(a, b, c)}")
    area2 = np.linalg.norm(np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]), axis=1)
    bad = np.flatnonzero(0.5 * area2 < MIN_AREA)
    if len(bad):
        raise DegenerateFaceError(f"face {int(bad[0])} has zero area")
    unused = set(range(n)) - set(np.unique(f).tolist())
    if unused:
        raise MeshError(f"vertex {min(unused)} is not used by any face")

    directed = Counter()
    for a, b, c in f.tolist():
        for e in ((a, b), (b, c), (c, a)):
            directed[e] += 1
    undirected = Counter()
    for (a, b), k in directed.items():
        undirected[(min(a, b), max(a, b))] += k
    for (a, b), k in sorted(undirected.items()):
        if k > 2:
            raise NonManifoldError(f"edge ({a}, {b}) is shared by {k} faces")
        if k < 2:
            raise NotClosedError(f"edge ({a}, {b}) is a boundary edge (one face)")
        if directed[(a, b)] != 1:
            raise NotOrientableError(f"edge ({a}, {b}) is traversed twice in the same direction")


# -- OFF I/O ---------------------------------------------------------------------


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_off(text):
    """Parse ASCII OFF text into a validated :class:`TriMesh`."""
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise OffParseError("empty file", 1) from None
    if header.split()[0] != "OFF":
        raise OffParseError(f"expected 'OFF' header, got {header!r}", lineno)
    rest = header.split()[1:]
    if rest:
        counts_line, counts = lineno, rest
    else:
        try:
            counts_line, counts_text = next(lines)
        except StopIteration:
            raise OffParseError("missing counts line", lineno) from None
        counts = counts_text.split()
    try:
        n_v, n_f = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise OffParseError("counts line must be 'V F E'", counts_line) from None
    if n_v <= 0 or n_f <= 0:
        raise OffParseError("vertex and face counts must be positive", counts_line)

    verts = []
    for _ in range(n_v):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise OffParseError(f"expected {n_v} vertices, file ended after {len(verts)}") from None
        parts = line.split()
        try:
            xyz = [float(p) for p in parts]
        except ValueError:
            raise OffParseError(f"bad vertex coordinates {line!r}", lineno) from None
        if len(xyz) != 3:
            raise OffParseError(f"vertex needs 3 coordinates, got {len(xyz)}", lineno)
        verts.append(xyz)

    faces = []
    for _ in range(n_f):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise OffParseError(f"expected {n_f} faces, file ended after {len(faces)}") from None
        try:
            idx = [int(p) for p in line.split()]
        except ValueError:
            raise OffParseError(f"bad face line {line!r}", lineno) from None
        if len(idx) != 4 or idx[0] != 3:
            raise OffParseError("only triangular faces '3 i j k' are supported", lineno)
        if min(idx[1:]) < 0 or max(idx[1:]) >= n_v:
            raise OffParseError(f"face index out of range in {line!r}", lineno)
        faces.append(idx[1:])

    extra = next(lines, None)
    if extra is not None:
        raise OffParseError("unexpected trailing data", extra[0])
    return TriMesh(np.array(verts), np.array(faces))


def load_off(path):
    return parse_off(Path(path).read_text())


def write_off(mesh, path=None):
    out = ["OFF", f"{mesh.n_vertices} {mesh.n_faces} 0"]
    out += [" ".join(repr(float(c)) for c in row) for row in mesh.vertices]
    out += ["3 " + " ".join(str(int(i)) for i in row) for row in mesh.faces]
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# -- invariants --------------------------------------------------------------------


@dataclass(frozen=True)
class EulerReport:
    chi: int
    F: int
    E: int
    V: int

    @property
    def three_f_equals_two_e(self):
        return 3 * self.F == 2 * self.E


def euler_characteristic(mesh):
    """``F - E + V`` together with the counts."""
    F, E, V = mesh.n_faces, len(mesh.edges()), mesh.n_vertices
    report = EulerReport(F - E + V, F, E, V)
    if not report.three_f_equals_two_e:
        raise AssertionError(f"3F = {3 * F} differs from 2E = {2 * E} on a validated mesh")
    return report


def corner_angles(mesh):
    """Interior angle at each corner, shape ``(F, 3)``."""
    v = mesh.vertices[mesh.faces]
    angles = np.empty(mesh.faces.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        for k in range(3):
            a = v[:, (k + 1) % 3] - v[:, k]
            b = v[:, (k + 2) % 3] - v[:, k]
            cos = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            angles[:, k] = np.arccos(np.clip(cos, -1.0, 1.0))
    bad = np.argwhere(~np.isfinite(angles))
    if len(bad):
        raise DegenerateFaceError(f"undefined corner angle in face {int(bad[0][0])}")
    return angles


def angle_defect_chi(mesh, tol=DEFAULT_TOL):
    """``(1/2pi) * sum over vertices of (2pi - incident corner angles)``, snapped."""
    angles = corner_angles(mesh)
    per_vertex = np.zeros(mesh.n_vertices)
    np.add.at(per_vertex, mesh.faces.ravel(), angles.ravel())
    defects = 2 * math.pi - per_vertex
    return snap_integer(math.fsum(defects.tolist()) / (2 * math.pi), tol)


def genus(mesh):
    chi = euler_characteristic(mesh).chi
    if chi % 2 or chi > 2:
        raise NotOrientableSurfaceError(f"chi = {chi} is not of the form 2 - 2g")
    return (2 - chi) // 2


def connected_sum_chi(chi1, chi2):
    for c in (chi1, chi2):
        if c % 2 or c > 2:
            raise ValueError(f"{c} is not the Euler characteristic of a closed orientable surface")
    return chi1 + chi2 - 2


def subdivide(mesh):
    """One round of 1-to-4 midpoint subdivision (positions not projected)."""
    verts = [tuple(p) for p in mesh.vertices.tolist()]
    mid = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in mid:
            mid[key] = len(verts)
            verts.append(tuple(0.5 * (mesh.vertices[a] + mesh.vertices[b])))
        return mid[key]

    faces = []
    for a, b, c in mesh.faces.tolist():
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        faces += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    return TriMesh(np.array(verts), np.array(faces))


# -- smooth surfaces of revolution -------------------------------------------------------


@dataclass(frozen=True)
class SurfaceOfRevolution:
    """Surface swept by the arc-length profile ``u -> (g(u), z(u))``, ``u in [0, length]``.

    ``closure`` is ``"sphere"`` (``g`` vanishes at both ends) or ``"torus"``
    (periodic profile).
    """

    g: Callable
    z: Callable
    length: float
    closure: str = "sphere"
    g2: Optional[Callable] = None

    def __post_init__(self):
        if self.closure not in ("sphere", "torus"):
            raise ValueError("closure must be 'sphere' or 'torus'")
        L = self.length
        u = np.linspace(0.0, L, 65)[1:-1]
        h = 1e-5 * L
        if np.any(np.asarray(self.g(u)) <= 0):
            raise ValueError("profile radius g must be positive inside (0, length)")
        dg = (np.asarray(self.g(u + h)) - np.asarray(self.g(u - h))) / (2 * h)
        dz = (np.asarray(self.z(u + h)) - np.asarray(self.z(u - h))) / (2 * h)
        if np.max(np.abs(dg**2 + dz**2 - 1.0)) > 1e-8:
            raise ValueError("profile is not parametrized by arc length")
        if self.closure == "sphere":
            if abs(float(self.g(0.0))) > 1e-9 or abs(float(self.g(L))) > 1e-9:
                raise ValueError("sphere-like profile must meet the axis at both ends")
        elif abs(float(self.g(L)) - float(self.g(0.0))) > 1e-9 or abs(float(self.z(L)) - float(self.z(0.0))) > 1e-9:
            raise ValueError("torus-like profile must be periodic")

    @classmethod
    def sphere(cls, scale=1.0):
        s = float(scale)
        return cls(lambda u: s * np.sin(u / s), lambda u: -s * np.cos(u / s), math.pi * s, "sphere")

    @classmethod
    def torus(cls, R=2.0, r=1.0):
        if not R > r > 0:
            raise ValueError("need R > r > 0")
        return cls(lambda u: R + r * np.cos(u / r), lambda u: r * np.sin(u / r), 2 * math.pi * r, "torus")


def gauss_bonnet_revolution(surface, grid=(64, 64), tol=DEFAULT_TOL):
    """``(1/2pi) * integral of K dA`` with ``K = -g''/g`` and ``dA = g du dv``, snapped.

    ``grid = (n_u, n_v)``: Gauss-Legendre in ``u`` for sphere-like profiles
    (the poles are never sampled), trapezoid for torus-like ones.
    """
    n_u, n_v = grid
    L = surface.length
    if surface.closure == "sphere":
        u, w_u = gauss_legendre(n_u, 0.0, L)
    else:
        u = np.arange(n_u) * (L / n_u)
        w_u = np.full(n_u, L / n_u)
    v_weights = np.full(n_v, 2 * math.pi / n_v)
    g = np.asarray(surface.g(u), dtype=float)
    if surface.g2 is not None:
        g2 = np.asarray(surface.g2(u), dtype=float)
    else:
        g2 = second_derivative(surface.g, u, 1e-3 * L)
    K = -g2 / g
    integrand = np.multiply.outer(w_u * K * g, v_weights)
    return snap_integer(weighted_sum(1.0, integrand) / (2 * math.pi), tol)
