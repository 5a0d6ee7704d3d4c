"""Triangulations of the annulus between a star-shaped curve and the circle ``|z| = R0``.

The default generator is a mapped structured mesh: ``N`` rays at the
collocation angles ``2 pi k / N`` crossed with ``layers + 1`` radial levels
interpolating between ``R(theta_k)`` and ``R0``.  The outermost level
therefore lands exactly on the DtN collocation points, which is the one
property the FEM/DtN coupling relies on.

Text format (whitespace separated, zero-based indices)::

    nodes <V> triangles <T>
    x y                 (V lines)
    i j k               (T lines, counterclockwise)
    gamma: i0 i1 ...
    gamma0: j0 j1 ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import TWO_PI, GeometryError, StarBoundary, circle, in_annulus


class MeshError(ValueError):
    """Mesh file could not be parsed or violates a mesh invariant."""


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangulated annulus with tagged boundary node lists.

    Attributes
    ----------
    nodes : ndarray, shape (V, 2)
    triangles : ndarray of int, shape (T, 3)
        Counterclockwise node triples.
    gamma_nodes : ndarray of int
        Nodes on the inner (Dirichlet) boundary.
    gamma0_nodes : ndarray of int
        The ``N`` nodes on the artificial circle, in angular order from ``theta = 0``.
    R0 : float
    curve : StarBoundary or None
    """

    nodes: np.ndarray
    triangles: np.ndarray
    gamma_nodes: np.ndarray
    gamma0_nodes: np.ndarray
    R0: float
    curve: StarBoundary | None = None

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        a, b, c = p[:, 0], p[:, 1], p[:, 2]
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted index pairs."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def interior_nodes(self) -> np.ndarray:
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[self.gamma_nodes] = False
        mask[self.gamma0_nodes] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True)
class MeshQuality:
    h_max: float
    min_angle: float
    node_count: int
    element_count: int


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


def radial_levels(layers: int, grading: float = 1.0) -> np.ndarray:
    """Parameters ``0 = s_0 < ... < s_layers = 1``; ``grading > 1`` shrinks the inner layers geometrically."""
    if grading == 1.0:
        return np.linspace(0.0, 1.0, layers + 1)
    w = grading ** np.arange(layers)
    s = np.concatenate([[0.0], np.cumsum(w)])
    return s / s[-1]


def generate_mapped_mesh(
    curve: StarBoundary, R0: float, N: int, layers: int, grading: float = 1.0
) -> TriMesh:
    """Structured annulus mesh with ``N * (layers + 1)`` nodes and ``2 N layers`` triangles.

    Node ``l * N + k`` sits at ``((1 - s_l) R(theta_k) + s_l R0) exp(i theta_k)``.
    Each quad is split along its shorter diagonal; ties go to the
    ``(k, l) -> (k + 1, l + 1)`` diagonal.
    """
    if N < 8 or layers < 2:
        raise GeometryError(f"need N >= 8 and layers >= 2, got N={N}, layers={layers}")
    if curve.max_radius() >= R0:
        raise GeometryError(f"boundary {curve.name!r} reaches the artificial circle R0={R0}")
    theta = np.arange(N) * (TWO_PI / N)
    r_in = curve.radius(theta)
    s = radial_levels(layers, grading)
    radii = (1.0 - s[:, None]) * r_in[None, :] + s[:, None] * R0
    radii[-1] = R0
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    nodes = np.stack([radii * cos_t, radii * sin_t], axis=-1).reshape(-1, 2)

    k = np.arange(N)
    kp = (k + 1) % N
    tris = []
    for lev in range(layers):
        a = lev * N + k  # (k, l)
        b = lev * N + kp  # (k+1, l)
        c = (lev + 1) * N + kp  # (k+1, l+1)
        d = (lev + 1) * N + k  # (k, l+1)
        diag_ac = np.linalg.norm(nodes[a] - nodes[c], axis=1)
        diag_bd = np.linalg.norm(nodes[b] - nodes[d], axis=1)
        use_ac = diag_ac <= diag_bd
        t1 = np.where(use_ac[:, None], np.stack([a, b, c], 1), np.stack([a, b, d], 1))
        t2 = np.where(use_ac[:, None], np.stack([a, c, d], 1), np.stack([b, c, d], 1))
        tris.extend([t1, t2])
    triangles = np.concatenate(tris)
    mesh = TriMesh(nodes, triangles, k.copy(), layers * N + k, float(R0), curve)
    area = mesh.signed_areas()
    flip = area < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    validate_mesh(mesh)
    return mesh


def layers_for_h(curve: StarBoundary, R0: float, N: int, h: float) -> int:
    """Smallest layer count whose uniform structured mesh has ``h_max <= h``, or a ``GeometryError``."""
    arc = 2.0 * R0 * math.sin(math.pi / N)
    if arc >= h:
        raise GeometryError(f"N={N} gives boundary spacing {arc:.4f} >= h={h}")
    start = max(2, math.ceil((R0 - curve.min_radius()) / h))
    for layers in range(start, start + 10 * start + 100):
        m = generate_mapped_mesh(curve, R0, N, layers)
        if mesh_quality(m).h_max <= h:
            return layers
    raise GeometryError(f"no layer count reaches h={h}")


# ---------------------------------------------------------------------------
# validation and quality
# ---------------------------------------------------------------------------


def validate_mesh(mesh: TriMesh, expected_n: int | None = None, atol: float = 1e-12) -> None:
    """Run every structural check; raise ``MeshError`` naming the first violated invariant."""
    V = mesh.n_nodes
    t = mesh.triangles
    if t.size and (t.min() < 0 or t.max() >= V):
        raise MeshError("triangle references a node index out of range")
    area = mesh.signed_areas()
    bad = np.flatnonzero(area <= 0)
    if bad.size:
        raise MeshError(f"orientation: triangle {bad[0]} has non-positive signed area {area[bad[0]]:.3e}")

    # conformity: every interior edge shared by exactly two triangles, boundary edges by one
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    edges, counts = np.unique(np.sort(e, axis=1), axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("conformity: an edge is shared by more than two triangles")
    boundary_edge_nodes = np.unique(edges[counts == 1])
    tagged = np.union1d(mesh.gamma_nodes, mesh.gamma0_nodes)
    if not np.array_equal(boundary_edge_nodes, tagged):
        raise MeshError("conformity: boundary edges do not coincide with the tagged boundary nodes")

    used = np.unique(t)
    if used.size != V:
        raise MeshError("conformity: mesh has nodes not referenced by any triangle")
    euler = V - edges.shape[0] + t.shape[0]
    if euler != 0:
        raise MeshError(f"euler: V - E + T = {euler}, expected 0 for an annulus")

    N = mesh.gamma0_nodes.size
    if expected_n is not None and N != expected_n:
        raise MeshError(f"count: mesh has {N} artificial-boundary nodes, DtN map expects {expected_n}")
    ang = TWO_PI * np.arange(N) / N
    target = mesh.R0 * np.column_stack([np.cos(ang), np.sin(ang)])
    dev = np.abs(mesh.nodes[mesh.gamma0_nodes] - target).max() if N else 0.0
    if dev > atol * max(1.0, mesh.R0):
        raise MeshError(f"collocation alignment: artificial-boundary nodes deviate by {dev:.3e}")

    if mesh.curve is not None:
        interior = mesh.interior_nodes()
        inside = in_annulus(mesh.curve, mesh.R0, mesh.nodes[interior])
        if not np.all(inside):
            raise MeshError(f"interior node {interior[~inside][0]} lies outside the annulus")


def mesh_quality(mesh: TriMesh) -> MeshQuality:
    p = mesh.nodes[mesh.triangles]
    lengths = np.stack(
        [
            np.linalg.norm(p[:, 1] - p[:, 2], axis=1),
            np.linalg.norm(p[:, 2] - p[:, 0], axis=1),
            np.linalg.norm(p[:, 0] - p[:, 1], axis=1),
        ],
        axis=1,
    )
    a, b, c = lengths[:, 0], lengths[:, 1], lengths[:, 2]
    # law of cosines for the angle opposite each side
    cosines = np.stack(
        [(b**2 + c**2 - a**2) / (2 * b * c), (a**2 + c**2 - b**2) / (2 * a * c), (a**2 + b**2 - c**2) / (2 * a * b)],
        axis=1,
    )
    angles = np.degrees(np.arccos(np.clip(cosines, -1.0, 1.0)))
    return MeshQuality(
        h_max=float(lengths.max()),
        min_angle=float(angles.min()),
        node_count=mesh.n_nodes,
        element_count=mesh.n_triangles,
    )


# ---------------------------------------------------------------------------
# text I/O
# ---------------------------------------------------------------------------


def export_mesh(mesh: TriMesh, path) -> None:
    lines = [f"nodes {mesh.n_nodes} triangles {mesh.n_triangles}"]
    lines += [f"{x!r} {y!r}" for x, y in mesh.nodes.tolist()]
    lines += [f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    lines.append("gamma: " + " ".join(map(str, mesh.gamma_nodes.tolist())))
    lines.append("gamma0: " + " ".join(map(str, mesh.gamma0_nodes.tolist())))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_error(lineno: int, msg: str) -> MeshError:
    return MeshError(f"line {lineno}: {msg}")


def import_mesh(
    path,
    R0: float | None = None,
    curve: StarBoundary | None = None,
    expected_n: int | None = None,
) -> TriMesh:
    """Read and validate a mesh in the text format.

    If the file omits boundary lists (or they are empty), boundary nodes are
    detected geometrically: ``| |p| - R0 | <= 1e-8`` for the circle and a
    relative ``1e-6`` match to ``R(theta)`` for the inner curve.  Artificial
    boundary nodes are always re-sorted by angle.
    """
    raw = Path(path).read_text(encoding="utf-8").split("\n")
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise MeshError("line 1: empty file")
    lineno, head = lines[0]
    tok = head.split()
    if len(tok) != 4 or tok[0] != "nodes" or tok[2] != "triangles":
        raise _parse_error(lineno, "expected header 'nodes <V> triangles <T>'")
    try:
        V, T = int(tok[1]), int(tok[3])
    except ValueError:
        raise _parse_error(lineno, "non-integer counts in header") from None
    if len(lines) < 1 + V + T:
        raise _parse_error(lines[-1][0], f"file ends early: need {V} node and {T} triangle lines")

    nodes = np.empty((V, 2))
    for i in range(V):
        lineno, ln = lines[1 + i]
        parts = ln.split()
        if len(parts) != 2:
            raise _parse_error(lineno, f"expected 'x y', got {ln!r}")
        try:
            nodes[i] = float(parts[0]), float(parts[1])
        except ValueError:
            raise _parse_error(lineno, f"bad coordinate in {ln!r}") from None
    triangles = np.empty((T, 3), dtype=np.int64)
    for i in range(T):
        lineno, ln = lines[1 + V + i]
        parts = ln.split()
        if len(parts) != 3:
            raise _parse_error(lineno, f"expected 'i j k', got {ln!r}")
        try:
            triangles[i] = [int(p) for p in parts]
        except ValueError:
            raise _parse_error(lineno, f"bad index in {ln!r}") from None

    tags: dict[str, np.ndarray] = {}
    for lineno, ln in lines[1 + V + T :]:
        key, sep, rest = ln.partition(":")
        if not sep or key.strip() not in ("gamma", "gamma0"):
            raise _parse_error(lineno, f"expected 'gamma:' or 'gamma0:' line, got {ln!r}")
        try:
            tags[key.strip()] = np.array([int(v) for v in rest.split()], dtype=np.int64)
        except ValueError:
            raise _parse_error(lineno, "bad index in boundary list") from None

    r = np.hypot(nodes[:, 0], nodes[:, 1])
    if R0 is None:
        if tags.get("gamma0") is not None and tags["gamma0"].size:
            R0 = float(np.mean(r[tags["gamma0"]]))
        else:
            R0 = float(r.max())
    gamma0 = tags.get("gamma0")
    if gamma0 is None or gamma0.size == 0:
        gamma0 = np.flatnonzero(np.abs(r - R0) <= 1e-8)
    gamma = tags.get("gamma")
    if gamma is None or gamma.size == 0:
        if curve is None:
            curve = circle(float(r.min()))
        rc = curve.radius(np.arctan2(nodes[:, 1], nodes[:, 0]))
        gamma = np.flatnonzero(np.abs(r - rc) <= 1e-6 * rc)
    ang = np.mod(np.arctan2(nodes[gamma0, 1], nodes[gamma0, 0]), TWO_PI)
    # nodes a hair below 2*pi belong at angle 0
    ang = np.where(ang > TWO_PI - 1e-9, 0.0, ang)
    gamma0 = gamma0[np.argsort(ang, kind="stable")]

    mesh = TriMesh(nodes, triangles, np.asarray(gamma), gamma0, float(R0), curve)
    validate_mesh(mesh, expected_n=expected_n, atol=1e-8)
    return mesh
