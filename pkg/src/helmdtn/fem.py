"""P1 finite elements for ``-(Laplace + kappa^2) u = f`` on the annulus with a DtN boundary condition.

Weak form on the annulus, tested with ``v = 0`` on the inner boundary::

    (grad u, grad v) - kappa^2 (u, v) - <Lambda u, v>_{artificial circle} = (f, v)

The last term is realized either as ``M_b @ Lambda`` with ``M_b`` the 1-D
P1 mass matrix of the boundary polygon (``coupling="galerkin"``, the
default), or as ``Lambda`` itself (``coupling="literal"``), which drops the
boundary mass matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .dtn import DtnMap
from .mesh import TriMesh, validate_mesh

COUPLINGS = ("galerkin", "literal")
RESIDUAL_TOL = 1e-8


class FemError(RuntimeError):
    """Assembly inputs are inconsistent or the linear solve failed."""


@dataclass(frozen=True, eq=False)
class FemSystem:
    """Assembled system over all mesh nodes.

    ``A`` holds stiffness minus ``kappa^2`` times mass; the DtN coupling is
    kept apart in ``dtn_block`` (``N x N``, indexed like ``mesh.gamma0_nodes``)
    and enters the solve as ``A[g0, g0] - dtn_block``.
    """

    mesh: TriMesh
    kappa: float
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    A: sp.csr_matrix
    M_gamma0: sp.csr_matrix
    dtn_block: np.ndarray
    load: np.ndarray
    dirichlet: np.ndarray
    coupling: str = "galerkin"

    def full_matrix(self) -> sp.csr_matrix:
        """``A`` with the DtN block subtracted in the (artificial, artificial) position."""
        g0 = self.mesh.gamma0_nodes
        rows = np.repeat(g0, g0.size)
        cols = np.tile(g0, g0.size)
        D = sp.coo_matrix(
            (self.dtn_block.ravel(), (rows, cols)), shape=self.A.shape
        ).tocsr()
        return (self.A - D).tocsr()


@dataclass(frozen=True, eq=False)
class FemSolution:
    mesh: TriMesh
    u: np.ndarray
    residual: float = 0.0


def _gradients(mesh: TriMesh):
    p = mesh.nodes[mesh.triangles]
    x, y = p[..., 0], p[..., 1]
    area = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    # grad phi_i = (y_j - y_k, x_k - x_j) / (2 area), (i, j, k) cyclic
    bx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    by = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    return area, bx / (2 * area[:, None]), by / (2 * area[:, None])


def _scatter(mesh: TriMesh, local: np.ndarray) -> sp.csr_matrix:
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    V = mesh.n_nodes
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(V, V)).tocsr()


def stiffness_matrix(mesh: TriMesh) -> sp.csr_matrix:
    area, gx, gy = _gradients(mesh)
    local = area[:, None, None] * (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :])
    return _scatter(mesh, local)


def mass_matrix(mesh: TriMesh) -> sp.csr_matrix:
    area, _, _ = _gradients(mesh)
    ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    return _scatter(mesh, area[:, None, None] * ref[None])


def boundary_mass_matrix(mesh: TriMesh) -> sp.csr_matrix:
    """1-D P1 mass on the closed polygon through ``mesh.gamma0_nodes`` (``N x N``, cyclic tridiagonal)."""
    g0 = mesh.gamma0_nodes
    N = g0.size
    pts = mesh.nodes[g0]
    nxt = np.roll(np.arange(N), -1)
    L = np.linalg.norm(pts[nxt] - pts, axis=1)
    i, j = np.arange(N), nxt
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([i, j, j, i])
    vals = np.concatenate([L / 3, L / 3, L / 6, L / 6])
    return sp.coo_matrix((vals, (rows, cols)), shape=(N, N)).tocsr()


def load_vector(mesh: TriMesh, f: Callable, quadrature: str = "edge-midpoint") -> np.ndarray:
    """``(f, phi_i)`` by the 3-point edge-midpoint rule or by nodal interpolation (``"nodal"``)."""
    V = mesh.n_nodes
    if quadrature == "nodal":
        fn = np.asarray(f(mesh.nodes), dtype=complex)
        return mass_matrix(mesh) @ fn
    if quadrature != "edge-midpoint":
        raise ValueError(f"unknown quadrature {quadrature!r}")
    t = mesh.triangles
    p = mesh.nodes[t]
    area = np.abs(mesh.signed_areas())
    mid = np.stack([(p[:, 1] + p[:, 2]) / 2, (p[:, 2] + p[:, 0]) / 2, (p[:, 0] + p[:, 1]) / 2], axis=1)
    fm = np.asarray(f(mid.reshape(-1, 2)), dtype=complex).reshape(-1, 3)
    # phi_i is 1/2 at the two midpoints of edges touching node i and 0 at the third
    w = area / 3.0
    local = np.stack(
        [0.5 * (fm[:, 1] + fm[:, 2]), 0.5 * (fm[:, 2] + fm[:, 0]), 0.5 * (fm[:, 0] + fm[:, 1])], axis=1
    ) * w[:, None]
    out = np.zeros(V, dtype=complex)
    np.add.at(out, t.ravel(), local.ravel())
    return out


def _zero(points):
    return np.zeros(len(points), dtype=complex)


def assemble(
    mesh: TriMesh,
    kappa: float,
    f: Callable | None,
    g: Callable | None,
    dtn: DtnMap | None,
    coupling: str = "galerkin",
    quadrature: str = "edge-midpoint",
) -> FemSystem:
    """Assemble the TBC system.

    Parameters
    ----------
    f, g : callables mapping an ``(n, 2)`` array of points to ``n`` values,
        or None for zero data.
    dtn : DtnMap or None
        ``None`` drops the boundary term entirely (homogeneous Neumann on
        the outer circle); used for sanity checks.
    """
    if coupling not in COUPLINGS:
        raise ValueError(f"coupling must be one of {COUPLINGS}, got {coupling!r}")
    N = mesh.gamma0_nodes.size
    if dtn is not None:
        if dtn.N != N:
            raise FemError(f"mesh has {N} artificial-boundary nodes but the DtN map has N={dtn.N}")
        if abs(dtn.geom.R0 - mesh.R0) > 1e-12 * mesh.R0:
            raise FemError(f"mesh R0={mesh.R0} differs from DtN R0={dtn.geom.R0}")
        if abs(dtn.geom.kappa - kappa) > 1e-12 * kappa:
            raise FemError(f"DtN map built for kappa={dtn.geom.kappa}, assembling kappa={kappa}")
    validate_mesh(mesh, expected_n=N)

    K = stiffness_matrix(mesh)
    M = mass_matrix(mesh)
    A = (K - kappa**2 * M).astype(complex).tocsr()
    Mb = boundary_mass_matrix(mesh)
    if dtn is None:
        block = np.zeros((N, N), dtype=complex)
    else:
        lam = dtn.to_dense()
        block = Mb @ lam if coupling == "galerkin" else lam
    load = load_vector(mesh, f or _zero, quadrature)
    gvals = np.asarray((g or _zero)(mesh.nodes[mesh.gamma_nodes]), dtype=complex)
    return FemSystem(mesh, float(kappa), K, M, A, Mb, np.asarray(block), load, gvals, coupling)


def solve(system: FemSystem) -> FemSolution:
    """Eliminate the Dirichlet nodes, factorize the reduced complex system with SuperLU and re-insert ``g``."""
    mesh = system.mesh
    V = mesh.n_nodes
    fixed = mesh.gamma_nodes
    free_mask = np.ones(V, dtype=bool)
    free_mask[fixed] = False
    free = np.flatnonzero(free_mask)

    full = system.full_matrix()
    A_ff = full[free][:, free].tocsc()
    A_fd = full[free][:, fixed]
    rhs = system.load[free] - A_fd @ system.dirichlet
    try:
        lu = spla.splu(A_ff)
    except RuntimeError as exc:
        raise FemError(f"factorization failed: {exc}") from exc
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise FemError("factorization produced non-finite values")
    scale = np.abs(rhs).max()
    res = np.abs(A_ff @ x - rhs).max() / scale if scale > 0 else np.abs(A_ff @ x).max()
    if res > RESIDUAL_TOL:
        warnings.warn(f"relative residual {res:.2e} exceeds {RESIDUAL_TOL:.0e}", RuntimeWarning, stacklevel=2)
    u = np.empty(V, dtype=complex)
    u[free] = x
    u[fixed] = system.dirichlet
    return FemSolution(mesh, u, float(res))


def nodal_max_error(solution: FemSolution, exact: Callable) -> float:
    ue = np.asarray(exact(solution.mesh.nodes), dtype=complex)
    return float(np.abs(solution.u - ue).max())


def nodal_errors(solution: FemSolution, exact: Callable) -> np.ndarray:
    return np.abs(solution.u - np.asarray(exact(solution.mesh.nodes), dtype=complex))


def export_solution(solution: FemSolution, path, exact: Callable | None = None) -> None:
    """CSV ``node_index,x,y,re_u,im_u`` (plus exact and error columns when ``exact`` is given)."""
    mesh = solution.mesh
    u = solution.u
    cols = [np.arange(mesh.n_nodes), mesh.nodes[:, 0], mesh.nodes[:, 1], u.real, u.imag]
    header = "node_index,x,y,re_u,im_u"
    if exact is not None:
        ue = np.asarray(exact(mesh.nodes), dtype=complex)
        cols += [ue.real, ue.imag, np.abs(u - ue)]
        header += ",re_exact,im_exact,abs_error"
    _write_columns(path, header, cols)


def sample_on_grid(solution: FemSolution, n: int, extent: float | None = None):
    """Linear interpolation of ``u_h`` onto an ``n x n`` grid over ``[-extent, extent]^2``.

    Points outside the mesh come back as NaN.  Returns ``(x, y, values)``
    with flattened coordinate arrays.
    """
    mesh = solution.mesh
    extent = mesh.R0 if extent is None else extent
    g = np.linspace(-extent, extent, n)
    X, Y = np.meshgrid(g, g)
    q = np.column_stack([X.ravel(), Y.ravel()])
    tri, lam = locate_points(mesh, q)
    vals = np.full(q.shape[0], np.nan + 0j)
    hit = tri >= 0
    vals[hit] = np.einsum("ij,ij->i", lam[hit], solution.u[mesh.triangles[tri[hit]]])
    return q[:, 0], q[:, 1], vals


def locate_points(mesh: TriMesh, q: np.ndarray, k: int = 12, tol: float = 1e-12):
    """Containing triangle (or -1) and barycentric coordinates for each query point."""
    from scipy.spatial import cKDTree

    p = mesh.nodes[mesh.triangles]
    tree = cKDTree(p.mean(axis=1))
    k = min(k, mesh.n_triangles)
    _, cand = tree.query(q, k=k)
    cand = cand.reshape(q.shape[0], k)
    found = np.full(q.shape[0], -1)
    bary = np.zeros((q.shape[0], 3))
    for c in range(k):
        todo = found < 0
        if not todo.any():
            break
        t = cand[todo, c]
        a, b, d = p[t, 0], p[t, 1], p[t, 2]
        det = (b[:, 0] - a[:, 0]) * (d[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (d[:, 0] - a[:, 0])
        rx, ry = q[todo, 0] - a[:, 0], q[todo, 1] - a[:, 1]
        l1 = (rx * (d[:, 1] - a[:, 1]) - ry * (d[:, 0] - a[:, 0])) / det
        l2 = ((b[:, 0] - a[:, 0]) * ry - (b[:, 1] - a[:, 1]) * rx) / det
        lam = np.column_stack([1 - l1 - l2, l1, l2])
        ok = np.all(lam >= -tol, axis=1)
        idx = np.flatnonzero(todo)[ok]
        found[idx] = t[ok]
        bary[idx] = lam[ok]
    return found, bary


def export_grid(solution: FemSolution, path, n: int, extent: float | None = None) -> None:
    x, y, v = sample_on_grid(solution, n, extent)
    _write_columns(path, "node_index,x,y,re_u,im_u", [np.arange(x.size), x, y, v.real, v.imag])


def _write_columns(path, header: str, cols) -> None:
    rows = np.column_stack(cols)
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(f"{int(row[0])}," + ",".join(repr(float(v)) for v in row[1:]) + "\n")
