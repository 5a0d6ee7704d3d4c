"""MFS discretization of the exterior Dirichlet problem and the discrete DtN map.

With ``N`` sources on the circle ``|zeta| = rho`` and ``N`` collocation
points on ``|z| = R0``, both equally spaced, the collocation matrix
``C0[k, j] = Phi(z_k, zeta_j)`` and the normal-derivative matrix
``C1[k, j] = dPhi/dn(z_k, zeta_j)`` are symmetric circulants.  The discrete
DtN map ``C1 @ inv(C0)`` is therefore the circulant whose eigenvalues are
``dft(c1) / dft(c0)``, and everything below works with that spectral vector.

``Phi(z, zeta) = (i/4) H0(kappa |z - zeta|)`` is the outgoing fundamental
solution of ``-(Laplace + kappa^2)``.  Sources never come closer than
``R0 - rho`` to any evaluation point, so no singular quadrature is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import circulant as circ
from .geometry import MfsGeometry, source_points
from .special_functions import hankel1

DENSE_CAP = 4096
EVAL_CHUNK = 8192


class DenseCapExceeded(MemoryError):
    """Dense construction refused above the configured size cap."""


def _fundamental(kappa, dist):
    return 0.25j * hankel1(0, kappa * dist)


@dataclass(frozen=True, eq=False)
class MfsKernelColumns:
    """First columns of ``C0`` and ``C1``."""

    c0: np.ndarray
    c1: np.ndarray
    geom: MfsGeometry


@dataclass(frozen=True, eq=False)
class DtnMap:
    """Discrete DtN map held as its spectral vector ``rhat = dft(c1) / dft(c0)``."""

    rhat: np.ndarray
    geom: MfsGeometry

    def __post_init__(self):
        r = np.asarray(self.rhat, dtype=complex).copy()
        r.setflags(write=False)
        object.__setattr__(self, "rhat", r)

    @property
    def N(self) -> int:
        return self.geom.N

    def first_column(self) -> np.ndarray:
        return circ.idft(self.rhat)

    def as_circulant(self) -> circ.CirculantMatrix:
        return circ.CirculantMatrix(self.first_column())

    def to_dense(self) -> np.ndarray:
        return self.as_circulant().to_dense()

    def apply(self, lam) -> np.ndarray:
        return apply_dtn(self, lam)


@dataclass(frozen=True, eq=False)
class MfsSolution:
    """Expansion coefficients ``alpha`` of ``v(z) = sum_j alpha_j Phi(z, zeta_j)``."""

    alpha: np.ndarray
    geom: MfsGeometry


def kernel_columns(geom: MfsGeometry) -> MfsKernelColumns:
    """Evaluate the first columns of ``C0`` and ``C1`` in O(N) kernel calls.

    ``c0[m] = (i/4) H0(kappa d_m)`` and
    ``c1[m] = -(i kappa / 4) H1(kappa d_m) (R0 - rho cos(2 pi m / N)) / d_m``,
    where ``d_m = |z_m - zeta_0|``; the last factor is ``(z_m - zeta_0) . n(z_m)``.
    """
    d = geom.pair_distances()
    m = np.arange(geom.N)
    t = np.minimum(m, geom.N - m) * (2.0 * np.pi / geom.N)
    kd = geom.kappa * d
    c0 = 0.25j * hankel1(0, kd)
    c1 = -0.25j * geom.kappa * hankel1(1, kd) * (geom.R0 - geom.rho * np.cos(t)) / d
    return MfsKernelColumns(np.atleast_1d(c0), np.atleast_1d(c1), geom)


def build_dtn_fft(geom: MfsGeometry, rtol: float = circ.SINGULAR_RTOL) -> DtnMap:
    """Spectral DtN map from two FFTs and one Hadamard division."""
    return dtn_from_columns(kernel_columns(geom), rtol)


def dtn_from_columns(cols: MfsKernelColumns, rtol: float = circ.SINGULAR_RTOL) -> DtnMap:
    """``rhat = dft(c1) / dft(c0)``, raising ``SingularCirculant`` on a vanishing ``dft(c0)`` mode."""
    c0_hat = circ.dft(cols.c0)
    circ.check_spectrum(c0_hat, rtol)
    return DtnMap(circ.dft(cols.c1) / c0_hat, cols.geom)


def collocation_condition(geom: MfsGeometry) -> float:
    """2-norm condition number of ``C0``, exact from its spectrum: ``max|dft(c0)| / min|dft(c0)|``."""
    mod = np.abs(circ.dft(kernel_columns(geom).c0))
    return float(mod.max() / mod.min()) if mod.min() > 0 else float("inf")


def dense_kernel_matrices(geom: MfsGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Materialize ``C0`` and ``C1`` entry by entry from point coordinates."""
    if geom.N > DENSE_CAP:
        raise DenseCapExceeded(f"N={geom.N} exceeds dense cap {DENSE_CAP}")
    z = geom.R0 * np.exp(2j * np.pi * np.arange(geom.N) / geom.N)
    zeta = geom.rho * np.exp(2j * np.pi * np.arange(geom.N) / geom.N)
    diff = z[:, None] - zeta[None, :]
    dist = np.abs(diff)
    normal = z / geom.R0
    proj = (diff * np.conj(normal)[:, None]).real
    C0 = _fundamental(geom.kappa, dist)
    C1 = -0.25j * geom.kappa * hankel1(1, geom.kappa * dist) * proj / dist
    return C0, C1


def build_dtn_direct(geom: MfsGeometry) -> np.ndarray:
    """Dense ``C1 @ inv(C0)`` via LU; O(N^3), the baseline the FFT build is compared to."""
    return dtn_from_matrices(*dense_kernel_matrices(geom))


def dtn_from_matrices(C0: np.ndarray, C1: np.ndarray) -> np.ndarray:
    """``C1 @ inv(C0)`` from one LU factorization of ``C0^T`` and ``N`` triangular solves."""
    if C0.shape[0] > DENSE_CAP:
        raise DenseCapExceeded(f"N={C0.shape[0]} exceeds dense cap {DENSE_CAP}")
    # C1 C0^{-1} = (C0^{-T} C1^T)^T
    lu, piv = scipy.linalg.lu_factor(C0.T, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.min() <= np.finfo(float).eps * diag.max():
        raise np.linalg.LinAlgError("collocation matrix is numerically singular")
    return scipy.linalg.lu_solve((lu, piv), C1.T, check_finite=False).T


def apply_dtn(dtn: DtnMap, lam) -> np.ndarray:
    """Approximate normal derivative ``idft(rhat * dft(lam))`` at the collocation points."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (dtn.N,):
        raise ValueError(f"expected {dtn.N} boundary values, got shape {lam.shape}")
    return circ.idft(dtn.rhat * circ.dft(lam))


def solve_mfs_coefficients(
    geom: MfsGeometry, lam, rtol: float = circ.SINGULAR_RTOL
) -> MfsSolution:
    """Collocation coefficients ``alpha = idft(dft(lam) / dft(c0))``."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (geom.N,):
        raise ValueError(f"expected {geom.N} boundary values, got shape {lam.shape}")
    c0 = kernel_columns(geom).c0
    alpha = circ.circ_solve(circ.CirculantMatrix(c0), lam, rtol)
    return MfsSolution(alpha, geom)


def eval_exterior_field(sol: MfsSolution, points, chunk: int = EVAL_CHUNK) -> np.ndarray:
    """Evaluate ``v_N`` at points with ``|p| >= R0``.

    Points are ``(..., 2)``; the work is chunked so memory stays at
    ``chunk * N`` complex entries.
    """
    geom = sol.geom
    pts = np.asarray(points, dtype=float)
    shape = pts.shape[:-1]
    pts = pts.reshape(-1, 2)
    r = np.hypot(pts[:, 0], pts[:, 1])
    if np.any(r < geom.R0 * (1.0 - 1e-12)):
        raise ValueError("exterior field is only defined for |p| >= R0")
    zeta = source_points(geom)
    out = np.empty(pts.shape[0], dtype=complex)
    for s in range(0, pts.shape[0], chunk):
        p = pts[s : s + chunk]
        dist = np.hypot(p[:, 0, None] - zeta[None, :, 0], p[:, 1, None] - zeta[None, :, 1])
        out[s : s + chunk] = _fundamental(geom.kappa, dist) @ sol.alpha
    return out.reshape(shape)


def eval_exterior_normal_derivative(sol: MfsSolution, theta) -> np.ndarray:
    """``dv_N/dn`` at ``R0 exp(i theta)`` on the artificial boundary."""
    geom = sol.geom
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    z = geom.R0 * np.exp(1j * theta)
    zeta = geom.rho * np.exp(2j * np.pi * np.arange(geom.N) / geom.N)
    out = np.empty(theta.shape, dtype=complex)
    flat_z, flat_out = z.ravel(), out.reshape(-1)
    for s in range(0, flat_z.size, EVAL_CHUNK):
        zz = flat_z[s : s + EVAL_CHUNK]
        diff = zz[:, None] - zeta[None, :]
        dist = np.abs(diff)
        proj = (diff * np.conj(zz / geom.R0)[:, None]).real
        kern = -0.25j * geom.kappa * hankel1(1, geom.kappa * dist) * proj / dist
        flat_out[s : s + EVAL_CHUNK] = kern @ sol.alpha
    return out
