"""Manufactured exact solution ``u = u_c + u_r`` for the inhomogeneous exterior problem.

``u_c = chi(r) p(x, y)`` is smooth and vanishes for ``r >= R2``; ``u_r`` is a
single outgoing Fourier-Hankel mode normalized to ``beta exp(i m theta)`` on
``r = R0``.  The source ``f = -(Laplace + kappa^2) u`` only sees ``u_c`` and
is evaluated from closed-form derivatives, never by numerical
differentiation.  Points are ``(..., 2)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special_functions import hankel1

KX, PHASE_X = 2.1, 0.3
KY, PHASE_Y = 1.7, -0.2
LIN_X, LIN_Y = 0.15, 0.10


@dataclass(frozen=True)
class ManufacturedConfig:
    kappa: float = 8.0
    R0: float = 3.0
    R1: float = 0.72 * 3.0
    R2: float = 0.88 * 3.0
    m: int = 2
    beta: complex = 0.35 + 0.20j

    def __post_init__(self):
        if not 0 < self.R1 < self.R2 < self.R0:
            raise ValueError(f"need 0 < R1 < R2 < R0, got {self.R1}, {self.R2}, {self.R0}")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    @classmethod
    def paper64(cls) -> "ManufacturedConfig":
        return cls(kappa=8.0, R0=3.0, R1=0.72 * 3.0, R2=0.88 * 3.0, m=2, beta=0.35 + 0.20j)

    @classmethod
    def scaled(cls, kappa: float, R0: float, m: int = 2, beta: complex = 0.35 + 0.20j):
        """Cutoff radii at ``0.72 R0`` and ``0.88 R0``."""
        return cls(kappa=kappa, R0=R0, R1=0.72 * R0, R2=0.88 * R0, m=m, beta=beta)


def blend_S(s):
    """Quintic smoothstep ``10 s^3 - 15 s^4 + 6 s^5`` on ``[0, 1]``."""
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise ValueError("blend_S is defined on [0, 1]")
    out = s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
    return out[()] if out.ndim == 0 else out


def _blend_derivs(s):
    s1 = 30.0 * s**2 * (1.0 - s) ** 2
    s2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    return s1, s2


def cutoff_chi(r, cfg: ManufacturedConfig):
    """``chi(r)`` with its first and second radial derivatives."""
    r = np.asarray(r, dtype=float)
    width = cfg.R2 - cfg.R1
    band = (r > cfg.R1) & (r < cfg.R2)
    s = np.where(band, (r - cfg.R1) / width, 0.0)
    S = s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
    S1, S2 = _blend_derivs(s)
    chi = np.where(r <= cfg.R1, 1.0, np.where(band, 1.0 - S, 0.0))
    d1 = np.where(band, -S1 / width, 0.0)
    d2 = np.where(band, -S2 / width**2, 0.0)
    if chi.ndim == 0:
        return chi[()], d1[()], d2[()]
    return chi, d1, d2


def profile_p(point):
    """``p``, its gradient (``(..., 2)``) and its Laplacian."""
    pt = np.asarray(point, dtype=float)
    x, y = pt[..., 0], pt[..., 1]
    cx, sx = np.cos(KX * x + PHASE_X), np.sin(KX * x + PHASE_X)
    cy, sy = np.cos(KY * y + PHASE_Y), np.sin(KY * y + PHASE_Y)
    val = cx * sy + LIN_X * x + LIN_Y * y
    grad = np.stack([-KX * sx * sy + LIN_X, KY * cx * cy + LIN_Y], axis=-1)
    lap = -(KX**2 + KY**2) * cx * sy
    return val, grad, lap


def u_compact(point, cfg: ManufacturedConfig):
    pt = np.asarray(point, dtype=float)
    chi, _, _ = cutoff_chi(np.hypot(pt[..., 0], pt[..., 1]), cfg)
    p, _, _ = profile_p(pt)
    return chi * p


def _polar(point):
    pt = np.asarray(point, dtype=float)
    r = np.hypot(pt[..., 0], pt[..., 1])
    if np.any(r == 0):
        raise ValueError("the radiating mode is singular at the origin")
    return r, np.arctan2(pt[..., 1], pt[..., 0])


def u_radiating(point, cfg: ManufacturedConfig):
    """``beta H_m(kappa r) / H_m(kappa R0) exp(i m theta)``."""
    r, theta = _polar(point)
    return cfg.beta * hankel1(cfg.m, cfg.kappa * r) / hankel1(cfg.m, cfg.kappa * cfg.R0) * np.exp(1j * cfg.m * theta)


def source_f(point, cfg: ManufacturedConfig):
    """``f = -(p lap(chi) + 2 grad(chi).grad(p) + chi lap(p) + kappa^2 chi p)``.

    Exactly zero for ``r >= R2``; equal to ``-(lap(p) + kappa^2 p)`` for ``r <= R1``.
    """
    pt = np.asarray(point, dtype=float)
    r = np.hypot(pt[..., 0], pt[..., 1])
    chi, d1, d2 = cutoff_chi(r, cfg)
    p, grad_p, lap_p = profile_p(pt)
    # d1 vanishes off the transition band, so the 1/r factors never see r = 0
    safe_r = np.where(d1 != 0, r, 1.0)
    lap_chi = d2 + d1 / safe_r
    grad_dot = d1 / safe_r * (pt[..., 0] * grad_p[..., 0] + pt[..., 1] * grad_p[..., 1])
    f = -(p * lap_chi + 2.0 * grad_dot + chi * lap_p + cfg.kappa**2 * chi * p)
    return np.where(r >= cfg.R2, 0.0, f) + 0j


def exact_u(point, cfg: ManufacturedConfig):
    return u_compact(point, cfg) + u_radiating(point, cfg)
