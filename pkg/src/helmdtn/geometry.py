"""Boundary curves, MFS point sets and region predicates.

The physical boundary is a star-shaped curve ``r = R(theta)`` given in
closed form, the artificial boundary is the circle ``|z| = R0`` and the
MFS sources sit on a concentric circle of radius ``rho < R0``.
Points are ``(..., 2)`` float arrays of Cartesian coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


class GeometryError(ValueError):
    """Inconsistent or invalid geometric configuration."""


def wrap_angle(theta):
    """Reduce angles to ``[0, 2*pi)``; an exact ``2*pi`` maps to 0."""
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    t = np.where(t >= TWO_PI, 0.0, t)
    return t[()] if t.ndim == 0 else t


@dataclass(frozen=True)
class StarBoundary:
    """Star-shaped curve ``R(theta) = mean + sum a cos(k theta + phi) + sum b sin(k theta + phi)``.

    ``cos_terms`` and ``sin_terms`` hold ``(amplitude, frequency, phase)``
    triples with integer frequencies, so ``R`` is 2*pi-periodic.
    """

    mean: float
    cos_terms: tuple = ()
    sin_terms: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        for amp, freq, phase in (*self.cos_terms, *self.sin_terms):
            if int(freq) != freq:
                raise GeometryError(f"frequency {freq} is not an integer")
        if self.min_radius() <= 0:
            raise GeometryError(f"curve {self.name!r} has non-positive radius")

    def radius(self, theta):
        t = wrap_angle(theta)
        r = np.full(np.shape(t), float(self.mean))
        for amp, freq, phase in self.cos_terms:
            r = r + amp * np.cos(freq * t + phase)
        for amp, freq, phase in self.sin_terms:
            r = r + amp * np.sin(freq * t + phase)
        return r[()] if np.ndim(r) == 0 else r

    def _samples(self, n: int = 65536) -> np.ndarray:
        return self.radius(np.arange(n) * (TWO_PI / n))

    def max_radius(self) -> float:
        """Maximum of ``R``: dense sampling, capped by the triangle-inequality bound."""
        bound = self.mean + sum(abs(a) for a, _, _ in (*self.cos_terms, *self.sin_terms))
        return float(min(bound, self._samples().max() + 1e-8 * bound))

    def min_radius(self) -> float:
        return float(self._samples().min())

    def area(self) -> float:
        """Enclosed area ``(1/2) int R^2 dtheta`` (exact for trigonometric polynomials)."""
        # sampling at many points integrates a trigonometric polynomial exactly
        r = self._samples(4096)
        return float(0.5 * np.mean(r**2) * TWO_PI)


def circle(r0: float) -> StarBoundary:
    if r0 <= 0:
        raise GeometryError(f"circle radius must be positive, got {r0}")
    return StarBoundary(float(r0), name=f"circle:{r0:g}")


def star64() -> StarBoundary:
    """The irregular boundary ``0.55 + 0.10 cos 3t + 0.06 sin 5t + 0.04 cos(7t + 0.3)``."""
    return StarBoundary(
        0.55,
        cos_terms=((0.10, 3, 0.0), (0.04, 7, 0.3)),
        sin_terms=((0.06, 5, 0.0),),
        name="star64",
    )


def parse_boundary(text: str) -> StarBoundary:
    """Parse a boundary description.

    Accepted forms: ``circle:<r0>``, ``star64``, or a general list
    ``fourier:<mean>;cos:<amp>,<freq>,<phase>;sin:<amp>,<freq>,<phase>;...``.
    """
    text = text.strip()
    if text == "star64":
        return star64()
    kind, _, rest = text.partition(":")
    if kind == "circle":
        return circle(float(rest))
    if kind == "fourier":
        parts = [p for p in rest.split(";") if p]
        mean = float(parts[0])
        cos_terms, sin_terms = [], []
        for part in parts[1:]:
            tag, _, vals = part.partition(":")
            amp, freq, phase = (float(v) for v in vals.split(","))
            if freq != int(freq):
                raise GeometryError(f"frequency {freq} is not an integer in {text!r}")
            term = (amp, int(freq), phase)
            if tag == "cos":
                cos_terms.append(term)
            elif tag == "sin":
                sin_terms.append(term)
            else:
                raise GeometryError(f"unknown term kind {tag!r} in {text!r}")
        return StarBoundary(mean, tuple(cos_terms), tuple(sin_terms), name=text)
    raise GeometryError(f"cannot parse boundary {text!r}")


def star_radius(curve: StarBoundary, theta):
    return curve.radius(theta)


def in_annulus(curve: StarBoundary, R0: float, p) -> np.ndarray | bool:
    """True where ``R(atan2(p)) < |p| < R0``."""
    p = np.asarray(p, dtype=float)
    r = np.hypot(p[..., 0], p[..., 1])
    theta = np.arctan2(p[..., 1], p[..., 0])
    out = (curve.radius(theta) < r) & (r < R0)
    return bool(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MfsGeometry:
    """Collocation circle ``R0``, source circle ``rho`` and wavenumber ``kappa`` with ``N`` points each."""

    N: int
    R0: float
    rho: float
    kappa: float
    _angles: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise GeometryError(f"N must be a positive integer, got {self.N}")
        if not self.R0 > 0:
            raise GeometryError(f"R0 must be positive, got {self.R0}")
        if not 0 < self.rho < self.R0:
            raise GeometryError(
                f"source radius rho={self.rho} must satisfy 0 < rho < R0={self.R0}"
            )
        if not self.kappa > 0:
            raise GeometryError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "_angles", np.arange(self.N) * (TWO_PI / self.N))

    @property
    def angles(self) -> np.ndarray:
        """Collocation angles ``2*pi*k/N``."""
        return self._angles.copy()

    def pair_distances(self) -> np.ndarray:
        """``d_m = |z_m - zeta_0| = sqrt(R0^2 + rho^2 - 2 R0 rho cos(2 pi m / N))``."""
        m = np.arange(self.N)
        # folding m -> min(m, N - m) makes d_m = d_{N-m} hold bit-for-bit
        t = np.minimum(m, self.N - m) * (TWO_PI / self.N)
        return np.sqrt(self.R0**2 + self.rho**2 - 2.0 * self.R0 * self.rho * np.cos(t))


def _ring(radius: float, n: int) -> np.ndarray:
    t = np.arange(n) * (TWO_PI / n)
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def collocation_points(geom: MfsGeometry) -> np.ndarray:
    """``z_k = R0 exp(2 pi i k / N)`` as an ``(N, 2)`` array."""
    return _ring(geom.R0, geom.N)


def source_points(geom: MfsGeometry) -> np.ndarray:
    """``zeta_j = rho exp(2 pi i j / N)`` as an ``(N, 2)`` array."""
    if not geom.rho < geom.R0:
        raise GeometryError("sources must lie strictly inside the collocation circle")
    return _ring(geom.rho, geom.N)


def outward_normals(geom: MfsGeometry) -> np.ndarray:
    """Unit normals ``z_k / R0`` on the artificial boundary."""
    return collocation_points(geom) / geom.R0
