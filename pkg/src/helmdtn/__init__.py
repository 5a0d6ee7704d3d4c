"""FFT-built Dirichlet-to-Neumann maps for the exterior Helmholtz problem.

The discrete DtN map comes from a method-of-fundamental-solutions
discretization on a circle, whose circulant structure reduces its
construction to two FFTs. It couples to a P1 finite element solver on the
annulus between a star-shaped scatterer and the artificial circle.
"""

__version__ = "0.1.0"

from .circulant import CirculantMatrix, SingularCirculant, circ_solve, dft, idft
from .dtn import DtnMap, apply_dtn, build_dtn_direct, build_dtn_fft, solve_mfs_coefficients
from .geometry import MfsGeometry, StarBoundary, circle, parse_boundary, star64

__all__ = [
    "CirculantMatrix", "SingularCirculant", "circ_solve", "dft", "idft",
    "DtnMap", "apply_dtn", "build_dtn_direct", "build_dtn_fft", "solve_mfs_coefficients",
    "MfsGeometry", "StarBoundary", "circle", "parse_boundary", "star64",
]
