"""Circulant matrix algebra on top of a positive-exponent DFT.

The forward transform here is ``c_hat[k] = sum_j c[j] * exp(+2 pi i j k / N)``,
i.e. the transform whose matrix ``W`` has entries ``omega**(j*k)`` with
``omega = exp(2 pi i / N)``.  NumPy's ``fft`` uses the opposite sign, so

    dft(c)  == N * numpy.fft.ifft(c)
    idft(c) == numpy.fft.fft(c) / N

With this convention the eigenvalues of ``circ(c)`` (first-column
convention, entry ``(k, j) = c[(k - j) % N]``) are exactly ``dft(c)`` and
``circ(c) = (1/N) W^* diag(dft(c)) W``.

``numpy.fft`` (pocketfft) handles every length in O(N log N), using
mixed-radix passes and Bluestein's algorithm for large prime factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SINGULAR_RTOL = 1e-14


class SingularCirculant(ArithmeticError):
    """A circulant eigenvalue is too small to divide by.

    Attributes
    ----------
    mode : int
        Index ``k`` of the offending eigenvalue.
    modulus : float
        ``|sigma_k|``.
    threshold : float
        Absolute threshold that was violated.
    """

    def __init__(self, mode: int, modulus: float, threshold: float):
        self.mode = int(mode)
        self.modulus = float(modulus)
        self.threshold = float(threshold)
        super().__init__(
            f"circulant eigenvalue {self.mode} has modulus {self.modulus:.3e} "
            f"below threshold {self.threshold:.3e}"
        )


def _vec(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {x.shape}")
    return x


def dft(c) -> np.ndarray:
    c = _vec(c)
    return c.size * np.fft.ifft(c)


def idft(chat) -> np.ndarray:
    chat = _vec(chat)
    return np.fft.fft(chat) / chat.size


def dft_matrix(n: int) -> np.ndarray:
    """Dense ``W`` with ``W[k, j] = omega**(j*k)``; for tests and small ``n`` only."""
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n)


def hadamard(a, b, op: str = "product") -> np.ndarray:
    """Entrywise product (``op="product"``) or quotient (``op="division"``)."""
    a, b = _vec(a), _vec(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if op == "product":
        return a * b
    if op == "division":
        zero = np.flatnonzero(b == 0)
        if zero.size:
            raise ZeroDivisionError(f"Hadamard division by zero at index {zero[0]}")
        return a / b
    raise ValueError(f"unknown Hadamard op {op!r}")


@dataclass(frozen=True, eq=False)
class CirculantMatrix:
    """Circulant matrix stored by its first column."""

    first_column: np.ndarray

    def __post_init__(self):
        col = _vec(self.first_column).copy()
        col.setflags(write=False)
        object.__setattr__(self, "first_column", col)

    @property
    def n(self) -> int:
        return self.first_column.size

    def is_symmetric(self, rtol: float = 1e-13) -> bool:
        c = self.first_column
        rev = np.roll(c[::-1], 1)  # rev[m] = c[-m]
        return bool(np.all(np.abs(c - rev) <= rtol * np.max(np.abs(c))))

    def to_dense(self) -> np.ndarray:
        n = self.n
        idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        return self.first_column[idx]

    def eigenvalues(self) -> np.ndarray:
        return dft(self.first_column)


def circ_eigenvalues(C: CirculantMatrix) -> np.ndarray:
    """Eigenvalues ``sigma_k = dft(c)[k]``, eigenvectors ``w_k[j] = omega**(-j*k)``."""
    return C.eigenvalues()


def check_spectrum(sigma: np.ndarray, rtol: float = SINGULAR_RTOL) -> None:
    """Raise ``SingularCirculant`` for the first ``|sigma_k| < rtol * max|sigma|``."""
    mod = np.abs(sigma)
    threshold = rtol * mod.max()
    bad = np.flatnonzero((mod < threshold) | (mod == 0) | ~np.isfinite(mod))
    if bad.size:
        k = bad[0]
        raise SingularCirculant(k, mod[k], threshold)


def circ_apply(C: CirculantMatrix, x) -> np.ndarray:
    x = _vec(x)
    if x.size != C.n:
        raise ValueError(f"length mismatch: matrix {C.n}, vector {x.size}")
    return idft(C.eigenvalues() * dft(x))


def circ_solve(C: CirculantMatrix, b, rtol: float = SINGULAR_RTOL) -> np.ndarray:
    b = _vec(b)
    if b.size != C.n:
        raise ValueError(f"length mismatch: matrix {C.n}, vector {b.size}")
    sigma = C.eigenvalues()
    check_spectrum(sigma, rtol)
    return idft(dft(b) / sigma)
