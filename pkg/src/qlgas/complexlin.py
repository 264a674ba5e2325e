"""Minimal dense complex-matrix kernel.

Thin, validated wrappers over NumPy for the handful of operations the rest
of the package needs: products, adjoints, traces, and tolerance-based
structural predicates. Matrices are dense row-major ``complex128`` arrays;
entries in this domain are amplitudes and probabilities bounded by one, so
all comparisons use absolute element-wise tolerances.
"""

import numpy as np

from .errors import InputError

DEFAULT_EPS = 1e-10


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise InputError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise InputError("matrix contains NaN or Inf entries")
    return m


def _require_square(m: np.ndarray, what: str) -> np.ndarray:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{what} must be square, got shape {m.shape}")
    return m


def _require_eps(eps: float) -> float:
    if eps < 0:
        raise InputError(f"tolerance must be nonnegative, got {eps}")
    return float(eps)


def mat_mul(a, b) -> np.ndarray:
    """Standard matrix product with an explicit dimension check."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise InputError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(a).conj().T.copy()


def unitarity_residual(u) -> float:
    """Max-abs entry of U†U - I; zero for an exactly unitary matrix."""
    u = _require_square(as_complex_matrix(u), "unitarity check input")
    d = u.shape[0]
    return float(np.abs(u.conj().T @ u - np.eye(d)).max())


def is_unitary(u, eps: float = DEFAULT_EPS) -> bool:
    """True iff the max-abs entry of U†U - I is within ``eps``."""
    return unitarity_residual(u) <= _require_eps(eps)


def is_hermitian(a, eps: float = DEFAULT_EPS) -> bool:
    """True iff the max-abs entry of A - A† is within ``eps``."""
    a = _require_square(as_complex_matrix(a), "hermiticity check input")
    return float(np.abs(a - a.conj().T).max()) <= _require_eps(eps)


def trace(a) -> complex:
    """Sum of diagonal entries of a square matrix."""
    a = _require_square(as_complex_matrix(a), "trace input")
    return complex(np.trace(a))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    The R-diagonal phase correction makes the distribution uniform rather
    than merely unitary.
    """
    if dim < 1:
        raise InputError(f"dimension must be positive, got {dim}")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
