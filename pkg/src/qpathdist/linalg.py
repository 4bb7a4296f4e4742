"""Dense complex linear algebra used by every other module.

Vectors and matrices are plain numpy arrays (complex128).  The helpers here
pin down the conventions the rest of the package relies on: inner products
conjugate the first slot, Hermitian eigendecompositions are returned in a
deterministic form, and matrix-exponential actions meet a stated accuracy
contract rather than a particular algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, NumericalGateError

# Hermiticity tolerance, relative to the largest entry.
HERMITIAN_TOL = 1e-12

# expm_apply refuses above this 1-norm and asks for time-step subdivision.
EXPM_NORM_LIMIT = 300.0


def as_complex_vector(v) -> np.ndarray:
    """Coerce to a finite 1-d complex128 array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("vector has non-finite entries")
    return arr


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Inner product, conjugate-linear in the first argument."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def hermiticity_defect(m: np.ndarray) -> float:
    """max |M - M†| entrywise, normalised by max |M| (0 for the zero matrix)."""
    scale = np.max(np.abs(m))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)) / scale)


def require_hermitian(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise ValueError(f"{what} is not Hermitian (relative defect {defect:.3e})")
    return m


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectrum of a Hermitian matrix.

    ``values`` is real and ascending; ``vectors[:, k]`` is the unit
    eigenvector for ``values[k]`` with its first significant component
    rotated to the positive real axis, so the decomposition is a
    deterministic function of the input matrix.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def hermitian_eigen(m: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Raises ValueError on non-Hermitian input and ConvergenceError if the
    backend solver does not converge.
    """
    m = require_hermitian(m)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise ConvergenceError(
            f"Hermitian eigensolver did not converge within the backend's "
            f"iteration budget: {exc}"
        ) from exc
    vectors = np.ascontiguousarray(vectors, dtype=np.complex128)
    # Deterministic phase: first component above a relative floor made
    # real-positive.
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        mags = np.abs(col)
        idx = int(np.argmax(mags > 1e-12 * mags.max()))
        phase = col[idx] / abs(col[idx])
        vectors[:, k] = col / phase
    values = np.asarray(values, dtype=np.float64)
    values.flags.writeable = False
    vectors.flags.writeable = False
    return EigenDecomposition(values=values, vectors=vectors)


def eigen_apply_exp(decomp: EigenDecomposition, z: complex, v: np.ndarray) -> np.ndarray:
    """Apply exp(z * M) to v given the eigendecomposition of Hermitian M.

    Two matrix-vector products plus an elementwise phase; exact up to the
    eigensolver's own residual, which keeps unitarity at machine precision
    for purely imaginary z.
    """
    if v.shape[0] != decomp.dim:
        raise ValueError(f"dimension mismatch: {v.shape[0]} vs {decomp.dim}")
    coeff = decomp.vectors.conj().T @ v
    return decomp.vectors @ (np.exp(z * decomp.values) * coeff)


def expm_apply(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Compute exp(M) @ v for a general square complex matrix.

    Relative accuracy is at the 1e-12 level for 1-norms up to ~50; above
    EXPM_NORM_LIMIT the call refuses rather than degrade silently.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {m.shape[0]} vs {v.shape[0]}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError("matrix has non-finite entries")
    m_norm = float(np.linalg.norm(m, 1))
    if m_norm > EXPM_NORM_LIMIT:
        raise NumericalGateError(
            f"matrix 1-norm {m_norm:.3e} exceeds the exponential-action limit "
            f"{EXPM_NORM_LIMIT:g}; subdivide the time step (apply exp(M/k) "
            f"k times) instead"
        )
    return scipy.linalg.expm(m) @ v
