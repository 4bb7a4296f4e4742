"""Exact finite-dimensional spin systems.

Everything exercised downstream is spin 1 with the m = 0 basis vector as
fiducial, evolved under H = lambda * S3^2, but the context type admits any
spin quantum number.

Basis ordering is m = s, s-1, ..., -s (S3 diagonal).  For s = 1 the ladder
phase convention is fixed by flipping the sign of the m = +1 basis vector
relative to the usual Condon-Shortley choice, so that

    exp(-i theta S2) |1, 0>  =  (sin(theta)/sqrt2, cos(theta), sin(theta)/sqrt2)

has the symmetric component form used throughout this package.  The flip is
a unitary change of basis and leaves all commutation relations intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .quadrature import TimeGrid

SPIN_ALGEBRA_TOL = 1e-12


def spin_matrices(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Condon-Shortley spin matrices (S1, S2, S3) for spin s."""
    two_s = round(2 * s)
    if two_s < 1 or abs(2 * s - two_s) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got {s}")
    dim = two_s + 1
    ms = s - np.arange(dim)
    raising = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(1, dim):
        m = ms[i]
        raising[i - 1, i] = np.sqrt(s * (s + 1) - m * (m + 1))
    s1 = (raising + raising.conj().T) / 2.0
    s2 = (raising - raising.conj().T) / 2j
    s3 = np.diag(ms).astype(np.complex128)
    return s1, s2, s3


@dataclass(frozen=True)
class SpinContext:
    s: float
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray

    @property
    def dim(self) -> int:
        return self.s1.shape[0]


def build_spin(s: float) -> SpinContext:
    """Spin context with verified su(2) algebra and Casimir."""
    s1, s2, s3 = spin_matrices(s)
    if s == 1:
        # Phase flip on the m=+1 basis vector; see the module docstring.
        u = np.diag([-1.0, 1.0, 1.0])
        s1 = u @ s1 @ u
        s2 = u @ s2 @ u
    for a, b, c in ((s1, s2, s3), (s2, s3, s1), (s3, s1, s2)):
        defect = np.max(np.abs(a @ b - b @ a - 1j * c))
        if defect > SPIN_ALGEBRA_TOL:
            raise ValueError(f"commutation relation violated by {defect:.3e}")
    casimir = s1 @ s1 + s2 @ s2 + s3 @ s3
    defect = np.max(np.abs(casimir - s * (s + 1) * np.eye(s1.shape[0])))
    if defect > SPIN_ALGEBRA_TOL:
        raise ValueError(f"Casimir check violated by {defect:.3e}")
    for m in (s1, s2, s3):
        m.flags.writeable = False
    return SpinContext(s=s, s1=s1, s2=s2, s3=s3)


def spin1_coherent(theta: float, phi: float) -> np.ndarray:
    """Spin-1 coherent state over the m = 0 fiducial, in the S3 basis.

    Equal to exp(-i phi S3) exp(-i theta S2) |1, 0> for the context built by
    build_spin(1).
    """
    s, c = np.sin(theta), np.cos(theta)
    return np.array(
        [np.exp(-1j * phi) * s / np.sqrt(2.0), c + 0j,
         np.exp(1j * phi) * s / np.sqrt(2.0)],
        dtype=np.complex128,
    )


@dataclass(frozen=True)
class SpinPathPoint:
    """One node of a (theta, phi) path with its angular rates."""

    theta: float
    phi: float
    theta_dot: float
    phi_dot: float

    def __post_init__(self):
        vals = (self.theta, self.phi, self.theta_dot, self.phi_dot)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("spin path point has non-finite entries")
        if not (0.0 <= self.theta <= np.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


def kinematic_one_form(theta: float, phi: float, theta_dot: float,
                       phi_dot: float, m: int) -> float:
    """Rate form of i<theta,phi| d |theta,phi> for an |s, m> fiducial.

    Equals m * cos(theta) * d(phi)/dt, hence exactly zero for m = 0: the
    m = 0 family carries no canonical kinematic term and therefore no
    associated classical equations of motion.
    """
    if m == 0:
        return 0.0
    return m * np.cos(theta) * phi_dot


def spin_integrand(pt: SpinPathPoint, lam: float) -> float:
    """Closed-form defect norm along a spin-1, m = 0 path under lambda*S3^2."""
    s, c = np.sin(pt.theta), np.cos(pt.theta)
    return float(np.sqrt(
        pt.theta_dot ** 2
        + s * s * pt.phi_dot ** 2
        + lam * lam * s * s * c * c
    ))


def spin3_squared(lam: float) -> np.ndarray:
    """The Hamiltonian lambda * S3^2 for spin 1."""
    ctx = build_spin(1)
    return lam * (ctx.s3 @ ctx.s3)


def spin_path_states(points: list[SpinPathPoint]) -> np.ndarray:
    """Stack of spin1_coherent states, one row per node."""
    return np.stack([spin1_coherent(pt.theta, pt.phi) for pt in points])


def spin_distance_closed_form(points: list[SpinPathPoint], grid: TimeGrid,
                              lam: float) -> float:
    """Simpson quadrature of the closed-form integrand on the same grid."""
    from .quadrature import simpson_value

    if len(points) != grid.node_count:
        raise ValueError(
            f"expected {grid.node_count} path points, got {len(points)}"
        )
    values = np.array([spin_integrand(pt, lam) for pt in points])
    return simpson_value(values, grid)


def spin_distance_numeric(points: list[SpinPathPoint], grid: TimeGrid,
                          lam: float):
    """Path distance evaluated by the generic machinery on the 3-dim states.

    States are differentiated by finite differences (no use of the angular
    rates), so agreement with spin_distance_closed_form is a real check of
    the pointwise minimisation, not a restatement of it.
    """
    from .distance import distance_path
    from .dynamics import StatePath

    if len(points) != grid.node_count:
        raise ValueError(
            f"expected {grid.node_count} path points, got {len(points)}"
        )
    path = StatePath(grid=grid, states=spin_path_states(points),
                     policy="finite_difference")
    return distance_path(path, spin3_squared(lam))
