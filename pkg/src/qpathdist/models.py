"""Catalog of wired physical systems.

harmonic   H = (P^2 + Q^2)/2      flow q_dot = p,  p_dot = -q
quartic    H = P^2/2 + Q^4/4      flow q_dot = p,  p_dot = -q^3
spin1      H = lambda * S3^2 on spin 1 with the m = 0 fiducial
polynomial H = sum c * W(P^a Q^b) with Weyl-symmetrised monomials

The classical flows are the bare-symbol Hamilton equations.  The flow of the
coherent-state expectation <p,q|H|p,q> differs for anharmonic models (see
dynamics.expectation_rhs); the bare flow is the one the wired models follow.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .dynamics import ModelSpec
from .errors import ConfigError


def _harmonic_poly(p_op: np.ndarray, q_op: np.ndarray) -> np.ndarray:
    return 0.5 * (p_op @ p_op + q_op @ q_op)


def _quartic_poly(p_op: np.ndarray, q_op: np.ndarray) -> np.ndarray:
    q2 = q_op @ q_op
    return 0.5 * (p_op @ p_op) + 0.25 * (q2 @ q2)


def quartic_integrand(p: float, q: float, moments: dict[int, float]) -> float:
    """Closed-form reduced defect norm of the quartic model.

    sqrt(q^2 <Q^6> + (9/4) q^4 (<Q^4> - <Q^2>^2)) with moments taken over
    the quartic ground-state fiducial.  The q^4 factor on the variance term
    is required by expanding || (q Q^3 + (3/2) q^2 Q^2 - mean) |eta> ||^2;
    dropping it is inconsistent with that algebra.
    """
    m2, m4, m6 = moments[2], moments[4], moments[6]
    val = q * q * m6 + 2.25 * q ** 4 * (m4 - m2 * m2)
    return float(np.sqrt(max(val, 0.0)))


def harmonic_model() -> ModelSpec:
    return ModelSpec(
        name="harmonic",
        operator_poly=_harmonic_poly,
        classical_rhs=lambda p, q: (-q, p),
        fiducial_kind="oscillator_ground",
        analytic_integrand=lambda p, q, moments: 0.0,
    )


def quartic_model() -> ModelSpec:
    return ModelSpec(
        name="quartic",
        operator_poly=_quartic_poly,
        classical_rhs=lambda p, q: (-q ** 3, p),
        fiducial_kind="hamiltonian_ground",
        analytic_integrand=quartic_integrand,
    )


def spin1_model(coupling: float) -> ModelSpec:
    """Spin-1 system under lambda * S3^2; no classical flow exists for the
    m = 0 fiducial because its kinematic one-form vanishes identically."""
    return ModelSpec(name="spin1", space="spin", spin_coupling=float(coupling))


def weyl_monomial(p_op: np.ndarray, q_op: np.ndarray, a: int, b: int) -> np.ndarray:
    """Weyl-symmetrised operator for the monomial p^a q^b.

    Uses the McCoy form (1/2^a) sum_k C(a,k) P^k Q^b P^(a-k), which equals
    the average over all orderings and is Hermitian by construction.
    """
    if a < 0 or b < 0:
        raise ValueError("monomial powers must be non-negative")
    qb = np.linalg.matrix_power(q_op, b)
    total = np.zeros_like(p_op)
    for k in range(a + 1):
        pk = np.linalg.matrix_power(p_op, k)
        pak = np.linalg.matrix_power(p_op, a - k)
        total = total + comb(a, k) * (pk @ qb @ pak)
    return total / (2.0 ** a)


def polynomial_model(terms: list[tuple[float, int, int]],
                     fiducial_kind: str = "hamiltonian_ground") -> ModelSpec:
    """Custom model from (coefficient, p_power, q_power) monomials.

    Each monomial is Weyl-symmetrised, so the operator is Hermitian for real
    coefficients regardless of ordering in the input.  The classical flow is
    the bare symbol's: q_dot = dh/dp, p_dot = -dh/dq.
    """
    cleaned = []
    for term in terms:
        if len(term) != 3:
            raise ConfigError(f"monomial {term!r} must be (coeff, p_power, q_power)")
        coeff, a, b = term
        coeff = float(coeff)
        if not np.isfinite(coeff):
            raise ConfigError(f"non-finite coefficient in {term!r}")
        if int(a) != a or int(b) != b or a < 0 or b < 0:
            raise ConfigError(f"powers in {term!r} must be non-negative integers")
        cleaned.append((coeff, int(a), int(b)))
    if not cleaned:
        raise ConfigError("polynomial model needs at least one monomial")

    def poly(p_op: np.ndarray, q_op: np.ndarray) -> np.ndarray:
        total = np.zeros_like(p_op)
        for coeff, a, b in cleaned:
            total = total + coeff * weyl_monomial(p_op, q_op, a, b)
        return total

    def rhs(p: float, q: float) -> tuple[float, float]:
        dh_dp = sum(c * a * p ** (a - 1) * q ** b
                    for c, a, b in cleaned if a > 0)
        dh_dq = sum(c * b * p ** a * q ** (b - 1)
                    for c, a, b in cleaned if b > 0)
        return -dh_dq, dh_dp

    return ModelSpec(
        name="polynomial",
        operator_poly=poly,
        classical_rhs=rhs,
        fiducial_kind=fiducial_kind,
    )


def fock_model_by_name(name: str) -> ModelSpec:
    if name == "harmonic":
        return harmonic_model()
    if name == "quartic":
        return quartic_model()
    raise ConfigError(f"unknown model {name!r}")
