"""Path builders: classical Hamilton flows, their coherent-state lifts, and
exact Schroedinger evolutions.

All paths live on a shared uniform TimeGrid.  A StatePath records how its
time derivative should be obtained, which is the single piece of policy the
distance functional needs:

  * analytic_schrodinger - the derivative is -i H psi, exact for spectrally
    propagated paths;
  * coherent_reduced     - the path came from a classical trajectory, so the
    defect can be evaluated in the shifted-operator (variance) form;
  * finite_difference    - differentiate the stored states numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np

from . import fock, linalg
from .errors import NumericalGateError, TruncationError
from .quadrature import TimeGrid

if TYPE_CHECKING:
    from .fock import FockContext

DERIVATIVE_POLICIES = ("analytic_schrodinger", "coherent_reduced",
                       "finite_difference")

# (p_dot, q_dot) as a function of (p, q).
ClassicalRHS = Callable[[float, float], tuple[float, float]]


@dataclass(frozen=True)
class ModelSpec:
    """A named physical system.

    operator_poly builds the Hamiltonian from an operator pair and is reused
    with shifted arguments (P + p, Q + q) by the reduced defect route, so it
    must be a fixed noncommutative polynomial, not an arbitrary matrix
    function.  classical_rhs is the analytic right-hand side of the phase
    space flow.  analytic_integrand, when present, is the model's closed-form
    defect norm (p, q, moments) -> value used as a test oracle.
    """

    name: str
    space: str = "fock"
    operator_poly: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    classical_rhs: ClassicalRHS | None = None
    fiducial_kind: str = "oscillator_ground"
    analytic_integrand: Callable[[float, float, dict], float] | None = None
    spin_coupling: float | None = None

    def build_hamiltonian(self, ctx: "FockContext") -> np.ndarray:
        if self.operator_poly is None:
            raise ValueError(f"model {self.name!r} has no operator polynomial")
        h = self.operator_poly(ctx.p_op, ctx.q_op)
        # Symmetrise away matmul roundoff so the Hermitian tag is exact.
        return 0.5 * (h + h.conj().T)

    def shifted_hamiltonian(self, ctx: "FockContext", p: float, q: float) -> np.ndarray:
        if self.operator_poly is None:
            raise ValueError(f"model {self.name!r} has no operator polynomial")
        eye = np.eye(ctx.dim)
        h = self.operator_poly(ctx.p_op + p * eye, ctx.q_op + q * eye)
        return 0.5 * (h + h.conj().T)

    def fiducial_spec(self, ctx: "FockContext") -> fock.FiducialSpec:
        if self.fiducial_kind == "hamiltonian_ground":
            return fock.FiducialSpec("hamiltonian_ground",
                                     hamiltonian=self.build_hamiltonian(ctx))
        return fock.FiducialSpec(self.fiducial_kind)


@dataclass(frozen=True)
class ClassicalPath:
    """Time-gridded (p, q) samples with the flow's own rates recorded.

    p_dot and q_dot are the right-hand side evaluated at the stored points,
    never re-differenced from the samples.
    """

    grid: TimeGrid
    p: np.ndarray
    q: np.ndarray
    p_dot: np.ndarray
    q_dot: np.ndarray

    def __post_init__(self):
        for name in ("p", "q", "p_dot", "q_dot"):
            arr = getattr(self, name)
            if arr.shape != (self.grid.node_count,):
                raise ValueError(f"{name} has shape {arr.shape}, expected "
                                 f"({self.grid.node_count},)")
            arr.flags.writeable = False


@dataclass(frozen=True)
class ReducedPathInfo:
    """Back-reference from a lifted state path to its classical source."""

    ctx: "FockContext"
    model: ModelSpec
    cpath: ClassicalPath
    eta: np.ndarray


@dataclass(frozen=True)
class StatePath:
    """Unit state vectors on a time grid, one row per node."""

    grid: TimeGrid
    states: np.ndarray
    policy: str
    reduced: ReducedPathInfo | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.policy not in DERIVATIVE_POLICIES:
            raise ValueError(f"unknown derivative policy {self.policy!r}")
        if self.states.ndim != 2 or self.states.shape[0] != self.grid.node_count:
            raise ValueError(
                f"states must be ({self.grid.node_count}, dim), "
                f"got {self.states.shape}"
            )
        norms = np.linalg.norm(self.states, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-10:
            raise ValueError(f"path states deviate from unit norm by {worst:.3e}")
        if self.policy == "coherent_reduced" and self.reduced is None:
            raise ValueError("coherent_reduced paths need their classical source")
        self.states.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.states.shape[1]


def classical_hamiltonian(ctx: "FockContext", h_op: np.ndarray,
                          eta: np.ndarray, p: float, q: float) -> float:
    """Expectation of the Hamiltonian over the coherent state labelled (p, q).

    This is the function whose Hamilton flow the coherent-state variational
    principle produces; the models here integrate their bare classical
    right-hand sides instead, and expectation_rhs exposes this version for
    comparison.
    """
    state = fock.coherent_state(ctx, eta, p, q)
    val = linalg.inner(state, h_op @ state)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ValueError(f"<H> has imaginary residue {val.imag:.3e}; "
                         f"Hamiltonian is not Hermitian enough")
    return val.real


def expectation_rhs(ctx: "FockContext", h_op: np.ndarray, eta: np.ndarray,
                    step: float = 1e-5) -> ClassicalRHS:
    """Hamilton flow of the coherent-state expectation, by central differences.

    Differs from the bare-symbol flow by hbar-dependent terms whenever the
    Hamiltonian is anharmonic (for the quartic model, d<H>/dq = q^3 +
    3 q <Q^2> rather than q^3).  Provided as a documented alternative and as
    the oracle that quantifies the discrepancy; the bare flow stays the
    default.
    """

    def rhs(p: float, q: float) -> tuple[float, float]:
        de_dp = (classical_hamiltonian(ctx, h_op, eta, p + step, q)
                 - classical_hamiltonian(ctx, h_op, eta, p - step, q)) / (2 * step)
        de_dq = (classical_hamiltonian(ctx, h_op, eta, p, q + step)
                 - classical_hamiltonian(ctx, h_op, eta, p, q - step)) / (2 * step)
        return -de_dq, de_dp

    return rhs


def integrate_hamilton(model: ModelSpec, p0: float, q0: float, grid: TimeGrid,
                       rhs: ClassicalRHS | None = None) -> ClassicalPath:
    """Classic fixed-step RK4 for the model's phase-space flow."""
    if rhs is None:
        rhs = model.classical_rhs
    if rhs is None:
        raise ValueError(f"model {model.name!r} has no classical flow")
    h = grid.spacing
    n = grid.n
    ps = np.empty(n + 1)
    qs = np.empty(n + 1)
    p, q = float(p0), float(q0)
    ps[0], qs[0] = p, q
    times = grid.times()
    for k in range(n):
        k1p, k1q = rhs(p, q)
        k2p, k2q = rhs(p + 0.5 * h * k1p, q + 0.5 * h * k1q)
        k3p, k3q = rhs(p + 0.5 * h * k2p, q + 0.5 * h * k2q)
        k4p, k4q = rhs(p + h * k3p, q + h * k3q)
        p += (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        q += (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
        if not (np.isfinite(p) and np.isfinite(q)):
            raise NumericalGateError(
                f"classical trajectory blew up at t = {times[k + 1]:.6g} "
                f"(step {k + 1}); reduce the horizon or step size"
            )
        ps[k + 1], qs[k + 1] = p, q
    rates = [rhs(ps[k], qs[k]) for k in range(n + 1)]
    p_dot = np.array([r[0] for r in rates])
    q_dot = np.array([r[1] for r in rates])
    return ClassicalPath(grid=grid, p=ps, q=qs, p_dot=p_dot, q_dot=q_dot)


def lift_to_coherent_path(ctx: "FockContext", model: ModelSpec,
                          cpath: ClassicalPath, eta: np.ndarray) -> StatePath:
    """Coherent states along a classical trajectory.

    Keeps a back-reference to the classical source so the distance
    functional can use the reduced (shifted-operator) defect form.
    """
    states = np.empty((cpath.grid.node_count, ctx.dim), dtype=np.complex128)
    for k in range(cpath.grid.node_count):
        try:
            states[k] = fock.coherent_state(ctx, eta, float(cpath.p[k]),
                                            float(cpath.q[k]))
        except TruncationError as exc:
            raise TruncationError(f"node {k}: {exc}") from exc
    info = ReducedPathInfo(ctx=ctx, model=model, cpath=cpath, eta=eta)
    return StatePath(grid=cpath.grid, states=states, policy="coherent_reduced",
                     reduced=info)


def coherent_path_derivatives(path: StatePath) -> np.ndarray:
    """Exact chain-rule time derivative of a lifted coherent path.

    d/dt |p(t), q(t)> = -i D(p,q) [ (q_dot/hbar)(P + p) - (p_dot/hbar) Q ] |eta>
    where D is the displacement for (p, q).
    """
    if path.reduced is None:
        raise ValueError("not a lifted coherent path")
    info = path.reduced
    ctx, cpath = info.ctx, info.cpath
    derivs = np.empty_like(path.states)
    for k in range(path.grid.node_count):
        p, q = float(cpath.p[k]), float(cpath.q[k])
        pd, qd = float(cpath.p_dot[k]), float(cpath.q_dot[k])
        gen = (qd / ctx.hbar) * (ctx.p_op + p * np.eye(ctx.dim)) \
            - (pd / ctx.hbar) * ctx.q_op
        derivs[k] = -1j * fock.displace(ctx, gen @ info.eta, p, q)
    return derivs


def propagate_schrodinger(h_op: np.ndarray, psi0: np.ndarray,
                          grid: TimeGrid) -> StatePath:
    """Spectral propagation psi(t) = sum_k exp(-i lambda_k t) v_k <v_k|psi0>.

    Exact up to the eigensolver residual, which makes the zero-defect
    property of true solutions a machine-checkable statement.
    """
    decomp = linalg.hermitian_eigen(h_op)
    nrm = linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"initial state norm {nrm!r} is not 1")
    coeff = decomp.vectors.conj().T @ psi0
    times = grid.times()
    phases = np.exp(-1j * np.outer(times, decomp.values))
    states = (phases * coeff) @ decomp.vectors.T
    return StatePath(grid=grid, states=states, policy="analytic_schrodinger")


def path_time_derivatives(states: np.ndarray, h: float) -> np.ndarray:
    """Finite-difference d(state)/dt on a uniform grid.

    Fourth-order central stencils on interior nodes, second-order central at
    the first and last interior node, second-order one-sided at the ends.
    Needs at least five nodes.
    """
    if states.shape[0] < 5:
        raise ValueError("finite-difference derivatives need n >= 4 intervals")
    d = np.empty_like(states)
    d[2:-2] = (states[:-4] - 8 * states[1:-3] + 8 * states[3:-1]
               - states[4:]) / (12.0 * h)
    d[1] = (states[2] - states[0]) / (2.0 * h)
    d[-2] = (states[-1] - states[-3]) / (2.0 * h)
    d[0] = (-3.0 * states[0] + 4.0 * states[1] - states[2]) / (2.0 * h)
    d[-1] = (3.0 * states[-1] - 4.0 * states[-2] + states[-3]) / (2.0 * h)
    return d
