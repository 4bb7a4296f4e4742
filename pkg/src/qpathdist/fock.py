"""Truncated oscillator (Fock) representation of the canonical pair (Q, P).

The commutator [Q, P] = i*hbar holds exactly on the leading block of the
truncated matrices; the last two rows and columns are unavoidably corrupted
by the cutoff, so every state-producing routine guards the occupation tail
instead of trusting the full matrices blindly.

Displacements are applied as exp(-i q P / hbar) exp(i p Q / hbar).  The
1/hbar in the exponents is what keeps the labels honest for every hbar:
with this scaling <Q> = q and <P> = p independently of hbar, which is the
property the small-hbar scans rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import ConvergenceError, NumericalGateError, TruncationError
from .linalg import EigenDecomposition

# A displaced state must keep essentially no weight on the top basis levels.
TAIL_GUARD_LEVELS = 8
TAIL_GUARD_MASS = 1e-10

# Ground states closer than this to the next level are treated as degenerate.
DEGENERACY_GAP = 1e-10

# Fiducial vectors must be centred at the phase-space origin.
CENTERING_TOL = 1e-9

# Agreement required between moments at dim and 2*dim before they are trusted.
MOMENT_CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class FockContext:
    """Truncated canonical pair with cached spectra for fast displacements."""

    dim: int
    hbar: float
    q_op: np.ndarray
    p_op: np.ndarray
    lowering: np.ndarray
    q_eig: EigenDecomposition
    p_eig: EigenDecomposition


def build_fock(dim: int, hbar: float) -> FockContext:
    """Construct Q = sqrt(hbar/2)(a + a†) and P = i sqrt(hbar/2)(a† - a).

    Requires dim >= 4.  The commutator identity is verified on the leading
    (dim-2) block at build time.
    """
    if dim < 4:
        raise ValueError(f"truncation dimension must be >= 4, got {dim}")
    if not (np.isfinite(hbar) and hbar > 0):
        raise ValueError(f"hbar must be positive and finite, got {hbar}")
    a = np.zeros((dim, dim), dtype=np.complex128)
    ns = np.arange(1, dim)
    a[ns - 1, ns] = np.sqrt(ns)
    q_op = np.sqrt(hbar / 2.0) * (a + a.conj().T)
    p_op = 1j * np.sqrt(hbar / 2.0) * (a.conj().T - a)

    comm = q_op @ p_op - p_op @ q_op - 1j * hbar * np.eye(dim)
    block = np.abs(comm[: dim - 2, : dim - 2])
    if block.max() > 1e-10 * hbar:
        raise ValueError(
            f"commutator check failed on the leading block "
            f"(max defect {block.max():.3e})"
        )
    for m in (a, q_op, p_op):
        m.flags.writeable = False
    return FockContext(
        dim=dim,
        hbar=hbar,
        q_op=q_op,
        p_op=p_op,
        lowering=a,
        q_eig=linalg.hermitian_eigen(q_op),
        p_eig=linalg.hermitian_eigen(p_op),
    )


def oscillator_hamiltonian(ctx: FockContext) -> np.ndarray:
    """(P^2 + Q^2) / 2 on the truncated basis (exactly diagonal)."""
    return 0.5 * (ctx.p_op @ ctx.p_op + ctx.q_op @ ctx.q_op)


@dataclass(frozen=True)
class FiducialSpec:
    """Prescription for the reference vector that gets displaced.

    kind is one of:
      * "oscillator_ground"  - ground state of (P^2+Q^2)/2 on the context,
      * "hamiltonian_ground" - ground state of the supplied Hermitian matrix,
      * "explicit_vector"    - a user-supplied amplitude list (normalised).
    """

    kind: str
    hamiltonian: np.ndarray | None = None
    amplitudes: Sequence[complex] | None = None

    def __post_init__(self):
        if self.kind not in ("oscillator_ground", "hamiltonian_ground",
                             "explicit_vector"):
            raise ValueError(f"unknown fiducial kind {self.kind!r}")
        if self.kind == "hamiltonian_ground" and self.hamiltonian is None:
            raise ValueError("hamiltonian_ground needs a Hamiltonian matrix")
        if self.kind == "explicit_vector" and self.amplitudes is None:
            raise ValueError("explicit_vector needs an amplitude list")


@dataclass(frozen=True)
class Fiducial:
    """A realised fiducial vector together with its energy (if it is a
    ground state; None for explicit vectors)."""

    vector: np.ndarray
    energy: float | None


def ground_state(h_op: np.ndarray) -> tuple[np.ndarray, float]:
    """Lowest eigenvector of a Hermitian matrix, refusing near-degeneracy."""
    decomp = linalg.hermitian_eigen(h_op)
    gap = float(decomp.values[1] - decomp.values[0])
    if gap < DEGENERACY_GAP:
        raise ConvergenceError(
            f"ground state is degenerate within {DEGENERACY_GAP:g} "
            f"(gap {gap:.3e}); refusing to pick a vector arbitrarily"
        )
    return decomp.vectors[:, 0].copy(), float(decomp.values[0])


def make_fiducial(ctx: FockContext, spec: FiducialSpec) -> Fiducial:
    """Realise a fiducial vector and verify it is centred.

    Both <Q> and <P> must vanish within CENTERING_TOL; the error message
    names the offending expectation so a bad spec is easy to diagnose.
    """
    if spec.kind == "oscillator_ground":
        vec, energy = ground_state(oscillator_hamiltonian(ctx))
    elif spec.kind == "hamiltonian_ground":
        h_op = linalg.require_hermitian(spec.hamiltonian, "fiducial Hamiltonian")
        if h_op.shape[0] != ctx.dim:
            raise ValueError(
                f"fiducial Hamiltonian dim {h_op.shape[0]} != context dim {ctx.dim}"
            )
        vec, energy = ground_state(h_op)
    else:
        vec = linalg.as_complex_vector(spec.amplitudes)
        if vec.shape[0] != ctx.dim:
            raise ValueError(
                f"explicit fiducial has dim {vec.shape[0]}, context needs {ctx.dim}"
            )
        nrm = linalg.norm(vec)
        if nrm == 0.0:
            raise ValueError("explicit fiducial vector is zero")
        vec = vec / nrm
        energy = None

    for name, op in (("<Q>", ctx.q_op), ("<P>", ctx.p_op)):
        val = abs(linalg.inner(vec, op @ vec))
        if val > CENTERING_TOL:
            raise NumericalGateError(
                f"fiducial centering check failed: |{name}| = {val:.3e} "
                f"exceeds {CENTERING_TOL:g}"
            )
    vec.flags.writeable = False
    return Fiducial(vector=vec, energy=energy)


def tail_mass(state: np.ndarray) -> float:
    """Occupation probability on the top TAIL_GUARD_LEVELS basis levels."""
    return float(np.sum(np.abs(state[-TAIL_GUARD_LEVELS:]) ** 2))


def _check_tail(ctx: FockContext, state: np.ndarray, p: float, q: float) -> None:
    mass = tail_mass(state)
    if mass > TAIL_GUARD_MASS:
        raise TruncationError(
            f"displacement (p={p:g}, q={q:g}) leaves occupation {mass:.3e} on "
            f"the top {TAIL_GUARD_LEVELS} of {ctx.dim} levels "
            f"(limit {TAIL_GUARD_MASS:g}); raise the truncation dimension"
        )


def displace(ctx: FockContext, vec: np.ndarray, p: float, q: float) -> np.ndarray:
    """Apply exp(-i q P / hbar) exp(i p Q / hbar) to an arbitrary vector.

    No tail guard; callers that produce physical states go through
    coherent_state instead.
    """
    out = linalg.eigen_apply_exp(ctx.q_eig, 1j * p / ctx.hbar, vec)
    return linalg.eigen_apply_exp(ctx.p_eig, -1j * q / ctx.hbar, out)


def coherent_state(ctx: FockContext, eta: np.ndarray, p: float, q: float) -> np.ndarray:
    """Displace the fiducial: exp(-i q P / hbar) exp(i p Q / hbar) |eta>.

    Raises TruncationError when the displaced state is not safely contained
    in the truncated basis.
    """
    if eta.shape[0] != ctx.dim:
        raise ValueError(f"fiducial dim {eta.shape[0]} != context dim {ctx.dim}")
    if p == 0.0 and q == 0.0:
        return eta
    state = displace(ctx, eta, p, q)
    _check_tail(ctx, state, p, q)
    return state


def displace_back(ctx: FockContext, state: np.ndarray, p: float, q: float) -> np.ndarray:
    """Apply the inverse displacement for (p, q)."""
    out = linalg.eigen_apply_exp(ctx.p_eig, 1j * q / ctx.hbar, state)
    return linalg.eigen_apply_exp(ctx.q_eig, -1j * p / ctx.hbar, out)


ExtendedChain = Sequence[tuple[np.ndarray, float]]


def extended_coherent_state(
    ctx: FockContext,
    eta: np.ndarray,
    p: float,
    q: float,
    chain: ExtendedChain,
) -> np.ndarray:
    """Coherent state followed by extra unitary factors exp(i * value * G).

    The chain is applied in list order after the canonical displacement; an
    empty chain reproduces coherent_state exactly.
    """
    state = coherent_state(ctx, eta, p, q)
    for gen, value in chain:
        gen = linalg.require_hermitian(gen, "chain generator")
        if gen.shape[0] != ctx.dim:
            raise ValueError(
                f"generator dim {gen.shape[0]} != context dim {ctx.dim}"
            )
        if value != 0.0:
            decomp = linalg.hermitian_eigen(gen)
            state = linalg.eigen_apply_exp(decomp, 1j * value, state)
    if len(chain) > 0:
        _check_tail(ctx, state, p, q)
    return state


def moment(ctx: FockContext, state: np.ndarray, r: int) -> float:
    """<state| Q^r |state>, guarded against truncation artifacts.

    The result must be real; an imaginary residue above the relative floor
    signals that Q^r pushed the state into the corrupted tail.
    """
    if r < 0:
        raise ValueError(f"moment order must be >= 0, got {r}")
    if state.shape[0] != ctx.dim:
        raise ValueError(f"state dim {state.shape[0]} != context dim {ctx.dim}")
    w = state
    for _ in range(r):
        w = ctx.q_op @ w
    val = linalg.inner(state, w)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise TruncationError(
            f"moment <Q^{r}> has imaginary residue {val.imag:.3e}; the "
            f"truncated basis is too small for this order"
        )
    return val.real


def converged_ground_moments(
    hamiltonian_factory: Callable[[FockContext], np.ndarray],
    hbar: float,
    dim: int,
    orders: Sequence[int] = (2, 4, 6),
) -> dict[int, float]:
    """Ground-state Q-moments trusted only if dim and 2*dim agree.

    Computes <Q^r> over the ground state of the supplied Hamiltonian at the
    requested truncation and again at twice the truncation; any disagreement
    beyond MOMENT_CONVERGENCE_TOL (relative to max(1, |value|)) raises
    TruncationError.  Returns the dim-level values.
    """
    results = {}
    for d in (dim, 2 * dim):
        ctx = build_fock(d, hbar)
        vec, _ = ground_state(hamiltonian_factory(ctx))
        results[d] = {r: moment(ctx, vec, r) for r in orders}
    for r in orders:
        a, b = results[dim][r], results[2 * dim][r]
        if abs(a - b) > MOMENT_CONVERGENCE_TOL * max(1.0, abs(b)):
            raise TruncationError(
                f"<Q^{r}> differs between dim {dim} ({a!r}) and dim "
                f"{2 * dim} ({b!r}); raise the truncation dimension"
            )
    return results[dim]
