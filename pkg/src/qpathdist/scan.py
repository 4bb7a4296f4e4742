"""Scenario preparation gates and the small-hbar scan.

Every number reported from a truncated basis must be stable under doubling
the truncation.  prepare_fock_scenario enforces that for the fiducial's
Q-moments before any distance is computed; hbar_scan additionally raises the
dimension automatically, because shrinking hbar spreads the fiducial over
more basis levels (for the quartic model its width in basis units grows like
hbar^(-1/3)) while the displacement exponents grow like 1/hbar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import fock
from .distance import distance_path
from .dynamics import ClassicalPath, ModelSpec, integrate_hamilton, \
    lift_to_coherent_path
from .errors import TruncationError
from .fock import Fiducial, FockContext, MOMENT_CONVERGENCE_TOL
from .quadrature import TimeGrid

DIM_CAP = 2048
MOMENT_ORDERS = (2, 4, 6)

FiducialFactory = Callable[[FockContext], fock.FiducialSpec]


@dataclass(frozen=True)
class PreparedScenario:
    ctx: FockContext
    fiducial: Fiducial
    moments: dict[int, float]
    dim: int


def prepare_fock_scenario(model: ModelSpec, hbar: float, dim: int,
                          auto: bool = False,
                          fiducial_factory: FiducialFactory | None = None,
                          orders: Sequence[int] = MOMENT_ORDERS) -> PreparedScenario:
    """Build context and fiducial, trusting moments only after the gate.

    The fiducial is realised at the requested dimension and at twice it;
    disagreement of any Q-moment beyond MOMENT_CONVERGENCE_TOL raises
    TruncationError.  With auto=True the dimension doubles until the gate
    passes (or DIM_CAP is hit).
    """
    factory = fiducial_factory or model.fiducial_spec
    d = dim
    last_error: TruncationError | None = None
    while d <= DIM_CAP:
        try:
            return _prepare_at(model, hbar, d, factory, orders)
        except TruncationError as exc:
            last_error = exc
            if not auto:
                raise
            d *= 2
    raise TruncationError(
        f"moment gate still failing at the dimension cap {DIM_CAP}: {last_error}"
    )


def _prepare_at(model: ModelSpec, hbar: float, dim: int,
                factory: FiducialFactory,
                orders: Sequence[int]) -> PreparedScenario:
    results = {}
    keep: tuple[FockContext, Fiducial] | None = None
    for d in (dim, 2 * dim):
        ctx = fock.build_fock(d, hbar)
        fid = fock.make_fiducial(ctx, factory(ctx))
        results[d] = {r: fock.moment(ctx, fid.vector, r) for r in orders}
        if d == dim:
            keep = (ctx, fid)
    for r in orders:
        a, b = results[dim][r], results[2 * dim][r]
        if abs(a - b) > MOMENT_CONVERGENCE_TOL * max(1.0, abs(b)):
            raise TruncationError(
                f"<Q^{r}> moves from {a!r} at dim {dim} to {b!r} at dim "
                f"{2 * dim}; the truncation is too small at hbar = {hbar:g}"
            )
    ctx, fid = keep
    return PreparedScenario(ctx=ctx, fiducial=fid, moments=results[dim], dim=dim)


@dataclass(frozen=True)
class ScanRow:
    hbar: float
    value: float | None
    dim: int | None
    moments: dict[int, float] | None
    error: str | None = None


@dataclass(frozen=True)
class ScanResult:
    rows: list[ScanRow]
    monotone: bool
    trajectory: ClassicalPath

    def values(self) -> list[float]:
        return [row.value for row in self.rows if row.error is None]

    @property
    def failed(self) -> bool:
        return any(row.error is not None for row in self.rows)


def _scan_row(model: ModelSpec, hbar: float, cpath: ClassicalPath,
              dim: int, auto_dim: bool) -> ScanRow:
    d = dim
    while True:
        prep = prepare_fock_scenario(model, hbar, d, auto=auto_dim)
        try:
            path = lift_to_coherent_path(prep.ctx, model, cpath,
                                         prep.fiducial.vector)
        except TruncationError:
            # The moment gate passed but the lift overflowed the tail
            # guard; only auto mode may retry with a larger basis.
            if not auto_dim or 2 * prep.dim > DIM_CAP:
                raise
            d = 2 * prep.dim
            continue
        report = distance_path(path, model.build_hamiltonian(prep.ctx))
        return ScanRow(hbar=hbar, value=report.value, dim=prep.dim,
                       moments=prep.moments)


def hbar_scan(model: ModelSpec, hbars: Sequence[float], p0: float, q0: float,
              grid: TimeGrid, dim: int = 64, auto_dim: bool = True,
              collect_errors: bool = False) -> ScanResult:
    """Distance of one classical trajectory across commutator scales.

    The trajectory itself follows the model's bare classical flow and is
    therefore shared by every row; only the quantum side (context, fiducial,
    lifted path) is rebuilt per hbar, through the reduced defect route.
    The monotone flag records whether the distance is nonincreasing as hbar
    decreases, within 1e-10 slack.

    Truncation refusals abort the scan unless collect_errors is set, in
    which case the affected rows carry the refusal message and the
    remaining rows are still computed.
    """
    hbars = [float(h) for h in hbars]
    if not hbars:
        raise ValueError("hbar list must not be empty")
    if any(not (np.isfinite(h) and h > 0) for h in hbars):
        raise ValueError("every hbar must be positive and finite")

    cpath = integrate_hamilton(model, p0, q0, grid)
    rows = []
    for hbar in hbars:
        try:
            rows.append(_scan_row(model, hbar, cpath, dim, auto_dim))
        except TruncationError as exc:
            if not collect_errors:
                raise
            rows.append(ScanRow(hbar=hbar, value=None, dim=None,
                                moments=None, error=str(exc)))

    good = sorted((r for r in rows if r.error is None), key=lambda r: -r.hbar)
    monotone = all(
        later.value <= earlier.value + 1e-10
        for earlier, later in zip(good, good[1:])
    )
    return ScanResult(rows=rows, monotone=monotone, trajectory=cpath)
