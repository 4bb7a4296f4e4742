"""Uniform time grids and composite Simpson quadrature.

Grids are uniform by construction; non-uniform spacing is rejected at the
type level because every consumer (Simpson weights, finite-difference
stencils, path segmenting) assumes it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Closed interval [t0, t1] split into n equal steps (n even, >= 2)."""

    t0: float
    t1: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValueError("grid endpoints must be finite")
        if self.t1 <= self.t0:
            raise ValueError(f"need t1 > t0, got [{self.t0}, {self.t1}]")
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 2, got {self.n}")

    @property
    def spacing(self) -> float:
        return (self.t1 - self.t0) / self.n

    @property
    def node_count(self) -> int:
        return self.n + 1

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n + 1)


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for n even intervals of width h."""
    if n < 2 or n % 2 != 0:
        raise ValueError(f"n must be even and >= 2, got {n}")
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def simpson_value(values: np.ndarray, grid: TimeGrid) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (grid.node_count,):
        raise ValueError(
            f"expected {grid.node_count} node values, got shape {values.shape}"
        )
    return float(simpson_weights(grid.n, grid.spacing) @ values)


def simpson_segment(values: np.ndarray, grid: TimeGrid, i0: int, i1: int) -> float:
    """Simpson quadrature restricted to nodes [i0, i1].

    The sub-range must span an even number of intervals.  Because composite
    Simpson applies the same 1-4-1 pattern to every interval pair, summing a
    split at any even node reproduces the full-interval value exactly.
    """
    if not (0 <= i0 < i1 <= grid.n):
        raise ValueError(f"bad segment [{i0}, {i1}] for n={grid.n}")
    if (i1 - i0) % 2 != 0 or i0 % 2 != 0:
        raise ValueError("segments must start at an even node and span an even "
                         "number of intervals")
    values = np.asarray(values, dtype=np.float64)
    w = simpson_weights(i1 - i0, grid.spacing)
    return float(w @ values[i0:i1 + 1])


def richardson_error_estimate(values: np.ndarray, grid: TimeGrid) -> float:
    """Error estimate for the composite Simpson value.

    When n is divisible by 4 the estimate is the classic Richardson
    comparison with the half-resolution rule, |S_n - S_{n/2}| / 15.
    Otherwise a conservative Simpson-vs-trapezoid bound is returned.
    """
    values = np.asarray(values, dtype=np.float64)
    h = grid.spacing
    fine = float(simpson_weights(grid.n, h) @ values)
    if grid.n % 4 == 0:
        coarse = float(simpson_weights(grid.n // 2, 2 * h) @ values[::2])
        return abs(fine - coarse) / 15.0
    trapezoid = float(np.trapezoid(values, dx=h))
    return abs(fine - trapezoid)
