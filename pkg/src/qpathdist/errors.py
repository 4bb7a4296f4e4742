"""Exception types shared across the package.

Contract violations (wrong shapes, non-Hermitian input where Hermitian is
required) raise plain ValueError.  The classes below mark conditions the
command-line tool maps to dedicated exit codes.
"""


class ConfigError(Exception):
    """Invalid or inconsistent scenario configuration (CLI exit code 1)."""


class NumericalGateError(Exception):
    """A numerical quality gate refused to proceed (CLI exit code 2).

    Raised instead of silently returning values that the truncation,
    convergence or degeneracy checks cannot vouch for.
    """


class TruncationError(NumericalGateError):
    """Basis truncation too small for the requested computation."""


class ConvergenceError(NumericalGateError):
    """An iterative routine failed to converge or a spectrum is degenerate."""
