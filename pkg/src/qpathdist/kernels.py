"""Backend selection for the pair-minimisation kernel.

The compiled extension is used when available; otherwise the pure-Python
twin takes over transparently.  Set QPATHDIST_PURE=1 in the environment to
force the fallback (useful for benchmarking and for verifying that the two
implementations agree).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("QPATHDIST_PURE") == "1":
    from . import _pairmin_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _pairmin as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pairmin_py as _impl

        BACKEND = "python"

N_COARSE_DEFAULT = 64
GAMMA_TOL_DEFAULT = 1e-10


def pair_joint_minimize(nu1, nu2, r1, r2, gpp, guu, gup, gpu,
                        n_coarse: int = N_COARSE_DEFAULT,
                        tol: float = GAMMA_TOL_DEFAULT,
                        impl=None):
    """Joint per-node minimisation over (alpha1_dot, alpha2_dot, gamma).

    Inputs are per-node Gram data: squared defect-source norms nu_j =
    ||u_j||^2, the real parts r_j = Re<psi_j, u_j>, and the complex overlaps
    gpp = <psi1, psi2>, guu = <u1, u2>, gup = <u1, psi2>, gpu = <psi1, u2>.
    Returns (value, a1, a2, gamma, degenerate_flags) arrays.
    """
    nu1 = np.ascontiguousarray(nu1, dtype=np.float64)
    nu2 = np.ascontiguousarray(nu2, dtype=np.float64)
    r1 = np.ascontiguousarray(r1, dtype=np.float64)
    r2 = np.ascontiguousarray(r2, dtype=np.float64)
    gpp = np.asarray(gpp, dtype=np.complex128)
    guu = np.asarray(guu, dtype=np.complex128)
    gup = np.asarray(gup, dtype=np.complex128)
    gpu = np.asarray(gpu, dtype=np.complex128)
    n = nu1.shape[0]
    out_val = np.empty(n)
    out_a1 = np.empty(n)
    out_a2 = np.empty(n)
    out_gamma = np.empty(n)
    out_flag = np.zeros(n, dtype=np.int64)
    backend = impl if impl is not None else _impl
    backend.minimize_batch(
        nu1, nu2, r1, r2,
        np.ascontiguousarray(gpp.real), np.ascontiguousarray(gpp.imag),
        np.ascontiguousarray(guu.real), np.ascontiguousarray(guu.imag),
        np.ascontiguousarray(gup.real), np.ascontiguousarray(gup.imag),
        np.ascontiguousarray(gpu.real), np.ascontiguousarray(gpu.imag),
        int(n_coarse), float(tol),
        out_val, out_a1, out_a2, out_gamma, out_flag,
    )
    return out_val, out_a1, out_a2, out_gamma, out_flag
