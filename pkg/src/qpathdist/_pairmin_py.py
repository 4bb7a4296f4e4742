"""Pure-Python twin of the compiled pair-minimisation kernel.

Algorithm and arithmetic order mirror _pairmin.pyx exactly so the two
backends agree to roundoff; keep the files in sync when editing either.

Per node, the joint objective

    f(a1, a2, gamma) = || (u1 - a1 psi1) - e^{-i gamma} (u2 - a2 psi2) ||^2

is expressed through eight precomputed Gram numbers.  For fixed gamma the
stationarity conditions in (a1, a2) are a symmetric 2x2 linear system solved
in closed form; gamma itself is scanned on a coarse grid and every local
minimum is refined by golden-section search.  When the two states are
parallel and the phase aligns, the system degenerates and a one-parameter
reduction is used instead.
"""

import math

TWO_PI = 2.0 * math.pi
INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEGENERATE_DET = 1e-12


def _eval_gamma(gamma, nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                gup_r, gup_i, gpu_r, gpu_i):
    """Objective at the (a1, a2) optimum for this gamma.

    Returns (f, a1, a2, degenerate).  f may be slightly negative from
    roundoff; callers clamp.
    """
    c = math.cos(gamma)
    s = math.sin(gamma)
    m = gpp_r * c + gpp_i * s
    det = 1.0 - m * m
    if det < DEGENERATE_DET:
        a = r1 - (gpu_r * c + gpu_i * s)
        f = nu1 + nu2 - 2.0 * (guu_r * c + guu_i * s) - a * a
        return f, a, 0.0, True
    b1 = r1 - (gpu_r * c + gpu_i * s)
    b2 = r2 - (gup_r * c + gup_i * s)
    a = (b1 + m * b2) / det
    b = (b2 + m * b1) / det
    cross_r = guu_r - b * gup_r - a * gpu_r + a * b * gpp_r
    cross_i = guu_i - b * gup_i - a * gpu_i + a * b * gpp_i
    f = (nu1 + nu2 - 2.0 * a * r1 - 2.0 * b * r2 + a * a + b * b
         - 2.0 * (cross_r * c + cross_i * s))
    return f, a, b, False


def _golden(lo, hi, tol, nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
            gup_r, gup_i, gpu_r, gpu_i):
    """Golden-section minimum of the gamma objective on [lo, hi]."""
    x1 = hi - INV_GOLDEN * (hi - lo)
    x2 = lo + INV_GOLDEN * (hi - lo)
    f1 = _eval_gamma(x1, nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                     gup_r, gup_i, gpu_r, gpu_i)[0]
    f2 = _eval_gamma(x2, nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                     gup_r, gup_i, gpu_r, gpu_i)[0]
    while hi - lo > tol:
        if f1 <= f2:
            hi = x2
            x2 = x1
            f2 = f1
            x1 = hi - INV_GOLDEN * (hi - lo)
            f1 = _eval_gamma(x1, nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                             gup_r, gup_i, gpu_r, gpu_i)[0]
        else:
            lo = x1
            x1 = x2
            f1 = f2
            x2 = lo + INV_GOLDEN * (hi - lo)
            f2 = _eval_gamma(x2, nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                             gup_r, gup_i, gpu_r, gpu_i)[0]
    return 0.5 * (lo + hi)


def _minimize_node(nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                   gup_r, gup_i, gpu_r, gpu_i, n_coarse, tol):
    step = TWO_PI / n_coarse
    coarse = [0.0] * n_coarse
    for i in range(n_coarse):
        coarse[i] = _eval_gamma(i * step, nu1, nu2, r1, r2, gpp_r, gpp_i,
                                guu_r, guu_i, gup_r, gup_i, gpu_r, gpu_i)[0]
    best_f = math.inf
    best_gamma = 0.0
    for i in range(n_coarse):
        prev = coarse[(i - 1) % n_coarse]
        nxt = coarse[(i + 1) % n_coarse]
        if coarse[i] <= prev and coarse[i] <= nxt:
            gamma = _golden(i * step - step, i * step + step, tol,
                            nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                            gup_r, gup_i, gpu_r, gpu_i)
            f = _eval_gamma(gamma, nu1, nu2, r1, r2, gpp_r, gpp_i,
                            guu_r, guu_i, gup_r, gup_i, gpu_r, gpu_i)[0]
            if f < best_f:
                best_f = f
                best_gamma = gamma
    f, a, b, degenerate = _eval_gamma(best_gamma, nu1, nu2, r1, r2,
                                      gpp_r, gpp_i, guu_r, guu_i,
                                      gup_r, gup_i, gpu_r, gpu_i)
    if best_gamma < 0.0:
        best_gamma += TWO_PI
    elif best_gamma >= TWO_PI:
        best_gamma -= TWO_PI
    value = math.sqrt(f) if f > 0.0 else 0.0
    return value, a, b, best_gamma, degenerate


def minimize_batch(nu1, nu2, r1, r2, gpp_r, gpp_i, guu_r, guu_i,
                   gup_r, gup_i, gpu_r, gpu_i, n_coarse, tol,
                   out_val, out_a1, out_a2, out_gamma, out_flag):
    """Fill the output arrays with the per-node joint minima."""
    if n_coarse < 4 or n_coarse > 512:
        raise ValueError("n_coarse must lie in [4, 512]")
    for k in range(len(nu1)):
        v, a, b, g, d = _minimize_node(
            float(nu1[k]), float(nu2[k]), float(r1[k]), float(r2[k]),
            float(gpp_r[k]), float(gpp_i[k]), float(guu_r[k]), float(guu_i[k]),
            float(gup_r[k]), float(gup_i[k]), float(gpu_r[k]), float(gpu_i[k]),
            n_coarse, tol)
        out_val[k] = v
        out_a1[k] = a
        out_a2[k] = b
        out_gamma[k] = g
        out_flag[k] = 1 if d else 0
