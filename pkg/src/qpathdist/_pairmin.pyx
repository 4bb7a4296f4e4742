# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-minimisation kernel.

Mirror of _pairmin_py.py; keep both files in sync when editing either.
The per-node work is pure scalar arithmetic (coarse gamma scan plus
golden-section refinements), which is why it is compiled: it is the one
inner loop numpy cannot vectorise away.
"""

from libc.math cimport cos, sin, sqrt, INFINITY

cdef double TWO_PI = 6.283185307179586476925286766559
cdef double INV_GOLDEN = 0.6180339887498948482045868343656
cdef double DEGENERATE_DET = 1e-12


cdef inline double _eval_gamma(double gamma, double nu1, double nu2,
                               double r1, double r2,
                               double gpp_r, double gpp_i,
                               double guu_r, double guu_i,
                               double gup_r, double gup_i,
                               double gpu_r, double gpu_i,
                               double *a_out, double *b_out,
                               int *degenerate_out) nogil:
    cdef double c = cos(gamma)
    cdef double s = sin(gamma)
    cdef double m = gpp_r * c + gpp_i * s
    cdef double det = 1.0 - m * m
    cdef double a, b, b1, b2, cross_r, cross_i, f
    if det < DEGENERATE_DET:
        a = r1 - (gpu_r * c + gpu_i * s)
        f = nu1 + nu2 - 2.0 * (guu_r * c + guu_i * s) - a * a
        a_out[0] = a
        b_out[0] = 0.0
        degenerate_out[0] = 1
        return f
    b1 = r1 - (gpu_r * c + gpu_i * s)
    b2 = r2 - (gup_r * c + gup_i * s)
    a = (b1 + m * b2) / det
    b = (b2 + m * b1) / det
    cross_r = guu_r - b * gup_r - a * gpu_r + a * b * gpp_r
    cross_i = guu_i - b * gup_i - a * gpu_i + a * b * gpp_i
    f = (nu1 + nu2 - 2.0 * a * r1 - 2.0 * b * r2 + a * a + b * b
         - 2.0 * (cross_r * c + cross_i * s))
    a_out[0] = a
    b_out[0] = b
    degenerate_out[0] = 0
    return f


cdef inline double _golden(double lo, double hi, double tol,
                           double nu1, double nu2, double r1, double r2,
                           double gpp_r, double gpp_i,
                           double guu_r, double guu_i,
                           double gup_r, double gup_i,
                           double gpu_r, double gpu_i) nogil:
    cdef double a_tmp, b_tmp
    cdef int d_tmp
    cdef double x1 = hi - INV_GOLDEN * (hi - lo)
    cdef double x2 = lo + INV_GOLDEN * (hi - lo)
    cdef double f1 = _eval_gamma(x1, nu1, nu2, r1, r2, gpp_r, gpp_i,
                                 guu_r, guu_i, gup_r, gup_i, gpu_r, gpu_i,
                                 &a_tmp, &b_tmp, &d_tmp)
    cdef double f2 = _eval_gamma(x2, nu1, nu2, r1, r2, gpp_r, gpp_i,
                                 guu_r, guu_i, gup_r, gup_i, gpu_r, gpu_i,
                                 &a_tmp, &b_tmp, &d_tmp)
    while hi - lo > tol:
        if f1 <= f2:
            hi = x2
            x2 = x1
            f2 = f1
            x1 = hi - INV_GOLDEN * (hi - lo)
            f1 = _eval_gamma(x1, nu1, nu2, r1, r2, gpp_r, gpp_i,
                             guu_r, guu_i, gup_r, gup_i, gpu_r, gpu_i,
                             &a_tmp, &b_tmp, &d_tmp)
        else:
            lo = x1
            x1 = x2
            f1 = f2
            x2 = lo + INV_GOLDEN * (hi - lo)
            f2 = _eval_gamma(x2, nu1, nu2, r1, r2, gpp_r, gpp_i,
                             guu_r, guu_i, gup_r, gup_i, gpu_r, gpu_i,
                             &a_tmp, &b_tmp, &d_tmp)
    return 0.5 * (lo + hi)


def minimize_batch(double[::1] nu1, double[::1] nu2,
                   double[::1] r1, double[::1] r2,
                   double[::1] gpp_r, double[::1] gpp_i,
                   double[::1] guu_r, double[::1] guu_i,
                   double[::1] gup_r, double[::1] gup_i,
                   double[::1] gpu_r, double[::1] gpu_i,
                   int n_coarse, double tol,
                   double[::1] out_val, double[::1] out_a1,
                   double[::1] out_a2, double[::1] out_gamma,
                   long[::1] out_flag):
    """Fill the output arrays with the per-node joint minima."""
    cdef Py_ssize_t n = nu1.shape[0]
    cdef Py_ssize_t k
    cdef int i, deg
    cdef double step, best_f, best_gamma, f, gamma, prev, nxt, a, b
    cdef double coarse[512]
    if n_coarse < 4 or n_coarse > 512:
        raise ValueError("n_coarse must lie in [4, 512]")
    with nogil:
        step = TWO_PI / n_coarse
        for k in range(n):
            for i in range(n_coarse):
                coarse[i] = _eval_gamma(i * step, nu1[k], nu2[k], r1[k], r2[k],
                                        gpp_r[k], gpp_i[k], guu_r[k], guu_i[k],
                                        gup_r[k], gup_i[k], gpu_r[k], gpu_i[k],
                                        &a, &b, &deg)
            best_f = INFINITY
            best_gamma = 0.0
            for i in range(n_coarse):
                # C modulo is negative for i = 0; shift before reducing.
                prev = coarse[(i + n_coarse - 1) % n_coarse]
                nxt = coarse[(i + 1) % n_coarse]
                if coarse[i] <= prev and coarse[i] <= nxt:
                    gamma = _golden(i * step - step, i * step + step, tol,
                                    nu1[k], nu2[k], r1[k], r2[k],
                                    gpp_r[k], gpp_i[k], guu_r[k], guu_i[k],
                                    gup_r[k], gup_i[k], gpu_r[k], gpu_i[k])
                    f = _eval_gamma(gamma, nu1[k], nu2[k], r1[k], r2[k],
                                    gpp_r[k], gpp_i[k], guu_r[k], guu_i[k],
                                    gup_r[k], gup_i[k], gpu_r[k], gpu_i[k],
                                    &a, &b, &deg)
                    if f < best_f:
                        best_f = f
                        best_gamma = gamma
            f = _eval_gamma(best_gamma, nu1[k], nu2[k], r1[k], r2[k],
                            gpp_r[k], gpp_i[k], guu_r[k], guu_i[k],
                            gup_r[k], gup_i[k], gpu_r[k], gpu_i[k],
                            &a, &b, &deg)
            if best_gamma < 0.0:
                best_gamma += TWO_PI
            elif best_gamma >= TWO_PI:
                best_gamma -= TWO_PI
            out_val[k] = sqrt(f) if f > 0.0 else 0.0
            out_a1[k] = a
            out_a2[k] = b
            out_gamma[k] = best_gamma
            out_flag[k] = deg
