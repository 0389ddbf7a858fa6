# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 stepping kernel for the converter network.

Mirrors ``dcat._pycore.advance`` exactly; see that module for the argument
layout.
"""

from libc.math cimport fabs, isfinite
from libc.stdlib cimport malloc, free

cdef enum:
    # params layout
    P_VDC = 0
    P_C = 1
    P_LLEAK = 2
    P_LMAG = 3
    P_RW = 4
    P_RBATT = 5
    P_RLOAD = 6
    P_RPATH = 7
    P_LLOAD = 8
    # acc layout
    A_SRC = 0
    A_LOAD = 1
    A_BATT = 2
    A_WIND = 3
    A_PATH = 4
    A_RESID = 5
    A_VOUT = 6
    A_PREV_S = 7
    A_PREV_PWM = 8
    A_BRIDGE = 9
    A_PWM = 10


cdef inline double deriv(const double* x, int m, double s, int tap, const double* p,
                         double* d, double* pw) noexcept nogil:
    """Fill ``d`` with dx/dt and ``pw`` with power terms; return the dominant term."""
    cdef int k
    cdef double vstr = 0.0, emf_sum = 0.0, vtap = 0.0, ib, vstar, seg
    cdef double il = x[2 * m + 1], imag = x[2 * m]
    cdef double stored_c = 0.0, stored_l = 0.0, dom = 0.0, t
    for k in range(m):
        vstr += x[k]
        emf_sum += s * x[k] - p[P_RW] * x[m + k]
        if k < tap:
            vtap += x[k]
    ib = (p[P_VDC] - vstr) / p[P_RBATT]
    vstar = emf_sum / (m + p[P_LLEAK] / p[P_LMAG])
    for k in range(m):
        d[m + k] = (s * x[k] - p[P_RW] * x[m + k] - vstar) / p[P_LLEAK]
        seg = ib - il if k < tap else ib
        d[k] = (seg - s * x[m + k]) / p[P_C]
        t = p[P_C] * x[k] * d[k]
        stored_c += t
        if fabs(t) > dom:
            dom = fabs(t)
        t = p[P_LLEAK] * x[m + k] * d[m + k]
        stored_l += t
        if fabs(t) > dom:
            dom = fabs(t)
    d[2 * m] = vstar / p[P_LMAG]
    d[2 * m + 1] = (vtap - il * (p[P_RLOAD] + p[P_RPATH])) / p[P_LLOAD]
    pw[0] = p[P_VDC] * ib
    pw[1] = p[P_RLOAD] * il * il
    pw[2] = p[P_RBATT] * ib * ib
    t = 0.0
    for k in range(m):
        t += x[m + k] * x[m + k]
    pw[3] = p[P_RW] * t
    pw[4] = p[P_RPATH] * il * il
    t = p[P_LMAG] * imag * d[2 * m]
    stored_l += t
    if fabs(t) > dom:
        dom = fabs(t)
    t = p[P_LLOAD] * il * d[2 * m + 1]
    stored_l += t
    if fabs(t) > dom:
        dom = fabs(t)
    pw[5] = stored_c + stored_l
    for k in range(5):
        if fabs(pw[k]) > dom:
            dom = fabs(pw[k])
    return dom


def advance(double[::1] x, int m, long n0, long nsteps, double dt,
            long n_half, long n_pwm, long n_high, int tap_low, int tap_high,
            double[::1] params, long[::1] phys, int n_phys,
            double[:, ::1] rec, long decim, double[:, ::1] rec_period, long period_steps,
            double[::1] acc):
    cdef int n = 2 * m + 2
    cdef long step, nn
    cdef int i, k, tap, pwm_high
    cdef double s, h2 = 0.5 * dt, h6 = dt / 6.0, dom, resid, vout
    cdef double pw1[6]
    cdef double pw2[6]
    cdef double pw3[6]
    cdef double pw4[6]
    cdef double* p = &params[0]
    cdef double* xs = &x[0]
    cdef double* buf = <double*> malloc(5 * n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* k1 = buf
    cdef double* k2 = buf + n
    cdef double* k3 = buf + 2 * n
    cdef double* k4 = buf + 3 * n
    cdef double* xt = buf + 4 * n
    cdef long failed = -1
    try:
        with nogil:
            for step in range(nsteps):
                nn = n0 + step
                s = 1.0 if (nn // n_half) % 2 == 0 else -1.0
                pwm_high = 1 if (nn % n_pwm) < n_high else 0
                tap = tap_high if pwm_high else tap_low

                if acc[A_PREV_S] != 0.0 and acc[A_PREV_S] != s:
                    acc[A_BRIDGE] += 1.0
                acc[A_PREV_S] = s
                if acc[A_PREV_PWM] >= 0.0 and acc[A_PREV_PWM] != pwm_high:
                    acc[A_PWM] += 1.0
                acc[A_PREV_PWM] = pwm_high

                vout = 0.0
                for k in range(tap):
                    vout += xs[k]
                if nn % decim == 0:
                    for k in range(m):
                        rec[nn // decim, phys[k]] = xs[k]
                        rec[nn // decim, n_phys + phys[k]] = xs[m + k]
                    rec[nn // decim, 2 * n_phys] = xs[2 * m]
                    rec[nn // decim, 2 * n_phys + 1] = xs[2 * m + 1]
                if nn % period_steps == 0:
                    for k in range(m):
                        rec_period[nn // period_steps, phys[k]] = xs[k]
                acc[A_VOUT] += vout
                if (nn + 1) % decim == 0:
                    rec[nn // decim, 2 * n_phys + 2] = acc[A_VOUT] / decim
                    acc[A_VOUT] = 0.0

                dom = deriv(xs, m, s, tap, p, k1, pw1)
                resid = pw1[0] - pw1[1] - pw1[2] - pw1[3] - pw1[4] - pw1[5]
                if dom > 0.0 and fabs(resid) / dom > acc[A_RESID]:
                    acc[A_RESID] = fabs(resid) / dom
                for i in range(n):
                    xt[i] = xs[i] + h2 * k1[i]
                deriv(xt, m, s, tap, p, k2, pw2)
                for i in range(n):
                    xt[i] = xs[i] + h2 * k2[i]
                deriv(xt, m, s, tap, p, k3, pw3)
                for i in range(n):
                    xt[i] = xs[i] + dt * k3[i]
                deriv(xt, m, s, tap, p, k4, pw4)
                for i in range(n):
                    xs[i] = xs[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                for i in range(5):
                    acc[i] += h6 * (pw1[i] + 2.0 * pw2[i] + 2.0 * pw3[i] + pw4[i])
                for i in range(n):
                    if not isfinite(xs[i]):
                        failed = nn + 1
                        break
                if failed >= 0:
                    break
    finally:
        free(buf)
    return failed
