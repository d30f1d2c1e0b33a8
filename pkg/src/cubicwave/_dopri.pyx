# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) stepper for U'' + U = U^3 with dense output."""

import numpy as np
from libc.math cimport fabs, sqrt, fmax, fmin, pow

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
cdef double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0
cdef double D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0
cdef double D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0


cdef inline void rhs(double u, double v, double* du, double* dv) nogil:
    du[0] = v
    dv[0] = u * u * u - u


def integrate(double x0, double y0, double s_end, double rtol, double atol,
              double cutoff, long max_steps):
    """Integrate from s=0 to s_end.

    Returns (s, y, rcont, status) with status 0 = reached s_end,
    1 = |U| crossed cutoff, 2 = step size underflow, 3 = step budget exhausted.
    """
    cdef long cap = 1024
    s_arr = np.empty(cap)
    y_arr = np.empty((cap, 2))
    r_arr = np.empty((cap, 5, 2))
    cdef double[:] S = s_arr
    cdef double[:, :] Yv = y_arr
    cdef double[:, :, :] R = r_arr

    cdef double direction = 1.0 if s_end >= 0.0 else -1.0
    cdef double s = 0.0, u = x0, v = y0
    cdef double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v, k5u, k5v, k6u, k6v, k7u, k7v
    cdef double yu, yv, nu, nv, eu, ev, sku, skv, err, fac, h, tiny, d0, d1
    cdef long n = 1, steps = 0
    cdef int status = 0, rejected = 0
    S[0] = 0.0
    Yv[0, 0] = u
    Yv[0, 1] = v

    rhs(u, v, &k1u, &k1v)
    # initial step from the usual norm heuristic
    sku = atol + rtol * fabs(u)
    skv = atol + rtol * fabs(v)
    d0 = sqrt(0.5 * ((u / sku) ** 2 + (v / skv) ** 2))
    d1 = sqrt(0.5 * ((k1u / sku) ** 2 + (k1v / skv) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = fmin(h, fabs(s_end)) if s_end != 0.0 else 0.0
    if h == 0.0:
        return s_arr[:1].copy(), y_arr[:1].copy(), r_arr[:0].copy(), 0
    h = fmin(h, 0.1) * direction

    while True:
        if (s_end - s) * direction <= 0.0:
            status = 0
            break
        if steps >= max_steps:
            status = 3
            break
        if (s + h - s_end) * direction > 0.0:
            h = s_end - s
        tiny = 1e-14 * fmax(fabs(s), 1.0)
        if fabs(h) < tiny:
            status = 2
            break
        steps += 1

        yu = u + h * A21 * k1u
        yv = v + h * A21 * k1v
        rhs(yu, yv, &k2u, &k2v)
        yu = u + h * (A31 * k1u + A32 * k2u)
        yv = v + h * (A31 * k1v + A32 * k2v)
        rhs(yu, yv, &k3u, &k3v)
        yu = u + h * (A41 * k1u + A42 * k2u + A43 * k3u)
        yv = v + h * (A41 * k1v + A42 * k2v + A43 * k3v)
        rhs(yu, yv, &k4u, &k4v)
        yu = u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u)
        yv = v + h * (A51 * k1v + A52 * k2v + A53 * k3v + A54 * k4v)
        rhs(yu, yv, &k5u, &k5v)
        yu = u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u)
        yv = v + h * (A61 * k1v + A62 * k2v + A63 * k3v + A64 * k4v + A65 * k5v)
        rhs(yu, yv, &k6u, &k6v)
        nu = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
        nv = v + h * (B1 * k1v + B3 * k3v + B4 * k4v + B5 * k5v + B6 * k6v)
        rhs(nu, nv, &k7u, &k7v)

        eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
        ev = h * (E1 * k1v + E3 * k3v + E4 * k4v + E5 * k5v + E6 * k6v + E7 * k7v)
        sku = atol + rtol * fmax(fabs(u), fabs(nu))
        skv = atol + rtol * fmax(fabs(v), fabs(nv))
        err = sqrt(0.5 * ((eu / sku) ** 2 + (ev / skv) ** 2))
        if err != err:
            err = 1e10

        if err <= 1.0:
            if n >= cap:
                cap *= 2
                s_arr = np.resize(s_arr, cap)
                y_arr = np.resize(y_arr, (cap, 2))
                r_arr = np.resize(r_arr, (cap, 5, 2))
                S = s_arr
                Yv = y_arr
                R = r_arr
            R[n - 1, 0, 0] = u
            R[n - 1, 0, 1] = v
            R[n - 1, 1, 0] = nu - u
            R[n - 1, 1, 1] = nv - v
            R[n - 1, 2, 0] = h * k1u - (nu - u)
            R[n - 1, 2, 1] = h * k1v - (nv - v)
            R[n - 1, 3, 0] = (nu - u) - h * k7u - R[n - 1, 2, 0]
            R[n - 1, 3, 1] = (nv - v) - h * k7v - R[n - 1, 2, 1]
            R[n - 1, 4, 0] = h * (D1 * k1u + D3 * k3u + D4 * k4u + D5 * k5u + D6 * k6u + D7 * k7u)
            R[n - 1, 4, 1] = h * (D1 * k1v + D3 * k3v + D4 * k4v + D5 * k5v + D6 * k6v + D7 * k7v)
            s = s + h
            u = nu
            v = nv
            k1u = k7u
            k1v = k7v
            S[n] = s
            Yv[n, 0] = u
            Yv[n, 1] = v
            n += 1
            if fabs(u) >= cutoff:
                status = 1
                break
            fac = 0.9 * pow(fmax(err, 1e-10), -0.2)
            fac = fmin(fac, 2.0 if rejected else 10.0)
            rejected = 0
            h = h * fmax(fac, 0.2)
        else:
            rejected = 1
            fac = 0.9 * pow(err, -0.2)
            h = h * fmax(fac, 0.2)

    return s_arr[:n].copy(), y_arr[:n].copy(), r_arr[:n - 1].copy(), status


def dense_eval(double[:] s_nodes, double[:, :, :] rcont, double[:] query):
    """Evaluate the continuous extension at each query point (nodes monotone)."""
    cdef long m = query.shape[0], n = s_nodes.shape[0], i, lo, hi, mid, j
    out = np.empty((m, 2))
    cdef double[:, :] O = out
    cdef double q, th, th1, h
    cdef double sign = 1.0 if s_nodes[n - 1] >= s_nodes[0] else -1.0
    for i in range(m):
        q = query[i]
        lo = 0
        hi = n - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if (s_nodes[mid] - q) * sign <= 0.0:
                lo = mid
            else:
                hi = mid
        h = s_nodes[lo + 1] - s_nodes[lo]
        th = (q - s_nodes[lo]) / h
        th1 = 1.0 - th
        for j in range(2):
            O[i, j] = rcont[lo, 0, j] + th * (rcont[lo, 1, j] + th1 * (
                rcont[lo, 2, j] + th * (rcont[lo, 3, j] + th1 * rcont[lo, 4, j])))
    return out
