# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled s-sweep kernels.

Each kernel returns, for every parameter value ``s[k]``, the weighted power sum
``sum_j power[j] / f_{s[k]}(m_j)`` that the insertion step maximises over.
Must agree with ``_kernels_py`` to roundoff.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, cos, sin

cnp.import_array()


def order_sums(const double[::1] power, const double[::1] log_absm, const double[::1] s):
    """``out[k] = sum_j power[j] * |m_j|**(-4 s[k])`` (order family, no ``s**eta`` factor)."""
    cdef Py_ssize_t nm = power.shape[0], ns = s.shape[0], j, k
    cdef double acc, c
    out = np.empty(ns, dtype=np.float64)
    cdef double[::1] o = out
    for k in range(ns):
        c = -4.0 * s[k]
        acc = 0.0
        for j in range(nm):
            acc += power[j] * exp(c * log_absm[j])
        o[k] = acc
    return out


def aniso_sums(const double[::1] power, const double[:, ::1] m1, const double[:, ::1] m2,
               const double[::1] absm, const double[::1] s,
               double zeta, double omega, double expo):
    """``out[k] = sum_j power[j] * max_r(|m_r . d_k| + zeta |m| + omega)**(-expo)``.

    ``m1``/``m2`` have shape ``(R, n_modes)``: alias representatives of each
    slot, the weight being the max over them.
    """
    cdef Py_ssize_t nm = power.shape[0], ns = s.shape[0], nr = m1.shape[0], j, k, r
    cdef double acc, cs, sn, base, best, x
    # integer exponents 1 and 2 (gamma = 1/4, 1/2) avoid exp/log per term
    cdef int mode = 1 if expo == 1.0 else (2 if expo == 2.0 else 0)
    iso_arr = np.empty(nm, dtype=np.float64)
    cdef double[::1] iso = iso_arr
    for j in range(nm):
        iso[j] = zeta * absm[j] + omega
    out = np.empty(ns, dtype=np.float64)
    cdef double[::1] o = out
    for k in range(ns):
        cs = cos(s[k])
        sn = sin(s[k])
        acc = 0.0
        for j in range(nm):
            best = fabs(m1[0, j] * cs + m2[0, j] * sn)
            for r in range(1, nr):
                base = fabs(m1[r, j] * cs + m2[r, j] * sn)
                if base > best:
                    best = base
            x = best + iso[j]
            if mode == 1:
                acc += power[j] / x
            elif mode == 2:
                acc += power[j] / (x * x)
            else:
                acc += power[j] * exp(-expo * log(x))
        o[k] = acc
    return out
