# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the batched kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, INFINITY

cnp.import_array()

cdef double TIE_ATOL = 1e-12


def linear_logexp(double[:, ::1] logp, double[:, ::1] logv, double[::1] w, double gamma):
    cdef Py_ssize_t k = logp.shape[0], m = logv.shape[0], n = logv.shape[1]
    cdef Py_ssize_t r, j, i
    cdef double acc, mn, a, zmax, tot
    out = np.empty(k)
    cdef double[::1] o = out
    with nogil:
        for r in range(k):
            acc = 0.0
            for j in range(m):
                mn = INFINITY
                for i in range(n):
                    a = logp[r, i] - logv[j, i]
                    if a < mn:
                        mn = a
                if gamma > 0.0:
                    # softmin = -gamma * log sum exp(-a / gamma), shifted by the min
                    tot = 0.0
                    for i in range(n):
                        a = logp[r, i] - logv[j, i]
                        tot += exp(-(a - mn) / gamma)
                    mn = mn - gamma * log(tot)
                acc += w[j] * mn
            o[r] = acc
    return out


def linear_shares(double[:, ::1] logp, double[:, ::1] logv, double[::1] w, double gamma):
    cdef Py_ssize_t k = logp.shape[0], m = logv.shape[0], n = logv.shape[1]
    cdef Py_ssize_t r, j, i, last, cnt
    cdef double mn, a, tot
    s_arr = np.zeros((k, n))
    t_arr = np.zeros(k, dtype=np.uint8)
    cdef double[:, ::1] s = s_arr
    cdef cnp.uint8_t[::1] ties = t_arr
    cdef double[::1] buf = np.empty(n)
    with nogil:
        for r in range(k):
            for j in range(m):
                mn = INFINITY
                for i in range(n):
                    a = logp[r, i] - logv[j, i]
                    buf[i] = a
                    if a < mn:
                        mn = a
                if gamma > 0.0:
                    tot = 0.0
                    for i in range(n):
                        buf[i] = exp(-(buf[i] - mn) / gamma)
                        tot += buf[i]
                    for i in range(n):
                        s[r, i] += w[j] * buf[i] / tot
                else:
                    last = 0
                    cnt = 0
                    for i in range(n):
                        if buf[i] <= mn + TIE_ATOL:
                            last = i
                            cnt += 1
                    if cnt > 1:
                        ties[r] = 1
                    s[r, last] += w[j]
    return s_arr, t_arr.astype(bool)


def leontief_logexp(double[:, ::1] p, double[:, ::1] V, double[::1] w):
    cdef Py_ssize_t k = p.shape[0], m = V.shape[0], n = V.shape[1]
    cdef Py_ssize_t r, j, i
    cdef double acc, tot
    out = np.empty(k)
    cdef double[::1] o = out
    with nogil:
        for r in range(k):
            acc = 0.0
            for j in range(m):
                tot = 0.0
                for i in range(n):
                    tot += p[r, i] * V[j, i]
                acc += w[j] * log(tot)
            o[r] = acc
    return out


def leontief_shares(double[:, ::1] p, double[:, ::1] V, double[::1] w):
    cdef Py_ssize_t k = p.shape[0], m = V.shape[0], n = V.shape[1]
    cdef Py_ssize_t r, j, i
    cdef double tot, c
    s_arr = np.zeros((k, n))
    cdef double[:, ::1] s = s_arr
    with nogil:
        for r in range(k):
            for j in range(m):
                tot = 0.0
                for i in range(n):
                    tot += p[r, i] * V[j, i]
                c = w[j] / tot
                for i in range(n):
                    s[r, i] += c * p[r, i] * V[j, i]
    return s_arr


cdef cnp.ndarray _chain(double[::1] x, double[::1] y, double sign):
    cdef Py_ssize_t npts = x.shape[0], i, top = 0, o, a
    cdef double cross
    idx_arr = np.empty(npts, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = idx_arr
    with nogil:
        for i in range(npts):
            while top >= 2:
                o = idx[top - 2]
                a = idx[top - 1]
                cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
                if sign * cross >= 0.0:
                    top -= 1
                else:
                    break
            idx[top] = i
            top += 1
    return idx_arr[:top]


def upper_hull(x, y):
    return _chain(np.ascontiguousarray(x, dtype=float), np.ascontiguousarray(y, dtype=float), 1.0)


def lower_hull(x, y):
    return _chain(np.ascontiguousarray(x, dtype=float), np.ascontiguousarray(y, dtype=float), -1.0)
