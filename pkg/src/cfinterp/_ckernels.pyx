# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the routines in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, NAN

cnp.import_array()


def backward_batch(const double[::1] b0, const double[:, ::1] a,
                   const double[:, ::1] b, double tol):
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, i
    cdef double t
    values_arr = np.empty(m)
    fail_arr = np.zeros(m, dtype=np.intp)
    cdef double[::1] values = values_arr
    cdef Py_ssize_t[::1] fail = fail_arr
    for r in range(m):
        if n == 0:
            values[r] = b0[r]
            continue
        t = b[r, n - 1]
        i = n
        while i >= 1:
            if fabs(t) < tol:
                fail[r] = i
                t = NAN
                break
            if i == 1:
                t = b0[r] + a[r, 0] / t
            else:
                t = b[r, i - 2] + a[r, i - 1] / t
            i -= 1
        values[r] = t
    return values_arr, fail_arr


def forward_batch(const double[::1] b0, const double[:, ::1] a,
                  const double[:, ::1] b):
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, i
    cdef double a_prev, a_cur, b_prev, b_cur, na, nb
    out_a_arr = np.empty(m)
    out_b_arr = np.empty(m)
    cdef double[::1] out_a = out_a_arr
    cdef double[::1] out_b = out_b_arr
    for r in range(m):
        a_prev = 1.0
        a_cur = b0[r]
        b_prev = 0.0
        b_cur = 1.0
        for i in range(n):
            na = b[r, i] * a_cur + a[r, i] * a_prev
            nb = b[r, i] * b_cur + a[r, i] * b_prev
            a_prev = a_cur
            a_cur = na
            b_prev = b_cur
            b_cur = nb
        out_a[r] = a_cur
        out_b[r] = b_cur
    return out_a_arr, out_b_arr


def forward_deriv_batch(const double[::1] b0, const double[:, ::1] a,
                        const double[:, ::1] b, const double[::1] db0,
                        const double[:, ::1] da, const double[:, ::1] db):
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, i
    cdef double a_prev, a_cur, b_prev, b_cur, da_prev, da_cur, db_prev, db_cur
    cdef double ai, bi, dai, dbi, na, nb, nda, ndb
    out_arr = np.empty((4, m))
    cdef double[:, ::1] out = out_arr
    for r in range(m):
        a_prev = 1.0
        a_cur = b0[r]
        b_prev = 0.0
        b_cur = 1.0
        da_prev = 0.0
        da_cur = db0[r]
        db_prev = 0.0
        db_cur = 0.0
        for i in range(n):
            ai = a[r, i]
            bi = b[r, i]
            dai = da[r, i]
            dbi = db[r, i]
            na = bi * a_cur + ai * a_prev
            nb = bi * b_cur + ai * b_prev
            nda = dbi * a_cur + bi * da_cur + dai * a_prev + ai * da_prev
            ndb = dbi * b_cur + bi * db_cur + dai * b_prev + ai * db_prev
            a_prev = a_cur
            a_cur = na
            b_prev = b_cur
            b_cur = nb
            da_prev = da_cur
            da_cur = nda
            db_prev = db_cur
            db_cur = ndb
        out[0, r] = a_cur
        out[1, r] = b_cur
        out[2, r] = da_cur
        out[3, r] = db_cur
    return out_arr[0], out_arr[1], out_arr[2], out_arr[3]


def cumulative_quad(const double[::1] y, double h):
    cdef Py_ssize_t npts = y.shape[0], j
    if npts < 4:
        raise ValueError("cumulative_quad needs at least 4 samples")
    c_arr = np.zeros(npts)
    cdef double[::1] c = c_arr
    c[1] = h * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]) / 24.0
    for j in range(2, npts):
        if j % 2 == 0:
            c[j] = c[j - 2] + h * (y[j - 2] + 4.0 * y[j - 1] + y[j]) / 3.0
        else:
            c[j] = c[j - 3] + 3.0 * h * (y[j - 3] + 3.0 * y[j - 2] + 3.0 * y[j - 1] + y[j]) / 8.0
    return c_arr
