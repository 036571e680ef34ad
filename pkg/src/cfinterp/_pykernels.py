"""Pure-Python kernels: batched continued-fraction recurrences and cumulative quadrature.

Mirrors ``_ckernels.pyx`` line for line; used when the compiled module is
missing or ``CFINTERP_PURE_PYTHON`` is set.
"""

import numpy as np


def backward_batch(b0, a, b, tol):
    """Evaluate ``m`` fractions innermost-first.

    Parameters
    ----------
    b0 : ndarray, shape (m,)
    a, b : ndarray, shape (m, n)
        Partial numerators and denominators, floor ``i`` in column ``i - 1``.
    tol : float
        Denominators with ``abs < tol`` are a breakdown.

    Returns
    -------
    values : ndarray, shape (m,)
        NaN where the row broke down.
    fail : ndarray of intp, shape (m,)
        0 on success, else the 1-based floor whose denominator vanished.
    """
    m, n = a.shape
    values = np.empty(m)
    fail = np.zeros(m, dtype=np.intp)
    for r in range(m):
        if n == 0:
            values[r] = b0[r]
            continue
        t = float(b[r, n - 1])
        for i in range(n, 0, -1):
            if abs(t) < tol:
                fail[r] = i
                t = np.nan
                break
            if i == 1:
                t = b0[r] + a[r, 0] / t
            else:
                t = b[r, i - 2] + a[r, i - 1] / t
        values[r] = t
    return values, fail


def forward_batch(b0, a, b):
    """Numerator/denominator three-term recurrence; returns ``(A_n, B_n)``."""
    m, n = a.shape
    out_a = np.empty(m)
    out_b = np.empty(m)
    for r in range(m):
        a_prev, a_cur = 1.0, float(b0[r])
        b_prev, b_cur = 0.0, 1.0
        for i in range(n):
            ai = a[r, i]
            bi = b[r, i]
            a_prev, a_cur = a_cur, bi * a_cur + ai * a_prev
            b_prev, b_cur = b_cur, bi * b_cur + ai * b_prev
        out_a[r] = a_cur
        out_b[r] = b_cur
    return out_a, out_b


def forward_deriv_batch(b0, a, b, db0, da, db):
    """Forward recurrence co-propagating first derivatives.

    Returns ``(A_n, B_n, dA_n, dB_n)``.
    """
    m, n = a.shape
    out = np.empty((4, m))
    for r in range(m):
        a_prev, a_cur = 1.0, float(b0[r])
        b_prev, b_cur = 0.0, 1.0
        da_prev, da_cur = 0.0, float(db0[r])
        db_prev, db_cur = 0.0, 0.0
        for i in range(n):
            ai = a[r, i]
            bi = b[r, i]
            dai = da[r, i]
            dbi = db[r, i]
            na = bi * a_cur + ai * a_prev
            nb = bi * b_cur + ai * b_prev
            nda = dbi * a_cur + bi * da_cur + dai * a_prev + ai * da_prev
            ndb = dbi * b_cur + bi * db_cur + dai * b_prev + ai * db_prev
            a_prev, a_cur = a_cur, na
            b_prev, b_cur = b_cur, nb
            da_prev, da_cur = da_cur, nda
            db_prev, db_cur = db_cur, ndb
        out[0, r] = a_cur
        out[1, r] = b_cur
        out[2, r] = da_cur
        out[3, r] = db_cur
    return out[0], out[1], out[2], out[3]


def cumulative_quad(y, h):
    """Running integral ``C[j]`` of uniform samples ``y`` from ``z_0`` to ``z_j``.

    Even ``j``: composite Simpson. Odd ``j >= 3``: Simpson up to ``j - 3`` and
    the 3/8 rule on the last three cells. ``j = 1``: the cubic through
    ``y[0:4]`` integrated over the first cell. Needs ``len(y) >= 4``.
    """
    npts = len(y)
    c = np.zeros(npts)
    if npts < 4:
        raise ValueError("cumulative_quad needs at least 4 samples")
    c[1] = h * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]) / 24.0
    for j in range(2, npts):
        if j % 2 == 0:
            c[j] = c[j - 2] + h * (y[j - 2] + 4.0 * y[j - 1] + y[j]) / 3.0
        else:
            c[j] = c[j - 3] + 3.0 * h * (y[j - 3] + 3.0 * y[j - 2] + 3.0 * y[j - 1] + y[j]) / 8.0
    return c
