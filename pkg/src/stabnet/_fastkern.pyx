# cython: language_level=3
"""Compiled merge-candidate kernel: the hot inner loop of the greedy optimisers."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def min_candidate(double[:, :, ::1] e_sub, double[::1] a_row, double[::1] a_col,
                  double[::1] qv):
    """min over t of qv[t] + 2*(e[t, i, j] - a_row[i]*a_col[j]), shape (r, c)."""
    cdef Py_ssize_t s = e_sub.shape[0]
    cdef Py_ssize_t r = e_sub.shape[1]
    cdef Py_ssize_t c = e_sub.shape[2]
    out_arr = np.empty((r, c), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t t, i, j
    cdef double v, q0

    q0 = qv[0]
    for i in range(r):
        for j in range(c):
            out[i, j] = q0 + 2.0 * (e_sub[0, i, j] - a_row[i] * a_col[j])
    for t in range(1, s):
        q0 = qv[t]
        for i in range(r):
            for j in range(c):
                v = q0 + 2.0 * (e_sub[t, i, j] - a_row[i] * a_col[j])
                if v < out[i, j]:
                    out[i, j] = v
    return out_arr
