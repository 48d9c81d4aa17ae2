# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled window-maximum kernels; same arithmetic and tie rules as _fallback."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def maximal_scan(prefix):
    cdef double[::1] P = np.ascontiguousarray(prefix, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0] - 1
    vals_arr = np.full(n, -1.0)
    wa_arr = np.zeros(n, dtype=np.int64)
    wb_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] vals = vals_arr
    cdef cnp.int64_t[::1] wa = wa_arr
    cdef cnp.int64_t[::1] wb = wb_arr
    sm_arr = np.empty(n)
    arg_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] sm = sm_arr
    cdef cnp.int64_t[::1] arg = arg_arr
    cdef Py_ssize_t a, b, l
    cdef double avg, best
    cdef cnp.int64_t bi
    for a in range(n):
        best = -1.0
        bi = n - 1
        for b in range(n - 1, a - 1, -1):
            avg = (P[b + 1] - P[a]) / <double>(b - a + 1)
            if avg >= best:
                best = avg
                bi = b
            sm[b] = best
            arg[b] = bi
        for l in range(a, n):
            if sm[l] > vals[l]:
                vals[l] = sm[l]
                wa[l] = a
                wb[l] = arg[l]
    return vals_arr, wa_arr, wb_arr


def centered_window_max(rows, Py_ssize_t kmax):
    cdef double[:, ::1] V = np.ascontiguousarray(rows, dtype=np.float64)
    cdef Py_ssize_t npts = V.shape[0]
    cdef Py_ssize_t width = V.shape[1]
    cdef Py_ssize_t c = (width - 1) // 2
    out_arr = np.zeros(npts)
    cdef double[::1] out = out_arr
    C_arr = np.zeros(width + 1)
    cdef double[::1] C = C_arr
    cdef Py_ssize_t i, j, k, l
    cdef double best, avg, left
    for i in range(npts):
        C[0] = 0.0
        for j in range(width):
            C[j + 1] = C[j] + V[i, j]
        best = 0.0
        for k in range(kmax + 1):
            left = C[c - k]
            for l in range(kmax + 1):
                avg = (C[c + l + 1] - left) / <double>(k + 1 + l)
                if avg > best:
                    best = avg
        out[i] = best
    return out_arr
