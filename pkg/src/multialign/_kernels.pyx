# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; mirrors ``_kernels_py`` function for function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p

cnp.import_array()


def adamic_adar_block(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                      const double[::1] weights, Py_ssize_t row_lo, Py_ssize_t row_hi,
                      Py_ssize_t col_lo, Py_ssize_t col_hi, bint weighted):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[double, ndim=2] out_arr = np.zeros((row_hi - row_lo, col_hi - col_lo))
    cdef double[:, ::1] out = out_arr
    cdef double[::1] strength = np.zeros(n)
    cdef double[::1] inv = np.zeros(n)
    cdef Py_ssize_t x, z, y, p, q, deg
    cdef double denom, wxz

    for z in range(n):
        for p in range(indptr[z], indptr[z + 1]):
            strength[z] += weights[p]
        deg = indptr[z + 1] - indptr[z]
        if weighted:
            if deg > 0:
                denom = log1p(strength[z])
                if denom <= 0.0:
                    raise AssertionError("common neighbour with zero strength")
                inv[z] = 1.0 / denom
        elif deg >= 2:
            inv[z] = 1.0 / log(<double>deg)

    for x in range(row_lo, row_hi):
        for p in range(indptr[x], indptr[x + 1]):
            z = indices[p]
            wxz = weights[p]
            for q in range(indptr[z], indptr[z + 1]):
                y = indices[q]
                if y < col_lo or y >= col_hi or y == x:
                    continue
                if weighted:
                    out[x - row_lo, y - col_lo] += (wxz + weights[q]) * inv[z]
                else:
                    # z has x and y as distinct neighbours, so deg(z) >= 2
                    out[x - row_lo, y - col_lo] += inv[z]
    return out_arr


def nmf_epoch(const cnp.int64_t[::1] rows, const cnp.int64_t[::1] cols, const double[::1] vals,
              double[:, ::1] T, double[:, ::1] Vt, const double[::1] row_counts,
              const double[::1] col_counts, double lam, double floor):
    cdef Py_ssize_t n_cells = rows.shape[0]
    cdef Py_ssize_t m = T.shape[0], n = Vt.shape[0], r = T.shape[1]
    cdef double[:, ::1] num = np.zeros((m, r))
    cdef double[:, ::1] den = np.zeros((m, r))
    cdef double[:, ::1] num_v = np.zeros((n, r))
    cdef double[:, ::1] den_v = np.zeros((n, r))
    cdef Py_ssize_t c, u, i, k
    cdef double pred, d

    for c in range(n_cells):
        u = rows[c]
        i = cols[c]
        pred = 0.0
        for k in range(r):
            pred += T[u, k] * Vt[i, k]
        for k in range(r):
            num[u, k] += vals[c] * Vt[i, k]
            den[u, k] += pred * Vt[i, k]
    for u in range(m):
        for k in range(r):
            d = den[u, k] + lam * row_counts[u] * T[u, k]
            if d > 0.0:
                T[u, k] *= num[u, k] / d
            if T[u, k] < floor:
                T[u, k] = floor

    for c in range(n_cells):
        u = rows[c]
        i = cols[c]
        pred = 0.0
        for k in range(r):
            pred += T[u, k] * Vt[i, k]
        for k in range(r):
            num_v[i, k] += vals[c] * T[u, k]
            den_v[i, k] += pred * T[u, k]
    for i in range(n):
        for k in range(r):
            d = den_v[i, k] + lam * col_counts[i] * Vt[i, k]
            if d > 0.0:
                Vt[i, k] *= num_v[i, k] / d
            if Vt[i, k] < floor:
                Vt[i, k] = floor
