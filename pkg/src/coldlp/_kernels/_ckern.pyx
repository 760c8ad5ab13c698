# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled CSR kernels: the per-epoch aggregation loops and the per-pair
neighbor-intersection loop. Semantics mirror ``coldlp._kernels._numpy``;
summation runs in CSR entry order."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def neighbor_sum(double[:, ::1] h, cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    """out[v] = sum of h rows over the CSR row of v (zero row if empty)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t d = h.shape[1]
    out_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t v, j, c
    cdef cnp.int64_t u
    for v in range(n):
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            for c in range(d):
                out[v, c] += h[u, c]
    return out_arr


def neighbor_weighted_sum(double[:, ::1] h, cnp.int64_t[::1] indptr,
                          cnp.int64_t[::1] indices, double[::1] weights):
    """out[v] = sum_j weights[j] * h[indices[j]] over the CSR row of v."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t d = h.shape[1]
    out_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t v, j, c
    cdef cnp.int64_t u
    cdef double w
    for v in range(n):
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            w = weights[j]
            for c in range(d):
                out[v, c] += w * h[u, c]
    return out_arr


def intersection_weight_sum(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                            double[::1] node_weight, cnp.int64_t[::1] us,
                            cnp.int64_t[::1] vs):
    """For each pair (us[i], vs[i]): sum node_weight over N(u) ∩ N(v).

    Neighbor lists must be sorted ascending; merge runs in O(d_u + d_v).
    """
    cdef Py_ssize_t npairs = us.shape[0]
    out_arr = np.zeros(npairs, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef cnp.int64_t a, b, ea, eb, x, y
    cdef double acc
    for i in range(npairs):
        a = indptr[us[i]]
        ea = indptr[us[i] + 1]
        b = indptr[vs[i]]
        eb = indptr[vs[i] + 1]
        acc = 0.0
        while a < ea and b < eb:
            x = indices[a]
            y = indices[b]
            if x == y:
                acc += node_weight[x]
                a += 1
                b += 1
            elif x < y:
                a += 1
            else:
                b += 1
        out[i] = acc
    return out_arr
