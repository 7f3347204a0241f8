# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels for the labelling and teacher hot loops.

Each function has a numpy twin in ``bcopy._kernels_py`` that must return
identical results; ``bcopy.kernels`` picks one implementation at import.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

INF = float("inf")


def masked_argmin(double[::1] values, long[::1] labels, long ref_label):
    """Index of the smallest value whose label differs from ref_label.

    Returns (-1, inf) when every label equals ref_label. Ties resolve to
    the smallest index (strict < scan).
    """
    cdef Py_ssize_t i, n = values.shape[0]
    cdef Py_ssize_t best = -1
    cdef double best_val = INF
    for i in range(n):
        if labels[i] != ref_label and values[i] < best_val:
            best_val = values[i]
            best = i
    return best, best_val


def masked_argmin_pairs(double[:, ::1] dist2, long[::1] row_labels,
                        long[::1] col_labels):
    """Per-row masked argmin over a precomputed squared-distance matrix.

    Row i searches columns j with col_labels[j] != row_labels[i]. Rows with
    no admissible column get index -1 and distance inf.
    """
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nr = dist2.shape[0], nc = dist2.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(nr, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best = np.empty(nr, dtype=np.float64)
    cdef long ref
    cdef Py_ssize_t bj
    cdef double bv, v
    for i in range(nr):
        ref = row_labels[i]
        bj = -1
        bv = INF
        for j in range(nc):
            if col_labels[j] != ref:
                v = dist2[i, j]
                if v < bv:
                    bv = v
                    bj = j
        idx[i] = bj
        best[i] = bv
    return idx, best


def nearest_index(double[:, ::1] queries, double[:, ::1] train):
    """Index of the nearest training row per query row (squared Euclidean).

    Ties resolve to the smallest training index.
    """
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t nq = queries.shape[0], nt = train.shape[0]
    cdef Py_ssize_t dim = queries.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(nq, dtype=np.int64)
    cdef Py_ssize_t bj
    cdef double bv, acc, diff
    for i in range(nq):
        bj = 0
        bv = INF
        for j in range(nt):
            acc = 0.0
            for k in range(dim):
                diff = queries[i, k] - train[j, k]
                acc += diff * diff
            if acc < bv:
                bv = acc
                bj = j
        idx[i] = bj
    return idx
