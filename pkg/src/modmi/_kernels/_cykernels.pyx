"""Compiled kernels for the K-means hot loops.

Built with -ffp-contract=off so the distance accumulation rounds exactly like
the numpy fallback (multiply then add, dimension by dimension).
"""

from libc.stdint cimport int64_t

name = "compiled"


def assign_chunk(const double[:, ::1] x, const double[:, ::1] centroids,
                 int64_t[::1] labels_out, double[::1] dist2_out):
    """Nearest centroid (squared Euclidean), ties to the lowest index."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]
    cdef Py_ssize_t i, c, dim
    cdef Py_ssize_t best_c
    cdef double best, s, diff
    with nogil:
        for i in range(n):
            best = -1.0
            best_c = 0
            for c in range(k):
                s = 0.0
                for dim in range(d):
                    diff = x[i, dim] - centroids[c, dim]
                    s = s + diff * diff
                    if best >= 0.0 and s >= best:
                        break
                if best < 0.0 or s < best:
                    best = s
                    best_c = c
            labels_out[i] = best_c
            dist2_out[i] = best


def update_chunk(const double[:, ::1] x, const int64_t[::1] labels,
                 double[:, ::1] sums_out, int64_t[::1] counts_out):
    """Accumulate one chunk's per-centroid sums and counts (in point order)."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t i, dim
    cdef int64_t c
    with nogil:
        for i in range(n):
            c = labels[i]
            for dim in range(d):
                sums_out[c, dim] += x[i, dim]
            counts_out[c] += 1
