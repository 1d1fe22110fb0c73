# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: log-space Stirling-type triangles and seating loops.

Semantics mirror ``_kernels_py`` exactly (same arithmetic, same order, same
uniform consumption), so the two backends are interchangeable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log1p

cnp.import_array()

cdef double NEG_INF = float("-inf")
cdef double LOGE2 = 0.6931471805599453


cdef inline double logaddexp(double x, double y) nogil:
    # matches numpy's npy_logaddexp branch structure
    if x == y:
        if x == NEG_INF:
            return NEG_INF
        return x + LOGE2
    cdef double tmp = x - y
    if tmp > 0:
        return x + log1p(exp(-tmp))
    elif tmp <= 0:
        return y + log1p(exp(tmp))
    return tmp


cdef void _update_row(double[:] prev, double[:] new, double base,
                      double slope, Py_ssize_t width) nogil:
    # new[k] = logadd(prev[k-1], log(base + slope*k) + prev[k]); nonpositive
    # coefficients annihilate their term.
    cdef Py_ssize_t k
    cdef double coeff, scaled
    for k in range(width - 1, -1, -1):
        coeff = base + slope * k
        if prev[k] == NEG_INF or coeff <= 0.0:
            scaled = NEG_INF
        else:
            scaled = log(coeff) + prev[k]
        if k == 0:
            new[k] = logaddexp(NEG_INF, scaled)
        else:
            new[k] = logaddexp(prev[k - 1], scaled)


def stirling1_table(int nmax, double alpha):
    """Generalized first-kind triangle: S[n+1,k] = S[n,k-1] + (n - k*alpha)*S[n,k]."""
    out = np.full((nmax + 1, nmax + 1), NEG_INF)
    cdef double[:, :] t = out
    t[0, 0] = 0.0
    cdef Py_ssize_t n
    for n in range(nmax):
        _update_row(t[n], t[n + 1], <double> n, -alpha, nmax + 1)
    return out


def noncentral1_table(int mmax, double alpha, double r):
    """Non-central first-kind triangle: S[m+1,k] = S[m,k-1] + (m + r - k*alpha)*S[m,k]."""
    out = np.full((mmax + 1, mmax + 1), NEG_INF)
    cdef double[:, :] t = out
    t[0, 0] = 0.0
    cdef Py_ssize_t m
    for m in range(mmax):
        _update_row(t[m], t[m + 1], m + r, -alpha, mmax + 1)
    return out


def noncentral1_row(int m, double alpha, double r):
    """Row m of the non-central first-kind triangle, O(m) rolling memory."""
    out = np.full(m + 1, NEG_INF)
    cdef double[:] row = out
    row[0] = 0.0
    cdef Py_ssize_t i
    for i in range(m):
        # in-place right-to-left update: row[k] reads row[k-1], row[k] before write
        _update_row(row, row, i + r, -alpha, m + 1)
    return out


def stirling2_table(int rmax, double gamma):
    """Signless non-central second-kind triangle: S[n+1,k] = S[n,k-1] + (k + gamma)*S[n,k]."""
    out = np.full((rmax + 1, rmax + 1), NEG_INF)
    cdef double[:, :] t = out
    t[0, 0] = 0.0
    cdef Py_ssize_t n
    for n in range(rmax):
        _update_row(t[n], t[n + 1], gamma, 1.0, rmax + 1)
    return out


cdef inline Py_ssize_t _seat(long long* sizes, Py_ssize_t k, long long ntot,
                             double alpha, double theta, double u) nogil:
    # returns joined block index, or -1 for a new block
    cdef double t = u * (theta + ntot)
    cdef double acc = 0.0
    cdef Py_ssize_t j
    for j in range(k):
        acc += sizes[j] - alpha
        if t < acc:
            return j
    return -1


def crp_kn_batch(double alpha, double theta, int n, double[:, ::1] u):
    """Number of blocks after seating n customers, one row of uniforms per run."""
    cdef Py_ssize_t runs = u.shape[0]
    out = np.empty(runs, dtype=np.int64)
    cdef long long[::1] kv = out
    buf = np.empty(n, dtype=np.int64)
    cdef long long[::1] sizes = buf
    cdef Py_ssize_t i, step, j, k
    cdef long long ntot
    with nogil:
        for i in range(runs):
            sizes[0] = 1
            k = 1
            ntot = 1
            for step in range(n - 1):
                j = _seat(&sizes[0], k, ntot, alpha, theta, u[i, step])
                if j < 0:
                    sizes[k] = 1
                    k += 1
                else:
                    sizes[j] += 1
                ntot += 1
            kv[i] = k
    return out


def crp_sizes_batch(double alpha, double theta, int n, double[:, ::1] u):
    """Seat n customers per run; returns (block-size matrix, block counts)."""
    cdef Py_ssize_t runs = u.shape[0]
    sizes_out = np.zeros((runs, n), dtype=np.int64)
    k_out = np.empty(runs, dtype=np.int64)
    cdef long long[:, ::1] sv = sizes_out
    cdef long long[::1] kv = k_out
    cdef Py_ssize_t i, step, j, k
    cdef long long ntot
    with nogil:
        for i in range(runs):
            sv[i, 0] = 1
            k = 1
            ntot = 1
            for step in range(n - 1):
                j = _seat(&sv[i, 0], k, ntot, alpha, theta, u[i, step])
                if j < 0:
                    sv[i, k] = 1
                    k += 1
                else:
                    sv[i, j] += 1
                ntot += 1
            kv[i] = k
    return sizes_out, k_out


def continue_counts_fixed(long long[::1] base_sizes, double alpha, double theta,
                          int m, double[:, ::1] u):
    """Continue seating m customers from one fixed state, one run per row of u.

    Returns (new-block count, new-block occupancy) per run.
    """
    cdef Py_ssize_t runs = u.shape[0]
    cdef Py_ssize_t k0 = base_sizes.shape[0]
    knew = np.empty(runs, dtype=np.int64)
    snew = np.empty(runs, dtype=np.int64)
    cdef long long[::1] kv = knew
    cdef long long[::1] sv = snew
    buf = np.empty(k0 + m, dtype=np.int64)
    cdef long long[::1] sizes = buf
    cdef Py_ssize_t i, step, j, k
    cdef long long ntot, n0 = 0, kn, sn
    for i in range(k0):
        n0 += base_sizes[i]
    with nogil:
        for i in range(runs):
            for j in range(k0):
                sizes[j] = base_sizes[j]
            k = k0
            ntot = n0
            kn = 0
            sn = 0
            for step in range(m):
                j = _seat(&sizes[0], k, ntot, alpha, theta, u[i, step])
                if j < 0:
                    sizes[k] = 1
                    k += 1
                    kn += 1
                    sn += 1
                else:
                    sizes[j] += 1
                    if j >= k0:
                        sn += 1
                ntot += 1
            kv[i] = kn
            sv[i] = sn
    return knew, snew


def continue_counts_var(long long[:, ::1] base_sizes, long long[::1] base_k,
                        double alpha, double theta, int m, double[:, ::1] u):
    """Like continue_counts_fixed but with a per-run base state (row i, first base_k[i] sizes)."""
    cdef Py_ssize_t runs = u.shape[0]
    knew = np.empty(runs, dtype=np.int64)
    snew = np.empty(runs, dtype=np.int64)
    cdef long long[::1] kv = knew
    cdef long long[::1] sv = snew
    cdef Py_ssize_t maxk = base_sizes.shape[1]
    buf = np.empty(maxk + m, dtype=np.int64)
    cdef long long[::1] sizes = buf
    cdef Py_ssize_t i, step, j, k, k0
    cdef long long ntot, kn, sn
    with nogil:
        for i in range(runs):
            k0 = <Py_ssize_t> base_k[i]
            ntot = 0
            for j in range(k0):
                sizes[j] = base_sizes[i, j]
                ntot += sizes[j]
            k = k0
            kn = 0
            sn = 0
            for step in range(m):
                j = _seat(&sizes[0], k, ntot, alpha, theta, u[i, step])
                if j < 0:
                    sizes[k] = 1
                    k += 1
                    kn += 1
                    sn += 1
                else:
                    sizes[j] += 1
                    if j >= k0:
                        sn += 1
                ntot += 1
            kv[i] = kn
            sv[i] = sn
    return knew, snew


def continue_single(long long[::1] base_sizes, double alpha, double theta,
                    int m, double[::1] u):
    """One continuation run; returns (new blocks, new occupancy, final sizes)."""
    cdef Py_ssize_t k0 = base_sizes.shape[0]
    buf = np.empty(k0 + m, dtype=np.int64)
    cdef long long[::1] sizes = buf
    cdef Py_ssize_t step, j, k = k0
    cdef long long ntot = 0, kn = 0, sn = 0
    for j in range(k0):
        sizes[j] = base_sizes[j]
        ntot += sizes[j]
    for step in range(m):
        j = _seat(&sizes[0], k, ntot, alpha, theta, u[step])
        if j < 0:
            sizes[k] = 1
            k += 1
            kn += 1
            sn += 1
        else:
            sizes[j] += 1
            if j >= k0:
                sn += 1
        ntot += 1
    return int(kn), int(sn), np.asarray(buf[:k]).copy()
