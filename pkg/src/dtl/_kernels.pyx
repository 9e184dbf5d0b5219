# cython: language_level=3
"""Compiled hot kernels; drop-in replacement for ``dtl._kernels_py``."""
import numpy as np

from libc.math cimport fabs, INFINITY

cdef double EPS = 2.0 ** -53
cdef double TINY = 1e-250


cdef void _det_perm(double* a, int stride, int k, int* cols,
                    double* det, double* perm) noexcept nogil:
    # ``a`` points at the first remaining row; ``cols`` holds the k column
    # indices still in play, in order.
    cdef double d, pm, sub_d, sub_p, sign, v, l, r
    cdef int j, jj, t
    cdef int sub[5]
    if k == 1:
        v = a[cols[0]]
        det[0] = v
        perm[0] = fabs(v)
        return
    if k == 2:
        l = a[cols[0]] * a[stride + cols[1]]
        r = a[cols[1]] * a[stride + cols[0]]
        det[0] = l - r
        perm[0] = fabs(l) + fabs(r)
        return
    d = 0.0
    pm = 0.0
    sign = 1.0
    for j in range(k):
        t = 0
        for jj in range(k):
            if jj != j:
                sub[t] = cols[jj]
                t += 1
        _det_perm(a + stride, stride, k - 1, sub, &sub_d, &sub_p)
        v = a[cols[j]]
        d += sign * v * sub_d
        pm += fabs(v) * sub_p
        sign = -sign
    det[0] = d
    perm[0] = pm


cdef int _certify(double det, double perm, int k, double entry_err) noexcept nogil:
    cdef double bound = (k * (entry_err + 2.0) + 4.0) * 4.0 * EPS * perm
    if perm < TINY:
        return 0
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return 0


def orient_filter(const double[:, ::1] P, ids):
    """Certified sign of det[x_j - x_0], j = 1..p, or 0 if uncertain."""
    cdef int p = P.shape[1]
    cdef double a[25]
    cdef int cols[5]
    cdef int idx[6]
    cdef int i, j
    cdef double det, perm
    if p > 5:
        raise ValueError("compiled kernels support p <= 5")
    for i in range(p + 1):
        idx[i] = ids[i]
    for i in range(p):
        cols[i] = i
        for j in range(p):
            a[i * p + j] = P[idx[i + 1], j] - P[idx[0], j]
    _det_perm(a, p, p, cols, &det, &perm)
    return _certify(det, perm, p, 1.0)


def insphere_filter(const double[:, ::1] P, ids, Py_ssize_t q):
    """Certified sign of det[x_j - q, |x_j - q|^2], j = 0..p, or 0."""
    cdef int p = P.shape[1]
    cdef int k = p + 1
    cdef double a[36]
    cdef int cols[6]
    cdef int idx[6]
    cdef int i, j
    cdef double det, perm, v, s
    if p > 4:
        raise ValueError("compiled kernels support p <= 4")
    for i in range(k):
        idx[i] = ids[i]
    for i in range(k):
        cols[i] = i
        s = 0.0
        for j in range(p):
            v = P[idx[i], j] - P[q, j]
            a[i * k + j] = v
            s += v * v
        a[i * k + p] = s
    _det_perm(a, k, k, cols, &det, &perm)
    return _certify(det, perm, k, p + 3.0)


cdef int _walk(const double[:, :, ::1] T, const double[:, ::1] X0,
               const long long[:, ::1] nb, Py_ssize_t start, const double[::1] q,
               int max_steps, double tol, Py_ssize_t* out_s, int* out_f) noexcept nogil:
    cdef int p = X0.shape[1]
    cdef Py_ssize_t s = start, prev = -1, nxt
    cdef int it, i, j, worst, alt
    cdef double lam[6]
    cdef double diff[5]
    cdef double acc, total, worst_val, alt_val
    for it in range(max_steps):
        for j in range(p):
            diff[j] = q[j] - X0[s, j]
        total = 0.0
        for i in range(p):
            acc = 0.0
            for j in range(p):
                acc = acc + T[s, i, j] * diff[j]
            lam[i + 1] = acc
            total += acc
        lam[0] = 1.0 - total
        worst = 0
        worst_val = lam[0]
        for i in range(1, p + 1):
            if lam[i] < worst_val:
                worst_val = lam[i]
                worst = i
        if worst_val >= -tol:
            out_s[0] = s
            out_f[0] = -1
            return 0
        nxt = nb[s, worst]
        if nxt < 0:
            out_s[0] = s
            out_f[0] = worst
            return 1
        if nxt == prev:
            lam[worst] = INFINITY
            alt = 0
            alt_val = lam[0]
            for i in range(1, p + 1):
                if lam[i] < alt_val:
                    alt_val = lam[i]
                    alt = i
            if alt_val >= -tol:
                out_s[0] = s
                out_f[0] = -1
                return 0
            nxt = nb[s, alt]
            if nxt < 0:
                out_s[0] = s
                out_f[0] = alt
                return 1
        prev = s
        s = nxt
    out_s[0] = s
    out_f[0] = -1
    return 2


def walk(T, X0, neighbors, Py_ssize_t start, q, int max_steps, double tol):
    """Barycentric visibility walk toward ``q``; see ``_kernels_py.walk``."""
    cdef Py_ssize_t s
    cdef int f, code
    cdef const double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    if X0.shape[1] > 5:
        raise ValueError("compiled kernels support p <= 5")
    code = _walk(T, X0, neighbors, start, qv, max_steps, tol, &s, &f)
    return s, code, f


def locate_batch(const double[:, :, ::1] T, const double[:, ::1] X0,
                 const long long[:, ::1] neighbors, const long long[::1] starts,
                 const double[:, ::1] Q, int max_steps, double tol):
    """Vectorized walk for many queries."""
    cdef Py_ssize_t m = Q.shape[0], i, s
    cdef int f, code
    if X0.shape[1] > 5:
        raise ValueError("compiled kernels support p <= 5")
    sid = np.empty(m, dtype=np.int64)
    codes = np.empty(m, dtype=np.int64)
    facet = np.empty(m, dtype=np.int64)
    cdef long long[::1] sv = sid
    cdef long long[::1] cv = codes
    cdef long long[::1] fv = facet
    with nogil:
        for i in range(m):
            code = _walk(T, X0, neighbors, starts[i], Q[i], max_steps, tol, &s, &f)
            sv[i] = s
            cv[i] = code
            fv[i] = f
    return sid, codes, facet
