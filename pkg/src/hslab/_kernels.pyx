# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels: Horner evaluation and real-root isolation.

Same algorithm and operation order as ``_kernels_py``; the root search runs
without the GIL so pattern solves can proceed in parallel threads.
"""

from libc.math cimport fabs, pow, INFINITY
from libc.stdlib cimport malloc, free

cdef double EPS = 2.220446049250313e-16
cdef double NOISE_FACTOR = 2.0
cdef int MAX_BISECT = 200

OK = 0
NOT_HYPERBOLIC = 1


cdef inline double _horner(const double* c, int m, double x) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(m, -1, -1):
        s = s * x + c[i]
    return s


cdef inline void _horner2(const double* c, int m, double x,
                          double* p, double* dp) noexcept nogil:
    cdef double pv = c[m]
    cdef double dv = 0.0
    cdef int i
    for i in range(m - 1, -1, -1):
        dv = dv * x + pv
        pv = pv * x + c[i]
    p[0] = pv
    dp[0] = dv


cdef inline double _magnitude(const double* c, int m, double x) noexcept nogil:
    cdef double ax = fabs(x)
    cdef double s = 0.0
    cdef int i
    for i in range(m, -1, -1):
        s = s * ax + fabs(c[i])
    return s


cdef double _root_distance(const double* c, int m, double x, double v,
                           double* t) noexcept nogil:
    cdef int i, j, k
    cdef double best = INFINITY
    cdef double av = fabs(v)
    cdef double tj, d
    for i in range(m + 1):
        t[i] = c[i]
    for k in range(m):
        for i in range(m - 1, k - 1, -1):
            t[i] = t[i] + x * t[i + 1]
    for j in range(2, m + 1):
        tj = fabs(t[j])
        if tj > 0.0:
            d = pow(av / tj, 1.0 / j)
            if d < best:
                best = d
    return best


cdef int _level(const double* q, int m, const double* crit, double* roots,
                double tol, double* pts, double* vals, double* work) noexcept nogil:
    cdef double bound = 0.0
    cdef double a, span, radius, v, expected, noise
    cdef double lo, hi, flo, fhi, mid, fm, x, fx, dfx, xn
    cdef bint neg_lo
    cdef int i, j, it
    for i in range(m):
        a = fabs(q[i])
        if a > bound:
            bound = a
    bound += 1.0
    if m > 1:
        span = crit[m - 2] - crit[0]
        if fabs(crit[0]) + 1.0 > bound:
            bound = fabs(crit[0]) + 1.0
        if fabs(crit[m - 2]) + 1.0 > bound:
            bound = fabs(crit[m - 2]) + 1.0
    else:
        span = 0.0
    radius = 1e-9 * (1.0 + span)
    if tol > radius:
        radius = tol

    pts[0] = -bound
    for j in range(m - 1):
        pts[j + 1] = crit[j]
    pts[m] = bound

    for j in range(m + 1):
        v = _horner(q, m, pts[j])
        expected = 1.0 if (m - j) % 2 == 0 else -1.0
        if j == 0 or j == m:
            vals[j] = expected
            continue
        if v == 0.0:
            vals[j] = 0.0
            continue
        noise = NOISE_FACTOR * m * EPS * _magnitude(q, m, pts[j])
        if fabs(v) <= noise:
            vals[j] = 0.0
        elif v * expected > 0.0:
            vals[j] = v
        elif _root_distance(q, m, pts[j], v, work) <= 2.0 * radius:
            vals[j] = 0.0
        else:
            return 1

    for i in range(m):
        lo = pts[i]
        hi = pts[i + 1]
        flo = vals[i]
        fhi = vals[i + 1]
        if flo == 0.0:
            roots[i] = lo
            continue
        if fhi == 0.0:
            roots[i] = hi
            continue
        neg_lo = flo < 0.0
        for it in range(MAX_BISECT):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            fm = _horner(q, m, mid)
            if fm == 0.0:
                lo = mid
                hi = mid
                break
            if (fm < 0.0) == neg_lo:
                lo = mid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
        _horner2(q, m, x, &fx, &dfx)
        if dfx != 0.0 and fx != 0.0:
            xn = x - fx / dfx
            if lo <= xn <= hi and fabs(_horner(q, m, xn)) <= fabs(fx):
                x = xn
        roots[i] = x
    return 0


cdef void _cluster(double* roots, int m, double tol) noexcept nogil:
    cdef double radius, mean
    cdef int i, k, start
    if m < 2:
        return
    radius = 1e-9 * (1.0 + roots[m - 1] - roots[0])
    if tol > radius:
        radius = tol
    start = 0
    for i in range(1, m + 1):
        if i == m or roots[i] - roots[i - 1] >= radius:
            if i - start > 1:
                mean = 0.0
                for k in range(start, i):
                    mean += roots[k]
                mean = mean / (i - start)
                for k in range(start, i):
                    roots[k] = mean
            start = i


cdef int _real_roots(const double* c, int d, double tol, double* out) noexcept nogil:
    # chain[k] holds the monic k-th derivative, stride d + 1
    cdef int stride = d + 1
    cdef double* chain = <double*> malloc(d * stride * sizeof(double))
    cdef double* crit = <double*> malloc(stride * sizeof(double))
    cdef double* pts = <double*> malloc((stride + 1) * sizeof(double))
    cdef double* vals = <double*> malloc((stride + 1) * sizeof(double))
    cdef double* work = <double*> malloc(stride * sizeof(double))
    cdef double lead = c[d]
    cdef int i, k, m, status = 0
    cdef double* prev
    cdef double* cur
    if chain == NULL or crit == NULL or pts == NULL or vals == NULL or work == NULL:
        free(chain); free(crit); free(pts); free(vals); free(work)
        return 2
    for i in range(d + 1):
        chain[i] = c[i] / lead
    for k in range(1, d):
        prev = chain + (k - 1) * stride
        cur = chain + k * stride
        m = d - k + 1
        for i in range(m):
            cur[i] = (i + 1) * prev[i + 1] / m
    out[0] = -chain[(d - 1) * stride]
    for k in range(d - 2, -1, -1):
        m = d - k
        for i in range(m - 1):
            crit[i] = out[i]
        status = _level(chain + k * stride, m, crit, out, tol, pts, vals, work)
        if status != 0:
            break
    if status == 0:
        _cluster(out, d, tol)
    free(chain); free(crit); free(pts); free(vals); free(work)
    return status


def horner(const double[::1] c, double x):
    """Evaluate the polynomial with ascending coefficients ``c`` at ``x``."""
    if c.shape[0] == 0:
        return 0.0
    return _horner(&c[0], c.shape[0] - 1, x)


def real_roots(c, double tol):
    """Return ``(status, roots)``; see ``_kernels_py.real_roots``."""
    cdef const double[::1] cc = c
    cdef int d = cc.shape[0] - 1
    cdef int status, i
    cdef double* out
    if d <= 0:
        return OK, []
    out = <double*> malloc(d * sizeof(double))
    if out == NULL:
        raise MemoryError()
    with nogil:
        status = _real_roots(&cc[0], d, tol, out)
    try:
        if status == 2:
            raise MemoryError()
        if status != 0:
            return NOT_HYPERBOLIC, []
        return OK, [out[i] for i in range(d)]
    finally:
        free(out)
