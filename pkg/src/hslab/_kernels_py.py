"""Pure-Python fallback for the numerical kernels.

Mirrors ``_kernels.pyx`` operation for operation so the two backends agree to
rounding. Coefficient sequences are ascending (``c[i]`` multiplies ``z**i``)
and must have a nonzero last entry.
"""

import math

EPS = 2.220446049250313e-16
# Horner on degree m loses at most about 2m * EPS * |p|(|x|); values below
# that are indistinguishable from zero.
NOISE_FACTOR = 2.0
MAX_BISECT = 200

OK = 0
NOT_HYPERBOLIC = 1


def horner(c, x):
    """Evaluate the polynomial with ascending coefficients ``c`` at ``x``."""
    s = 0.0
    for i in range(len(c) - 1, -1, -1):
        s = s * x + float(c[i])
    return s


def _horner2(c, m, x):
    # value and first derivative of c[0..m] at x
    p = c[m]
    dp = 0.0
    for i in range(m - 1, -1, -1):
        dp = dp * x + p
        p = p * x + c[i]
    return p, dp


def _magnitude(c, m, x):
    ax = abs(x)
    s = 0.0
    for i in range(m, -1, -1):
        s = s * ax + abs(c[i])
    return s


def _root_distance(c, m, x, v):
    # Newton-polygon estimate of the distance from x to the nearest zero.
    t = list(c[: m + 1])
    # Taylor shift to x by repeated synthetic division
    for k in range(m):
        for i in range(m - 1, k - 1, -1):
            t[i] = t[i] + x * t[i + 1]
    best = math.inf
    av = abs(v)
    for j in range(2, m + 1):
        tj = abs(t[j])
        if tj > 0.0:
            d = (av / tj) ** (1.0 / j)
            if d < best:
                best = d
    return best


def _level(q, m, crit, tol):
    """Zeros of degree-m monic ``q`` given the sorted zeros ``crit`` of q'."""
    bound = 0.0
    for i in range(m):
        a = abs(q[i])
        if a > bound:
            bound = a
    bound += 1.0
    if m > 1:
        span = crit[m - 2] - crit[0]
        if abs(crit[0]) + 1.0 > bound:
            bound = abs(crit[0]) + 1.0
        if abs(crit[m - 2]) + 1.0 > bound:
            bound = abs(crit[m - 2]) + 1.0
    else:
        span = 0.0
    radius = max(tol, 1e-9 * (1.0 + span))

    pts = [-bound] + list(crit) + [bound]
    vals = [0.0] * (m + 1)
    for j in range(m + 1):
        v = horner(q, pts[j])
        expected = 1.0 if (m - j) % 2 == 0 else -1.0
        if j == 0 or j == m:
            # outside the Cauchy bound the sign is fixed
            vals[j] = expected
            continue
        if v == 0.0:
            vals[j] = 0.0
            continue
        # a critical value lost in rounding is a multiple zero at the
        # critical point; otherwise a wrong sign is forgiven only when the
        # missing zeros sit within the cluster radius (doubled, since
        # critical points merged one level down are off by up to a radius)
        noise = NOISE_FACTOR * m * EPS * _magnitude(q, m, pts[j])
        if abs(v) <= noise:
            vals[j] = 0.0
        elif v * expected > 0.0:
            vals[j] = v
        elif _root_distance(q, m, pts[j], v) <= 2.0 * radius:
            vals[j] = 0.0
        else:
            return None

    roots = [0.0] * m
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
        for _ in range(MAX_BISECT):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            fm = horner(q, mid)
            if fm == 0.0:
                lo = mid
                hi = mid
                break
            if (fm < 0.0) == neg_lo:
                lo = mid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
        fx, dfx = _horner2(q, m, x)
        if dfx != 0.0 and fx != 0.0:
            xn = x - fx / dfx
            if lo <= xn <= hi and abs(horner(q, xn)) <= abs(fx):
                x = xn
        roots[i] = x
    return roots


def _cluster(roots, tol):
    m = len(roots)
    if m < 2:
        return roots
    radius = max(tol, 1e-9 * (1.0 + roots[-1] - roots[0]))
    out = list(roots)
    start = 0
    for i in range(1, m + 1):
        if i == m or out[i] - out[i - 1] >= radius:
            if i - start > 1:
                mean = sum(out[start:i]) / (i - start)
                for k in range(start, i):
                    out[k] = mean
            start = i
    return out


def real_roots(c, tol):
    """Return ``(status, roots)``: all zeros of ``c`` if it is hyperbolic.

    Zeros are found level by level down the derivative sequence: the zeros
    of ``p^(k+1)`` split the line into monotone pieces of ``p^(k)``, each
    holding exactly one zero when ``p`` is hyperbolic. A piece whose
    endpoint values have the wrong sign either hides a multiple zero (value
    lost in rounding, or complex pair closer than the cluster radius) or
    certifies that real zeros are missing.
    """
    c = [float(a) for a in c]
    d = len(c) - 1
    if d <= 0:
        return OK, []
    lead = c[d]
    chain = [[a / lead for a in c]]
    for k in range(1, d):
        prev = chain[-1]
        m = d - k + 1
        # derivative, renormalised to be monic
        chain.append([(i + 1) * prev[i + 1] / m for i in range(m)])
    roots = [-chain[d - 1][0]]
    for k in range(d - 2, -1, -1):
        roots = _level(chain[k], d - k, roots, tol)
        if roots is None:
            return NOT_HYPERBOLIC, []
    return OK, _cluster(roots, tol)
