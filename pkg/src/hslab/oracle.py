"""Brute-force cross-check: solve T(f) = v f directly on coefficients.

The unknowns are the n lower coefficients of monic f and the r lower
coefficients of v, whose leading coefficient is pinned to that of T(z^n).
The n + r lower coefficient equations are solved by damped Newton from many
starting points. Operator images are built here from the raw coefficient
polynomials so that nothing is shared with the iteration being checked.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .hpop import DifferentialOperator, fuchs_index
from .realpoly import RealPolynomial

DEDUPE_TOL = 1e-7


class OracleIncomplete(Exception):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class OracleResult:
    n: int
    r: int
    solutions: list[tuple[RealPolynomial, RealPolynomial]] = field(default_factory=list)
    starts_used: int = 0

    @property
    def expected(self) -> int:
        return math.comb(self.n + self.r, self.r)

    @property
    def complete(self) -> bool:
        return len(self.solutions) == self.expected


def _images(T: DifferentialOperator, n: int) -> list[np.ndarray]:
    # T(z^j) for j = 0..n, padded to length n + r + 1
    r = fuchs_index(T)
    out = []
    for j in range(n + 1):
        acc = np.zeros(n + r + 1)
        for k, q in T.terms.items():
            if k > j:
                continue
            coef = math.perm(j, k)
            zpow = np.zeros(j - k + 1)
            zpow[-1] = coef
            term = npoly.polymul(np.asarray(q.coeffs, dtype=float), zpow)
            acc[: len(term)] += term[: n + r + 1]
        out.append(acc)
    return out


def _system(images, n, r, lam):
    size = n + r

    def F(x):
        c = np.append(x[:n], 1.0)
        mu = np.append(x[n:], lam)
        tf = sum(c[j] * images[j] for j in range(n + 1))
        vf = npoly.polymul(mu, c)
        return tf[:size] - vf[:size]

    def J(x):
        c = np.append(x[:n], 1.0)
        mu = np.append(x[n:], lam)
        jac = np.zeros((size, size))
        for j in range(n):
            col = images[j].copy()
            col[j : j + r + 1] -= mu
            jac[:, j] = col[:size]
        for i in range(r):
            col = np.zeros(size + 1)
            col[i : i + n + 1] += c
            jac[:, n + i] = -col[:size]
        return jac

    return F, J


def _newton(F, J, x0, scale, max_iter=100):
    x = np.array(x0, dtype=float)
    fx = F(x)
    nf = np.linalg.norm(fx)
    for _ in range(max_iter):
        if nf <= 1e-13 * scale:
            return x
        try:
            step = np.linalg.solve(J(x), -fx)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-6:
            xn = x + t * step
            fn = F(xn)
            nn = np.linalg.norm(fn)
            if nn < nf:
                break
            t *= 0.5
        else:
            return None
        x, fx, nf = xn, fn, nn
    return x if nf <= 1e-10 * scale else None


def _start_vector(roots_v, roots_f, lam):
    f = npoly.polyfromroots(roots_f) if len(roots_f) else np.ones(1)
    v = lam * npoly.polyfromroots(roots_v) if len(roots_v) else np.array([lam])
    return np.concatenate([f[:-1], v[:-1]])


def _interval(T: DifferentialOperator, n: int) -> tuple[float, float]:
    e = min(n, T.N)
    roots = np.roots(np.asarray(T.q(e).coeffs, dtype=float)[::-1]).real
    if roots.size == 0:
        return -1.0, 1.0
    lo, hi = float(roots.min()), float(roots.max())
    if hi - lo < 1e-9:
        lo, hi = lo - 1.0, hi + 1.0
    return lo, hi


def brute_force_oracle(
    T: DifferentialOperator, n: int, seed: int = 0, strict: bool = False, random_starts: int = 200
) -> OracleResult:
    """All real solutions (v, f) with f monic of degree n, by multistart Newton.

    Starts are root vectors on an interior Chebyshev grid of I(Q_e), split
    between v and f in every way, followed by seeded random starts. The
    search stops early once C(n + r, r) distinct solutions are known, which
    is the most there can be.
    """
    r = fuchs_index(T)
    result = OracleResult(n=n, r=r)
    images = _images(T, n)
    lam = float(images[n][n + r])
    if n == 0:
        v = RealPolynomial(images[0])
        result.solutions.append((v, RealPolynomial([1.0])))
        return result
    F, J = _system(images, n, r, lam)
    scale = max(1.0, max(float(np.abs(im).max()) for im in images))
    lo, hi = _interval(T, n)
    size = n + r
    k = np.arange(2 * size + 2)
    nodes = lo + (hi - lo) * 0.5 * (1 - np.cos((k + 0.5) * np.pi / len(k)))
    rng = np.random.default_rng(seed)

    def starts():
        for combo in itertools.combinations(nodes, size):
            for a in itertools.combinations(range(size), r):
                yield [combo[i] for i in a], [combo[i] for i in range(size) if i not in a]
        for _ in range(random_starts):
            pts = np.sort(rng.uniform(lo, hi, size))
            a = rng.choice(size, r, replace=False)
            yield pts[a], np.delete(pts, a)

    found = []
    for rv, rf in starts():
        result.starts_used += 1
        x = _newton(F, J, _start_vector(rv, rf, lam), scale)
        if x is None:
            continue
        if all(np.max(np.abs(x - y)) > DEDUPE_TOL * max(1.0, np.max(np.abs(y))) for y in found):
            found.append(x)
            if len(found) == result.expected:
                break
    found.sort(key=lambda x: tuple(np.sort(_roots(np.append(x[n:], lam)))))
    for x in found:
        f = RealPolynomial(np.append(x[:n], 1.0))
        v = RealPolynomial(np.append(x[n:], lam))
        result.solutions.append((v, f))
    if strict and not result.complete:
        raise OracleIncomplete(
            f"found {len(result.solutions)} of {result.expected} solutions in {result.starts_used} starts", result
        )
    return result


def _roots(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.size <= 1:
        return np.zeros(0)
    return np.sort(np.roots(c[::-1]).real)


def root_signature(v: RealPolynomial, f: RealPolynomial) -> np.ndarray:
    """Sorted roots of v followed by sorted roots of f, plus the scale of v."""
    return np.concatenate([_roots(v.coeffs), _roots(f.coeffs), [v.leading if not v.is_zero() else 0.0]])


def match_solutions(ours, theirs) -> tuple[list[tuple[int, int]], float]:
    """Optimal matching of two solution lists by max root distance.

    Returns the index pairs and the worst matched distance; lists of
    different length match as far as possible.
    """
    a = [root_signature(v, f) for v, f in ours]
    b = [root_signature(v, f) for v, f in theirs]
    if not a or not b:
        return [], 0.0 if len(a) == len(b) else math.inf
    cost = np.full((len(a), len(b)), math.inf)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if x.shape == y.shape:
                scale = max(1.0, abs(x[-1]))
                cost[i, j] = max(np.max(np.abs(x[:-1] - y[:-1]), initial=0.0), abs(x[-1] - y[-1]) / scale)
    finite = np.where(np.isfinite(cost), cost, 1e300)
    rows, cols = linear_sum_assignment(finite)
    pairs = list(zip(rows.tolist(), cols.tolist()))
    worst = max((cost[i, j] for i, j in pairs), default=0.0)
    return pairs, float(worst)


__all__ = ["OracleIncomplete", "OracleResult", "brute_force_oracle", "match_solutions", "root_signature"]
