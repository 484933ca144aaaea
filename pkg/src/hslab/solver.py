"""Stieltjes/Van Vleck pairs by fixed-point iteration on zero patterns.

Starting from f_0 = (z - a)^n, where a is the smallest zero of Q_e with
e = min(n, N), each step factors T(f_i) = v_(i+1) f_(i+1) so that the sorted
zeros labelled by the pattern's A-set go to v and the rest to the monic
f_(i+1). For hyperbolicity preservers the zero vectors of f_i increase
monotonically to the fixed point.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .hpop import DifferentialOperator, apply, common_real_zero, fuchs_index, lambda_n
from .patterns import ZeroPattern, enumerate_patterns
from .realpoly import DEFAULT_TOL, RealPolynomial, from_roots, real_roots

log = logging.getLogger(__name__)

class SolverError(Exception):
    pass

class NegativeFuchsIndex(SolverError):
    pass

class DegreeBelowM(SolverError):
    pass

class ZeroCoefficientQe(SolverError):
    pass

class TZnIdenticallyZero(SolverError):
    pass

class DegreeDrop(SolverError):
    pass

class NoConvergence(SolverError):
    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last

@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-11
    max_iter: int = 5000
    residual_tol: float = 1e-9
    monotonicity_slack: float = 1e-9
    root_tol: float = DEFAULT_TOL
    # experimental: "largest" starts from the largest zero of Q_e
    start: str = "smallest"
    aitken: bool = False

    def __post_init__(self):
        for name in ("tol", "max_iter", "residual_tol", "monotonicity_slack", "root_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.start not in ("smallest", "largest"):
            raise ValueError("start must be 'smallest' or 'largest'")

@dataclass(frozen=True)
class StieltjesPair:
    pattern: ZeroPattern
    v: RealPolynomial
    f: RealPolynomial
    v_roots: tuple[float, ...]
    f_roots: tuple[float, ...]
    iterations: int
    residual: float
    # None when the check does not apply (Aitken acceleration)
    monotone: bool | None
    root_history_tail: tuple[tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return self.pattern.n

    def merged_roots(self) -> tuple[float, ...]:
        return tuple(sorted(self.v_roots + self.f_roots))

@dataclass
class SolveReport:
    operator: DifferentialOperator
    n: int
    r: int
    pairs: list[StieltjesPair] = field(default_factory=list)
    failures: list[tuple[ZeroPattern, SolverError | ArithmeticError]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def expected_count(self) -> int:
        return math.comb(self.n + self.r, self.r)

    @property
    def complete(self) -> bool:
        return not self.failures and len(self.pairs) == self.expected_count

    def pair_for(self, a) -> StieltjesPair | None:
        a = tuple(sorted(a))
        for p in self.pairs:
            if p.pattern.a == a:
                return p
        return None

    def pair_for_b(self, b) -> StieltjesPair | None:
        b = tuple(sorted(b))
        for p in self.pairs:
            if p.pattern.b == b:
                return p
        return None

def _check_degree(T: DifferentialOperator, n: int) -> int:
    r = fuchs_index(T)
    if r < 0:
        raise NegativeFuchsIndex(f"Fuchs index {r} is negative")
    if n < T.M:
        raise DegreeBelowM(f"n = {n} is below M = {T.M}")
    return r

def initial_poly(T: DifferentialOperator, n: int, start: str = "smallest") -> RealPolynomial:
    """(z - a)^n with a the smallest (or largest) zero of Q_e, e = min(n, N)."""
    _check_degree(T, n)
    if n == 0:
        return RealPolynomial([1.0])
    e = min(n, T.N)
    qe = T.q(e)
    if qe.is_zero():
        raise ZeroCoefficientQe(f"Q_{e} vanishes identically")
    if qe.degree == 0:
        raise ZeroCoefficientQe(f"Q_{e} is constant and has no zeros to start from")
    roots = real_roots(qe).roots
    a = roots[0] if start == "smallest" else roots[-1]
    return from_roots([a] * n)

def _factor(T: DifferentialOperator, f: RealPolynomial, pattern: ZeroPattern, tol: float):
    n = f.degree
    t = apply(T, f)
    if t.is_zero() or t.degree < n + pattern.r:
        raise DegreeDrop(f"T(f) has degree {t.degree}, expected {n + pattern.r}")
    rl = real_roots(t, tol)
    v_roots = tuple(rl.roots[i - 1] for i in pattern.a)
    f_roots = tuple(rl.roots[i - 1] for i in pattern.b)
    return t, v_roots, f_roots

def iterate_once(
    T: DifferentialOperator, f: RealPolynomial, pattern: ZeroPattern, tol: float = DEFAULT_TOL
) -> tuple[RealPolynomial, RealPolynomial]:
    """One factorization step T(f) = v f_next by zero pattern."""
    t, v_roots, f_roots = _factor(T, f, pattern, tol)
    return from_roots(v_roots, t.leading), from_roots(f_roots)

def residual(T: DifferentialOperator, v: RealPolynomial, f: RealPolynomial) -> float:
    """max|coeff(T(f) - v f)| / max|coeff(T(f))|."""
    t = apply(T, f)
    diff = t - v * f
    return diff.norm() / max(1e-300, t.norm())

def _aitken(x0, x1, x2, lo, hi):
    out = []
    for a, b, c in zip(x0, x1, x2):
        den = (c - b) - (b - a)
        y = c - (c - b) ** 2 / den if den != 0.0 else c
        out.append(min(max(y, lo), hi))
    return sorted(out)

def solve_pair(
    T: DifferentialOperator,
    n: int,
    pattern: ZeroPattern,
    opts: SolveOptions | None = None,
    start_poly: RealPolynomial | None = None,
) -> StieltjesPair:
    """Iterate to the unique pair (v, f) with the given zero pattern."""
    opts = opts or SolveOptions()
    r = _check_degree(T, n)
    if pattern.total != n + r or pattern.r != r:
        raise ValueError(f"pattern {pattern} does not fit n = {n}, r = {r}")
    if apply(T, RealPolynomial.monomial(n)).is_zero():
        raise TZnIdenticallyZero(f"T(z^{n}) vanishes identically")

    f = start_poly if start_poly is not None else initial_poly(T, n, opts.start)
    if n == 0:
        t = apply(T, f)
        v_roots = real_roots(t, opts.root_tol).roots if t.degree else ()
        return StieltjesPair(pattern, t, f, v_roots, (), 0, residual(T, t, f), True, ((), ()))

    direction = 1.0 if opts.start == "smallest" else -1.0
    prev = tuple(real_roots(f, opts.root_tol).roots)
    history = [prev]
    monotone = True
    lo = hi = None
    if opts.aitken:
        qe_roots = real_roots(T.q(min(n, T.N))).roots
        lo, hi = qe_roots[0], qe_roots[-1]

    for it in range(1, opts.max_iter + 1):
        t, v_roots, f_roots = _factor(T, f, pattern, opts.root_tol)
        step = max(abs(a - b) for a, b in zip(f_roots, prev))
        if any(direction * (b - a) < -opts.monotonicity_slack for a, b in zip(prev, f_roots)):
            monotone = False
        history.append(f_roots)
        history = history[-3:]
        f = from_roots(f_roots)
        if step < opts.tol:
            v = from_roots(v_roots, t.leading)
            return StieltjesPair(
                pattern=pattern,
                v=v,
                f=f,
                v_roots=v_roots,
                f_roots=f_roots,
                iterations=it,
                residual=residual(T, v, f),
                monotone=None if opts.aitken else monotone,
                root_history_tail=tuple(history[-2:]),
            )
        prev = f_roots
        if opts.aitken and it % 3 == 0 and len(history) == 3:
            prev = tuple(_aitken(*history, lo, hi))
            f = from_roots(prev)

    v = from_roots(v_roots, t.leading)
    last = StieltjesPair(
        pattern, v, f, v_roots, f_roots, opts.max_iter, residual(T, v, f), monotone, tuple(history[-2:])
    )
    raise NoConvergence(f"pattern {pattern.label() or '{}'} did not converge in {opts.max_iter} steps", last)

def default_jobs() -> int:
    env = os.environ.get("HS_LAB_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1

def solve_all(T: DifferentialOperator, n: int, opts: SolveOptions | None = None, jobs: int = 1) -> SolveReport:
    """Solve every zero pattern at degree n; failures are recorded, not raised."""
    opts = opts or SolveOptions()
    r = _check_degree(T, n)
    report = SolveReport(operator=T, n=n, r=r)
    theta = common_real_zero(T, n, start=0)
    if theta is not None:
        report.warnings.append(f"Q_0..Q_{n} share the real zero {theta:.17g}; uniqueness is not guaranteed")
    patterns = enumerate_patterns(n, r)

    def run(p):
        try:
            return p, solve_pair(T, n, p, opts), None
        except (SolverError, ArithmeticError) as exc:
            return p, None, exc

    if jobs > 1 and len(patterns) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, patterns))
    else:
        results = [run(p) for p in patterns]
    for p, pair, exc in results:
        if exc is None:
            report.pairs.append(pair)
        else:
            log.warning("pattern %s failed: %s", p.label(), exc)
            report.failures.append((p, exc))
    return report

def with_options(opts: SolveOptions, **changes) -> SolveOptions:
    return replace(opts, **changes)

__all__ = [
    "DegreeBelowM",
    "DegreeDrop",
    "NegativeFuchsIndex",
    "NoConvergence",
    "SolveOptions",
    "SolveReport",
    "SolverError",
    "StieltjesPair",
    "TZnIdenticallyZero",
    "ZeroCoefficientQe",
    "initial_poly",
    "iterate_once",
    "lambda_n",
    "residual",
    "solve_all",
    "solve_pair",
]
