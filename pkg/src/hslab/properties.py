"""Verifiers for the structural theorems about Stieltjes/Van Vleck pairs.

Each verifier returns a :class:`CheckEntry` whose ``margin`` is the signed
slack of the tightest inequality it tested: measured value minus required
value, so a negative margin is a violation. Verifiers read solver output
through a :class:`ReportCache` and never re-solve a degree already cached.

Strict statements (positive location margin, strict interlacing) only hold
when Q_1, ..., Q_n have no common real zero. When that hypothesis fails the
strict part is still evaluated but a shortfall is reported as a warning
rather than a failure.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

from .hpop import DifferentialOperator, common_real_zero, fuchs_index
from .patterns import arrow_consecutive, arrow_same, enumerate_patterns, format_labels, shift
from .realpoly import Position, RealPolynomial, chain_margin, from_roots, proper_position, root_interval
from .solver import SolveOptions, SolveReport, solve_all

STRICT_GAP = 1e-6
LOCATION_SLACK = 1e-9


class FuchsIndexNotOne(ValueError):
    pass


class IncompleteReport(ValueError):
    pass


@dataclass
class CheckEntry:
    name: str
    passed: bool
    margin: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        margin = self.margin if math.isfinite(self.margin) else None
        return {"check": self.name, "pass": bool(self.passed), "margin": margin, "details": self.details}


@dataclass
class VerificationReport:
    checks: list[CheckEntry] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckEntry:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps([c.to_dict() for c in self.checks], indent=2, sort_keys=True)


@dataclass(frozen=True)
class SpectralPolynomial:
    n: int
    p: RealPolynomial
    roots: tuple[float, ...]
    # whether Q_M..Q_n share no real zero
    hypothesis_ok: bool


class ReportCache:
    """Lazily solved reports for one operator, keyed by degree."""

    def __init__(self, T: DifferentialOperator, opts: SolveOptions | None = None, jobs: int = 1):
        self.T = T
        self.opts = opts or SolveOptions()
        self.jobs = jobs
        self._reports: dict[int, SolveReport] = {}

    def __getitem__(self, n: int) -> SolveReport:
        if n not in self._reports:
            self._reports[n] = solve_all(self.T, n, self.opts, self.jobs)
        return self._reports[n]

    def put(self, report: SolveReport) -> None:
        self._reports[report.n] = report


def _cache(T, opts, cache) -> ReportCache:
    if cache is None:
        return ReportCache(T, opts)
    return cache


def strict_hypothesis(T: DifferentialOperator, n: int, start: int = 1) -> bool:
    """True when Q_start, ..., Q_n have no common real zero."""
    return common_real_zero(T, max(n, start), start=start) is None


def _min_cross_distance(xs, ys) -> float:
    return min((abs(a - b) for a in xs for b in ys), default=math.inf)


def _finish(name, ok, margin, strict, strict_ok, details) -> CheckEntry:
    details["strict"] = strict
    if not strict_ok:
        if strict:
            ok = False
        else:
            details.setdefault("warnings", []).append("strict separation fails; hypothesis for it does not hold")
    return CheckEntry(name, ok, margin, details)


def verify_count(report: SolveReport) -> CheckEntry:
    got = len(report.pairs)
    ok = got == report.expected_count and not report.failures
    details = {"expected": report.expected_count, "converged": got, "failed": [p.label() for p, _ in report.failures]}
    return CheckEntry("count", ok, float(got - report.expected_count), details)


def verify_location(report: SolveReport, T: DifferentialOperator) -> CheckEntry:
    """All zeros of v and f in I(Q_e); strictly inside under the hypothesis."""
    e = min(report.n, T.N)
    interval = root_interval(T.q(e))
    strict = strict_hypothesis(T, report.n)
    margin = math.inf
    worst = None
    for pair in report.pairs:
        for x in pair.v_roots + pair.f_roots:
            m = interval.margin(x)
            if m < margin:
                margin, worst = m, (pair.pattern.label(), x)
    ok = margin >= -LOCATION_SLACK
    details = {"interval": [interval.lo, interval.hi], "worst": worst, "skipped": _skipped(report)}
    ok = ok and not details["skipped"]
    return _finish("location", ok, margin, strict, margin > 0 or not report.pairs, details)


def verify_simple_coprime(report: SolveReport, tol: float = STRICT_GAP) -> CheckEntry:
    """Merged zeros of v f pairwise separated by more than ``tol``."""
    margin = math.inf
    worst = None
    for pair in report.pairs:
        merged = pair.merged_roots()
        for a, b in zip(merged, merged[1:]):
            if b - a - tol < margin:
                margin, worst = b - a - tol, pair.pattern.label()
    skipped = _skipped(report)
    details = {"threshold": tol, "worst_pattern": worst, "skipped": skipped}
    return CheckEntry("simple_coprime", margin > 0 and not skipped, margin, details)


def _skipped(report: SolveReport) -> list[str]:
    return [p.label() for p, _ in report.failures]


def _pp_check(f, g, xs, ys, identical, strict_gap):
    """Proper-position test ``f << g`` with chain slack and cross distance."""
    if identical:
        return True, math.inf, True
    pos = proper_position(f, g)
    margin = chain_margin(xs, ys)
    strict_ok = margin > strict_gap and _min_cross_distance(xs, ys) > strict_gap
    return pos == Position.F_LL_G, margin, strict_ok


def verify_interlacing_same_degree(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> CheckEntry:
    """f_B << f_C at degree n for every B -> C."""
    cache = _cache(T, opts, cache)
    report = cache[n]
    strict = strict_hypothesis(T, n)
    ok, strict_ok, margin, checked, failed = True, True, math.inf, 0, []
    skipped = _skipped(report)
    pairs = report.pairs
    for p, q in itertools.product(pairs, pairs):
        if not arrow_same(p.pattern.b, q.pattern.b):
            continue
        checked += 1
        good, m, s = _pp_check(p.f, q.f, p.f_roots, q.f_roots, p.pattern == q.pattern, STRICT_GAP)
        margin = min(margin, m)
        strict_ok &= s
        if not good:
            ok = False
            failed.append([format_labels(p.pattern.b), format_labels(q.pattern.b)])
    details = {"relations_checked": checked, "failed": failed, "skipped": skipped}
    return _finish("interlacing_same_degree", ok and not skipped, margin, strict, strict_ok, details)


def verify_interlacing_consecutive(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> CheckEntry:
    """f_(B,n) << f_(C,n+1) for every B -> C across consecutive degrees."""
    cache = _cache(T, opts, cache)
    lo, hi = cache[n], cache[n + 1]
    strict = strict_hypothesis(T, n + 1)
    ok, strict_ok, margin, checked, failed = True, True, math.inf, 0, []
    skipped = _skipped(lo) + _skipped(hi)
    for p in lo.pairs:
        for q in hi.pairs:
            if not arrow_consecutive(p.pattern.b, q.pattern.b):
                continue
            checked += 1
            good, m, s = _pp_check(p.f, q.f, p.f_roots, q.f_roots, False, STRICT_GAP)
            margin = min(margin, m)
            strict_ok &= s
            if not good:
                ok = False
                failed.append([format_labels(p.pattern.b), format_labels(q.pattern.b)])
    details = {"relations_checked": checked, "failed": failed, "skipped": skipped}
    if checked == 0:
        details["vacuous"] = True
    return _finish("interlacing_consecutive", ok and not skipped, margin, strict, strict_ok, details)


def verify_vanvleck_shift(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> CheckEntry:
    """v_A << v_(A+1) at degree n for every A within [n + r - 1]."""
    cache = _cache(T, opts, cache)
    report = cache[n]
    r = report.r
    strict = strict_hypothesis(T, n)
    ok, strict_ok, margin, checked, failed = True, True, math.inf, 0, []
    skipped = _skipped(report)
    if r >= 1:
        for pattern in enumerate_patterns(n, r):
            if pattern.a[-1] == pattern.total:
                continue
            p = report.pair_for(pattern.a)
            q = report.pair_for(shift(pattern.a, pattern.total))
            if p is None or q is None:
                continue
            checked += 1
            good, m, s = _pp_check(p.v, q.v, p.v_roots, q.v_roots, False, STRICT_GAP)
            margin = min(margin, m)
            strict_ok &= s
            if not good:
                ok = False
                failed.append(pattern.label())
    details = {"relations_checked": checked, "failed": failed, "skipped": skipped}
    if checked == 0:
        details["vacuous"] = True
    return _finish("vanvleck_shift", ok and not skipped, margin, strict, strict_ok, details)


def verify_vanvleck_consecutive(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> CheckEntry:
    """v_(A,n+1) << v_(A,n) << v_(A+1,n+1) for every A within [n + r]."""
    cache = _cache(T, opts, cache)
    lo, hi = cache[n], cache[n + 1]
    r = lo.r
    strict = strict_hypothesis(T, n + 1)
    ok, strict_ok, margin, checked, failed = True, True, math.inf, 0, []
    skipped = _skipped(lo) + _skipped(hi)
    if r >= 1:
        for pattern in enumerate_patterns(n, r):
            mid = lo.pair_for(pattern.a)
            left = hi.pair_for(pattern.a)
            right = hi.pair_for(shift(pattern.a, pattern.total + 1))
            if mid is None or left is None or right is None:
                continue
            checked += 1
            g1, m1, s1 = _pp_check(left.v, mid.v, left.v_roots, mid.v_roots, False, STRICT_GAP)
            g2, m2, s2 = _pp_check(mid.v, right.v, mid.v_roots, right.v_roots, False, STRICT_GAP)
            margin = min(margin, m1, m2)
            strict_ok &= s1 and s2
            if not (g1 and g2):
                ok = False
                failed.append(pattern.label())
    details = {"relations_checked": checked, "failed": failed, "skipped": skipped}
    if checked == 0:
        details["vacuous"] = True
    return _finish("vanvleck_consecutive", ok and not skipped, margin, strict, strict_ok, details)


def spectral_polynomial(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> SpectralPolynomial:
    """Monic polynomial whose zeros are all Van Vleck zeros at degree n (r = 1)."""
    r = fuchs_index(T)
    if r != 1:
        raise FuchsIndexNotOne(f"spectral polynomials need Fuchs index 1, got {r}")
    report = _cache(T, opts, cache)[n]
    if report.failures:
        raise IncompleteReport(f"{len(report.failures)} patterns failed at n = {n}")
    roots = tuple(sorted(x for pair in report.pairs for x in pair.v_roots))
    hyp = common_real_zero(T, max(n, T.M), start=T.M) is None
    return SpectralPolynomial(n=n, p=from_roots(roots), roots=roots, hypothesis_ok=hyp)


def verify_spectral_interlacing(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> CheckEntry:
    """Zeros of p_n and p_(n+1) interlace and are disjoint."""
    cache = _cache(T, opts, cache)
    try:
        a = spectral_polynomial(T, n, cache=cache)
        b = spectral_polynomial(T, n + 1, cache=cache)
    except IncompleteReport as exc:
        return CheckEntry("spectral_interlacing", False, -math.inf, {"skipped": str(exc)})
    pos = proper_position(a.p, b.p)
    gap = _min_cross_distance(a.roots, b.roots)
    margin = gap - STRICT_GAP
    details = {
        "position": pos.name,
        "min_distance": gap,
        "hypothesis_range": f"Q_{T.M}..Q_{n + 1}",
        "hypothesis_ok": a.hypothesis_ok and b.hypothesis_ok,
    }
    return CheckEntry("spectral_interlacing", pos != Position.NONE and margin > 0, margin, details)


def verify_all(
    T: DifferentialOperator, n: int, opts: SolveOptions | None = None, cache: ReportCache | None = None
) -> VerificationReport:
    """Every verifier that applies to T at degree n (and n + 1 where needed)."""
    cache = _cache(T, opts, cache)
    report = cache[n]
    out = VerificationReport()
    out.checks.append(verify_count(report))
    out.checks.append(verify_location(report, T))
    out.checks.append(verify_simple_coprime(report))
    out.checks.append(verify_interlacing_same_degree(T, n, cache=cache))
    out.checks.append(verify_interlacing_consecutive(T, n, cache=cache))
    if report.r >= 1:
        out.checks.append(verify_vanvleck_shift(T, n, cache=cache))
        out.checks.append(verify_vanvleck_consecutive(T, n, cache=cache))
    if report.r == 1 and n >= 1:
        out.checks.append(verify_spectral_interlacing(T, n, cache=cache))
    return out


__all__ = [
    "CheckEntry",
    "FuchsIndexNotOne",
    "IncompleteReport",
    "ReportCache",
    "SpectralPolynomial",
    "VerificationReport",
    "spectral_polynomial",
    "strict_hypothesis",
    "verify_all",
    "verify_count",
    "verify_interlacing_consecutive",
    "verify_interlacing_same_degree",
    "verify_location",
    "verify_simple_coprime",
    "verify_spectral_interlacing",
    "verify_vanvleck_consecutive",
    "verify_vanvleck_shift",
]
