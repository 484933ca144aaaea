"""Command-line front end: ``hslab {diagnose,solve,verify,spectral,oracle}``.

Every file written with ``--out`` gets a sibling ``<out>.manifest.json``
recording the command, config path, parameters, tool version and seed, so
reruns with the same manifest reproduce the output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, load_operator
from .hpop import diagnose, fuchs_index, lambda_n
from .oracle import brute_force_oracle, match_solutions
from .patterns import PatternError, ZeroPattern, format_labels, parse_labels
from .properties import FuchsIndexNotOne, ReportCache, spectral_polynomial, verify_all
from .realpoly import Position, from_roots, proper_position
from .solver import (
    DegreeBelowM,
    NegativeFuchsIndex,
    NoConvergence,
    SolveOptions,
    SolveReport,
    SolverError,
    StieltjesPair,
    residual,
    solve_all,
    solve_pair,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_WITNESS = 2
EXIT_NO_CONVERGENCE = 3
EXIT_USAGE = 64
ORACLE_MAX_N = 3
MATCH_TOL = 1e-6
CSV_HEADER = "pattern_a;kind;root_index;value;residual;iterations"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(x: float) -> str:
    return "%.17g" % x


def _jobs(flag: int | None) -> int:
    env = os.environ.get("HS_LAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    if flag is not None:
        return max(1, flag)
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _emit(text: str, out: str | None, args, command: str, params: dict, seed: int = 0) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text, encoding="utf-8", newline="\n")
    manifest = {
        "command": command,
        "operator_config_path": args.config,
        "parameters": params,
        "tool_version": __version__,
        "seed": seed,
    }
    Path(str(path) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def _pair_rows(pair: StieltjesPair) -> list[str]:
    a = pair.pattern.label()
    tail = f"{_g(pair.residual)};{pair.iterations}"
    rows = []
    if pair.pattern.r == 0:
        rows.append(f"{a};v;0;{_g(pair.v.leading)};{tail}")
    else:
        rows.extend(f"{a};v;{i};{_g(x)};{tail}" for i, x in enumerate(pair.v_roots, 1))
    rows.extend(f"{a};f;{i};{_g(x)};{tail}" for i, x in enumerate(pair.f_roots, 1))
    return rows


def _failure_row(pattern: ZeroPattern, exc: Exception) -> str:
    last = getattr(exc, "last", None)
    res = _g(last.residual) if last is not None else "nan"
    its = last.iterations if last is not None else 0
    return f"{pattern.label()};failed;0;nan;{res};{its}"


def _solve_csv(report: SolveReport) -> str:
    failures = dict(report.failures)
    rows = [CSV_HEADER]
    done = {p.pattern: p for p in report.pairs}
    for pattern in sorted(set(done) | set(failures), key=lambda p: p.a):
        if pattern in done:
            rows.extend(_pair_rows(done[pattern]))
        else:
            rows.append(_failure_row(pattern, failures[pattern]))
    return "\n".join(rows) + "\n"


def cmd_diagnose(args) -> int:
    T = load_operator(args.config)
    diag = diagnose(T, rng_seed=args.seed, samples=args.samples)
    body = diag.to_dict()
    body["necessary_conditions_ok"] = diag.necessary_conditions_ok
    text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    _emit(text, args.out, args, "diagnose", {"samples": args.samples}, args.seed)
    if diag.falsifier_witness is not None:
        return EXIT_WITNESS
    return EXIT_OK if diag.necessary_conditions_ok else EXIT_FAIL


def _options(args) -> SolveOptions:
    return SolveOptions(tol=args.tol, max_iter=args.max_iter)


def cmd_solve(args) -> int:
    T = load_operator(args.config)
    opts = _options(args)
    r = fuchs_index(T)
    if r < 0:
        print(f"error: Fuchs index {r} is negative", file=sys.stderr)
        return EXIT_FAIL
    try:
        if args.pattern is not None:
            try:
                pattern = ZeroPattern.from_a(args.n + r, parse_labels(args.pattern))
            except PatternError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
            if pattern.r != r:
                print(f"error: pattern needs {r} labels, got {pattern.r}", file=sys.stderr)
                return EXIT_USAGE
            report = SolveReport(operator=T, n=args.n, r=r)
            try:
                report.pairs.append(solve_pair(T, args.n, pattern, opts))
            except (SolverError, ArithmeticError) as exc:
                if isinstance(exc, (NegativeFuchsIndex, DegreeBelowM)):
                    raise
                report.failures.append((pattern, exc))
        else:
            report = solve_all(T, args.n, opts, jobs=_jobs(args.jobs))
    except (NegativeFuchsIndex, DegreeBelowM) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    params = {"n": args.n, "pattern": args.pattern, "tol": args.tol, "max_iter": args.max_iter}
    _emit(_solve_csv(report), args.out, args, "solve", params)
    if any(isinstance(e, NoConvergence) for _, e in report.failures):
        return EXIT_NO_CONVERGENCE
    return EXIT_FAIL if report.failures else EXIT_OK


def _inject(report: SolveReport, path: str, T) -> None:
    """Replace (or add) the pair for a pattern with hand-written roots."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        pattern = ZeroPattern.from_a(report.n + report.r, data["pattern_a"])
        v_roots = tuple(float(x) for x in data["v_roots"])
        f_roots = tuple(float(x) for x in data["f_roots"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad fixture {path}: {exc}", "$fixture") from exc
    v = from_roots(v_roots, lambda_n(T, report.n))
    f = from_roots(f_roots)
    fake = StieltjesPair(pattern, v, f, v_roots, f_roots, 0, residual(T, v, f), None, ())
    report.pairs = [p for p in report.pairs if p.pattern != pattern] + [fake]
    report.pairs.sort(key=lambda p: p.pattern.a)
    report.failures = [(p, e) for p, e in report.failures if p != pattern]


def cmd_verify(args) -> int:
    T = load_operator(args.config)
    cache = ReportCache(T, _options(args), jobs=_jobs(args.jobs))
    try:
        report = cache[args.n]
    except (NegativeFuchsIndex, DegreeBelowM) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.inject_fixture:
        report = replace(report, pairs=list(report.pairs), failures=list(report.failures))
        _inject(report, args.inject_fixture, T)
        cache.put(report)
    result = verify_all(T, args.n, cache=cache)
    params = {"n": args.n, "tol": args.tol, "max_iter": args.max_iter, "inject_fixture": args.inject_fixture}
    _emit(result.to_json() + "\n", args.out, args, "verify", params)
    return EXIT_OK if result.overall else EXIT_FAIL


def cmd_spectral(args) -> int:
    T = load_operator(args.config)
    cache = ReportCache(T, _options(args), jobs=_jobs(args.jobs))
    rows = ["n;kind;index;value"]
    polys = []
    try:
        for n in range(1, args.nmax + 1):
            sp = spectral_polynomial(T, n, cache=cache)
            polys.append(sp)
            rows.extend(f"{n};root;{i};{_g(x)}" for i, x in enumerate(sp.roots, 1))
    except FuchsIndexNotOne as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SolverError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = True
    for a, b in zip(polys, polys[1:]):
        gap = min(abs(x - y) for x in a.roots for y in b.roots)
        verdict = proper_position(a.p, b.p) != Position.NONE and gap > MATCH_TOL
        ok &= verdict
        rows.append(f"{a.n};interlaces_next;{b.n};{'true' if verdict else 'false'}")
    _emit("\n".join(rows) + "\n", args.out, args, "spectral", {"nmax": args.nmax, "tol": args.tol})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    if args.n > ORACLE_MAX_N:
        print(f"error: oracle is limited to n <= {ORACLE_MAX_N}", file=sys.stderr)
        return EXIT_USAGE
    T = load_operator(args.config)
    try:
        report = solve_all(T, args.n, SolveOptions(), jobs=_jobs(args.jobs))
    except (NegativeFuchsIndex, DegreeBelowM) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    result = brute_force_oracle(T, args.n, seed=args.seed)
    ours = [(p.v, p.f) for p in report.pairs]
    pairs, worst = match_solutions(ours, result.solutions)
    lines = [f"solver={len(ours)} oracle={len(result.solutions)} expected={result.expected}"]
    for i, j in pairs:
        _, d = match_solutions([ours[i]], [result.solutions[j]])
        lines.append(f"match pattern_a={format_labels(report.pairs[i].pattern.a)} oracle={j} distance={_g(d)}")
    lines.append(f"max_distance={_g(worst)}")
    _emit("\n".join(lines) + "\n", args.out, args, "oracle", {"n": args.n}, args.seed)
    if not result.complete:
        return EXIT_NO_CONVERGENCE
    counts = len(ours) == len(result.solutions) == result.expected
    return EXIT_OK if counts and worst < MATCH_TOL and math.isfinite(worst) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hslab", description="Stieltjes and Van Vleck polynomials of differential operators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, solve=True):
        p.add_argument("config", help="operator config (JSON)")
        p.add_argument("--out", help="write output here instead of stdout")
        if solve:
            p.add_argument("--tol", type=float, default=1e-11, help="root-vector convergence threshold")
            p.add_argument("--max-iter", type=int, default=5000)
            p.add_argument("--jobs", type=int, default=None, help="worker threads (env HS_LAB_JOBS wins)")

    p = sub.add_parser("diagnose", help="necessary conditions and stability falsifier")
    common(p, solve=False)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("solve", help="all pairs (or one pattern) at degree n, as CSV")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pattern", help='Van Vleck labels, e.g. "1,3"')
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run every applicable verifier, JSON report")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--inject-fixture", help="JSON pair {pattern_a, v_roots, f_roots} replacing a solved one")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectral", help="spectral polynomial roots for n = 1..nmax (r = 1)")
    common(p)
    p.add_argument("--nmax", type=int, required=True)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("oracle", help="cross-check the solver against brute-force Newton (n <= 3)")
    common(p, solve=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
