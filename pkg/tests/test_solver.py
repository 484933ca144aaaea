import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from hslab.hpop import DifferentialOperator, apply, classical_operator, lambda_n
from hslab.oracle import OracleIncomplete, brute_force_oracle, match_solutions
from hslab.patterns import ZeroPattern, enumerate_patterns
from hslab.realpoly import RealPolynomial, from_roots, real_roots
from hslab.solver import (
    DegreeBelowM,
    NegativeFuchsIndex,
    NoConvergence,
    SolveOptions,
    TZnIdenticallyZero,
    ZeroCoefficientQe,
    initial_poly,
    iterate_once,
    residual,
    solve_all,
    solve_pair,
)

P = RealPolynomial
SQ3 = 1 / math.sqrt(3)


def legendre_roots(n):
    """Gauss-Legendre nodes from the symmetric Jacobi matrix."""
    k = np.arange(1, n)
    return eigh_tridiagonal(np.zeros(n), k / np.sqrt(4 * k * k - 1), eigvals_only=True)


def monic_legendre(n):
    """Monic Legendre polynomial from the three-term recurrence."""
    prev, cur = np.array([1.0]), np.array([0.0, 1.0])
    if n == 0:
        return prev
    for k in range(1, n):
        nxt = np.concatenate([[0.0], cur]) - (k * k / (4.0 * k * k - 1)) * np.concatenate([prev, [0.0, 0.0]])
        prev, cur = cur, nxt
    return cur


def test_monic_legendre_oracle_self_check():
    assert np.allclose(monic_legendre(4), [3 / 35, 0, -6 / 7, 0, 1])
    assert np.allclose(np.sort(np.roots(monic_legendre(6)[::-1]).real), legendre_roots(6))


def test_initial_poly_examples(legendre, heun):
    assert initial_poly(legendre, 3) == from_roots([-1, -1, -1])
    f = initial_poly(heun, 1)
    assert f.coeffs[0] == pytest.approx(-(1 - SQ3), abs=1e-15)
    assert np.allclose(initial_poly(heun, 2).coeffs, [0, 0, 1], atol=1e-20)


def test_initial_poly_errors():
    with pytest.raises(NegativeFuchsIndex):
        initial_poly(DifferentialOperator({2: [1.0]}), 3)
    with pytest.raises(DegreeBelowM):
        initial_poly(classical_operator([-1, 1], [1, 1]), 0)
    with pytest.raises(ZeroCoefficientQe):
        initial_poly(DifferentialOperator({0: [0, 1], 2: [1.0]}), 1)


def test_iterate_once_examples(legendre, heun):
    pat = ZeroPattern.from_a(2, [1])
    v, f_next = iterate_once(heun, P([-0.42265, 1]), pat)
    assert v.leading == 3 and v.coeffs[0] / 3 == pytest.approx(-(1 - SQ3), abs=1e-12)
    assert f_next.coeffs[0] == pytest.approx(-(1 + SQ3), abs=1e-12)

    pat0 = ZeroPattern.from_a(2, [])
    v, f_next = iterate_once(legendre, P([0, 0, 1]), pat0)
    assert v == P([6.0])
    assert np.allclose(f_next.coeffs, [-1 / 3, 0, 1], atol=1e-15)
    v, f_fix = iterate_once(legendre, f_next, pat0)
    assert np.allclose(f_fix.coeffs, f_next.coeffs, atol=1e-14)


def test_solve_pair_examples(legendre, heun):
    pair = solve_pair(legendre, 2, ZeroPattern.from_a(2, []))
    assert pair.v == P([6.0]) and pair.residual < 1e-11
    assert np.allclose(pair.f.coeffs, [-1 / 3, 0, 1], atol=1e-11)

    pair = solve_pair(heun, 1, ZeroPattern.from_a(2, [2]))
    assert pair.v_roots[0] == pytest.approx(1 + SQ3, abs=1e-12)
    assert pair.f_roots[0] == pytest.approx(1 - SQ3, abs=1e-12)
    assert pair.v.leading == 3

    pair = solve_pair(legendre, 4, ZeroPattern.from_a(4, []))
    assert pair.v.coeffs[0] == pytest.approx(20)
    assert np.allclose(pair.f.coeffs, monic_legendre(4), atol=1e-10)


def test_solve_pair_rejects_vanishing_image():
    # T = zD - 1 annihilates z
    T = DifferentialOperator({0: [-1.0], 1: [0.0, 1.0]})
    assert apply(T, P([0, 1])).is_zero()
    with pytest.raises(TZnIdenticallyZero):
        solve_pair(T, 1, ZeroPattern.from_a(1, []))


def test_no_convergence_carries_last_iterate(legendre):
    with pytest.raises(NoConvergence) as info:
        solve_pair(legendre, 5, ZeroPattern.from_a(5, []), SolveOptions(max_iter=3))
    assert info.value.last.iterations == 3
    assert info.value.last.f.degree == 5


def test_solve_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(tol=0)
    with pytest.raises(ValueError):
        SolveOptions(start="middle")


def test_residual_examples(legendre):
    f = P([-1 / 3, 0, 1])
    assert residual(legendre, P([6.0]), f) < 1e-15
    assert residual(legendre, P([5.0]), f) == pytest.approx(1 / 6)


def test_degree_zero_stieltjes(pencil):
    # M = 0 so n = 0 is admissible: f = 1, v = Q_0
    report = solve_all(pencil, 0)
    assert len(report.pairs) == 1
    assert report.pairs[0].v == pencil.q(0)


@pytest.mark.parametrize(
    "name, n, count",
    [("heun", 3, 4), ("legendre", 1, 1), ("legendre", 6, 1), ("sandwich", 2, 6)],
)
def test_solve_all_counts(name, n, count, caches):
    report = caches[name][n]
    assert len(report.pairs) == count == report.expected_count
    assert not report.failures and report.complete
    assert [p.pattern for p in report.pairs] == enumerate_patterns(n, report.r)


def test_solve_all_parallel_matches_serial(sandwich):
    a = solve_all(sandwich, 3, jobs=1)
    b = solve_all(sandwich, 3, jobs=4)
    assert [(p.pattern, p.f_roots, p.v_roots) for p in a.pairs] == [(p.pattern, p.f_roots, p.v_roots) for p in b.pairs]


def test_common_zero_warning_reported(heun):
    report = solve_all(heun, 1)
    assert report.warnings


# invariants across the test operators


CASES = [("legendre", n) for n in range(1, 7)] + [(op, n) for op in ("heun", "sandwich") for n in range(1, 6)]


@pytest.mark.parametrize("name, n", CASES)
def test_pair_invariants(name, n, caches):
    report = caches[name][n]
    opts = SolveOptions()
    T = report.operator
    lam = lambda_n(T, n)
    assert len(report.pairs) + len(report.failures) == report.expected_count
    for pair in report.pairs:
        assert pair.f.leading == 1.0 and pair.f.degree == n
        assert pair.v.leading == pytest.approx(lam, rel=1e-9)
        assert pair.residual <= opts.residual_tol
        assert pair.monotone is True
        assert pair.iterations <= opts.max_iter
        merged = sorted(pair.v_roots + pair.f_roots)
        assert tuple(merged[i - 1] for i in pair.pattern.a) == pair.v_roots
        assert tuple(merged[i - 1] for i in pair.pattern.b) == pair.f_roots
        assert len(pair.root_history_tail) == 2


@pytest.mark.parametrize("name, n", CASES)
def test_van_vleck_and_stieltjes_distinct(name, n, caches):
    report = caches[name][n]
    vs = [p.v.coeffs for p in report.pairs]
    fs = [p.f.coeffs for p in report.pairs]
    for i in range(len(vs)):
        for j in range(i):
            if report.r > 0:
                assert np.max(np.abs(vs[i] - vs[j])) > 1e-6
            if n > 0:
                assert np.max(np.abs(fs[i] - fs[j])) > 1e-6


@pytest.mark.parametrize("name, n", [("heun", 3), ("sandwich", 3), ("legendre", 5)])
def test_fixed_point_stability(name, n, caches):
    opts = SolveOptions()
    for pair in caches[name][n].pairs:
        again = solve_pair(caches[name].T, n, pair.pattern, opts, start_poly=pair.f)
        assert again.iterations <= 2
        assert np.max(np.abs(np.subtract(again.f_roots, pair.f_roots))) < opts.tol


@pytest.mark.parametrize("n", range(1, 9))
def test_legendre_against_jacobi_matrix(n, caches):
    pair = caches["legendre"][n].pairs[0]
    assert pair.v.degree == 0 and pair.v.coeffs[0] == pytest.approx(n * (n + 1), rel=1e-8)
    assert np.max(np.abs(np.subtract(pair.f_roots, legendre_roots(n)))) < 1e-8


def test_heun_degree_two_closed_form(caches):
    # expanding (Q_2 f')' = 8 (z - mu) f gives mu in {1 - sqrt(7)/4, 1, 1 + sqrt(7)/4}
    mus = sorted(p.v_roots[0] for p in caches["heun"][2].pairs)
    s7 = math.sqrt(7) / 4
    assert np.allclose(mus, [1 - s7, 1.0, 1 + s7], atol=1e-10)
    mid = caches["heun"][2].pair_for((2,))
    assert np.allclose(mid.f.coeffs, [0.5, -2.0, 1.0], atol=1e-10)


@pytest.mark.parametrize("name, n", [(op, n) for op in ("legendre", "heun", "sandwich") for n in (1, 2)])
def test_oracle_agreement(name, n, caches):
    report = caches[name][n]
    result = brute_force_oracle(report.operator, n, seed=0, strict=True)
    assert len(result.solutions) == report.expected_count
    _, worst = match_solutions([(p.v, p.f) for p in report.pairs], result.solutions)
    assert worst < 1e-6


def test_oracle_examples(heun, legendre):
    res = brute_force_oracle(heun, 1)
    roots = sorted(v.coeffs[0] / -v.leading for v, _ in res.solutions)
    assert np.allclose(roots, [1 - SQ3, 1 + SQ3], atol=1e-10)
    res = brute_force_oracle(legendre, 2)
    (v, f), = res.solutions
    assert v.coeffs[0] == pytest.approx(6) and np.allclose(f.coeffs, [-1 / 3, 0, 1])


def test_oracle_incomplete_is_reported(heun):
    res = brute_force_oracle(heun, 3, random_starts=0)
    assert res.complete
    starved = brute_force_oracle(classical_operator([0, 1, 2, 3], [1, 1, 1, 1]), 2, random_starts=0)
    assert starved.expected == 6
    if not starved.complete:
        with pytest.raises(OracleIncomplete):
            brute_force_oracle(classical_operator([0, 1, 2, 3], [1, 1, 1, 1]), 2, random_starts=0, strict=True)


def test_largest_start_reaches_same_pairs(caches):
    # experimental: descending iteration from the largest zero of Q_e
    report = caches["heun"][3]
    opts = replace(SolveOptions(), start="largest")
    down = solve_all(report.operator, 3, opts)
    assert len(down.pairs) == len(report.pairs)
    for a, b in zip(report.pairs, down.pairs):
        assert np.allclose(a.f_roots, b.f_roots, atol=1e-8)
        assert b.monotone is True


def test_aitken_toggle_converges_to_same_point(caches):
    report = caches["sandwich"][3]
    fast = solve_all(report.operator, 3, SolveOptions(aitken=True))
    for a, b in zip(report.pairs, fast.pairs):
        assert b.monotone is None
        assert np.allclose(a.f_roots, b.f_roots, atol=1e-8)
        assert b.residual < 1e-9


def test_not_hyperbolic_is_recorded_as_failure():
    # T = D^2 + z is not a hyperbolicity preserver
    T = DifferentialOperator({0: [0.0, 1.0], 2: [1.0]})
    report = solve_all(T, 2)
    assert report.failures or all(p.residual < 1e-9 for p in report.pairs)


def test_real_roots_of_converged_products(caches):
    for pair in caches["sandwich"][4].pairs:
        rl = real_roots(pair.v * pair.f)
        assert np.allclose(rl.roots, pair.merged_roots(), atol=1e-9)
