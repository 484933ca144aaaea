import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hslab.hpop import (
    AllZeroRange,
    BadClassicalInput,
    DifferentialOperator,
    MultiplicityTooHigh,
    NotPosDef,
    NotPsd,
    OperatorError,
    apply,
    classical_operator,
    common_real_zero,
    diagnose,
    fuchs_index,
    is_nondegenerate,
    lambda_n,
    leading_coefficients,
    pencil_operator,
    sandwich_operator,
)
from hslab.realpoly import (
    Position,
    RealPolynomial,
    add,
    from_roots,
    proper_position,
    real_roots,
    root_interval,
    scale,
)

P = RealPolynomial


def _ops(legendre, heun, sandwich, pencil):
    return {"legendre": legendre, "heun": heun, "sandwich": sandwich, "pencil": pencil}


def test_apply_examples(legendre, heun):
    assert apply(legendre, P([0, 0, 1])) == P([-2, 0, 6])
    out = apply(legendre, P([-1 / 3, 0, 1]))
    assert np.allclose(out.coeffs, 6 * np.array([-1 / 3, 0, 1]), atol=1e-15)
    for c in (-1.0, 0.3, 7.0):
        assert np.allclose(apply(heun, P([-c, 1])).coeffs, [2, -6, 3])


def test_apply_zero_and_high_order():
    T = DifferentialOperator({3: [1.0]})
    assert apply(T, P([1, 1, 1])).is_zero()


def test_operator_structure(heun):
    assert (heun.M, heun.N, heun.r) == (1, 2, 1)
    assert heun.q(0).is_zero()
    assert heun == classical_operator([0, 1, 2], [1, 1, 1])


def test_operator_rejects_empty_and_negative_orders():
    with pytest.raises(OperatorError):
        DifferentialOperator({0: [0.0]})
    with pytest.raises(OperatorError):
        DifferentialOperator({-1: [1.0]})


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_fuchs_index_of_classical(d, legendre, heun):
    assert fuchs_index(legendre) == 0
    assert fuchs_index(heun) == 1
    T = classical_operator(list(range(d)), [1.0] * d)
    assert fuchs_index(T) == d - 2


def test_lambda_examples(legendre, heun):
    for n in range(1, 10):
        assert lambda_n(legendre, n) == n * (n + 1)
        assert apply(legendre, P.monomial(n)).leading == lambda_n(legendre, n)
    assert lambda_n(heun, 1) == 3
    assert lambda_n(heun, 2) == 8


def test_lambda_below_m_raises(heun):
    with pytest.raises(ValueError):
        lambda_n(heun, 0)


def test_classical_examples():
    assert classical_operator([-1, 1], [1, 1]).terms == {1: P([0, 2]), 2: P([-1, 0, 1])}
    heun = classical_operator([0, 1, 2], [1, 1, 1])
    assert heun.q(2) == P([0, 2, -3, 1]) and heun.q(1) == P([2, -6, 3])
    assert classical_operator([0, 1], [2, 1]).terms == {1: P([-2, 3]), 2: P([0, -1, 1])}


@pytest.mark.parametrize("alphas, gammas", [([1, 0], [1, 1]), ([0, 0], [1, 1]), ([0, 1], [1, 0]), ([0], [1])])
def test_classical_bad_input(alphas, gammas):
    with pytest.raises(BadClassicalInput):
        classical_operator(alphas, gammas)


def test_sandwich_examples(legendre, heun, sandwich):
    assert sandwich_operator(P([-1, 0, 1]), 1, 2) == legendre
    assert sandwich_operator(from_roots([0, 1, 2]), 1, 2) == heun
    assert fuchs_index(sandwich) == 2 and (sandwich.M, sandwich.N) == (0, 2)
    f = from_roots([0.3, -1.2, 2.0])
    Pz = from_roots([-2, -1, 0, 1])
    expected = (Pz * f).coeffs
    expected = np.polynomial.polynomial.polyder(expected, 2)
    assert np.allclose(apply(sandwich, f).coeffs, expected)


def test_sandwich_multiplicity_guard():
    with pytest.raises(MultiplicityTooHigh):
        sandwich_operator(from_roots([0, 0]), 1, 2)
    sandwich_operator(from_roots([0, 0]), 0, 2)


def test_pencil_examples():
    T = pencil_operator([[2]], [[1]], [[3]])
    assert T.terms == {0: P([1]), 1: P([3, 2])} and fuchs_index(T) == 0
    T = pencil_operator(np.eye(2), np.diag([1, 0]), np.zeros((2, 2)))
    assert T.terms == {0: P([0, 1]), 1: P([0, 0, 1])} and fuchs_index(T) == 1
    T = pencil_operator(np.eye(2), np.eye(2), np.zeros((2, 2)))
    assert T.terms == {0: P([1]), 1: P([0, 2]), 2: P([0, 0, 1])} and fuchs_index(T) == 0


def test_pencil_errors():
    with pytest.raises(NotPosDef):
        pencil_operator(np.diag([1, -1]), np.eye(2), np.zeros((2, 2)))
    with pytest.raises(NotPsd):
        pencil_operator(np.eye(2), np.diag([1, -1]), np.zeros((2, 2)))
    with pytest.raises(OperatorError):
        pencil_operator(np.eye(2), [[0, 1], [0, 0]], np.zeros((2, 2)))


def test_pencil_zero_b_gives_multiplication_operator():
    # det(zA + C) carries no w, so only Q_0 survives
    T = pencil_operator(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)))
    assert T.terms == {0: P([0, 0, 1])}


def test_pencil_fuchs_index_is_kernel_dimension(pencil):
    assert fuchs_index(pencil) == 1
    assert is_nondegenerate(pencil)


@pytest.mark.parametrize("name", ["legendre", "heun", "sandwich", "pencil"])
def test_constructed_operators_pass_diagnostics(name, legendre, heun, sandwich, pencil):
    T = _ops(legendre, heun, sandwich, pencil)[name]
    d = diagnose(T, rng_seed=0, samples=1000)
    assert d.necessary_conditions_ok
    assert d.falsifier_witness is None
    assert d.to_dict()["verdict"] == "no falsification found"


def test_falsifier_finds_witness_for_d2_plus_z():
    T = DifferentialOperator({0: [0, 1], 2: [1]})
    d = diagnose(T, rng_seed=0, samples=1000)
    z, w = d.falsifier_witness
    assert z.imag > 0 and w.imag > 0
    # symbol: sum_k Q_k(z) w^(N-k) = 1 + z w^2
    assert abs(1 + z * w * w) <= 1e-8 * (1 + abs(z) * abs(w) ** 2)
    assert not d.nondegenerate


def test_coefficient_chain_failure():
    T = DifferentialOperator({0: [-1, 0, 1], 1: [0, 1]})
    d = diagnose(T, samples=10)
    assert not d.coefficient_chain_ok
    assert d.chain_details


def test_leading_coefficients(heun):
    assert leading_coefficients(heun) == {1: 3.0, 2: 1.0}


def test_common_real_zero_examples(legendre, heun):
    T = DifferentialOperator({0: [0, 1], 1: [0, 1], 2: [0, 1]})
    assert common_real_zero(T, 2) == 0
    assert common_real_zero(legendre, 2) is None
    assert common_real_zero(heun, 2) is None
    assert common_real_zero(heun, 2, start=1) is None
    # Q_0 vanishes identically, so any zero of Q_1 alone is shared
    assert common_real_zero(heun, 1) == pytest.approx(1 - 1 / math.sqrt(3))


def test_common_real_zero_all_zero_range(heun):
    with pytest.raises(AllZeroRange):
        common_real_zero(heun, 0)


# property tests over the constructed operators

op_names = st.sampled_from(["legendre", "heun", "sandwich", "pencil"])


def _random_hyperbolic(rng, n, lo=-3.0, hi=3.0):
    return from_roots(np.sort(rng.uniform(lo, hi, n)))


@settings(max_examples=100, deadline=None)
@given(name=op_names, seed=st.integers(0, 2**32 - 1))
def test_linearity(name, seed, legendre, heun, sandwich, pencil):
    T = _ops(legendre, heun, sandwich, pencil)[name]
    rng = np.random.default_rng(seed)
    f = P(rng.normal(size=rng.integers(1, 8)))
    g = P(rng.normal(size=rng.integers(1, 8)))
    a, b = rng.normal(size=2)
    lhs = apply(T, add(scale(f, a), scale(g, b)))
    rhs = add(scale(apply(T, f), a), scale(apply(T, g), b))
    big = max(1.0, lhs.norm(), rhs.norm())
    assert (lhs - rhs).norm() <= 1e-10 * big


@settings(max_examples=100, deadline=None)
@given(name=op_names, extra=st.integers(0, 6), seed=st.integers(0, 2**32 - 1))
def test_degree_law(name, extra, seed, legendre, heun, sandwich, pencil):
    T = _ops(legendre, heun, sandwich, pencil)[name]
    n = max(T.M, 1) + extra
    f = _random_hyperbolic(np.random.default_rng(seed), n)
    tf = apply(T, f)
    assert tf.degree == n + fuchs_index(T)
    assert tf.leading == pytest.approx(lambda_n(T, n), rel=1e-9)


@pytest.mark.parametrize("name", ["legendre", "heun", "sandwich", "pencil"])
def test_lambda_strictly_increasing(name, legendre, heun, sandwich, pencil):
    T = _ops(legendre, heun, sandwich, pencil)[name]
    lams = [lambda_n(T, n) for n in range(T.M, T.M + 22)]
    assert all(b > a for a, b in zip(lams, lams[1:]))


@settings(max_examples=100, deadline=None)
@given(name=op_names, extra=st.integers(0, 5), seed=st.integers(0, 2**32 - 1))
def test_inclusion(name, extra, seed, legendre, heun, sandwich, pencil):
    T = _ops(legendre, heun, sandwich, pencil)[name]
    n = max(T.M, 1) + extra
    f = _random_hyperbolic(np.random.default_rng(seed), n)
    e = min(n, T.N)
    outer = root_interval(T.q(e) * f).widened(1e-9)
    assert outer.contains_interval(root_interval(apply(T, f)))


@settings(max_examples=100, deadline=None)
@given(name=op_names, n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_proper_position_preserved(name, n, seed, legendre, heun, sandwich, pencil):
    T = _ops(legendre, heun, sandwich, pencil)[name]
    rng = np.random.default_rng(seed)
    pts = np.sort(rng.uniform(-3, 3, 2 * n))
    f, g = from_roots(pts[0::2]), from_roots(pts[1::2])
    assert proper_position(f, g) is Position.F_LL_G
    assert proper_position(apply(T, f), apply(T, g)) in (Position.F_LL_G, Position.PROPORTIONAL)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=5, unique=True),
    st.lists(st.floats(0.1, 3), min_size=5, max_size=5),
)
def test_random_classical_operators_are_consistent(alphas, gammas):
    alphas = sorted(alphas)
    if min(np.diff(alphas)) < 1e-3:
        return
    T = classical_operator(alphas, gammas[: len(alphas)])
    d = diagnose(T, samples=50)
    assert d.coefficient_chain_ok and d.leading_poly_ok and d.falsifier_witness is None
    real_roots(T.q(1))
