"""Finite-order differential operators T = sum_k Q_k(z) D^k.

Includes constructors that are hyperbolicity preserving by design, the
structural indices (Fuchs index, leading coefficients lambda_n), necessary
conditions for hyperbolicity preservation and a one-sided stability
falsifier for the symbol G_T(z, w) = sum_k Q_k(z) w^(N-k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .realpoly import (
    DEFAULT_TOL,
    NotHyperbolic,
    Position,
    RealPolynomial,
    derivative,
    evaluate,
    from_roots,
    magnitude,
    proper_position,
    real_roots,
)


class OperatorError(ValueError):
    """Base class for invalid operator input."""


class BadClassicalInput(OperatorError):
    pass


class MultiplicityTooHigh(OperatorError):
    pass


class NotPosDef(OperatorError):
    pass


class NotPsd(OperatorError):
    pass


class DegenerateSymbol(OperatorError):
    pass


class AllZeroRange(OperatorError):
    pass


class DifferentialOperator:
    """Sparse map from derivative order k to the coefficient Q_k.

    Orders with an identically zero coefficient are not stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, RealPolynomial | Sequence[float]]):
        clean = {}
        for k, q in terms.items():
            k = int(k)
            if k < 0:
                raise OperatorError(f"negative derivative order {k}")
            q = q if isinstance(q, RealPolynomial) else RealPolynomial(q)
            if not q.is_zero():
                clean[k] = q
        if not clean:
            raise OperatorError("operator has no nonzero coefficient")
        self._terms = dict(sorted(clean.items()))

    @property
    def terms(self) -> dict[int, RealPolynomial]:
        return dict(self._terms)

    @property
    def M(self) -> int:
        return next(iter(self._terms))

    @property
    def N(self) -> int:
        return next(reversed(self._terms))

    @property
    def r(self) -> int:
        return fuchs_index(self)

    def q(self, k: int) -> RealPolynomial:
        return self._terms.get(k, RealPolynomial())

    def __call__(self, f: RealPolynomial) -> RealPolynomial:
        return apply(self, f)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DifferentialOperator):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self) -> str:
        body = " + ".join(f"({q})D^{k}" for k, q in self._terms.items())
        return f"DifferentialOperator({body})"


def apply(T: DifferentialOperator, f: RealPolynomial) -> RealPolynomial:
    """T(f) = sum_k Q_k f^(k)."""
    if f.is_zero():
        return RealPolynomial()
    c = f.coeffs
    out = np.zeros(1)
    k = 0
    for order, q in T._terms.items():
        while k < order:
            if c.size <= 1:
                c = c[:0]
                break
            c = c[1:] * np.arange(1, c.size)
            k += 1
        if c.size == 0:
            break
        term = np.convolve(q.coeffs, c)
        if term.size > out.size:
            term[: out.size] += out
            out = term
        else:
            out[: term.size] += term
    return RealPolynomial(out)


def fuchs_index(T: DifferentialOperator) -> int:
    return max(q.degree - k for k, q in T._terms.items())


def leading_coefficients(T: DifferentialOperator) -> dict[int, float]:
    """a_i: the coefficient of z^(r+i) in Q_i, for every stored order i."""
    r = fuchs_index(T)
    return {k: q.coeff(r + k) for k, q in T._terms.items()}


def lambda_n(T: DifferentialOperator, n: int) -> float:
    """Leading coefficient of T(z^n): sum_i i! a_i C(n, i)."""
    if n < T.M:
        raise OperatorError(f"n = {n} is below the lowest order M = {T.M}")
    return float(sum(math.factorial(i) * a * math.comb(n, i) for i, a in leading_coefficients(T).items()))


def leading_poly(T: DifferentialOperator) -> RealPolynomial:
    a = leading_coefficients(T)
    c = np.zeros(T.N + 1)
    for i, v in a.items():
        c[i] = v
    return RealPolynomial(c)


def is_nondegenerate(T: DifferentialOperator) -> bool:
    return T.q(T.N).degree == T.N + fuchs_index(T)


def classical_operator(alphas: Sequence[float], gammas: Sequence[float]) -> DifferentialOperator:
    """Q_2 D^2 + Q_1 D with Q_2 = prod(z - alpha_j), Q_1 = Q_2 * sum gamma_j / (z - alpha_j)."""
    alphas = [float(a) for a in alphas]
    gammas = [float(g) for g in gammas]
    if len(alphas) < 2 or len(alphas) != len(gammas):
        raise BadClassicalInput("need at least two alphas and one gamma per alpha")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise BadClassicalInput("alphas must be strictly increasing")
    if any(not g > 0.0 for g in gammas):
        raise BadClassicalInput("gammas must be positive")
    q2 = from_roots(alphas)
    q1 = RealPolynomial()
    for j, g in enumerate(gammas):
        q1 = q1 + from_roots(alphas[:j] + alphas[j + 1 :], g)
    return DifferentialOperator({1: q1, 2: q2})


def sandwich_operator(P: RealPolynomial, M: int, N: int, tol: float = DEFAULT_TOL) -> DifferentialOperator:
    """T(f) = D^(N-M)(P D^M f) = sum_k C(N-M, k-M) P^(N-k) D^k."""
    if not 0 <= M <= N:
        raise OperatorError(f"need 0 <= M <= N, got M={M}, N={N}")
    rl = real_roots(P, tol)
    run = 1
    for a, b in zip(rl.roots, rl.roots[1:]):
        run = run + 1 if a == b else 1
        if run > N - M:
            raise MultiplicityTooHigh(f"zero {a} of P has multiplicity above N - M = {N - M}")
    if rl.roots and N - M == 0:
        raise MultiplicityTooHigh("N = M allows no zeros in P")
    terms = {k: math.comb(N - M, k - M) * derivative(P, N - k) for k in range(M, N + 1)}
    if terms[M].is_zero():
        raise OperatorError(f"deg P = {P.degree} makes Q_M vanish")
    return DifferentialOperator(terms)


def _check_symmetric(name: str, X: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise OperatorError(f"{name} must be square")
    if not np.allclose(X, X.T, atol=1e-12 * (1.0 + np.abs(X).max())):
        raise OperatorError(f"{name} must be symmetric")


def _interp_nodes(count: int, radius: float) -> np.ndarray:
    k = np.arange(count)
    return radius * np.cos((2 * k + 1) * np.pi / (2 * count))


def pencil_operator(A, B, C) -> DifferentialOperator:
    """Operator whose symbol is det(zA + wB + C).

    A must be positive definite and B positive semi-definite; the multiplicity
    of the eigenvalue 0 of B becomes the Fuchs index.
    """
    A, B, C = (np.atleast_2d(np.asarray(X, dtype=float)) for X in (A, B, C))
    for name, X in (("A", A), ("B", B), ("C", C)):
        _check_symmetric(name, X)
    s = A.shape[0]
    if B.shape != (s, s) or C.shape != (s, s):
        raise OperatorError("A, B and C must have equal size")
    norm = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2), np.linalg.norm(C, 2))
    if np.linalg.eigvalsh(A).min() <= 1e-10 * norm:
        raise NotPosDef("A is not positive definite")
    if np.linalg.eigvalsh(B).min() < -1e-10 * norm:
        raise NotPsd("B is not positive semi-definite")

    # G has total degree <= s: interpolate on an (s+1) x (s+1) tensor grid
    radius = 1.0 + np.linalg.norm(A, 2) + np.linalg.norm(B, 2) + np.linalg.norm(C, 2)
    zs = _interp_nodes(s + 1, radius)
    ws = _interp_nodes(s + 1, radius)
    vals = np.array([[np.linalg.det(z * A + w * B + C) for w in ws] for z in zs])
    Vz = np.vander(zs, s + 1, increasing=True)
    Vw = np.vander(ws, s + 1, increasing=True)
    by_z = np.linalg.solve(Vz, vals)  # rows: powers of z, columns: w nodes
    coef = np.linalg.solve(Vw, by_z.T).T  # coef[i, j] multiplies z^i w^j
    big = np.abs(coef).max()
    if big == 0.0:
        raise DegenerateSymbol("det(zA + wB + C) vanishes identically")
    coef[np.abs(coef) < 1e-10 * big] = 0.0
    if np.allclose(coef, np.round(coef), rtol=0.0, atol=1e-9 * big):
        coef = np.round(coef)
    w_deg = max(j for j in range(s + 1) if np.any(coef[:, j] != 0.0))
    return DifferentialOperator({w_deg - j: coef[:, j] for j in range(w_deg + 1)})


def symbol_coefficients(T: DifferentialOperator, z: complex) -> np.ndarray:
    """Coefficients of w -> G_T(z, w), ascending in w."""
    out = np.zeros(T.N + 1, dtype=complex)
    for k, q in T._terms.items():
        out[T.N - k] = np.polynomial.polynomial.polyval(z, q.coeffs)
    return out


@dataclass
class HpDiagnostics:
    fuchs_index: int
    nondegenerate: bool
    degree_bounds_ok: bool
    leading_poly: RealPolynomial
    leading_poly_ok: bool
    leading_sign: int
    coefficient_chain_ok: bool
    falsifier_witness: tuple[complex, complex] | None = None
    samples: int = 0
    chain_details: list[str] = field(default_factory=list)

    @property
    def necessary_conditions_ok(self) -> bool:
        return self.nondegenerate and self.degree_bounds_ok and self.leading_poly_ok and self.coefficient_chain_ok

    def to_dict(self) -> dict:
        w = self.falsifier_witness
        return {
            "fuchs_index": self.fuchs_index,
            "nondegenerate": self.nondegenerate,
            "degree_bounds_ok": self.degree_bounds_ok,
            "leading_poly": [float(c) for c in self.leading_poly.coeffs],
            "leading_poly_ok": self.leading_poly_ok,
            "leading_sign": self.leading_sign,
            "coefficient_chain_ok": self.coefficient_chain_ok,
            "chain_details": list(self.chain_details),
            "samples": self.samples,
            "falsifier_witness": None
            if w is None
            else {"z": [float(w[0].real), float(w[0].imag)], "w": [float(w[1].real), float(w[1].imag)]},
            "verdict": "falsified" if w is not None else "no falsification found",
        }


def _leading_poly_check(T: DifferentialOperator) -> tuple[bool, int]:
    a = leading_coefficients(T)
    vals = np.array([a.get(i, 0.0) for i in range(T.M, T.N + 1)])
    big = np.abs(vals).max()
    nz = np.nonzero(np.abs(vals) > 1e-12 * big)[0]
    signs = np.sign(vals[nz])
    sign = int(signs[0]) if nz.size else 0
    ok = nz.size > 0 and bool(np.all(signs == signs[0])) and nz[-1] - nz[0] + 1 == nz.size
    if ok:
        try:
            roots = real_roots(leading_poly(T)).roots
        except NotHyperbolic:
            return False, sign
        scale = 1.0 + max((abs(x) for x in roots), default=0.0)
        ok = all(x <= 1e-9 * scale for x in roots)
    return ok, sign


def _chain_check(T: DifferentialOperator) -> tuple[bool, list[str]]:
    ok = True
    notes = []
    for j in range(T.M, T.N):
        try:
            pos = proper_position(T.q(j), T.q(j + 1))
        except NotHyperbolic:
            ok = False
            notes.append(f"Q_{j} or Q_{j + 1} is not hyperbolic")
            continue
        if pos not in (Position.F_LL_G, Position.PROPORTIONAL):
            ok = False
            notes.append(f"Q_{j} << Q_{j + 1} fails ({pos.value})")
    return ok, notes


def find_stability_witness(
    T: DifferentialOperator, rng: np.random.Generator, samples: int
) -> tuple[complex, complex] | None:
    """Search for (z, w) in the upper half-plane squared with G_T(z, w) = 0."""
    for _ in range(samples):
        z = complex(rng.uniform(-3.0, 3.0), 3.0 * (1.0 - rng.random()))
        coeffs = symbol_coefficients(T, z)
        nz = np.nonzero(coeffs)[0]
        if nz.size == 0 or nz[-1] == 0:
            continue
        ws = np.roots(coeffs[: nz[-1] + 1][::-1])
        for w in ws:
            if w.imag > 1e-9 * max(1.0, abs(w)):
                size = sum(abs(c) * abs(w) ** i for i, c in enumerate(coeffs))
                if abs(np.polynomial.polynomial.polyval(w, coeffs)) <= 1e-8 * size:
                    return z, complex(w)
    return None


def diagnose(T: DifferentialOperator, rng_seed: int = 0, samples: int = 1000) -> HpDiagnostics:
    """Necessary conditions for hyperbolicity preservation plus a falsifier.

    A missing witness is absence of evidence, not a proof of stability.
    """
    r = fuchs_index(T)
    r_low = T.q(T.M).degree - T.M
    degree_ok = all(q.degree <= r_low + k for k, q in T._terms.items())
    lead_ok, sign = _leading_poly_check(T)
    chain_ok, notes = _chain_check(T)
    witness = find_stability_witness(T, np.random.default_rng(rng_seed), samples)
    return HpDiagnostics(
        fuchs_index=r,
        nondegenerate=is_nondegenerate(T),
        degree_bounds_ok=degree_ok,
        leading_poly=leading_poly(T),
        leading_poly_ok=lead_ok,
        leading_sign=sign,
        coefficient_chain_ok=chain_ok,
        falsifier_witness=witness,
        samples=samples,
        chain_details=notes,
    )


def common_real_zero(T: DifferentialOperator, jmax: int, start: int = 0) -> float | None:
    """A real theta with Q_start(theta) = ... = Q_jmax(theta) = 0, if any.

    ``start=0`` is the hypothesis of uniqueness and location; ``start=1``
    the one for simplicity and strict interlacing.
    """
    orders = [k for k in range(start, jmax + 1) if not T.q(k).is_zero()]
    if not orders:
        raise AllZeroRange(f"Q_{start}..Q_{jmax} are all identically zero")
    base = T.q(orders[0])
    if base.degree == 0:
        return None
    try:
        candidates = real_roots(base).roots
    except NotHyperbolic:
        eig = np.roots(base.coeffs[::-1])
        candidates = sorted(float(x.real) for x in eig if abs(x.imag) <= 1e-9 * (1.0 + abs(x)))
    for theta in candidates:
        if all(abs(evaluate(T.q(k), theta)) <= 1e-9 * max(1.0, magnitude(T.q(k), theta)) for k in orders):
            return theta
    return None


def operator_summary(T: DifferentialOperator) -> dict:
    return {
        "M": T.M,
        "N": T.N,
        "r": fuchs_index(T),
        "coeffs": {str(k): [float(c) for c in q.coeffs] for k, q in T.terms.items()},
    }


__all__ = [
    "AllZeroRange",
    "BadClassicalInput",
    "DegenerateSymbol",
    "DifferentialOperator",
    "HpDiagnostics",
    "MultiplicityTooHigh",
    "NotPosDef",
    "NotPsd",
    "OperatorError",
    "apply",
    "classical_operator",
    "common_real_zero",
    "diagnose",
    "find_stability_witness",
    "fuchs_index",
    "is_nondegenerate",
    "lambda_n",
    "leading_coefficients",
    "leading_poly",
    "operator_summary",
    "pencil_operator",
    "sandwich_operator",
    "symbol_coefficients",
]
