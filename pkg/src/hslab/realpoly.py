"""Real univariate polynomials, real-root isolation and interlacing predicates.

Coefficients are stored in ascending order, ``coeffs[i]`` multiplying
``z**i``. The zero polynomial has no coefficients and degree ``None``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels

DEFAULT_TOL = 1e-12
# relative size below which top coefficients are dropped
NORMALIZATION_THRESHOLD = 1e-13
# relative Wronskian slack, measured against |f'||g| + |f||g'|
WRONSKIAN_RTOL = 1e-9


class NotHyperbolic(ArithmeticError):
    """Raised when a polynomial provably has fewer real zeros than its degree."""


class ZeroPolynomial(ValueError):
    """Raised when an operation needs a nonzero polynomial."""


class LengthMismatch(ValueError):
    """Raised when two vectors cannot be compared for proper position."""


class RealPolynomial:
    """Immutable dense polynomial with real coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float] = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=float).ravel()
        if c.size:
            big = np.max(np.abs(c))
            if big == 0.0 or not np.isfinite(big):
                if not np.all(np.isfinite(c)):
                    raise ValueError("polynomial coefficients must be finite")
                c = c[:0]
            else:
                keep = np.nonzero(np.abs(c) >= NORMALIZATION_THRESHOLD * big)[0]
                c = c[: keep[-1] + 1].copy()
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value: float) -> "RealPolynomial":
        return cls([value])

    @classmethod
    def monomial(cls, n: int, coeff: float = 1.0) -> "RealPolynomial":
        c = np.zeros(n + 1)
        c[n] = coeff
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | None:
        return None if self._c.size == 0 else self._c.size - 1

    @property
    def leading(self) -> float:
        return float(self._c[-1]) if self._c.size else 0.0

    def is_zero(self) -> bool:
        return self._c.size == 0

    def coeff(self, i: int) -> float:
        return float(self._c[i]) if 0 <= i < self._c.size else 0.0

    def norm(self) -> float:
        """Largest absolute coefficient."""
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        return add(self, other)

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        return add(self, scale(other, -1.0))

    def __neg__(self) -> "RealPolynomial":
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            return multiply(self, other)
        return scale(self, float(other))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RealPolynomial):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    def __repr__(self) -> str:
        return f"RealPolynomial({self._c.tolist()!r})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self._c.size - 1, -1, -1):
            a = self._c[i]
            if a == 0.0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if mono and a == 1.0:
                body = mono
            elif mono and a == -1.0:
                body = "-" + mono
            else:
                body = f"{a:.6g}" + (f"*{mono}" if mono else "")
            terms.append(body)
        return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class RootList:
    roots: tuple[float, ...]
    leading: float

    def __len__(self) -> int:
        return len(self.roots)

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=float)


@dataclass(frozen=True)
class RootInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def widened(self, eps: float) -> "RootInterval":
        return RootInterval(self.lo - eps, self.hi + eps)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "RootInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def margin(self, x: float) -> float:
        """Signed distance from ``x`` to the nearest endpoint (negative outside)."""
        return min(x - self.lo, self.hi - x)


class Position(enum.Enum):
    F_LL_G = "f<<g"
    G_LL_F = "g<<f"
    PROPORTIONAL = "proportional"
    NONE = "none"


def evaluate(p: RealPolynomial, x: float) -> float:
    if p.is_zero():
        return 0.0
    return kernels.horner(p.coeffs, float(x))


def magnitude(p: RealPolynomial, x: float) -> float:
    """Value of the polynomial with coefficients ``|c_i|`` at ``|x|``."""
    return evaluate(RealPolynomial(np.abs(p.coeffs)), abs(x))


def derivative(p: RealPolynomial, order: int = 1) -> RealPolynomial:
    c = p.coeffs
    for _ in range(order):
        if c.size <= 1:
            return RealPolynomial()
        c = c[1:] * np.arange(1, c.size)
    return RealPolynomial(c)


def multiply(p: RealPolynomial, q: RealPolynomial) -> RealPolynomial:
    if p.is_zero() or q.is_zero():
        return RealPolynomial()
    return RealPolynomial(np.convolve(p.coeffs, q.coeffs))


def add(p: RealPolynomial, q: RealPolynomial) -> RealPolynomial:
    n = max(p.coeffs.size, q.coeffs.size)
    out = np.zeros(n)
    out[: p.coeffs.size] += p.coeffs
    out[: q.coeffs.size] += q.coeffs
    return RealPolynomial(out)


def scale(p: RealPolynomial, c: float) -> RealPolynomial:
    return RealPolynomial(p.coeffs * c)


def monic(p: RealPolynomial) -> RealPolynomial:
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no monic normalization")
    return RealPolynomial(p.coeffs / p.leading)


def from_roots(rl: RootList | Sequence[float], leading: float = 1.0) -> RealPolynomial:
    """Expand ``leading * prod(z - root)``."""
    if isinstance(rl, RootList):
        roots, leading = rl.roots, rl.leading
    else:
        roots = rl
    c = np.array([1.0])
    for r in roots:
        nxt = np.zeros(c.size + 1)
        nxt[1:] = c
        nxt[:-1] -= r * c
        c = nxt
    return RealPolynomial(leading * c)


def real_roots(p: RealPolynomial, tol: float = DEFAULT_TOL) -> RootList:
    """All zeros of a hyperbolic polynomial, ascending, with multiplicity."""
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no root list")
    status, roots = kernels.real_roots(p.coeffs, tol)
    if status != kernels.OK:
        raise NotHyperbolic(f"{p} has non-real zeros")
    return RootList(tuple(float(r) for r in roots), p.leading)


def root_interval(p: RealPolynomial, tol: float = DEFAULT_TOL) -> RootInterval:
    rl = real_roots(p, tol)
    if not rl.roots:
        raise ValueError("a constant polynomial has no root interval")
    return RootInterval(rl.roots[0], rl.roots[-1])


def wronskian(f: RealPolynomial, g: RealPolynomial) -> RealPolynomial:
    """W[f, g] = f'g - fg'."""
    return multiply(derivative(f), g) - multiply(f, derivative(g))


def _interlace(x: Sequence[float], y: Sequence[float], slack: float) -> bool:
    # zeros interlace in either order; longer list (if any) must be outside
    if len(x) < len(y):
        x, y = y, x
    if len(x) - len(y) > 1:
        return False
    if len(x) == len(y):
        return vector_proper_position(x, y, slack) or vector_proper_position(y, x, slack)
    return vector_proper_position(y, x, slack)


def _test_points(xs: Sequence[float], ys: Sequence[float]) -> list[float]:
    merged = sorted(list(xs) + list(ys))
    if not merged:
        return [0.0]
    pad = 1.0 + (merged[-1] - merged[0])
    pts = [merged[0] - pad, merged[-1] + pad]
    pts.extend(merged)
    pts.extend(0.5 * (a + b) for a, b in zip(merged, merged[1:]))
    return pts


def proper_position(f: RealPolynomial, g: RealPolynomial, tol: float = DEFAULT_TOL) -> Position:
    """Classify the pair by the sign of W[f, g] and interlacing of zeros.

    ``F_LL_G`` means ``f << g``: zeros interlace and ``f'g - fg' <= 0``.
    The zero polynomial is in proper position with everything and is
    reported as ``PROPORTIONAL``.
    """
    if f.is_zero() or g.is_zero():
        return Position.PROPORTIONAL
    xs = real_roots(f, tol).roots
    ys = real_roots(g, tol).roots
    w = wronskian(f, g)
    df, dg = derivative(f), derivative(g)
    cross = max(multiply(df, g).norm(), multiply(f, dg).norm())
    if w.is_zero() or w.norm() <= 1e-10 * cross:
        return Position.PROPORTIONAL
    span = (max(xs + ys) - min(xs + ys)) if xs + ys else 0.0
    if not _interlace(xs, ys, max(10 * tol, 1e-9 * (1.0 + span))):
        return Position.NONE
    nonpos = nonneg = True
    for t in _test_points(xs, ys):
        val = evaluate(w, t)
        slack = WRONSKIAN_RTOL * (magnitude(df, t) * magnitude(g, t) + magnitude(f, t) * magnitude(dg, t))
        if val > slack:
            nonpos = False
        if val < -slack:
            nonneg = False
    if nonpos and nonneg:
        return Position.PROPORTIONAL
    if nonpos:
        return Position.F_LL_G
    if nonneg:
        return Position.G_LL_F
    return Position.NONE


def vector_proper_position(x: Sequence[float], y: Sequence[float], slack: float = 0.0) -> bool:
    """``x << y`` for weakly increasing vectors.

    Same length: ``x1 <= y1 <= x2 <= ... <= xk <= yk``.
    ``len(y) == len(x) + 1``: ``y1 <= x1 <= y2 <= ... <= xk <= y(k+1)``.
    """
    k = len(x)
    if len(y) == k:
        chain = [v for pair in zip(x, y) for v in pair]
    elif len(y) == k + 1:
        chain = [y[0]] + [v for pair in zip(x, y[1:]) for v in pair]
    else:
        raise LengthMismatch(f"cannot compare vectors of lengths {k} and {len(y)}")
    return all(a <= b + slack for a, b in zip(chain, chain[1:]))


def chain_margin(x: Sequence[float], y: Sequence[float]) -> float:
    """Smallest slack of the inequality chain behind ``x << y`` (negative = violated)."""
    k = len(x)
    if len(y) == k:
        chain = [v for pair in zip(x, y) for v in pair]
    elif len(y) == k + 1:
        chain = [y[0]] + [v for pair in zip(x, y[1:]) for v in pair]
    else:
        raise LengthMismatch(f"cannot compare vectors of lengths {k} and {len(y)}")
    if len(chain) < 2:
        return math.inf
    return min(b - a for a, b in zip(chain, chain[1:]))
