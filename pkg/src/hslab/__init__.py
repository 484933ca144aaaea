"""Stieltjes and Van Vleck polynomials of hyperbolicity-preserving operators."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .hpop import (
    DifferentialOperator,
    apply,
    classical_operator,
    diagnose,
    fuchs_index,
    lambda_n,
    pencil_operator,
    sandwich_operator,
)
from .patterns import ZeroPattern, arrow_consecutive, arrow_same, count_predecessors, enumerate_patterns
from .realpoly import NotHyperbolic, Position, RealPolynomial, from_roots, proper_position, real_roots
from .solver import SolveOptions, SolveReport, StieltjesPair, solve_all, solve_pair

__all__ = [
    "BACKEND",
    "DifferentialOperator",
    "NotHyperbolic",
    "Position",
    "RealPolynomial",
    "SolveOptions",
    "SolveReport",
    "StieltjesPair",
    "ZeroPattern",
    "apply",
    "arrow_consecutive",
    "arrow_same",
    "classical_operator",
    "count_predecessors",
    "diagnose",
    "enumerate_patterns",
    "from_roots",
    "fuchs_index",
    "lambda_n",
    "pencil_operator",
    "proper_position",
    "real_roots",
    "sandwich_operator",
    "solve_all",
    "solve_pair",
]
