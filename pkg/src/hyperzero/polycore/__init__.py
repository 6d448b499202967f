"""Exact and floating polynomial arithmetic and real-root tools."""

from .exact import ExactPolynomial, poly_from_roots
from .floatpoly import ConvergenceError, FloatPolynomial, complex_roots
from .rational import Rational, as_rational, format_rational, parse_rational
from .sturm import (
    RootEnclosure,
    SturmChain,
    cauchy_bound,
    isolate_real_roots,
    poly_gcd,
    real_root_count,
    refine,
    sign_changes_at,
    squarefree_part,
    sturm_count,
)

__all__ = [
    "ConvergenceError",
    "ExactPolynomial",
    "FloatPolynomial",
    "Rational",
    "RootEnclosure",
    "SturmChain",
    "as_rational",
    "cauchy_bound",
    "complex_roots",
    "format_rational",
    "isolate_real_roots",
    "parse_rational",
    "poly_from_roots",
    "poly_gcd",
    "real_root_count",
    "refine",
    "sign_changes_at",
    "squarefree_part",
    "sturm_count",
]
