import math
from fractions import Fraction

import pytest
import sympy

from hyperzero.genseq import ProblemInstance
from hyperzero.interval import (
    INF,
    critical_polynomial,
    endpoint_bounds,
    endpoint_enclosures,
    interval_report,
)
from hyperzero.polycore import ExactPolynomial, RootEnclosure

from instances import binomial_instance, random_instances

F = Fraction


def P(*coeffs):
    return ExactPolynomial(coeffs)


def expected_table(n, r):
    """``(t_b, t_a)`` for ``P = (1-t)^n`` in the three cases."""
    if r > 1 and n > 1:
        return F(0), F(1)
    if r == 1 < n:
        return F(-1, n - 1), F(1)
    if n == 1 < r:
        return F(0), F(r, r - 1)
    raise ValueError


def test_critical_polynomial_examples():
    assert critical_polynomial(ProblemInstance((1, 1), 1, 1)) == P(1, 0, -1)
    assert critical_polynomial(ProblemInstance((1,), 1, 2)) == P(0, 2, -1)


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 6) for r in range(1, 5) if max(n, r) > 1])
def test_critical_polynomial_binomial_factorization(n, r):
    lhs = critical_polynomial(binomial_instance(n, r))
    rhs = P(*([0] * (r - 1) + [1]))
    for _ in range(n - 1):
        rhs = rhs * P(1, -1)
    rhs = rhs * P(r, n - r)
    assert lhs == rhs


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 6) for r in range(1, 5) if max(n, r) > 1])
def test_remark_table(n, r):
    rep = interval_report(binomial_instance(n, r))
    t_b, t_a = expected_table(n, r)
    assert rep.t_a_exact == t_a
    assert rep.t_b == t_b
    assert rep.b_infinite == (r > 1)


def test_square_r1_report():
    rep = interval_report(ProblemInstance((1, 1), 1, 1))
    assert (rep.t_a_exact, rep.t_b, rep.a, rep.b) == (1, -1, 0, 4)
    assert rep.to_json() == {"R": ["1", "0", "-1"], "t_a": "1", "t_b": "-1", "a": "0", "b": "4"}


def test_linear_r2_report():
    rep = interval_report(ProblemInstance((1,), 1, 2))
    assert rep.t_a_exact == 2 and rep.t_b == 0
    assert rep.a == F(1, 4) and rep.b == INF
    assert rep.to_json()["b"] == "inf"


def test_square_r2_report():
    rep = interval_report(ProblemInstance((1, 1), 1, 2))
    assert rep.t_a_exact == 1 and rep.a == 0 and rep.b_infinite


def test_endpoint_bounds_examples():
    rep = interval_report(ProblemInstance((1, 1), 1, 1))
    a_hi, b_lo = endpoint_bounds(rep, F(1, 1024))
    assert 0 <= a_hi <= F(1, 1024)
    assert 4 - F(1, 1024) <= b_lo <= 4
    _, b_lo = endpoint_bounds(interval_report(ProblemInstance((1,), 1, 2)))
    assert b_lo == INF


def _sympy_roots(p):
    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * t**k for k, c in enumerate(p.coeffs))
    return [sympy.nsimplify(x) if x.is_rational else x for x in sympy.real_roots(sympy.Poly(expr, t))], t, expr


@pytest.mark.parametrize("inst", random_instances(8) + [ProblemInstance((1, 2, 3), 1, 1)], ids=str)
def test_enclosures_against_sympy(inst):
    width = F(1, 2**40)
    rep = interval_report(inst, width)
    R = critical_polynomial(inst)
    roots, t, _ = _sympy_roots(R)
    positive = sorted(x for x in roots if x > 0)
    ta = positive[0]
    assert rep.t_a.lo < ta.evalf(60) <= rep.t_a.hi
    assert rep.t_a.width <= width
    p = inst.poly
    pex = sum(sympy.Rational(c.numerator, c.denominator) * t**k for k, c in enumerate(p.coeffs))
    a_true = (-pex / t**inst.r).subs(t, ta).evalf(60)
    a_lo, a_hi, b_lo, b_hi = endpoint_enclosures(rep, width)
    assert a_lo <= a_true <= a_hi and a_hi - a_lo <= width
    if inst.r == 1:
        negative = [x for x in roots if x < 0]
        assert len(negative) == 1
        b_true = (-pex / t).subs(t, negative[0]).evalf(60)
        assert b_lo <= b_true <= b_hi and b_hi - b_lo <= width
    else:
        assert (b_lo, b_hi) == (INF, INF)


def test_irrational_endpoint_is_an_enclosure():
    inst = ProblemInstance((1, 2, 3), 1, 1)
    rep = interval_report(inst, F(1, 2**30))
    assert rep.t_a_exact is None
    assert isinstance(rep.a, RootEnclosure)
    doc = rep.to_json()
    assert set(doc["a"]) == {"lo", "hi"}
    assert 0 < rep.a_float < rep.b_float


def test_rejects_bad_width():
    with pytest.raises(ValueError):
        interval_report(ProblemInstance((1, 1), 1, 1), 0)


@pytest.mark.parametrize("inst", random_instances(20), ids=str)
def test_interval_is_nonempty_and_ordered(inst):
    rep = interval_report(inst)
    assert rep.a_float >= 0
    assert rep.b_float > rep.a_float
    assert math.isinf(rep.b_float) == (inst.r > 1)
    assert rep.t_a_float > 0 and rep.t_b_float <= 0
