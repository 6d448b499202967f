"""The critical polynomial R(t) and the zero interval (a, b) as exact enclosures.

``f(t) = -P(t) / t^r`` has derivative ``R(t) / t^(2r)`` with
``R(t) = r t^(r-1) P(t) - t^r P'(t)``.  The left endpoint ``a`` is ``f`` at the
smallest positive root ``t_a`` of R; the right endpoint ``b`` is infinite when
``r > 1`` and ``-P(t_b)/t_b`` at the unique negative root ``t_b`` when ``r = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .genseq import ProblemInstance
from .polycore import (
    ExactPolynomial,
    RootEnclosure,
    as_rational,
    cauchy_bound,
    format_rational,
    isolate_real_roots,
    refine,
)

INF = math.inf
DEFAULT_WIDTH = Fraction(1, 2**64)

Value = Union[Fraction, RootEnclosure, float]


def critical_polynomial(instance: ProblemInstance) -> ExactPolynomial:
    """Expand ``r t^(r-1) P(t) - t^r P'(t)``."""
    p = instance.poly
    r = instance.r
    c = list(p.coeffs)
    # coefficient of t^(k+r-1) is (r - k) a_k
    out = [Fraction(0)] * (r - 1) + [(r - k) * a for k, a in enumerate(c)]
    return ExactPolynomial(out)


def _reduced_critical(instance: ProblemInstance) -> ExactPolynomial:
    """``r P(t) - t P'(t)``, which is R without its root at 0."""
    c = instance.coeffs
    return ExactPolynomial([(instance.r - k) * a for k, a in enumerate(c)])


def _exact_root(p: ExactPolynomial, enc: RootEnclosure) -> Tuple[RootEnclosure, Optional[Fraction]]:
    """Detect a rational root inside ``enc``; returns a refined enclosure too."""
    lead = abs(p.primitive()[-1])
    enc = refine(enc, p, Fraction(1, 4 * lead * lead))
    cand = enc.midpoint.limit_denominator(lead)
    if cand in enc and p.sign_at(cand) == 0:
        return enc, cand
    return enc, None


def _f_value(p: ExactPolynomial, r: int, t: Fraction) -> Fraction:
    return -p(t) / t**r


def _value_enclosure(instance, rc: ExactPolynomial, r: int, enc: RootEnclosure) -> RootEnclosure:
    """Rigorous enclosure of ``-P(t)/t^r`` for the critical point in ``enc``.

    Uses ``|f'| = |R(t)| / |t|^(2r)`` with ``|R|`` bounded on the closed
    enclosure by its value at ``lo`` plus a derivative bound.
    """
    p = instance.poly
    lo, hi = enc.lo, enc.hi
    w = hi - lo
    rfull = critical_polynomial(instance) if r > 1 else rc
    tmax = max(abs(lo), abs(hi))
    tmin = min(abs(lo), abs(hi))
    dbound = sum(k * abs(c) * tmax ** (k - 1) for k, c in enumerate(rfull.coeffs) if k)
    mbound = abs(rfull(lo)) + w * dbound
    delta = w * mbound / tmin ** (2 * r)
    fl, fh = _f_value(p, r, lo), _f_value(p, r, hi)
    vlo = min(fl, fh) - delta
    vhi = max(fl, fh) + delta
    if vlo < 0 <= lo:
        vlo = Fraction(0)  # the true value is nonnegative on the positive side
    if vlo == vhi:
        vhi = vlo + Fraction(1, 2**200)
    return RootEnclosure(vlo, vhi)


@dataclass(frozen=True)
class IntervalReport:
    """Exact description of the zero interval.

    ``t_a`` is always an enclosure; ``t_a_exact`` is set when the root is
    rational.  ``t_b``, ``a`` and ``b`` are a :class:`Fraction` when known
    exactly, otherwise an enclosure; ``b`` is ``math.inf`` when unbounded.
    """

    instance: ProblemInstance
    R: ExactPolynomial
    t_a: RootEnclosure
    t_a_exact: Optional[Fraction]
    t_b: Union[Fraction, RootEnclosure]
    a: Union[Fraction, RootEnclosure]
    b: Union[Fraction, RootEnclosure, float]

    @property
    def b_infinite(self) -> bool:
        return isinstance(self.b, float) and math.isinf(self.b)

    def a_bounds(self) -> Tuple[Fraction, Fraction]:
        return _bounds(self.a)

    def b_bounds(self):
        if self.b_infinite:
            return INF, INF
        return _bounds(self.b)

    @property
    def a_float(self) -> float:
        lo, hi = self.a_bounds()
        return float((lo + hi) / 2)

    @property
    def b_float(self) -> float:
        if self.b_infinite:
            return INF
        lo, hi = self.b_bounds()
        return float((lo + hi) / 2)

    @property
    def t_a_float(self) -> float:
        if self.t_a_exact is not None:
            return float(self.t_a_exact)
        return self.t_a.to_float()

    @property
    def t_b_float(self) -> float:
        if isinstance(self.t_b, Fraction):
            return float(self.t_b)
        return self.t_b.to_float()

    def to_json(self) -> dict:
        return {
            "R": self.R.to_json(),
            "t_a": _value_json(self.t_a_exact if self.t_a_exact is not None else self.t_a),
            "t_b": _value_json(self.t_b),
            "a": _value_json(self.a),
            "b": _value_json(self.b),
        }


def _bounds(v) -> Tuple[Fraction, Fraction]:
    if isinstance(v, RootEnclosure):
        return v.lo, v.hi
    return v, v


def _value_json(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, RootEnclosure):
        return v.to_json()
    return format_rational(v)


def _endpoint_from(instance, rc, r, enc, exact, width):
    p = instance.poly
    if exact is not None:
        return _f_value(p, r, exact)
    val = _value_enclosure(instance, rc, r, enc)
    while val.width > width / 2:
        enc = refine(enc, rc, enc.width / 16)
        val = _value_enclosure(instance, rc, r, enc)
    return _round_outward(val, width)


def _round_outward(enc: RootEnclosure, width: Fraction) -> RootEnclosure:
    """Widen to dyadic endpoints, adding at most ``width / 4`` on each side."""
    k = max(0, math.ceil(math.log2(4 / width)) + 1)
    g = 1 << k
    lo = Fraction(math.floor(enc.lo * g), g)
    hi = Fraction(math.ceil(enc.hi * g), g)
    return RootEnclosure(lo, hi)


def interval_report(instance: ProblemInstance, width=DEFAULT_WIDTH) -> IntervalReport:
    """Enclose ``t_a``, ``t_b``, ``a`` and ``b`` to at most ``width``."""
    width = as_rational(width)
    if width <= 0:
        raise ValueError("width must be positive")
    r = instance.r
    R = critical_polynomial(instance)
    rc = _reduced_critical(instance)
    bound = cauchy_bound(rc)
    positive = isolate_real_roots(rc, 0, bound)
    if not positive:
        raise RuntimeError(f"critical polynomial {R} has no positive root")
    enc, ta_exact = _exact_root(rc, positive[0])
    if ta_exact is None:
        enc = refine(enc, rc, width)
    else:
        enc = RootEnclosure(max(ta_exact / 2, ta_exact - width), ta_exact) if enc.width > width else enc
    a = _endpoint_from(instance, rc, r, enc, ta_exact, width)
    if r > 1:
        t_b: Union[Fraction, RootEnclosure] = Fraction(0)
        b: Union[Fraction, RootEnclosure, float] = INF
    else:
        negative = isolate_real_roots(rc, -bound, 0)
        if len(negative) != 1:
            raise RuntimeError(f"expected one negative critical point, found {len(negative)}")
        benc, tb_exact = _exact_root(rc, negative[0])
        if tb_exact is None:
            benc = refine(benc, rc, width)
            t_b = benc
        else:
            t_b = tb_exact
        b = _endpoint_from(instance, rc, 1, benc, tb_exact, width)
    return IntervalReport(instance, R, enc, ta_exact, t_b, a, b)


def endpoint_enclosures(report: IntervalReport, width=DEFAULT_WIDTH):
    """``(a_lo, a_hi, b_lo, b_hi)`` with both pairs at most ``width`` apart.

    Exact endpoints give equal pairs; an infinite ``b`` gives ``inf`` twice.
    """
    width = as_rational(width)
    inst = report.instance
    rc = _reduced_critical(inst)
    a = report.a
    if isinstance(a, RootEnclosure) and a.width > width:
        a = _endpoint_from(inst, rc, inst.r, report.t_a, None, width)
    a_lo, a_hi = _bounds(a)
    if report.b_infinite:
        return a_lo, a_hi, INF, INF
    b = report.b
    if isinstance(b, RootEnclosure) and b.width > width:
        b = _endpoint_from(inst, rc, 1, report.t_b, None, width)
    b_lo, b_hi = _bounds(b)
    return a_lo, a_hi, b_lo, b_hi


def endpoint_bounds(report: IntervalReport, width=DEFAULT_WIDTH):
    """Inner bounds ``(a_hi, b_lo)``: ``a <= a_hi <= a + width`` and ``b - width <= b_lo <= b``."""
    _, a_hi, b_lo, _ = endpoint_enclosures(report, width)
    return a_hi, b_lo
