"""Sturm chains, exact real-root counting and isolation by bisection.

All chain arithmetic runs on ``gmpy2.mpz`` coefficient lists.  Each chain
element is the primitive part of ``-prem(p_{k-1}, p_k)`` with the sign fixed
so that it is a positive multiple of the true negated remainder, which keeps
sign variations identical to the textbook rational chain while the
coefficients stay small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Union

import gmpy2
from gmpy2 import mpz

from .exact import ExactPolynomial
from .rational import as_rational, format_rational

Endpoint = Union[Fraction, int, float, str, None]

_INF = math.inf


@dataclass(frozen=True)
class RootEnclosure:
    """Half-open interval ``(lo, hi]`` holding exactly one real root."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if not lo < hi:
            raise ValueError(f"empty enclosure ({format_rational(lo)}, {format_rational(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        return self.lo < x <= self.hi

    def to_float(self) -> float:
        return float(self.midpoint)

    def to_json(self) -> dict:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}


# -- integer polynomial helpers ----------------------------------------------


def _to_mpz(p: ExactPolynomial) -> List[mpz]:
    return [mpz(c) for c in p.primitive()]


def _primitive(coeffs: List[mpz]) -> List[mpz]:
    g = mpz(0)
    for c in coeffs:
        g = gmpy2.gcd(g, c)
        if g == 1:
            return coeffs
    if g == 0:
        return coeffs
    return [c // g for c in coeffs]


def _strip(coeffs: List[mpz]) -> List[mpz]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _derivative(coeffs: Sequence[mpz]) -> List[mpz]:
    return [k * coeffs[k] for k in range(1, len(coeffs))]


def _neg_prem(a: Sequence[mpz], b: Sequence[mpz]) -> List[mpz]:
    """Primitive part of ``-(a mod b)`` scaled by a positive factor."""
    rem = list(a)
    db = len(b) - 1
    lb = b[-1]
    bl = list(b[:-1])
    mult = 0
    while len(rem) - 1 >= db:
        q = rem.pop()
        if q == 0:
            continue
        s = len(rem) - db
        if lb != 1:
            rem = [x * lb for x in rem]
        for i in range(db):
            rem[s + i] -= q * bl[i]
        mult += 1
    _strip(rem)
    if not rem:
        return []
    rem = _primitive(rem)
    # rem is lb^mult * (a mod b) over a positive content
    if lb < 0 and mult % 2 == 1:
        return rem
    return [-x for x in rem]


def _sign_at(coeffs: Sequence[mpz], p: int, q: int) -> int:
    acc = coeffs[-1]
    if q == 1:
        for c in reversed(coeffs[:-1]):
            acc = acc * p + c
    else:
        qpow = mpz(1)
        for c in reversed(coeffs[:-1]):
            qpow *= q
            acc = acc * p + c * qpow
    return (acc > 0) - (acc < 0)


def _sign_at_inf(coeffs: Sequence[mpz], positive: bool) -> int:
    s = 1 if coeffs[-1] > 0 else -1
    if not positive and (len(coeffs) - 1) % 2 == 1:
        s = -s
    return s


def _variations(signs) -> int:
    v = 0
    last = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            v += 1
        last = s
    return v


# -- public API --------------------------------------------------------------


class SturmChain:
    """Sturm sequence of an exact polynomial.

    ``chain[0]`` is the input (primitive part), ``chain[1]`` its derivative,
    and each further element a positive multiple of the negated remainder of
    the two before it.  The last element is constant iff the input is
    square-free.
    """

    __slots__ = ("_rows", "_poly", "_chain")

    def __init__(self, p: ExactPolynomial):
        if p.is_zero():
            raise ValueError("Sturm chain of the zero polynomial")
        self._poly = p
        rows = [_to_mpz(p)]
        if len(rows[0]) > 1:
            rows.append(_primitive(_derivative(rows[0])))
            while len(rows[-1]) > 1:
                nxt = _neg_prem(rows[-2], rows[-1])
                if not nxt:
                    break
                rows.append(nxt)
        self._rows = rows
        self._chain = None

    @property
    def chain(self) -> tuple:
        if self._chain is None:
            self._chain = tuple(ExactPolynomial.from_integers(r) for r in self._rows)
        return self._chain

    @property
    def polynomial(self) -> ExactPolynomial:
        return self._poly

    def __len__(self) -> int:
        return len(self._rows)

    def is_squarefree(self) -> bool:
        return len(self._rows[-1]) == 1

    def gcd_degree(self) -> int:
        """Degree of gcd(p, p')."""
        return len(self._rows[-1]) - 1 if len(self._rows) > 1 else 0

    def variations(self, x) -> int:
        if x in (_INF, -_INF):
            return _variations(_sign_at_inf(r, x > 0) for r in self._rows)
        x = as_rational(x)
        p, q = mpz(x.numerator), mpz(x.denominator)
        return _variations(_sign_at(r, p, q) for r in self._rows)

    def count(self, lo=-_INF, hi=_INF) -> int:
        """Distinct roots in the half-open ``(lo, hi]`` (square-free input)."""
        return self.variations(lo) - self.variations(hi)


def _endpoint(x) -> Union[Fraction, float]:
    if x is None:
        raise ValueError("missing endpoint")
    if isinstance(x, float) and math.isinf(x):
        return x
    if isinstance(x, str) and x.strip().lstrip("+-") in ("inf", "oo", "infinity"):
        return -_INF if x.strip().startswith("-") else _INF
    return as_rational(x)


@lru_cache(maxsize=256)
def _squarefree_chain(p: ExactPolynomial) -> SturmChain:
    chain = SturmChain(p)
    if chain.is_squarefree():
        return chain
    return SturmChain(squarefree_part(p))


def sturm_count(p: ExactPolynomial, lo=-_INF, hi=_INF) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``(lo, hi)``."""
    if p.is_zero():
        raise ValueError("cannot count roots of the zero polynomial")
    lo, hi = _endpoint(lo), _endpoint(hi)
    if not lo < hi:
        return 0
    if p.degree == 0:
        return 0
    chain = _squarefree_chain(p)
    n = chain.count(lo, hi)
    if not (isinstance(hi, float)) and p.sign_at(hi) == 0:
        n -= 1
    return n


def poly_gcd(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    """Monic gcd via primitive pseudo-remainders."""
    a, b = _to_mpz(p), _to_mpz(q)
    if not a:
        return q.monic()
    if not b:
        return p.monic()
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, _neg_prem(a, b)
    return ExactPolynomial.from_integers(a).monic()


def squarefree_part(p: ExactPolynomial) -> ExactPolynomial:
    """Monic ``p / gcd(p, p')``."""
    if p.is_zero():
        raise ValueError("square-free part of the zero polynomial")
    if p.degree <= 0:
        return ExactPolynomial([1])
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p.monic()
    q, r = divmod(p, g)
    assert r.is_zero()
    return q.monic()


def cauchy_bound(p: ExactPolynomial) -> Fraction:
    """Strict rational bound on the modulus of every root."""
    nums = p.numerators
    lead = abs(nums[-1])
    m = max((abs(c) for c in nums[:-1]), default=0)
    return Fraction(m, lead) + 1


def isolate_real_roots(p: ExactPolynomial, lo=None, hi=None) -> List[RootEnclosure]:
    """One disjoint enclosure per distinct real root, sorted increasingly.

    With ``lo``/``hi`` given, only roots in the half-open ``(lo, hi]`` are
    isolated; by default the whole line is searched.
    """
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    if p.degree <= 0:
        return []
    chain = _squarefree_chain(p)
    bound = cauchy_bound(p)
    lo = -bound if lo is None else max(as_rational(lo), -bound)
    hi = bound if hi is None else min(as_rational(hi), bound)
    if not lo < hi:
        return []
    out: List[RootEnclosure] = []
    stack = [(lo, hi, chain.variations(lo), chain.variations(hi))]
    while stack:
        a, b, va, vb = stack.pop()
        k = va - vb
        if k == 0:
            continue
        if k == 1:
            out.append(RootEnclosure(a, b))
            continue
        mid = (a + b) / 2
        vmid = chain.variations(mid)
        stack.append((mid, b, vmid, vb))
        stack.append((a, mid, va, vmid))
    out.sort(key=lambda e: e.lo)
    return out


def refine(e: RootEnclosure, p: ExactPolynomial, width) -> RootEnclosure:
    """Shrink ``e`` to width at most ``width`` around its unique root."""
    width = as_rational(width)
    if width <= 0:
        raise ValueError("width must be positive")
    lo, hi = e.lo, e.hi
    if hi - lo <= width:
        return e
    s_lo, s_hi = p.sign_at(lo), p.sign_at(hi)
    if s_hi == 0:
        return RootEnclosure(hi - width, hi)
    if s_lo * s_hi < 0:
        while hi - lo > width:
            mid = (lo + hi) / 2
            s = p.sign_at(mid)
            if s == 0:
                return RootEnclosure(max(lo, mid - width / 2), mid)
            if s == s_hi:
                hi = mid
            else:
                lo = mid
        return RootEnclosure(lo, hi)
    # even multiplicity: fall back on counting
    chain = _squarefree_chain(p)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if chain.count(lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return RootEnclosure(lo, hi)


def real_root_count(p: ExactPolynomial) -> int:
    """Distinct real roots over the whole line."""
    return sturm_count(p, -_INF, _INF)


def sign_changes_at(p: ExactPolynomial, points: Sequence) -> Optional[int]:
    """Sign changes of ``p`` along increasing points; ``None`` if any is a root."""
    rows = _to_mpz(p)
    signs = []
    for x in points:
        x = as_rational(x)
        s = _sign_at(rows, mpz(x.numerator), mpz(x.denominator))
        if s == 0:
            return None
        signs.append(s)
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)
