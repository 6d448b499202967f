"""Dense univariate polynomials with exact rational coefficients.

Coefficients are stored as a tuple of integer numerators over one positive
common denominator, which keeps evaluation and the remainder sequences in
:mod:`hyperzero.polycore.sturm` in pure integer arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpz

from .rational import as_rational, format_rational, parse_rational


def _content(values: Iterable[int], start: int = 0) -> int:
    g = start
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            break
    return g


class ExactPolynomial:
    """Immutable polynomial ``sum(coeffs[k] * x**k)`` over the rationals.

    The zero polynomial has no coefficients and degree ``-1``.
    """

    __slots__ = ("_num", "_den", "_coeffs", "_hash", "_big")

    def __init__(self, coeffs: Iterable = ()):
        fracs = [as_rational(c) for c in coeffs]
        den = 1
        for c in fracs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        self._set([c.numerator * (den // c.denominator) for c in fracs], den)

    @classmethod
    def from_integers(cls, numerators: Sequence[int], denominator: int = 1) -> "ExactPolynomial":
        """Build ``numerators / denominator`` without going through Fractions."""
        if denominator == 0:
            raise ZeroDivisionError("zero denominator")
        obj = cls.__new__(cls)
        obj._set([int(c) for c in numerators], int(denominator))
        return obj

    def _set(self, num: list, den: int) -> None:
        while num and num[-1] == 0:
            num.pop()
        if not num:
            self._num, self._den = (), 1
        else:
            if den < 0:
                num = [-c for c in num]
                den = -den
            g = _content(num, den)
            if g != 1:
                num = [c // g for c in num]
                den //= g
            self._num, self._den = tuple(num), den
        self._coeffs = None
        self._hash = None
        self._big = None

    # -- basic accessors -------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        if self._coeffs is None:
            d = self._den
            self._coeffs = tuple(Fraction(c, d) for c in self._num)
        return self._coeffs

    @property
    def numerators(self) -> tuple:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def degree(self) -> int:
        return len(self._num) - 1

    @property
    def leading(self) -> Fraction:
        if not self._num:
            return Fraction(0)
        return Fraction(self._num[-1], self._den)

    def is_zero(self) -> bool:
        return not self._num

    def __len__(self) -> int:
        return len(self._num)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self._num):
            return Fraction(self._num[k], self._den)
        return Fraction(0)

    def primitive(self) -> tuple:
        """Integer primitive part with the sign of the leading coefficient kept."""
        g = _content(self._num)
        if g in (0, 1):
            return self._num
        return tuple(c // g for c in self._num)

    # -- evaluation ------------------------------------------------------

    def _homogeneous(self, x: Fraction) -> int:
        # sum c_k p^k q^(d-k), q > 0, so its sign is the sign of self(x)
        if self._big is None:
            self._big = tuple(mpz(c) for c in self._num)
        num = self._big
        p, q = mpz(x.numerator), mpz(x.denominator)
        acc = num[-1]
        if q == 1:
            for c in reversed(num[:-1]):
                acc = acc * p + c
            return acc
        qpow = mpz(1)
        for c in reversed(num[:-1]):
            qpow *= q
            acc = acc * p + c * qpow
        return acc

    def __call__(self, x) -> Fraction:
        if not self._num:
            return Fraction(0)
        x = as_rational(x)
        return Fraction(int(self._homogeneous(x)), self._den * x.denominator ** self.degree)

    def sign_at(self, x) -> int:
        if not self._num:
            return 0
        v = self._homogeneous(as_rational(x))
        return (v > 0) - (v < 0)

    def eval_float(self, x: float) -> float:
        return float(np.polyval(self.float_coeffs()[::-1], x))

    # -- arithmetic ------------------------------------------------------

    def derivative(self) -> "ExactPolynomial":
        return ExactPolynomial.from_integers(
            [k * c for k, c in enumerate(self._num)][1:], self._den
        )

    def __neg__(self) -> "ExactPolynomial":
        return ExactPolynomial.from_integers([-c for c in self._num], self._den)

    def __add__(self, other) -> "ExactPolynomial":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d1, d2 = self._den, other._den
        a = [c * d2 for c in self._num]
        b = [c * d1 for c in other._num]
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return ExactPolynomial.from_integers(out, d1 * d2)

    __radd__ = __add__

    def __sub__(self, other) -> "ExactPolynomial":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "ExactPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "ExactPolynomial":
        if not isinstance(other, ExactPolynomial):
            try:
                s = as_rational(other)
            except TypeError:
                return NotImplemented
            return ExactPolynomial.from_integers(
                [c * s.numerator for c in self._num], self._den * s.denominator
            )
        if not self._num or not other._num:
            return ExactPolynomial()
        out = [0] * (len(self._num) + len(other._num) - 1)
        for i, a in enumerate(self._num):
            if a:
                for j, b in enumerate(other._num):
                    out[i + j] += a * b
        return ExactPolynomial.from_integers(out, self._den * other._den)

    __rmul__ = __mul__

    def __divmod__(self, other: "ExactPolynomial"):
        """Euclidean division over the rationals."""
        if not isinstance(other, ExactPolynomial):
            other = ExactPolynomial([other])
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        db = len(div) - 1
        lead = div[-1]
        quot = [Fraction(0)] * max(len(rem) - db, 0)
        for s in range(len(rem) - 1 - db, -1, -1):
            q = rem[s + db] / lead
            quot[s] = q
            if q:
                for i in range(db + 1):
                    rem[s + i] -= q * div[i]
        return ExactPolynomial(quot), ExactPolynomial(rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "ExactPolynomial":
        if not self._num:
            return self
        return ExactPolynomial.from_integers(self._num, self._num[-1])

    def compose_scale(self, s) -> "ExactPolynomial":
        """Return ``p(s * x)``."""
        s = as_rational(s)
        d = self.degree
        p, q = s.numerator, s.denominator
        return ExactPolynomial.from_integers(
            [c * p**k * q ** (d - k) for k, c in enumerate(self._num)],
            self._den * q**d if d > 0 else self._den,
        )

    # -- comparison / display --------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactPolynomial):
            return self._num == other._num and self._den == other._den
        try:
            other = ExactPolynomial([other])
        except TypeError:
            return NotImplemented
        return self == other

    def __reduce__(self):
        return (ExactPolynomial.from_integers, (self._num, self._den))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._num, self._den))
        return self._hash

    def __repr__(self) -> str:
        return f"ExactPolynomial([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self._num:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            s = format_rational(c)
            terms.append(s if k == 0 else f"{s}*x" if k == 1 else f"{s}*x^{k}")
        return " + ".join(terms)

    # -- conversions -----------------------------------------------------

    def float_coeffs(self) -> np.ndarray:
        d = self._den
        return np.array([_int_ratio_to_float(c, d) for c in self._num], dtype=float)

    def to_json(self) -> list:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, items: Sequence[str]) -> "ExactPolynomial":
        return cls(parse_rational(s) if isinstance(s, str) else s for s in items)


def _coerce(other):
    if isinstance(other, ExactPolynomial):
        return other
    try:
        return ExactPolynomial([as_rational(other)])
    except TypeError:
        return NotImplemented


def _int_ratio_to_float(num: int, den: int) -> float:
    try:
        return num / den
    except OverflowError:
        return float(Fraction(num, den))


def poly_from_roots(roots: Sequence, leading=1) -> ExactPolynomial:
    """Expand ``leading * prod(tau_k - t)`` for strictly positive roots."""
    lead = as_rational(leading)
    taus = [as_rational(t) for t in roots]
    bad = [t for t in taus if t <= 0]
    if lead <= 0:
        raise ValueError(f"leading magnitude must be positive, got {format_rational(lead)}")
    if bad:
        raise ValueError(
            "roots must be strictly positive, got " + ", ".join(format_rational(t) for t in bad)
        )
    coeffs = [lead]
    for tau in taus:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += c * tau
            nxt[i + 1] -= c
        coeffs = nxt
    return ExactPolynomial(coeffs)
