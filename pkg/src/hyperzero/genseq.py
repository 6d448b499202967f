"""Problem instances and the exact polynomial sequence H_m(z).

The sequence is defined by ``sum_m H_m(z) t^m = 1 / (P(t) + z t^r)``.  It is
generated in integer arithmetic: with ``A_k = D a_k`` integral,
``H_m = G_m / A_0^(m+1)`` where

    G_0 = D,
    G_m = -( sum_k A_k A_0^(k-1) G_(m-k) + D A_0^(r-1) z G_(m-r) ),

so no rational reduction is needed inside the loop.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from gmpy2 import mpz

from .polycore import ExactPolynomial, as_rational, format_rational, poly_from_roots


class InstanceError(ValueError):
    """Invalid problem instance; ``violations`` lists every broken rule."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ProblemInstance:
    """Denominator ``leading * prod(tau_k - t) + z t^r`` with positive roots."""

    roots: Tuple[Fraction, ...]
    leading: Fraction = Fraction(1)
    r: int = 1

    def __post_init__(self):
        violations = []
        roots = []
        for x in self.roots:
            try:
                roots.append(as_rational(x))
            except (TypeError, ValueError):
                violations.append(f"root {x!r} is not a rational number")
        try:
            leading = as_rational(self.leading)
        except (TypeError, ValueError):
            leading = None
            violations.append(f"leading coefficient {self.leading!r} is not a rational number")
        if not roots and not violations:
            violations.append("P needs at least one root")
        for x in roots:
            if x <= 0:
                violations.append(f"root {format_rational(x)} is not positive")
        if leading is not None and leading <= 0:
            violations.append(f"leading magnitude {format_rational(leading)} is not positive")
        r = self.r
        if isinstance(r, bool) or not isinstance(r, int) or r < 1:
            violations.append(f"r must be a positive integer, got {r!r}")
        elif max(len(roots), r) <= 1:
            violations.append(
                f"need max{{deg P, r}} > 1, got deg P = {len(roots)} and r = {r}"
            )
        if violations:
            raise InstanceError(violations)
        object.__setattr__(self, "roots", tuple(sorted(roots)))
        object.__setattr__(self, "leading", leading)

    # -- derived data ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.roots)

    @property
    def rho(self) -> int:
        """Multiplicity of the smallest root (0 when P is constant)."""
        if not self.roots:
            return 0
        return sum(1 for x in self.roots if x == self.roots[0])

    @property
    def degree(self) -> int:
        """Number of denominator roots in t, ``max(n, r)``."""
        return max(self.n, self.r)

    @property
    def poly(self) -> ExactPolynomial:
        return poly_from_roots(self.roots, self.leading)

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self.poly.coeffs

    def float_roots(self):
        return [float(x) for x in self.roots]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "roots": [format_rational(x) for x in self.roots],
            "leading": format_rational(self.leading),
            "r": self.r,
        }

    @classmethod
    def from_json(cls, doc) -> "ProblemInstance":
        """Build from a mapping or JSON text ``{"roots": [...], "leading": "p/q", "r": k}``."""
        if isinstance(doc, (bytes, bytearray)):
            doc = doc.decode("utf-8")
        if isinstance(doc, str):
            try:
                doc = json.loads(doc)
            except json.JSONDecodeError as exc:
                raise InstanceError([f"malformed JSON: {exc.msg} at position {exc.pos}"]) from exc
        if not isinstance(doc, dict):
            raise InstanceError(["instance must be a JSON object"])
        violations = []
        unknown = sorted(set(doc) - {"roots", "leading", "r"})
        if unknown:
            violations.append("unknown fields: " + ", ".join(unknown))
        roots = doc.get("roots")
        if not isinstance(roots, list):
            violations.append("roots must be a list of rational strings")
            roots = []
        if "r" not in doc:
            violations.append("missing field r")
        if violations:
            raise InstanceError(violations)
        return cls(tuple(roots), doc.get("leading", "1"), doc["r"])

    def __str__(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass(frozen=True)
class GeneratedSequence:
    """``items[m]`` is ``H_m`` as an exact polynomial in z."""

    items: Tuple[ExactPolynomial, ...]
    base: Tuple[Fraction, ...] = field(default=())
    r: int = 1

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, m: int) -> ExactPolynomial:
        return self.items[m]

    def __iter__(self):
        return iter(self.items)

    @property
    def m_max(self) -> int:
        return len(self.items) - 1


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def generate_from_denominator(base: Sequence, r: int, m_max: int) -> GeneratedSequence:
    """Expand ``1 / (B(t) + z t^r)`` for an arbitrary coefficient list ``base``.

    ``base[k]`` multiplies ``t^k``.  Only ``base[0] != 0`` is required.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    if r < 1:
        raise ValueError("r must be a positive integer")
    base = [as_rational(c) for c in base]
    while len(base) > 1 and base[-1] == 0:
        base.pop()
    if not base or base[0] == 0:
        raise ValueError("constant term of the denominator must be nonzero")
    den = _lcm(c.denominator for c in base)
    big = [mpz(c.numerator * (den // c.denominator)) for c in base]
    n = len(big) - 1
    a0 = big[0]
    # weights[k] = A_k * A_0^(k-1) for the shifted recurrence
    weights = [mpz(0)] + [big[k] * a0 ** (k - 1) for k in range(1, n + 1)]
    zweight = mpz(den) * a0 ** (r - 1)
    rows: List[List[mpz]] = [[mpz(den)]]
    for m in range(1, m_max + 1):
        deg = m // r
        acc = [mpz(0)] * (deg + 1)
        for k in range(1, min(n, m) + 1):
            w = weights[k]
            if w:
                for j, c in enumerate(rows[m - k]):
                    acc[j] += w * c
        if m >= r:
            for j, c in enumerate(rows[m - r]):
                acc[j + 1] += zweight * c
        rows.append([-c for c in acc])
    items = []
    scale = mpz(1)
    for row in rows:
        scale *= a0
        items.append(ExactPolynomial.from_integers(row, scale))
    return GeneratedSequence(tuple(items), tuple(base), r)


def generate(instance: ProblemInstance, m_max: int) -> GeneratedSequence:
    """Exact ``H_0, ..., H_{m_max}`` for the instance's denominator."""
    return generate_from_denominator(instance.coeffs, instance.r, m_max)


def degree_profile(seq: GeneratedSequence) -> List[int]:
    """Degree of each ``H_m`` (``-1`` for the zero polynomial)."""
    return [p.degree for p in seq.items]
