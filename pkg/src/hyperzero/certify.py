"""Exact hyperbolicity certificates, onset search, density metrics and scans.

Two exact routes certify that ``H_m`` has only real, simple zeros inside the
zero interval ``(a, b)``:

* ``"sturm"`` counts distinct real roots with a Sturm chain and compares
  counts inside and outside rational bounds on ``a`` and ``b``;
* ``"sign-changes"`` evaluates ``H_m`` exactly at increasing rational points
  inside ``(a, b)``.  Seeing ``deg H_m`` sign changes proves the same
  statement, because each change pins a distinct root between two samples.
  The sample points come from the angle parametrization, but only their
  exact signs are used.

``"auto"`` uses Sturm for low degrees and the sign-change route otherwise,
falling back to Sturm whenever the samples do not separate every root.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .genseq import GeneratedSequence, ProblemInstance, generate, generate_from_denominator
from .interval import INF, IntervalReport, endpoint_enclosures, interval_report
from .polycore import (
    ExactPolynomial,
    SturmChain,
    as_rational,
    cauchy_bound,
    format_rational,
    isolate_real_roots,
    poly_from_roots,
    sign_changes_at,
    squarefree_part,
)
from .polycore.floatpoly import ConvergenceError
from .theta import ThetaError, theta_grid, theta_sweep

HYPERBOLIC_IN_AB = "HYPERBOLIC_IN_AB"
REAL_NOT_CONTAINED = "REAL_NOT_CONTAINED"
NOT_ALL_REAL = "NOT_ALL_REAL"
INDETERMINATE = "INDETERMINATE"

STURM_MAX_DEGREE = 24
WIDTH_FLOOR = Fraction(1, 2**64)
_WIDTHS = (Fraction(1, 2**16), Fraction(1, 2**32), Fraction(1, 2**48), WIDTH_FLOOR)


@dataclass(frozen=True)
class HyperbolicityCertificate:
    m: int
    degree: int
    distinct_real_roots: int
    is_squarefree: bool
    roots_in_interval: int
    roots_outside: int
    indeterminate: int
    verdict: str
    method: str = "sturm"
    # rational brackets (lo, hi), each holding exactly one root; not serialized
    brackets: Tuple[Tuple[Fraction, Fraction], ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.distinct_real_roots > max(self.degree, 0):
            raise ValueError("more distinct real roots than the degree")
        if self.roots_in_interval + self.roots_outside + self.indeterminate != self.distinct_real_roots:
            raise ValueError("root counts do not add up")

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "degree": self.degree,
            "distinct_real_roots": self.distinct_real_roots,
            "is_squarefree": self.is_squarefree,
            "roots_in_interval": self.roots_in_interval,
            "roots_outside": self.roots_outside,
            "indeterminate": self.indeterminate,
            "verdict": self.verdict,
            "method": self.method,
        }


# -- Sturm route --------------------------------------------------------------


def _closed_count_above(chain: SturmChain, p: ExactPolynomial, x) -> int:
    """Roots in ``[x, inf)``."""
    if x == INF:
        return 0
    return chain.count(x, INF) + (1 if p.sign_at(x) == 0 else 0)


def certify_sturm(
    report: IntervalReport, p: ExactPolynomial, m: int, isolate: bool = False
) -> HyperbolicityCertificate:
    """Exact verdict from Sturm counts; ``isolate`` also records one bracket per root."""
    deg = p.degree
    if deg <= 0:
        return HyperbolicityCertificate(m, max(deg, 0), 0, True, 0, 0, 0, HYPERBOLIC_IN_AB, "sturm")
    chain = SturmChain(p)
    squarefree = chain.is_squarefree()
    sqf = p if squarefree else squarefree_part(p)
    if not squarefree:
        chain = SturmChain(sqf)
    distinct = chain.count(-INF, INF)
    if distinct < sqf.degree:
        return HyperbolicityCertificate(
            m, deg, distinct, squarefree, 0, 0, distinct, NOT_ALL_REAL, "sturm"
        )
    inside = outside = 0
    for w in _WIDTHS:
        a_lo, a_hi, b_lo, b_hi = endpoint_enclosures(report, w)
        below = chain.count(-INF, a_lo)  # roots in (-inf, a_lo]
        above = _closed_count_above(chain, sqf, b_hi)
        inside = chain.count(a_hi, b_lo) if b_lo != INF else chain.count(a_hi, INF)
        if b_lo != INF and sqf.sign_at(b_lo) == 0:
            inside -= 1
        outside = below + above
        if inside + outside == distinct:
            break
    indeterminate = distinct - inside - outside
    if outside:
        verdict = REAL_NOT_CONTAINED
    elif indeterminate:
        verdict = INDETERMINATE
    else:
        verdict = HYPERBOLIC_IN_AB
    brackets = ()
    if isolate and verdict == HYPERBOLIC_IN_AB and squarefree:
        brackets = tuple((e.lo, e.hi) for e in isolate_real_roots(sqf))
    return HyperbolicityCertificate(
        m, deg, distinct, squarefree, inside, outside, indeterminate, verdict, "sturm", brackets
    )


# -- sign-change route --------------------------------------------------------


def _dyadic_between(points: np.ndarray, lo: float, hi: float) -> List[Fraction]:
    """Short dyadic rationals near each point, kept well inside their local gaps."""
    pts = np.asarray(points, dtype=float)
    ext = np.concatenate([[lo], pts, [hi]])
    out = []
    for i, x in enumerate(pts):
        gap = min(ext[i + 1] - ext[i], ext[i + 2] - ext[i + 1])
        if not gap > 0 or not math.isfinite(x):
            continue
        k = max(0, math.ceil(math.log2(16.0 / gap)))
        scale = 1 << k
        out.append(Fraction(round(x * scale), scale))
    return out


def _sample_points(instance: ProblemInstance, m: int, offset: float) -> np.ndarray:
    thetas = theta_grid(instance, m, offset)
    thetas = thetas[(thetas > 0) & (thetas < math.pi / instance.r)]
    if thetas.size == 0:
        return np.zeros(0)
    return np.array([s.z for s in theta_sweep(instance, thetas)])


def _anchors(report: IntervalReport, p: ExactPolynomial):
    a_lo, a_hi, b_lo, _ = endpoint_enclosures(report, WIDTH_FLOOR)
    top = b_lo if b_lo != INF else cauchy_bound(p)
    return a_hi, top


def certify_sign_changes(
    report: IntervalReport, p: ExactPolynomial, m: int, offsets: Sequence[float] = (0.0, 0.5)
) -> Optional[HyperbolicityCertificate]:
    """Certificate from ``deg`` exact sign changes, or ``None`` if not found."""
    inst = report.instance
    deg = p.degree
    if deg <= 0:
        return HyperbolicityCertificate(m, max(deg, 0), 0, True, 0, 0, 0, HYPERBOLIC_IN_AB, "sign-changes")
    lo, hi = _anchors(report, p)
    flo, fhi = float(lo), float(hi)
    pools: List[np.ndarray] = []
    attempts = [[o] for o in offsets] + ([list(offsets)] if len(offsets) > 1 else [])
    cache: Dict[float, np.ndarray] = {}
    for group in attempts:
        try:
            zs = np.concatenate([cache.setdefault(o, _sample_points(inst, m, o)) for o in group])
        except (ThetaError, ConvergenceError, ValueError):
            continue
        zs = np.sort(zs[(zs > flo) & (zs < fhi)])
        pts = _dyadic_between(zs, flo, fhi)
        pts = sorted({x for x in pts if lo < x < hi})
        seq = [lo] + pts + [hi]
        signs = _signs(p, seq)
        if signs is None:
            continue
        changes = [i for i in range(len(seq) - 1) if signs[i] != signs[i + 1]]
        if len(changes) == deg:
            brackets = tuple((seq[i], seq[i + 1]) for i in changes)
            return HyperbolicityCertificate(
                m, deg, deg, True, deg, 0, 0, HYPERBOLIC_IN_AB, "sign-changes", brackets
            )
    return None


def _signs(p: ExactPolynomial, points: Sequence[Fraction]) -> Optional[List[int]]:
    out = []
    for x in points:
        s = p.sign_at(x)
        if s == 0:
            return None
        out.append(s)
    return out


# -- public operations -----------------------------------------------------------


def certify(
    instance: ProblemInstance,
    seq: GeneratedSequence,
    report: IntervalReport,
    m: int,
    method: str = "auto",
) -> HyperbolicityCertificate:
    """Exact verdict on the zeros of ``H_m`` relative to ``(a, b)``.

    ``method`` is ``"auto"``, ``"sturm"`` or ``"sign-changes"``; the last
    falls back to Sturm when the samples do not show every root.
    """
    if m < 0 or m > seq.m_max:
        raise ValueError(f"m={m} outside the generated range 0..{seq.m_max}")
    p = seq[m]
    if p.is_zero():
        raise RuntimeError(f"H_{m} is the zero polynomial")
    if method not in ("auto", "sturm", "sign-changes"):
        raise ValueError(f"unknown method {method!r}")
    if method == "sturm" or (method == "auto" and p.degree <= STURM_MAX_DEGREE):
        return certify_sturm(report, p, m)
    cert = certify_sign_changes(report, p, m)
    if cert is not None:
        return cert
    return certify_sturm(report, p, m)


def _certify_job(args):
    instance, p, report, m, method = args
    seq = GeneratedSequence((ExactPolynomial(),) * m + (p,), (), instance.r)
    return certify(instance, seq, report, m, method)


def default_jobs() -> int:
    env = os.environ.get("HYPERZERO_JOBS")
    if env:
        return max(1, int(env))
    return 1


def certify_range(
    instance: ProblemInstance,
    seq: GeneratedSequence,
    report: IntervalReport,
    ms: Sequence[int],
    method: str = "auto",
    jobs: Optional[int] = None,
) -> List[HyperbolicityCertificate]:
    """Certificates for each ``m`` in order; ``jobs > 1`` uses worker processes."""
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    ms = list(ms)
    if jobs == 1 or len(ms) < 2:
        return [certify(instance, seq, report, m, method) for m in ms]
    tasks = [(instance, seq[m], report, m, method) for m in ms]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_certify_job, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


@dataclass(frozen=True)
class OnsetResult:
    m0: Optional[int]
    violations: Tuple[Tuple[int, str], ...]
    certificates: Tuple[HyperbolicityCertificate, ...] = field(repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "m0": self.m0,
            "violations": [{"m": m, "verdict": v} for m, v in self.violations],
        }


def onset(
    instance: ProblemInstance,
    m_max: int,
    seq: Optional[GeneratedSequence] = None,
    report: Optional[IntervalReport] = None,
    method: str = "auto",
    jobs: Optional[int] = None,
) -> OnsetResult:
    """Least ``m0`` with every ``H_m``, ``m0 <= m <= m_max``, certified inside ``(a, b)``."""
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    seq = seq if seq is not None and seq.m_max >= m_max else generate(instance, m_max)
    report = report if report is not None else interval_report(instance)
    certs = certify_range(instance, seq, report, range(m_max + 1), method, jobs)
    m0: Optional[int] = m_max + 1
    for cert in reversed(certs):
        if cert.verdict != HYPERBOLIC_IN_AB:
            break
        m0 = cert.m
    if m0 == m_max + 1:
        m0 = None
    bound = m_max + 1 if m0 is None else m0
    violations = tuple((c.m, c.verdict) for c in certs[:bound] if c.verdict != HYPERBOLIC_IN_AB)
    return OnsetResult(m0, violations, tuple(certs))


# -- density ------------------------------------------------------------------


@dataclass(frozen=True)
class DensityProfile:
    m_min: int
    m_max: int
    window: Tuple[float, float]
    zero_multiset: Tuple[float, ...] = field(repr=False)
    max_gap: float
    coverage_fraction: float
    bins: int

    def to_json(self, include_zeros: bool = False) -> dict:
        doc = {
            "m_min": self.m_min,
            "m_max": self.m_max,
            "window": list(self.window),
            "zeros": len(self.zero_multiset),
            "max_gap": self.max_gap,
            "coverage_fraction": self.coverage_fraction,
            "bins": self.bins,
        }
        if include_zeros:
            doc["zero_multiset"] = list(self.zero_multiset)
        return doc


def _float_coeffs(seq: GeneratedSequence) -> np.ndarray:
    return np.array([float(c) for c in seq.base])


def refine_brackets(seq: GeneratedSequence, m: int, brackets, steps: int = 40) -> np.ndarray:
    """Float midpoints of exact root brackets after vectorized bisection.

    Bisection signs come from the double-precision recurrence; a bracket
    whose float endpoints disagree with the exact signs is returned unrefined.
    """
    if not brackets:
        return np.zeros(0)
    a = _float_coeffs(seq)
    lo = np.array([float(x) for x, _ in brackets])
    hi = np.array([float(y) for _, y in brackets])
    slo, _ = kernels.recurrence_values(a, seq.r, lo, m)
    shi, _ = kernels.recurrence_values(a, seq.r, hi, m)
    ok = np.sign(slo) * np.sign(shi) < 0
    slo = np.sign(slo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        v, _ = kernels.recurrence_values(a, seq.r, mid, m)
        left = np.sign(v) == slo
        lo = np.where(ok & left, mid, lo)
        hi = np.where(ok & ~left, mid, hi)
    return 0.5 * (lo + hi)


def _zeros_for(cert: HyperbolicityCertificate, seq: GeneratedSequence) -> np.ndarray:
    if cert.brackets:
        return refine_brackets(seq, cert.m, cert.brackets)
    p = seq[cert.m]
    if p.degree <= 0:
        return np.zeros(0)
    encs = isolate_real_roots(p)
    return refine_brackets(seq, cert.m, [(e.lo, e.hi) for e in encs])


def _metrics(zeros: np.ndarray, lo: float, hi: float, bins: int) -> Tuple[float, float]:
    pts = np.concatenate([[lo], np.sort(zeros), [hi]])
    max_gap = float(np.max(np.diff(pts)))
    if zeros.size == 0:
        return max_gap, 0.0
    idx = np.floor((zeros - lo) / (hi - lo) * bins).astype(int)
    idx = np.clip(idx, 0, bins - 1)
    return max_gap, float(np.unique(idx).size) / bins


def default_b_cap(report: IntervalReport) -> float:
    a = report.a_float
    return a + 10.0 * max(1.0, a)


def density_profile(
    instance: ProblemInstance,
    seq: GeneratedSequence,
    report: IntervalReport,
    m_max: int,
    bins: int = 50,
    b_cap: Optional[float] = None,
    m_min: int = 0,
    certificates: Optional[Sequence[HyperbolicityCertificate]] = None,
    jobs: Optional[int] = None,
) -> DensityProfile:
    """Gap and bin-coverage statistics of the zeros of ``H_m``, ``m_min <= m <= m_max``."""
    if bins < 10:
        raise ValueError("bins must be at least 10")
    if m_max > seq.m_max:
        raise ValueError(f"m_max={m_max} exceeds the generated range {seq.m_max}")
    lo = report.a_float
    hi = report.b_float
    if b_cap is None:
        b_cap = default_b_cap(report) if math.isinf(hi) else hi
    hi = min(hi, float(b_cap))
    if not hi > lo:
        raise ValueError("empty density window")
    by_m = {c.m: c for c in certificates or ()}
    missing = [m for m in range(m_min, m_max + 1) if m not in by_m]
    for c in certify_range(instance, seq, report, missing, "auto", jobs):
        by_m[c.m] = c
    parts = [_zeros_for(by_m[m], seq) for m in range(m_min, m_max + 1)]
    zeros = np.sort(np.concatenate(parts)) if parts else np.zeros(0)
    zeros = zeros[(zeros > lo) & (zeros < hi)]
    if zeros.size == 0:
        raise ValueError("no zeros inside the density window")
    max_gap, coverage = _metrics(zeros, lo, hi, bins)
    return DensityProfile(m_min, m_max, (lo, hi), tuple(zeros.tolist()), max_gap, coverage, bins)


# -- second conjecture ----------------------------------------------------------


@dataclass(frozen=True)
class RealnessRow:
    m: int
    degree: int
    squarefree_degree: int
    distinct_real_roots: int

    @property
    def all_real(self) -> bool:
        return self.distinct_real_roots == self.squarefree_degree

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "degree": self.degree,
            "squarefree_degree": self.squarefree_degree,
            "distinct_real_roots": self.distinct_real_roots,
            "all_real": self.all_real,
        }


@dataclass(frozen=True)
class Conjecture2Scan:
    base: Tuple[Fraction, ...]
    C: Fraction
    s: int
    r: int
    z_sign: int
    hypothesis_holds: bool
    rows: Tuple[RealnessRow, ...]
    sequence: GeneratedSequence = field(repr=False, compare=False)

    @property
    def non_real(self) -> List[int]:
        return [row.m for row in self.rows if not row.all_real]

    def to_json(self) -> dict:
        return {
            "denominator": [format_rational(c) for c in self.base],
            "C": format_rational(self.C),
            "s": self.s,
            "r": self.r,
            "z_sign": self.z_sign,
            "hypothesis_holds": self.hypothesis_holds,
            "non_real_m": self.non_real,
        }


def _reflect(p: ExactPolynomial) -> ExactPolynomial:
    """``p(-z)``."""
    return ExactPolynomial([c if k % 2 == 0 else -c for k, c in enumerate(p.coeffs)])


def realness_row(p: ExactPolynomial, m: int) -> RealnessRow:
    if p.degree <= 0:
        return RealnessRow(m, max(p.degree, 0), 0, 0)
    chain = SturmChain(p)
    if chain.is_squarefree():
        sqf_deg = p.degree
    else:
        q = squarefree_part(p)
        sqf_deg = q.degree
        chain = SturmChain(q)
    return RealnessRow(m, p.degree, sqf_deg, chain.count(-INF, INF))


def conjecture2_scan(
    C,
    s: int,
    r: int,
    m_max: int,
    roots: Optional[Sequence] = None,
    leading=1,
    coeffs: Optional[Sequence] = None,
    z_sign: int = 1,
) -> Conjecture2Scan:
    """Realness of the zeros of H_m for ``1 / (P(t) + C t^s + z_sign * z t^r)``.

    ``P`` is given either by positive ``roots`` and ``leading`` or directly
    by its ``coeffs``.  ``z_sign = -1`` reflects z, which preserves realness.
    """
    if roots is None and coeffs is None:
        raise ValueError("give either roots or coeffs for P")
    if z_sign not in (1, -1):
        raise ValueError("z_sign must be +1 or -1")
    if s < 0 or r < 1 or m_max < 0:
        raise ValueError("need s >= 0, r >= 1, m_max >= 0")
    C = as_rational(C)
    base_poly = poly_from_roots(roots, leading) if roots is not None else ExactPolynomial(coeffs)
    extra = [Fraction(0)] * s + [C]
    base = list((base_poly + ExactPolynomial(extra)).coeffs)
    if not base or base[0] == 0:
        raise ValueError("the denominator has zero constant term")
    seq = generate_from_denominator(base, r, m_max)
    if z_sign == -1:
        seq = GeneratedSequence(tuple(_reflect(p) for p in seq.items), seq.base, r)
    rows = tuple(realness_row(p, m) for m, p in enumerate(seq.items))
    return Conjecture2Scan(tuple(base), C, s, r, z_sign, C * (s - r) >= 0, rows, seq)
