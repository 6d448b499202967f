"""Angle parametrization of the real zero locus and its sign apparatus.

For ``theta`` in ``(0, pi/r)`` there is a unique tuple of angles
``theta < theta_k < pi`` and a modulus ``tau`` such that

    tau_k sin(theta_k) / sin(theta_k - theta) = tau   for every k,
    sum(theta_k) = r theta + l pi,

and ``t0 = tau e^{-i theta}`` is a root of ``P(t) + z t^r`` for the real value
``z = -P(t0) / t0^r``.  With ``l = n - 1`` this ``z(theta)`` sweeps the zero
interval monotonically.  The module also builds the normalized denominator
``Q(zeta)`` whose roots are ``t_k / tau`` and the partial-fraction sum
``H(theta; m)`` whose sign changes mark the zeros of ``H_m``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .genseq import GeneratedSequence, ProblemInstance, generate
from .polycore import ExactPolynomial, FloatPolynomial, complex_roots
from .polycore.floatpoly import ConvergenceError

NEWTON_TOL = 1e-12
ACCEPT_TOL = 1e-9
BRANCH_TOL = 1e-6
REAL_TOL = 1e-8
# below this zeta separation the partial fractions lose too many digits
COLLISION_SEP = 1e-3
# relative cancellation in the partial-fraction sum that triggers the exact route
CANCEL_RATIO = 1e-8


class BranchUnavailable(ValueError):
    """No root of S(tau) produces the requested angle-sum branch."""


class ThetaError(RuntimeError):
    """Newton polish or a consistency check failed."""


@dataclass(frozen=True)
class ThetaSolution:
    instance: ProblemInstance = field(repr=False)
    theta: float
    l: int
    angles: Tuple[float, ...]
    tau: float
    z: float
    residual: float

    @property
    def t0(self) -> complex:
        return self.tau * cmath.exp(-1j * self.theta)

    def angle_sum_error(self) -> float:
        return abs(sum(self.angles) - self.instance.r * self.theta - self.l * math.pi)

    def tau_spread(self) -> float:
        """Largest disagreement between the per-root modulus expressions."""
        th = self.theta
        vals = [
            float(tk) * math.sin(a) / math.sin(a - th)
            for tk, a in zip(self.instance.roots, self.angles)
        ]
        return max(vals) - min(vals)


@dataclass(frozen=True)
class SpectralFrame:
    solution: ThetaSolution
    t0: complex
    t_roots: Tuple[complex, ...]
    zetas: Tuple[complex, ...]
    c: float
    qprimes: Tuple[complex, ...]

    @property
    def min_excess(self) -> float:
        """``min_{k>=2} |zeta_k| - 1`` (``inf`` when there are only two roots)."""
        if len(self.zetas) <= 2:
            return math.inf
        return min(abs(z) for z in self.zetas[2:]) - 1.0

    @property
    def min_separation(self) -> float:
        zs = self.zetas
        best = math.inf
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                best = min(best, abs(zs[i] - zs[j]))
        return best


# -- S(tau) and seeding -------------------------------------------------------


def _float_coeffs(instance: ProblemInstance) -> np.ndarray:
    return np.array([float(c) for c in instance.coeffs])


def s_polynomial(instance: ProblemInstance, theta: float) -> FloatPolynomial:
    """``P(tau e^{i theta}) - e^{2 i r theta} P(tau e^{-i theta})`` as a polynomial in tau."""
    if abs(math.sin(theta)) < 1e-14:
        raise ValueError(f"theta = {theta!r} is a multiple of pi; S is degenerate")
    a = _float_coeffs(instance)
    r = instance.r
    k = np.arange(a.size)
    coeffs = a * (np.exp(1j * k * theta) - np.exp(1j * (2 * r - k) * theta))
    return FloatPolynomial(coeffs)


def _angles_for(taus: np.ndarray, tau: float, theta: float) -> np.ndarray:
    return np.angle(taus - tau * np.exp(1j * theta)) + math.pi


def s_real_roots(instance: ProblemInstance, theta: float) -> np.ndarray:
    """Positive real roots of S(tau), sorted increasingly."""
    s = s_polynomial(instance, theta)
    if s.degree < 1:
        return np.zeros(0)
    roots = complex_roots(s)
    scale = max(1.0, float(np.max(np.abs(roots))))
    real = roots[np.abs(roots.imag) <= 1e-7 * scale].real
    return np.sort(real[real > 0])


def _seed(instance: ProblemInstance, theta: float, l: int):
    taus = np.array(instance.float_roots())
    best = None
    for tau in s_real_roots(instance, theta):
        ang = _angles_for(taus, tau, theta)
        branch = (ang.sum() - instance.r * theta) / math.pi
        err = abs(branch - l)
        if best is None or err < best[0]:
            best = (err, tau, ang)
    if best is None or best[0] > BRANCH_TOL:
        raise BranchUnavailable(
            f"no root of S matches branch l={l} at theta={theta!r}"
            + ("" if best is None else f" (closest mismatch {best[0]:.3g})")
        )
    return best[1], best[2]


def _z_from(instance: ProblemInstance, tau: float, theta: float) -> complex:
    t0 = tau * cmath.exp(-1j * theta)
    prod = complex(float(instance.leading))
    for tk in instance.float_roots():
        prod *= tk - t0
    return -prod / t0**instance.r


def _polish(instance, theta, l, tau, angles) -> ThetaSolution:
    taus = np.array(instance.float_roots())
    angles = np.asarray(angles, dtype=float)
    if not (tau > 0 and np.all((angles > theta) & (angles < math.pi))):
        raise ThetaError(f"starting point outside the admissible region at theta={theta!r}")
    try:
        ang, tau, resid, iters, ok = kernels.theta_newton(
            taus, theta, tau, angles, l, instance.r, NEWTON_TOL
        )
    except ZeroDivisionError as exc:
        raise ThetaError(f"singular Newton step at theta={theta!r}") from exc
    # near theta = 0 the system is ill-conditioned and rounding floors the residual
    if not ok and resid > ACCEPT_TOL:
        raise ThetaError(
            f"Newton on the angle system stalled at theta={theta!r}, l={l}: "
            f"residual {resid:.3g} after {iters} steps, tau={tau!r}"
        )
    z = _z_from(instance, tau, theta)
    if abs(z.imag) > 1e-9 * (1.0 + abs(z)):
        raise ThetaError(f"z has imaginary part {z.imag:.3g} at theta={theta!r}")
    return ThetaSolution(instance, float(theta), int(l), tuple(float(x) for x in ang), float(tau), z.real, float(resid))


def _check_args(instance, theta, l):
    r = instance.r
    if not 0.0 < theta < math.pi / r:
        raise ValueError(f"theta must lie in (0, pi/{r}), got {theta!r}")
    if l is None:
        l = instance.n - 1
    if not 0 <= l < instance.n:
        raise ValueError(f"branch l must lie in [0, {instance.n}), got {l}")
    return l


def solve_theta(instance: ProblemInstance, theta: float, l: Optional[int] = None) -> ThetaSolution:
    """Angle tuple, modulus and z at ``theta`` on branch ``l`` (default ``n - 1``)."""
    if instance.n == 0:
        raise ValueError("the angle parametrization needs at least one root of P")
    l = _check_args(instance, theta, l)
    tau, ang = _seed(instance, theta, l)
    return _polish(instance, theta, l, tau, ang)


def theta_sweep(instance: ProblemInstance, thetas: Sequence[float], l: Optional[int] = None) -> List[ThetaSolution]:
    """Solutions along a grid, warm-starting Newton from the previous point.

    A failed warm start falls back to seeding from S(tau).
    """
    out: List[ThetaSolution] = []
    prev = None
    for theta in thetas:
        ll = _check_args(instance, float(theta), l)
        sol = None
        if prev is not None:
            try:
                sol = _polish(instance, float(theta), ll, prev.tau, np.array(prev.angles))
            except ThetaError:
                sol = None
        if sol is None:
            sol = solve_theta(instance, float(theta), ll)
        out.append(sol)
        prev = sol
    return out


def z_of_theta(instance: ProblemInstance, theta: float) -> float:
    return solve_theta(instance, theta).z


def z_derivative(solution: ThetaSolution) -> float:
    """Closed-form ``dz/dtheta`` from the logarithmic-derivative identity."""
    th, tau = solution.theta, solution.tau
    t0 = solution.t0
    num = sum(t0 / (tk - t0) for tk in solution.instance.float_roots()) + solution.instance.r
    den = sum(
        tk * tau * math.sin(th) / abs(tk - t0) ** 2 for tk in solution.instance.float_roots()
    )
    return solution.z * abs(num) ** 2 / den


def a_b_functions(solution: ThetaSolution) -> Tuple[float, float]:
    """Coefficients of the two-term main part of ``H(theta; m)``."""
    th = solution.theta
    st = math.sin(th)
    A = float(solution.instance.r)
    B = 0.0
    for a in solution.angles:
        w = math.sin(a) / st
        A -= w * math.cos(a - th)
        B += w * math.sin(a - th)
    return A, B


# -- Q(zeta) and the spectral frame ------------------------------------------


def q_polynomial(solution: ThetaSolution) -> FloatPolynomial:
    """``prod_j (u_j - zeta v_j) + zeta^r`` with ``u_j = sin(theta_j - theta)/sin(theta)``, ``v_j = sin(theta_j)/sin(theta)``."""
    th = solution.theta
    st = math.sin(th)
    poly = np.array([1.0])
    for a in solution.angles:
        poly = np.convolve(poly, np.array([math.sin(a - th) / st, -math.sin(a) / st]))
    r = solution.instance.r
    out = np.zeros(max(poly.size, r + 1))
    out[: poly.size] += poly
    out[r] += 1.0
    return FloatPolynomial(out)


def q_prime_at(solution: ThetaSolution, zeta: complex) -> complex:
    """Derivative of Q at one of its roots, using the root relation."""
    th = solution.theta
    r = solution.instance.r
    zr = zeta**r
    total = r * zeta ** (r - 1)
    for a in solution.angles:
        sa = math.sin(a)
        total += zr * sa / (math.sin(a - th) - zeta * sa)
    return total


def leading_denominator(solution: ThetaSolution) -> float:
    """Leading coefficient in t of ``P(t) + z t^r``."""
    inst = solution.instance
    an = float(inst.coeffs[-1])
    if inst.n > inst.r:
        return an
    if inst.r > inst.n:
        return solution.z
    return an + solution.z


def denominator_roots(solution: ThetaSolution) -> SpectralFrame:
    """All roots of ``P(t) + z t^r`` and their normalized images ``zeta_k = t_k / tau``."""
    inst = solution.instance
    a = _float_coeffs(inst)
    d = inst.degree
    c = np.zeros(d + 1)
    c[: a.size] = a
    c[inst.r] += solution.z
    roots = complex_roots(FloatPolynomial(c))
    tau, th = solution.tau, solution.theta
    inner = [t for t in roots if abs(t) <= tau * (1 + 1e-9)]
    if len(inner) != 2:
        raise ThetaError(
            f"expected exactly two denominator roots of modulus <= tau={tau!r}, found {len(inner)}"
        )
    outer = sorted((t for t in roots if abs(t) > tau * (1 + 1e-9)), key=abs)
    t0 = solution.t0
    t_roots = (t0, t0.conjugate()) + tuple(complex(t) for t in outer)
    zetas = (cmath.exp(-1j * th), cmath.exp(1j * th)) + tuple(complex(t) / tau for t in outer)
    qprimes = tuple(q_prime_at(solution, zk) for zk in zetas)
    return SpectralFrame(solution, t0, t_roots, zetas, leading_denominator(solution), qprimes)


# -- H(theta; m) --------------------------------------------------------------


@dataclass(frozen=True)
class HValue:
    value: float
    imag: float
    method: str  # "direct" or "continuation"
    terms_scale: float


def _continuation_value(solution: ThetaSolution, m: int, hm: ExactPolynomial) -> float:
    """``-z tau^(m+r) H_m(z)`` evaluated exactly at the float inputs, then rounded."""
    z = Fraction(solution.z)
    tau = Fraction(solution.tau)
    val = -z * tau ** (m + solution.instance.r) * hm(z)
    return _to_float(val)


def _to_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.copysign(math.inf, x)


def _residue_term(zeta: complex, qp: complex, m: int) -> complex:
    """``1 / (zeta^(m+1) Q'(zeta))`` computed in log space to avoid overflow."""
    lz = cmath.log(zeta)
    lq = cmath.log(qp)
    e = -(m + 1) * lz - lq
    if e.real < -745.0:
        return 0j
    return cmath.exp(e)


def h_theta_detail(
    solution: ThetaSolution,
    m: int,
    seq: Optional[GeneratedSequence] = None,
    frame: Optional[SpectralFrame] = None,
    method: str = "auto",
) -> HValue:
    """``H(theta; m)`` with a record of how it was computed.

    ``method`` is ``"direct"`` (partial fractions over all zeta_k),
    ``"continuation"`` (exact ``H_m`` through the generating-function
    identity) or ``"auto"``, which uses the direct sum unless the zetas
    nearly collide or the sum cancels badly.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")

    def exact():
        s = seq if seq is not None and seq.m_max >= m else generate(solution.instance, m)
        return HValue(_continuation_value(solution, m, s[m]), 0.0, "continuation", math.nan)

    if method == "continuation":
        return exact()
    try:
        fr = frame if frame is not None else denominator_roots(solution)
    except (ThetaError, ConvergenceError):
        if method == "direct":
            raise
        return exact()
    terms = [_residue_term(zk, qp, m) for zk, qp in zip(fr.zetas, fr.qprimes)]
    total = sum(terms)
    scale = sum(abs(t) for t in terms)
    hv = HValue(total.real, total.imag, "direct", scale)
    if method == "direct":
        return hv
    if fr.min_separation < COLLISION_SEP or abs(total) < CANCEL_RATIO * scale:
        return exact()
    if abs(total.imag) > REAL_TOL * (abs(total.real) + 1.0):
        return exact()
    return hv


def h_theta(solution: ThetaSolution, m: int, seq: Optional[GeneratedSequence] = None) -> float:
    """Real value of ``sum_k 1 / (zeta_k^(m+1) Q'(zeta_k))``.

    Zeros of this function in theta correspond to the real zeros of ``H_m``
    via ``z(theta)``; it equals ``-z tau^(m+r) H_m(z)``, which is the exact
    route used near zeta collisions.
    """
    return h_theta_detail(solution, m, seq).value


def main_term(solution: ThetaSolution, m: int) -> float:
    """``(2/|Q'|^2)(A cos((m+r)theta) - B sin((m+r)theta))``, the two unit-circle terms."""
    A, B = a_b_functions(solution)
    qp = q_prime_at(solution, cmath.exp(1j * solution.theta))
    ang = (m + solution.instance.r) * solution.theta
    return 2.0 / abs(qp) ** 2 * (A * math.cos(ang) - B * math.sin(ang))


@dataclass(frozen=True)
class SignCalibration:
    """Signs observed at one interior grid angle.

    ``alternation`` is ``sign(H(theta_h)) * (-1)^h``; ``continuation`` is the
    sign of ``H(theta)`` relative to ``-c tau^(m+max(n,r)) H_m(z(theta))``.
    """

    theta: float
    h: int
    alternation: int
    continuation: int


def calibrate_sign(instance: ProblemInstance, m: int, seq: Optional[GeneratedSequence] = None) -> SignCalibration:
    r = instance.r
    hmax = max(1, m // r)
    h = max(1, (hmax + 1) // 2)
    theta = h * math.pi / (m + r)
    sol = solve_theta(instance, theta)
    direct = h_theta_detail(sol, m, seq, method="direct").value
    s = seq if seq is not None and seq.m_max >= m else generate(instance, m)
    fr = denominator_roots(sol)
    z = Fraction(sol.z)
    other = -Fraction(fr.c) * Fraction(sol.tau) ** (m + instance.degree) * s[m](z)
    sd = (direct > 0) - (direct < 0)
    so = (other > 0) - (other < 0)
    return SignCalibration(theta, h, sd * (-1) ** h, sd * so)


def theta_grid(instance: ProblemInstance, m: int, offset: float = 0.0) -> np.ndarray:
    """Angles ``(h - offset) pi / (m + r)`` for ``h = 1 .. floor(m/r)``."""
    r = instance.r
    h = np.arange(1, m // r + 1, dtype=float) - offset
    return h * math.pi / (m + r)
