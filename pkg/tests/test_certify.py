import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from hyperzero.certify import (
    HYPERBOLIC_IN_AB,
    INDETERMINATE,
    NOT_ALL_REAL,
    REAL_NOT_CONTAINED,
    HyperbolicityCertificate,
    certify,
    certify_range,
    certify_sign_changes,
    certify_sturm,
    conjecture2_scan,
    default_b_cap,
    density_profile,
    onset,
    realness_row,
)
from hyperzero.genseq import ProblemInstance, generate
from hyperzero.interval import interval_report
from hyperzero.polycore import ExactPolynomial, isolate_real_roots, refine

from instances import LINEAR_R2, SQUARE_R1, random_instances

F = Fraction


def P(*coeffs):
    return ExactPolynomial(coeffs)


def _setup(inst, m_max):
    return generate(inst, m_max), interval_report(inst)


def test_square_r1_m2():
    seq, rep = _setup(SQUARE_R1, 2)
    for method in ("sturm", "sign-changes", "auto"):
        c = certify(SQUARE_R1, seq, rep, 2, method)
        assert (c.degree, c.distinct_real_roots, c.roots_in_interval) == (2, 2, 2)
        assert c.verdict == HYPERBOLIC_IN_AB


def test_m0_is_vacuous():
    seq, rep = _setup(SQUARE_R1, 0)
    c = certify(SQUARE_R1, seq, rep, 0)
    assert c.degree == 0 and c.verdict == HYPERBOLIC_IN_AB


def test_linear_r2_m3():
    seq, rep = _setup(LINEAR_R2, 3)
    c = certify_sturm(rep, seq[3], 3, isolate=True)
    assert c == certify(LINEAR_R2, seq, rep, 3, "sturm")
    assert c.degree == 1 and c.roots_in_interval == 1 and c.verdict == HYPERBOLIC_IN_AB
    (lo, hi), = c.brackets
    assert lo < F(1, 2) <= hi


def _fake_report(inst, a, b):
    rep = interval_report(inst)
    return type(rep)(inst, rep.R, rep.t_a, rep.t_a_exact, rep.t_b, F(a), F(b) if b != math.inf else math.inf)


def test_verdicts_for_handmade_polynomials():
    rep = _fake_report(SQUARE_R1, 0, 4)
    assert certify_sturm(rep, P(3, -4, 1), 2).verdict == HYPERBOLIC_IN_AB
    assert certify_sturm(rep, P(5, -6, 1), 2).verdict == REAL_NOT_CONTAINED  # root 5 > b
    assert certify_sturm(rep, P(1, 0, 1), 2).verdict == NOT_ALL_REAL
    c = certify_sturm(rep, P(0, -3, 1), 2)  # root exactly at a = 0 is outside the open interval
    assert c.verdict == REAL_NOT_CONTAINED and c.roots_outside == 1
    sq = certify_sturm(rep, P(1, -2, 1), 2)
    assert not sq.is_squarefree and sq.distinct_real_roots == 1 and sq.verdict == HYPERBOLIC_IN_AB


def test_certificate_consistency_checks():
    with pytest.raises(ValueError):
        HyperbolicityCertificate(1, 1, 2, True, 2, 0, 0, HYPERBOLIC_IN_AB)
    with pytest.raises(ValueError):
        HyperbolicityCertificate(2, 2, 2, True, 1, 0, 0, HYPERBOLIC_IN_AB)
    c = HyperbolicityCertificate(2, 2, 2, True, 2, 0, 0, HYPERBOLIC_IN_AB)
    assert c.to_json()["verdict"] == HYPERBOLIC_IN_AB
    assert INDETERMINATE == "INDETERMINATE"


@pytest.mark.parametrize("inst", random_instances(8), ids=str)
def test_routes_agree(inst):
    seq, rep = _setup(inst, 40)
    for m in range(0, 41, 3):
        s = certify(inst, seq, rep, m, "sturm")
        sc = certify_sign_changes(rep, seq[m], m)
        if sc is not None:
            assert sc.verdict == HYPERBOLIC_IN_AB == s.verdict
            assert sc.distinct_real_roots == s.distinct_real_roots == seq[m].degree


@pytest.mark.parametrize("inst", random_instances(4), ids=str)
def test_sign_change_brackets_hold_the_roots(inst):
    m = 50
    seq, rep = _setup(inst, m)
    c = certify(inst, seq, rep, m, "sign-changes")
    p = seq[m]
    assert len(c.brackets) == p.degree
    for lo, hi in c.brackets:
        assert p.sign_at(lo) * p.sign_at(hi) < 0
    for (a, b), (c2, d) in zip(c.brackets, c.brackets[1:]):
        assert b <= c2


def test_sturm_cross_check_with_sympy():
    inst = ProblemInstance(("1/2", "2"), 1, 3)
    seq, rep = _setup(inst, 30)
    z = sympy.Symbol("z")
    for m in (12, 20, 30):
        p = seq[m]
        expr = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * z**k for k, c in enumerate(p.coeffs)), z)
        assert certify(inst, seq, rep, m, "sturm").distinct_real_roots == len(set(sympy.real_roots(expr)))


def test_degenerate_square_needs_half_offset():
    # the zeros of H_m sit exactly at z(h pi/(m+1)), so the plain grid hits them
    seq, rep = _setup(SQUARE_R1, 60)
    c = certify(SQUARE_R1, seq, rep, 60, "sign-changes")
    assert c.method == "sign-changes" and c.verdict == HYPERBOLIC_IN_AB


def test_certify_rejects_bad_arguments():
    seq, rep = _setup(SQUARE_R1, 3)
    with pytest.raises(ValueError):
        certify(SQUARE_R1, seq, rep, 4)
    with pytest.raises(ValueError):
        certify(SQUARE_R1, seq, rep, 2, "float")


def test_certify_range_parallel_matches_serial():
    inst = random_instances(1)[0]
    seq, rep = _setup(inst, 40)
    serial = certify_range(inst, seq, rep, range(41), jobs=1)
    parallel = certify_range(inst, seq, rep, range(41), jobs=2)
    assert serial == parallel


def test_onset_examples():
    res = onset(SQUARE_R1, 50)
    assert res.m0 == 0 and res.violations == ()
    assert onset(SQUARE_R1, 0).m0 == 0
    inst = ProblemInstance(("1/2", "3/2", "7/3"), 1, 2)
    res = onset(inst, 100)
    assert res.m0 is not None
    for c in res.certificates[res.m0:]:
        assert c.verdict == HYPERBOLIC_IN_AB and c.distinct_real_roots == c.degree
    assert res.to_json()["m0"] == res.m0


def test_density_metrics_are_monotone():
    seq, rep = _setup(SQUARE_R1, 120)
    certs = onset(SQUARE_R1, 120, seq, rep).certificates
    profiles = [density_profile(SQUARE_R1, seq, rep, m, 50, certificates=certs) for m in (30, 60, 120)]
    cov = [d.coverage_fraction for d in profiles]
    gaps = [d.max_gap for d in profiles]
    assert cov == sorted(cov)
    assert gaps == sorted(gaps, reverse=True)
    assert profiles[-1].window == (0.0, 4.0)


def test_density_zeros_match_exact_roots():
    m = 40
    seq, rep = _setup(SQUARE_R1, m)
    prof = density_profile(SQUARE_R1, seq, rep, m, 20, m_min=m)
    p = seq[m]
    exact = [float(refine(e, p, F(1, 2**60)).midpoint) for e in isolate_real_roots(p)]
    assert np.allclose(prof.zero_multiset, exact, rtol=0, atol=1e-10)


def test_density_b_cap_and_errors():
    seq, rep = _setup(LINEAR_R2, 60)
    prof = density_profile(LINEAR_R2, seq, rep, 60, 20)
    assert prof.window == (0.25, default_b_cap(rep))
    with pytest.raises(ValueError):
        density_profile(LINEAR_R2, seq, rep, 60, 5)
    with pytest.raises(ValueError):
        density_profile(LINEAR_R2, seq, rep, 1, 20, m_min=0, b_cap=0.3)


# -- second conjecture ------------------------------------------------------------


def test_conjecture2_known_polynomial():
    # 1 - z t + 3 t^2 + t^3: coefficients of P = 1 + t^3, s = 2, z reflected
    scan = conjecture2_scan(3, 2, 1, 20, coeffs=[1, 0, 0, 1], z_sign=-1)
    assert scan.base == (1, 0, 3, 1)
    assert scan.hypothesis_holds and scan.non_real == []
    # the reflection maps H_m(z) to H_m(-z)
    plain = conjecture2_scan(3, 2, 1, 20, coeffs=[1, 0, 0, 1])
    assert plain.sequence[3](F(1, 3)) == scan.sequence[3](F(-1, 3))
    assert scan.to_json()["non_real_m"] == []


def test_conjecture2_c0_matches_main_generator():
    inst = random_instances(3)[1]
    scan = conjecture2_scan(0, 1, inst.r, 30, roots=inst.roots, leading=inst.leading)
    seq = generate(inst, 30)
    assert scan.sequence.items == seq.items


def test_conjecture2_flags_hypothesis_and_errors():
    assert not conjecture2_scan(-1, 3, 1, 3, coeffs=[1, 0, 0, 1]).hypothesis_holds
    with pytest.raises(ValueError):
        conjecture2_scan(1, 2, 1, 3, coeffs=[0, 1])
    with pytest.raises(ValueError):
        conjecture2_scan(1, 2, 1, 3)
    with pytest.raises(ValueError):
        conjecture2_scan(1, 2, 1, 3, coeffs=[1, 1], z_sign=2)


def test_realness_row_multiple_roots():
    row = realness_row(P(1, -2, 1) * P(1, 0, 1), 4)
    assert (row.degree, row.squarefree_degree, row.distinct_real_roots) == (4, 3, 1)
    assert not row.all_real
    assert realness_row(P(1, -2, 1), 2).all_real
