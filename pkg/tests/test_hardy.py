import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from besselext.corpus import power_trial, sine_trial
from besselext.hardy import (
    AdmissibilityError,
    empirical_constant,
    hardy_report,
    log_refined_check,
    muckenhoupt,
)


def test_parabola_power_and_distance_variants():
    t = power_trial(1.0, 1.0)
    r = hardy_report(t, "power_12")
    # int (1-2x)^2 = 1/3 and int (1-x)^2 = 1/3
    assert r.lhs == pytest.approx(1 / 3, rel=1e-12)
    assert r.weighted == pytest.approx(1 / 3, rel=1e-12)
    assert r.satisfied and r.constant == 0.25
    d = hardy_report(t, "distance_13")
    assert d.weighted == pytest.approx(7 / 12, rel=1e-12)
    assert d.satisfied


def test_sine_variant_on_shifted_interval():
    L = 2.5
    t = sine_trial((1.0,), (-1.0, -1.0 + L))
    r = hardy_report(t, "sine_14", interval=(-1.0, -1.0 + L))
    k = math.pi / L
    assert r.lhs == pytest.approx(k * k * L / 2, rel=1e-11)
    assert r.weighted == pytest.approx(L + L / 2, rel=1e-11)
    assert r.constant == pytest.approx(math.pi ** 2 / (4 * L * L))
    assert r.ratio / r.constant == pytest.approx(4 / 3, rel=1e-11)


def test_log_variant_against_mpmath():
    t = power_trial(1.0, 1.0)
    r = hardy_report(t, "log_refined_B1", R=2.0)
    # f' - f/(2x) = (1 - 3x)/2
    assert r.lhs == pytest.approx(0.25, rel=1e-11)
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda x: (1 - x) ** 2 / mpmath.log(2 / x) ** 2, [0, 0.5, 1])
    assert r.weighted == pytest.approx(float(ref), rel=1e-10)
    assert r.satisfied


def test_halfline_variant_needs_vanishing_only_at_a():
    t = power_trial(1.0, 0.0)
    r = hardy_report(t, "halfline_B11")
    assert r.lhs == pytest.approx(1.0) and r.weighted == pytest.approx(1.0)
    with pytest.raises(AdmissibilityError):
        hardy_report(t, "power_12")


def test_inadmissible_square_root_profile():
    with pytest.raises(AdmissibilityError):
        hardy_report(power_trial(0.5, 1.0), "power_12")


def test_bad_arguments():
    t = power_trial(1.0, 1.0)
    with pytest.raises(ValueError):
        hardy_report(t, "nope")
    with pytest.raises(ValueError):
        hardy_report(t, "power_12", admissibility="maybe")
    with pytest.raises(ValueError):
        hardy_report(t, "log_refined_B1", R=1.0)


@settings(max_examples=15, deadline=None)
@given(p=st.floats(0.7, 2.5), r=st.floats(0.7, 2.5), c1=st.floats(-0.9, 0.9))
def test_power_trials_satisfy_power_inequality(p, r, c1):
    rep = hardy_report(power_trial(p, r, (1.0, c1)), "power_12")
    assert rep.satisfied
    assert rep.ratio > 0.25


def _sympy_log_refined(r0, r1, s, R):
    x = sp.symbols("x", positive=True)
    f = x * (1 - x) * (1 + 2 * x)
    fd = sp.diff(f, x)
    ell = sp.log(R / x)

    def num(expr):
        return float(sp.Integral(expr, (x, r0, r1)).evalf(30))

    def br(expr):
        return float((expr.subs(x, r1) - expr.subs(x, r0)).evalf(30))

    I_t2 = num(f ** 2 / x ** 2)
    I_log = num(f ** 2 / (x ** 2 * ell ** 2))
    alpha = num((fd - (s + sp.Rational(1, 2)) * f / x) ** 2)
    rhs = s ** 2 * I_t2 + I_log / 4 - s * br(f ** 2 / x) - br(f ** 2 / (2 * x * ell))
    return alpha, rhs


def test_log_refined_identities_match_sympy():
    def f(x):
        x = np.asarray(x, dtype=float)
        return x * (1 - x) * (1 + 2 * x), 1 + 2 * x - 6 * x * x

    r0, r1, s, R = 0.05, 0.8, 0.3, 1.5
    rep = log_refined_check(f, r0, r1, s, R)
    alpha, rhs = _sympy_log_refined(sp.Rational(1, 20), sp.Rational(4, 5), sp.Rational(3, 10), sp.Rational(3, 2))
    assert rep.alpha_lhs == pytest.approx(alpha, rel=1e-11)
    assert rep.inequality_rhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
    assert rep.weighted_identity_error < 1e-10
    assert rep.alpha_identity_error < 1e-10
    assert rep.weighted_lhs >= 0
    assert rep.inequality_holds


def test_log_refined_needs_ordered_radii():
    with pytest.raises(ValueError):
        log_refined_check(power_trial(1.0, 1.0), 0.5, 0.2, 0.1, 2.0)


def test_muckenhoupt_inverse_square_weight():
    r = muckenhoupt("A_form", lambda x: x ** -2.0, lambda x: np.ones_like(x))
    assert r.value == pytest.approx(1.0, rel=1e-6)
    assert r.bracket[1] == pytest.approx(2 * r.value)
    assert not r.infinite


def test_muckenhoupt_interior_supremum():
    # (2 (c^{-1/2} - 1) c)^{1/2} peaks at c = 1/4 with value sqrt(1/2)
    r = muckenhoupt("A_form", lambda x: x ** -1.5, lambda x: np.ones_like(x))
    assert r.value == pytest.approx(math.sqrt(0.5), rel=1e-9)
    assert r.sup_location == pytest.approx(0.25, rel=1e-4)


def test_muckenhoupt_infinite_cases():
    u = lambda x: x ** -2.0
    v = lambda x: np.ones_like(x)
    assert muckenhoupt("B_form", u, v).infinite
    r = muckenhoupt("A_form", u, v, p=1.0)
    assert r.infinite and math.isinf(r.value)


def test_muckenhoupt_bad_arguments():
    with pytest.raises(ValueError):
        muckenhoupt("C_form", np.ones_like, np.ones_like)
    with pytest.raises(ValueError):
        muckenhoupt("A_form", np.ones_like, np.ones_like, p=0.5)


@settings(max_examples=20, deadline=None)
@given(c=st.lists(st.floats(0.0, 3.0), min_size=1, max_size=3))
def test_empirical_constant_within_bracket(c):
    u = lambda x: x ** -2.0
    v = lambda x: np.ones_like(x)
    f = lambda x: 1.0 + np.polynomial.polynomial.polyval(x, [0.0, *c])
    A = 1.0
    emp = empirical_constant("A_form", u, v, f)
    assert 0 < emp <= 2 * A
