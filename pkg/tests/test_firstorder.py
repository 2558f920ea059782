import math

import numpy as np
import pytest
import sympy

from besselext.corpus import polynomial_corpus
from besselext.firstorder import (
    FirstOrderExpr,
    SingularityError,
    apply,
    decay_probe,
    factorization_residual,
    phi,
    phi_derivative,
    qtilde,
    smooth_step,
    smooth_step_derivative,
    witness_check,
)
from besselext.problem import BesselProblem


def test_single_endpoint_factorization_symbolic():
    # alpha^+ alpha f = -f'' + (s^2 - 1/4)/x^2 f, checked symbolically
    x, s = sympy.symbols("x s", positive=True)
    f = sympy.Function("f")(x)
    alpha = lambda g: sympy.diff(g, x) - (s + sympy.Rational(1, 2)) / x * g
    alpha_adj = lambda g: -sympy.diff(g, x) - (s + sympy.Rational(1, 2)) / x * g
    diff = sympy.simplify(alpha_adj(alpha(f)) - (-sympy.diff(f, x, 2) + (s ** 2 - sympy.Rational(1, 4)) / x ** 2 * f))
    assert diff == 0


@pytest.mark.parametrize("kind", ["alpha_at_a", "beta_at_b"])
def test_single_endpoint_factorization_numeric(kind):
    expr = FirstOrderExpr(kind, s_a=0.3, s_b=1.7)
    grid = np.linspace(0.02, 0.98, 33)
    for trial in polynomial_corpus(4):
        assert factorization_residual(expr, trial, grid) < 1e-10


def test_two_point_qtilde_bounded_and_flat_near_ends():
    expr = FirstOrderExpr("two_point", 0.2, 0.9, step_width=0.1)
    # within eps of one end only the far singular term is left over
    near_a = np.array([1e-300, 1e-12, 1e-3, 0.05])
    np.testing.assert_allclose(qtilde(expr, near_a), -(0.9 ** 2 - 0.25) / (1 - near_a) ** 2, rtol=1e-14)
    near_b = 1 - near_a[1:]
    np.testing.assert_allclose(qtilde(expr, near_b), -(0.2 ** 2 - 0.25) / near_b ** 2, rtol=1e-14)
    mid = np.linspace(0.01, 0.99, 199)
    direct = (phi(expr, mid) ** 2 - phi_derivative(expr, mid)
              - (0.2 ** 2 - 0.25) / mid ** 2 - (0.9 ** 2 - 0.25) / (1 - mid) ** 2)
    np.testing.assert_allclose(qtilde(expr, mid), direct, atol=1e-9)
    with pytest.raises(ValueError):
        qtilde(FirstOrderExpr("alpha_at_a", 0.2), 0.5)


def test_smooth_steps():
    x = np.linspace(0, 1, 201)
    left = smooth_step(x, "left", 0.1)
    assert left[0] == 1.0 and left[-1] == 0.0
    assert np.all(np.diff(left) <= 1e-15)
    h = 1e-6
    for x0 in (0.12, 0.15, 0.19):
        fd = (smooth_step(x0 + h, "left", 0.1) - smooth_step(x0 - h, "left", 0.1)) / (2 * h)
        assert abs(fd - smooth_step_derivative(x0, "left", 0.1)) < 1e-5


def test_apply_and_adjoint():
    expr = FirstOrderExpr("alpha_at_a", s_a=0.5)
    x = 0.3
    assert apply(expr, x ** 1.0, 1.0, x) == pytest.approx(0.0, abs=1e-15)
    assert apply(expr, 1.0, 0.0, x, adjoint=True) == pytest.approx(-1 / x)
    with pytest.raises(SingularityError):
        phi(FirstOrderExpr("two_point"), 0.0)


def test_problem_factorization_with_potential():
    prob = BesselProblem(-1.0, 2.0, 0.7, 0.1, "poly:0.5,1,-1")
    grid = np.linspace(-0.95, 1.95, 30)
    for trial in polynomial_corpus(3):
        g = lambda t, tr=trial: tr((t + 1) / 3)
        assert factorization_residual(prob, g, grid) < 1e-8


@pytest.mark.parametrize("func,mode,verdict", [
    (lambda t: t, "sqrt", "vanishes"),
    (lambda t: math.sqrt(t) * (1 + t), "sqrt", "finite_nonzero"),
    (lambda t: t ** 0.25, "sqrt", "diverges"),
    (lambda t: t ** 0.75, "right_sqrt", "vanishes"),
    (lambda t: math.sqrt(t * math.log(2.0 / t)), "sqrt_log", "finite_nonzero"),
    (lambda t: t ** 0.6, "sqrt_log", "vanishes"),
])
def test_decay_probe_verdicts(func, mode, verdict):
    assert decay_probe(func, mode=mode).verdict == verdict


def test_decay_probe_limit_value():
    r = decay_probe(lambda t: 3 * math.sqrt(t) + t)
    assert r.limit == pytest.approx(3.0, rel=1e-6)
    with pytest.raises(ValueError):
        decay_probe(math.sqrt, mode="bogus")
    with pytest.raises(ValueError):
        decay_probe(math.sqrt, mode="sqrt_log", R=0.5)


def test_witness_rejects_outside_range():
    with pytest.raises(ValueError):
        witness_check(0.2)
    r = witness_check(-0.3)
    assert r.alpha_in_l2 and r.derivative_diverges
