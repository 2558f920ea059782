import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besselext.problem import BesselProblem, Potential
from besselext.solutions import (
    FrameUndefinedError,
    Solution,
    global_frame_q0,
    heun_reduction,
    local_frame_q0,
    ode_residual,
    sigma,
    transport_frame,
    volterra_frame,
    wronskian,
)


@settings(max_examples=30, deadline=None)
@given(st.one_of(st.just(0.0), st.floats(1e-4, 0.99)), st.sampled_from(["a", "b"]), st.floats(0.01, 0.99))
def test_local_frame_wronskian(s, ep, x):
    (u, du), (uh, duh) = local_frame_q0(s, ep, x)
    # u_hat ~ 1/(2s) makes the product form lose log10(1/s) digits
    assert abs(wronskian(uh, duh, u, du) - 1) < 1e-13 / max(s, 1e-3)


def test_local_frame_errors():
    with pytest.raises(FrameUndefinedError):
        local_frame_q0(1.2, "a", 0.5)
    with pytest.raises(ValueError):
        local_frame_q0(0.3, "a", 0.0)
    with pytest.raises(ValueError):
        local_frame_q0(-0.1, "a", 0.5)


def test_sigma():
    assert sigma(0.5, 0.5) == pytest.approx(0.5)
    assert sigma(0.0, 0.0) == pytest.approx(0.5j)


def test_regular_frame_is_sine_cosine():
    k = 2.7
    prob = BesselProblem(0.0, 1.0, 0.5, 0.5)
    fr = volterra_frame(prob, "a", k * k)
    xs = np.linspace(0.01, fr.validity[1], 6)
    u, du = fr.u(xs)
    uh, duh = fr.u_hat(xs)
    np.testing.assert_allclose(u, np.sin(k * xs) / k, atol=1e-12)
    np.testing.assert_allclose(du, np.cos(k * xs), atol=1e-12)
    np.testing.assert_allclose(uh, np.cos(k * xs), atol=1e-12)
    np.testing.assert_allclose(duh, -k * np.sin(k * xs), atol=1e-11)


def test_bessel_frame_matches_mpmath():
    # s_a = 0, s_b = 1/2: tau u = k^2 u is solved near a by sqrt(x) J0(kx)
    k = 3.1
    prob = BesselProblem(0.0, 1.0, 0.0, 0.5)
    fr = volterra_frame(prob, "a", k * k)
    for x in np.linspace(1e-4, fr.validity[1], 5)[1:]:
        ref = float(mpmath.sqrt(x) * mpmath.besselj(0, k * x))
        dref = float(mpmath.diff(lambda t: mpmath.sqrt(t) * mpmath.besselj(0, k * t), x))
        u, du = fr.u(x)
        assert abs(u - ref) < 1e-11
        assert abs(du - dref) < 1e-9 * max(1, abs(dref))
    sol = Solution(prob, k * k, "a", 0.0, 1.0)
    for x in (0.4, 0.7, 0.95):
        ref = float(mpmath.sqrt(x) * mpmath.besselj(0, k * x))
        assert abs(sol(x)[0] - ref) < 1e-9


@pytest.mark.parametrize("sa,sb", [(0.3, 0.6), (0.0, 0.0), (0.5, 0.25), (0.75, 0.0), (0.0, 0.3)])
def test_global_and_volterra_frames_agree(sa, sb):
    prob = BesselProblem(0.0, 1.0, sa, sb)
    for ep in ("a", "b"):
        g = global_frame_q0(prob, ep)
        v = volterra_frame(prob, ep, 0.0)
        lo, hi = v.validity
        xs = np.linspace(lo, hi, 6)[1:-1]
        for a_, b_ in ((g.u(xs), v.u(xs)), (g.u_hat(xs), v.u_hat(xs))):
            np.testing.assert_allclose(np.real(a_[0]), b_[0], rtol=1e-9, atol=1e-11)
            np.testing.assert_allclose(np.real(a_[1]), b_[1], rtol=1e-8, atol=1e-10)


def test_transport_matches_global_frame():
    prob = BesselProblem(0.0, 1.0, 0.0, 0.3)
    fv = volterra_frame(prob, "a", 0.0)
    fg = global_frame_q0(prob, "a")
    (u, du), (uh, duh) = transport_frame(fv, prob, 0.0, 0.6, "both")
    gu, gdu = fg.u(0.6)
    guh, _ = fg.u_hat(0.6)
    assert abs(u - gu) < 1e-9 and abs(du - gdu) < 1e-8 and abs(uh - guh) < 1e-8
    assert abs(wronskian(uh, duh, u, du) - 1) < 1e-9
    with pytest.raises(ValueError):
        transport_frame(fv, prob, 0.0, 1.0)


def test_frames_with_potential_solve_the_equation():
    prob = BesselProblem(-1.0, 1.5, 0.8, 0.0, Potential.poly([1.0, -2.0, 0.5]))
    for ep in ("a", "b"):
        fr = volterra_frame(prob, ep, 3.0)
        xs = np.linspace(*fr.validity, 7)[1:-1]
        assert ode_residual(prob, 3.0, fr.u, xs) < 1e-6
        assert np.max(np.abs(wronskian(*fr.u_hat(xs), *fr.u(xs)) - 1)) < 1e-9


def test_limit_point_endpoint():
    prob = BesselProblem(0.0, 1.0, 1.5, 0.5)
    fr = volterra_frame(prob, "a", 0.0)
    assert not fr.has_u_hat
    with pytest.raises(FrameUndefinedError):
        fr.u_hat(0.1)
    g = global_frame_q0(prob, "a")
    assert abs(fr.u(0.1)[0] - np.real(g.u(0.1)[0])) < 1e-12
    # a solution started at the regular end is generically not recessive at the LP end
    sol = Solution(BesselProblem(0.0, 1.0, 0.5, 1.5), 1.0, "a", 1.0, 0.0)
    assert sol.far_coefficients[2] > 1e-6
    with pytest.raises(FrameUndefinedError):
        sol(1 - 1e-3)


def test_linear_solution_has_small_residual():
    prob = BesselProblem(0.0, 1.0, 0.5, 0.5)
    assert ode_residual(prob, 0.0, lambda x: (x, 1.0), np.linspace(0.1, 0.9, 5)) < 1e-10


@pytest.mark.parametrize("z", [0.0, 2 + 1j, -7.5, 40.0])
def test_heun_identification(z):
    h = heun_reduction(BesselProblem(0.0, 2.0, 0.3, 0.7), z)
    assert h.identification_error() < 1e-12
