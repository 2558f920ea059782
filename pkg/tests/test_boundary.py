import math

import numpy as np
import pytest

from besselext.boundary import BoundaryValueError, boundary_basis, boundary_values, reference_frames
from besselext.numerics import Tolerance
from besselext.problem import BesselProblem
from besselext.solutions import FrameUndefinedError

LOOSE = Tolerance(rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("sa,sb", [(0.3, 0.6), (0.0, 0.25), (0.75, 0.0)])
def test_frame_combination_has_its_coefficients_as_data(sa, sb):
    prob = BesselProblem(0.0, 1.0, sa, sb)
    frames = reference_frames(prob)
    fa, fb = frames["a"], frames["b"]

    def g(x):
        if fa.contains(x):
            uh, u = fa.u_hat(x), fa.u(x)
            return 2 * uh[0] + 3 * u[0], 2 * uh[1] + 3 * u[1]
        uh, u = fb.u_hat(x), fb.u(x)
        return -1 * uh[0] + 0.5 * u[0], -1 * uh[1] + 0.5 * u[1]

    bd = boundary_values(prob, g, frames, LOOSE)
    np.testing.assert_allclose(bd.vector("a"), [2.0, 3.0], atol=1e-6)
    np.testing.assert_allclose(bd.vector("b"), [-1.0, 0.5], atol=1e-6)
    for ep, expect in (("a", (2.0, 3.0)), ("b", (-1.0, 0.5))):
        check = bd.cross_check[ep]
        assert check is not None
        np.testing.assert_allclose(check, expect, rtol=1e-3, atol=1e-3)


def test_regular_endpoints_give_value_and_derivative():
    prob = BesselProblem(0.0, 1.0, 0.5, 0.5)
    g = lambda x: (math.cos(2 * x) + 3 * x, -2 * math.sin(2 * x) + 3)
    bd = boundary_values(prob, g, tol=LOOSE)
    np.testing.assert_allclose(bd.vector("a"), [1.0, 3.0], atol=1e-8)
    # at b the principal member is -(b - x), so the data are (g(b), g'(b))
    np.testing.assert_allclose(bd.vector("b"), [math.cos(2) + 3, -2 * math.sin(2) + 3], atol=1e-8)


@pytest.mark.parametrize("sa,sb,lam", [(0.3, 0.6, 7.3), (0.0, 0.25, -2.0), (0.5, 0.0, 20.0)])
def test_boundary_basis_is_dual(sa, sb, lam):
    prob = BesselProblem(0.0, 1.0, sa, sb)
    for ep in ("a", "b"):
        th, ph = boundary_basis(prob, lam, ep)
        M = np.array([boundary_values(prob, th, tol=LOOSE).vector(ep),
                      boundary_values(prob, ph, tol=LOOSE).vector(ep)]).T
        np.testing.assert_allclose(M, np.eye(2), atol=1e-6)


def test_limit_point_endpoint_has_no_data():
    prob = BesselProblem(0.0, 1.0, 1.5, 0.5)
    bd = boundary_values(prob, lambda x: (math.sin(x), math.cos(x)), tol=LOOSE)
    assert bd.at_a is None
    with pytest.raises(FrameUndefinedError):
        bd.vector("a")
    with pytest.raises(FrameUndefinedError):
        boundary_basis(prob, 1.0, "a")


def test_oscillating_function_is_rejected():
    prob = BesselProblem(0.0, 1.0, 0.5, 0.5)
    g = lambda x: (math.sin(1 / x), -math.cos(1 / x) / x ** 2)
    with pytest.raises(BoundaryValueError) as info:
        boundary_values(prob, g, tol=LOOSE)
    assert info.value.endpoint == "a"
