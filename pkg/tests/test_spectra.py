import cmath
import math

import mpmath
import numpy as np
import pytest
import scipy.linalg

from besselext.extensions import ExtensionSpec
from besselext.problem import BesselProblem, Potential
from besselext.spectra import (
    EigenfunctionError,
    _inner,
    eigenfunction,
    eigenvalues,
    ground_state,
    matching_determinant,
)

FREE = BesselProblem(0.0, 1.0, 0.5, 0.5)


def cheb(N):
    """Chebyshev points on [-1, 1] and the differentiation matrix."""
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.hstack([2, np.ones(N - 1), 2]) * (-1) ** np.arange(N + 1)
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1 / c) / (dX + np.eye(N + 1))
    return x, D - np.diag(D.sum(axis=1))


def collocation_eigenvalues(rows_a, rows_b, N=48, q=0.0):
    """Eigenvalues of -g'' + q g on [0, 1] under two linear conditions.

    Each condition is ``ca . (g(0), g'(0)) + cb . (g(1), g'(1)) = 0`` given as
    a pair of coefficient rows.
    """
    _, D = cheb(N)
    # x = (1 - t)/2 puts x = 0 at node 0 and x = 1 at node N
    Dx = -2 * D
    A = (-Dx @ Dx + q * np.eye(N + 1)).astype(complex)
    B = np.eye(N + 1, dtype=complex)
    for row, (ca, cb) in zip((0, N), zip(rows_a, rows_b)):
        A[row] = ca[0] * np.eye(N + 1)[0] + ca[1] * Dx[0] + cb[0] * np.eye(N + 1)[N] + cb[1] * Dx[N]
        B[row] = 0
    w = scipy.linalg.eigvals(A, B)
    w = w[np.isfinite(w)]
    return np.sort(w.real[np.abs(w.imag) < 1e-6 * np.maximum(1, np.abs(w.real))])


def coupled_rows(phi, R):
    """(g(1), g'(1)) = e^{i phi} R (g(0), g'(0)) as two condition rows."""
    e = cmath.exp(1j * phi)
    R = np.asarray(R, dtype=float)
    rows_a = [(-e * R[0, 0], -e * R[0, 1]), (-e * R[1, 0], -e * R[1, 1])]
    rows_b = [(1.0, 0.0), (0.0, 1.0)]
    return rows_a, rows_b


def test_free_dirichlet_and_shift_by_constant():
    vals = eigenvalues(FREE.with_q(Potential.const(3.0)), ExtensionSpec.friedrichs(), (0, 400)).values
    np.testing.assert_allclose(vals, (np.arange(1, 7) * math.pi) ** 2 + 3.0, rtol=1e-9)


@pytest.mark.parametrize("alpha", [0.4, 2.0, math.pi / 2])
def test_robin_against_mpmath_roots(alpha):
    # g(0) cos(alpha) + g'(0) sin(alpha) = 0 and g(1) = 0: sin(alpha) k cos(k) = cos(alpha) sin(k)
    ext = ExtensionSpec.separated(alpha, 0.0)
    spec = eigenvalues(FREE, ext, (-30.0, 300.0))
    f = lambda k: mpmath.sin(alpha) * k * mpmath.cos(k) - mpmath.cos(alpha) * mpmath.sin(k)
    ks = []
    grid = np.linspace(1e-3, math.sqrt(300.0), 4000)
    vals = [float(f(k)) for k in grid]
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0:
            ks.append(float(mpmath.findroot(f, (grid[i], grid[i + 1]), solver="anderson")))
    # negative eigenvalues: k = i kappa, sin(alpha) kappa cosh = cos(alpha) sinh
    g = lambda kap: mpmath.sin(alpha) * kap * mpmath.cosh(kap) - mpmath.cos(alpha) * mpmath.sinh(kap)
    neg = []
    if g(1e-6) * g(5.0) < 0:
        neg.append(-float(mpmath.findroot(g, (1e-6, 5.0), solver="anderson")) ** 2)
    expect = np.array(sorted(neg + [k * k for k in ks]))
    np.testing.assert_allclose(spec.values, expect, rtol=1e-9, atol=1e-9)


def test_krein_free_against_collocation():
    # data at the regular ends are (g, g'); Krein: g(1) = g(0) + g'(0), g'(1) = g'(0)
    spec = eigenvalues(FREE, ExtensionSpec.krein(), (-1.0, 400.0))
    dense = collocation_eigenvalues([(-1.0, -1.0), (0.0, -1.0)], [(1.0, 0.0), (0.0, 1.0)])
    dense = dense[(dense > -1.0) & (dense < 400.0)]
    np.testing.assert_allclose(spec.values, dense, rtol=1e-8, atol=1e-8)
    assert spec.eigenvalues[0][1] == 2 and abs(spec.eigenvalues[0][0]) < 1e-9


@pytest.mark.parametrize("phi,R", [(1.0, ((1.0, 0.0), (0.0, 1.0))),
                                   (2.5, ((1.0, 0.3), (0.0, 1.0))),
                                   (0.0, ((2.0, 0.5), (-0.4, 0.4)))])
def test_coupled_against_collocation(phi, R):
    spec = eigenvalues(FREE, ExtensionSpec.coupled(phi, R), (-20.0, 300.0))
    dense = collocation_eigenvalues(*coupled_rows(phi, R))
    dense = dense[(dense > -20.0) & (dense < 300.0)]
    np.testing.assert_allclose(spec.values, dense, rtol=1e-8, atol=1e-8)


def test_periodic_phase_gives_shifted_squares():
    vals = eigenvalues(FREE, ExtensionSpec.coupled(1.0, ((1, 0), (0, 1))), (0.0, 200.0)).values
    n = np.arange(-3, 3)
    expect = np.sort((1.0 + 2 * math.pi * n) ** 2)
    np.testing.assert_allclose(vals, expect[expect < 200.0], rtol=1e-10)


def test_matching_determinant_rotates_to_real_for_complex_phase():
    ext = ExtensionSpec.coupled(2.5, ((1.0, 0.3), (0.0, 1.0)))
    D = matching_determinant(BesselProblem(0, 1, 0.25, 0.75), ext, np.array([-3.0, 10.0, 55.0]))
    assert np.iscomplexobj(D)
    F = np.exp(-1j * 2.5) * D
    assert np.max(np.abs(F.imag)) < 1e-10 * max(1.0, np.max(np.abs(F)))


def test_density_refinement_is_stable():
    prob = BesselProblem(0.0, 1.0, 0.25, 0.75)
    a = eigenvalues(prob, ExtensionSpec.krein(), (-1, 300)).values
    b = eigenvalues(prob, ExtensionSpec.krein(), (-1, 300), density=2.0).values
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10)


def test_eigenfunctions_orthonormal_and_satisfy_conditions():
    prob = BesselProblem(0.0, 1.0, 0.25, 0.75)
    ext = ExtensionSpec.friedrichs()
    lam = eigenvalues(prob, ext, (0, 100)).values[:2]
    e1 = eigenfunction(prob, ext, lam[0], check_boundary=True)
    e2 = eigenfunction(prob, ext, lam[1])
    f1, f2 = e1.functions[0], e2.functions[0]
    assert e1.residual < 1e-6 and e1.boundary_residual < 1e-6
    assert abs(_inner(prob, f1, f1) - 1) < 1e-8
    assert abs(_inner(prob, f1, f2)) < 1e-8


def test_krein_kernel_pair():
    prob = BesselProblem(0.0, 1.0, 0.25, 0.75)
    k = eigenfunction(prob, ExtensionSpec.krein(), 0.0, check_boundary=True)
    assert k.multiplicity == 2 and len(k.functions) == 2
    assert k.residual < 1e-6 and k.boundary_residual < 1e-6
    assert abs(_inner(prob, *k.functions)) < 1e-8


def test_free_eigenfunction_is_a_sine():
    e = eigenfunction(FREE, ExtensionSpec.friedrichs(), (2 * math.pi) ** 2)
    np.testing.assert_allclose(np.abs(e.values[0]), math.sqrt(2) * np.abs(np.sin(2 * math.pi * e.xs)), atol=1e-8)


def test_limit_point_case_and_non_eigenvalue():
    prob = BesselProblem(0.0, 1.0, 1.5, 0.3)
    spec = eigenvalues(prob, ExtensionSpec.friedrichs(), (0, 200))
    e = eigenfunction(prob, ExtensionSpec.friedrichs(), spec.values[0], check_boundary=True)
    assert e.residual < 1e-6 and e.boundary_residual < 1e-6
    with pytest.raises(EigenfunctionError):
        eigenfunction(prob, ExtensionSpec.friedrichs(), spec.values[0] + 1.0)
    assert ground_state(prob, ExtensionSpec.friedrichs()) == pytest.approx(spec.values[0], rel=1e-10)


def test_bad_range_rejected():
    with pytest.raises(ValueError):
        eigenvalues(FREE, ExtensionSpec.friedrichs(), (5.0, 1.0))
