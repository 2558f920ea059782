"""Principal and nonprincipal solution frames of ``(tau - lambda) u = 0``.

Three constructions are provided:

* :func:`local_frame_q0` evaluates the pure power (and logarithm) forms that
  govern the leading behavior at a single endpoint;
* :func:`global_frame_q0` evaluates the hypergeometric solutions of the
  two-point equation with ``q = 0`` at ``lambda = 0``;
* :func:`volterra_frame` handles a bounded ``q`` and any (complex)
  ``lambda`` by solving a regularized Volterra equation with Nystrom
  collocation on Chebyshev nodes.

Sign conventions: at ``a`` the principal solution is ``(x-a)^{1/2+s}`` and
the nonprincipal one ``(2s)^{-1} (x-a)^{1/2-s}``; at ``b`` the principal
solution is ``-(b-x)^{1/2+s}`` and the nonprincipal one
``(2s)^{-1} (b-x)^{1/2-s}``.  With ``W(f, g) = f g' - f' g`` every frame is
normalized to ``W(u_hat, u) = 1``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .numerics import DEFAULT_TOL, Tolerance, integrate_ode, quad_singular
from .problem import BesselProblem
from .specialfn import SeriesConvergenceError, hyp2f1, hyp2f1_derivative

__all__ = [
    "FrameUndefinedError",
    "FrameConstructionError",
    "SolutionFrame",
    "HeunReduction",
    "local_frame_q0",
    "global_frame_q0",
    "volterra_frame",
    "transport_frame",
    "heun_reduction",
    "wronskian",
    "ode_residual",
    "sigma",
    "frame_edge_states",
    "Solution",
]


class FrameUndefinedError(ValueError):
    """Requested frame member does not exist (limit point endpoint)."""


class FrameConstructionError(RuntimeError):
    """The Volterra construction could not be resolved on an admissible interval."""


def wronskian(f, df, g, dg):
    """``W(f, g) = f g' - f' g``."""
    return f * dg - df * g


def sigma(s_a: float, s_b: float) -> complex:
    """``(1/2) sqrt(4 s_a^2 + 4 s_b^2 - 1)``; imaginary when ``s_a^2 + s_b^2 < 1/4``."""
    return 0.5 * cmath.sqrt(4 * s_a * s_a + 4 * s_b * s_b - 1)


# ---------------------------------------------------------------------------
# frame container
# ---------------------------------------------------------------------------

Evaluator = Callable[[float], tuple]


@dataclass(frozen=True)
class SolutionFrame:
    """Normalized pair ``(u, u_hat)`` at one endpoint.

    ``u(x)`` and ``u_hat(x)`` return ``(value, derivative)``; both are
    certified on ``validity``, a sub-interval touching the endpoint.
    """

    endpoint: str
    lam: complex
    s: float
    validity: tuple
    method: str
    _u: Evaluator = field(repr=False)
    _u_hat: Optional[Evaluator] = field(default=None, repr=False)
    info: dict = field(default_factory=dict, repr=False, compare=False)

    def u(self, x):
        return self._u(x)

    def u_hat(self, x):
        if self._u_hat is None:
            raise FrameUndefinedError(
                f"no nonprincipal member at a limit point endpoint (s = {self.s})")
        return self._u_hat(x)

    @property
    def has_u_hat(self) -> bool:
        return self._u_hat is not None

    @property
    def edge(self) -> float:
        """Interior end of the validity interval."""
        return self.validity[1] if self.endpoint == "a" else self.validity[0]

    def contains(self, x) -> bool:
        lo, hi = self.validity
        return lo <= x <= hi and x != (lo if self.endpoint == "a" else hi)


def _distance(problem: BesselProblem, endpoint: str, x):
    return (np.asarray(x, dtype=float) - problem.a) if endpoint == "a" else (problem.b - np.asarray(x, dtype=float))


def _real_if_close(z, scale=1.0):
    z = np.asarray(z)
    if np.iscomplexobj(z) and np.all(np.abs(z.imag) <= 1e-9 * np.maximum(np.abs(z.real), scale)):
        z = z.real
    return z[()] if z.ndim == 0 else z


# ---------------------------------------------------------------------------
# local power frames
# ---------------------------------------------------------------------------


def local_frame_q0(s: float, endpoint: str, x, a: float = 0.0, b: float = 1.0):
    """Leading-order frame ``((u, u'), (u_hat, u_hat'))`` at ``x``.

    These are exact solutions of ``-u'' + (s^2 - 1/4) d^{-2} u = 0`` with ``d``
    the distance to the endpoint.  For small positive ``s`` the nonprincipal
    member has size ``1/(2s)``, so a Wronskian formed from these values loses
    about ``log10(1/s)`` digits.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s >= 1:
        raise FrameUndefinedError("nonprincipal frame member is undefined for s >= 1")
    if endpoint not in ("a", "b"):
        raise ValueError("endpoint must be 'a' or 'b'")
    t = (np.asarray(x, dtype=float) - a) if endpoint == "a" else (b - np.asarray(x, dtype=float))
    if np.any(t <= 0):
        raise ValueError("x must lie strictly inside the interval")
    p = 0.5 + s
    U = t ** p
    dU = p * t ** (p - 1)
    if s == 0:
        lg = np.log(1.0 / t)
        Uh = np.sqrt(t) * lg
        dUh = 0.5 / np.sqrt(t) * lg - 1.0 / np.sqrt(t)
    else:
        m = 0.5 - s
        Uh = t ** m / (2 * s)
        dUh = m * t ** (m - 1) / (2 * s)
    if endpoint == "a":
        return (U, dU), (Uh, dUh)
    # d/dx = -d/dt; the principal member carries a minus sign at b
    return (-U, dU), (Uh, -dUh)


# ---------------------------------------------------------------------------
# hypergeometric frames (q = 0, lambda = 0)
# ---------------------------------------------------------------------------


def _hyp_power(prefactor, p, r, L, a1, b1, c1, t, tol):
    """``prefactor * t^p (L-t)^r F(a1, b1; c1; t/L)`` and its t-derivative."""
    xi = t / L
    F = hyp2f1(a1, b1, c1, xi, tol)
    dF = hyp2f1_derivative(a1, b1, c1, xi, tol)
    base = prefactor * t ** p * (L - t) ** r
    val = base * F
    der = base * (F * (p / t - r / (L - t)) + dF / L)
    return val, der


def _principal_hyp(s_n, s_f, L, t, tol):
    sg = sigma(s_n, s_f)
    a1 = 0.5 + s_n - s_f + sg
    b1 = 0.5 + s_n - s_f - sg
    return _hyp_power(L ** (s_f - 0.5), 0.5 + s_n, 0.5 - s_f, L, a1, b1, 1 + 2 * s_n, t, tol)


def _nonprincipal_hyp_raw(s_n, s_f, L, t, tol):
    sg = sigma(s_n, s_f)
    a1 = 0.5 - s_n - s_f + sg
    b1 = 0.5 - s_n - s_f - sg
    return _hyp_power(L ** (s_f - 0.5) / (2 * s_n), 0.5 - s_n, 0.5 - s_f, L, a1, b1, 1 - 2 * s_n, t, tol)


_HALF_BAND = 0.01


def _nonprincipal_hyp(s_n, s_f, L, t, tol):
    # At s_n = 1/2 the third parameter vanishes together with one of the first
    # two.  The ratio of the two is (1 - 2 s_f)/2 exactly, so write
    # F(a1, b1; c1; xi) = 1 + (a1 b1 / c1) int_0^xi F(a1+1, b1+1; c1+1; eta) d eta
    # and integrate numerically in a band around the removable point.
    if abs(s_n - 0.5) >= _HALF_BAND:
        return _nonprincipal_hyp_raw(s_n, s_f, L, t, tol)
    sg = sigma(s_n, s_f)
    a1 = 0.5 - s_n - s_f + sg
    b1 = 0.5 - s_n - s_f - sg
    c1 = 1 - 2 * s_n
    ratio = 0.5 * (1 - 2 * s_f)
    xi = t / L
    fine = Tolerance(rel=1e-14, abs=1e-15)

    def integrand(eta):
        return np.array([hyp2f1(a1 + 1, b1 + 1, c1 + 1, float(e), tol) for e in np.atleast_1d(eta)])

    re = quad_singular(lambda e: integrand(e).real, 0.0, xi, fine).value
    im = quad_singular(lambda e: integrand(e).imag, 0.0, xi, fine).value
    F = 1.0 + ratio * (re + 1j * im)
    dF = ratio * hyp2f1(a1 + 1, b1 + 1, c1 + 1, xi, tol)
    p = 0.5 - s_n
    r = 0.5 - s_f
    base = L ** (s_f - 0.5) / (2 * s_n) * t ** p * (L - t) ** r
    return base * F, base * (F * (p / t - r / (L - t)) + dF / L)


def _log_series(alpha, beta, xi, cap=200_000):
    """F(alpha, beta; 1; xi), H(xi) and their xi-derivatives.

    ``H = sum_n (alpha)_n (beta)_n/(n!)^2 xi^n [psi(alpha+n) - psi(alpha)
    + psi(beta+n) - psi(beta) - 2 (psi(n+1) - psi(1))]`` is the companion
    series of the logarithmic solution.  Derivatives of the Pochhammer symbols
    with respect to their argument are carried along so that ``alpha = 0``
    needs no special treatment.
    """
    a_n, da_n, b_n, db_n = 1.0 + 0j, 0j, 1.0 + 0j, 0j
    harm = 0.0
    F, H, dF, dH = 1.0 + 0j, 0j, 0j, 0j
    pw = 1.0  # xi^n
    small = 0
    for n in range(cap):
        # advance to n + 1
        a_new = a_n * (alpha + n) / (n + 1)
        da_n = (da_n * (alpha + n) + a_n) / (n + 1)
        a_n = a_new
        b_new = b_n * (beta + n) / (n + 1)
        db_n = (db_n * (beta + n) + b_n) / (n + 1)
        b_n = b_new
        harm += 1.0 / (n + 1)
        c = a_n * b_n
        h = da_n * b_n + a_n * db_n - 2 * c * harm
        dF += (n + 1) * c * pw
        dH += (n + 1) * h * pw
        pw *= xi
        F += c * pw
        H += h * pw
        size = max(abs(c), abs(h)) * pw * (n + 2)
        if size <= 1e-17 * max(1.0, abs(F), abs(H), abs(dF), abs(dH)):
            small += 1
            if small >= 3:
                return F, H, dF, dH
        else:
            small = 0
    raise SeriesConvergenceError("logarithmic companion series did not converge")


def _nonprincipal_log(s_f, L, t):
    sg = sigma(0.0, s_f)
    alpha = 0.5 - s_f + sg
    beta = 0.5 - s_f - sg
    xi = t / L
    F, H, dF, dH = _log_series(alpha, beta, xi)
    C = L ** (s_f - 0.5)
    r = 0.5 - s_f
    g = t ** 0.5 * (L - t) ** r
    dg = g * (0.5 / t - r / (L - t))
    lg = math.log(1.0 / t)
    bracket = F * lg - H
    dbracket = dF / L * lg - F / t - dH / L
    return C * g * bracket, C * (dg * bracket + g * dbracket)


_LOG_XI_MAX = 0.97


def global_frame_q0(problem: BesselProblem, endpoint: str, tol: Tolerance = DEFAULT_TOL) -> SolutionFrame:
    """Hypergeometric frame of ``tau u = 0`` for ``q = 0`` at ``lambda = 0``.

    The principal member exists for every ``s >= 0``; the nonprincipal member
    only when the endpoint is limit circle.  For ``s = 0`` the nonprincipal
    member is the logarithmic solution
    ``L^{s_f-1/2} t^{1/2} (L-t)^{1/2-s_f} [F(alpha, beta; 1; t/L) ln(1/t) - H(t/L)]``
    whose series is summed directly; its validity stops at ``t = 0.97 L``.
    """
    if not problem.q.is_zero:
        raise ValueError("global hypergeometric frames require q = 0")
    if endpoint not in ("a", "b"):
        raise ValueError("endpoint must be 'a' or 'b'")
    s_n = problem.strength(endpoint)
    s_f = problem.strength("b" if endpoint == "a" else "a")
    L = problem.length
    sign_u = 1.0 if endpoint == "a" else -1.0
    dsign = 1.0 if endpoint == "a" else -1.0

    def wrap(kernel, sign):
        def ev(x):
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            ts = _distance(problem, endpoint, xs)
            if np.any(ts <= 0) or np.any(ts >= L):
                raise ValueError("x must lie strictly inside the interval")
            vals = np.empty(xs.shape, dtype=complex)
            ders = np.empty(xs.shape, dtype=complex)
            for i, t in enumerate(ts):
                v, d = kernel(float(t))
                vals[i] = sign * v
                ders[i] = sign * dsign * d
            v, d = _real_if_close(vals), _real_if_close(ders)
            if np.ndim(x) == 0:
                return (v[0] if np.ndim(v) else v), (d[0] if np.ndim(d) else d)
            return v, d
        return ev

    u = wrap(lambda t: _principal_hyp(s_n, s_f, L, t, tol), sign_u)
    u_hat = None
    hi_frac = 1.0
    if s_n < 1:
        if s_n == 0:
            u_hat = wrap(lambda t: _nonprincipal_log(s_f, L, t), 1.0)
            hi_frac = _LOG_XI_MAX
        else:
            u_hat = wrap(lambda t: _nonprincipal_hyp(s_n, s_f, L, t, tol), 1.0)
    if endpoint == "a":
        validity = (problem.a, problem.a + hi_frac * L if hi_frac < 1 else problem.b)
    else:
        validity = (problem.b - hi_frac * L if hi_frac < 1 else problem.a, problem.b)
    return SolutionFrame(endpoint, 0.0, s_n, validity, "hypergeometric", u, u_hat)


# ---------------------------------------------------------------------------
# Volterra / Nystrom frames
# ---------------------------------------------------------------------------
#
# Write u = t^nu w with t the distance to the endpoint and nu = 1/2 + s
# (principal) or 1/2 - s (nonprincipal).  Then w'' + (2 nu / t) w' = W w with
# W(t) = (s_f^2 - 1/4)/(L - t)^2 + q - lambda, and the solution with w(0) = 1,
# w analytic, satisfies
#     w(t)  = 1 + t^2 int_0^1 omega(sigma) (W w)(t sigma) d sigma,
#     w'(t) = t int_0^1 sigma^{2 nu} (W w)(t sigma) d sigma,
# with omega(sigma) = sigma (1 - sigma^e)/e, e = 2 nu - 1 (sigma ln(1/sigma)
# when e = 0).  Collocating w at Chebyshev-Lobatto nodes and integrating the
# polynomial interpolant exactly enough turns the equation into an N x N
# linear system.

_N_NODES = 32
_TS_STEP = 1.0 / 32
_TS_RANGE = 4.5


def _cheb_nodes(N):
    j = np.arange(N)
    tau = 0.5 * (1.0 - np.cos(np.pi * j / (N - 1)))
    w = (-1.0) ** j
    w[0] *= 0.5
    w[-1] *= 0.5
    return tau, w


def _bary_matrix(tau, bw, y):
    """Matrix ``M`` with ``M @ values = interpolant(y)``."""
    y = np.asarray(y, dtype=float).ravel()
    diff = y[:, None] - tau[None, :]
    # points within 1e-200 of a node are treated as hits (avoids overflow)
    exact = np.abs(diff) < 1e-200
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c = bw[None, :] / diff
        M = c / c.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    if np.any(rows):
        M[rows] = exact[rows].astype(float)
    return M


def _omega_times(e, log_sigma, jac_log):
    """``omega(sigma) * jacobian`` from logarithms, stable for all e > -2."""
    if e == 0.0:
        return np.exp(log_sigma + jac_log) * (-log_sigma)
    if e > 0:
        return np.exp(log_sigma + jac_log) * (-np.expm1(e * log_sigma)) / e
    return np.exp((1 + e) * log_sigma + jac_log) * np.expm1(-e * log_sigma) / e


@lru_cache(maxsize=64)
def _nystrom(e: float, N: int = _N_NODES):
    """Collocation matrices for exponent ``e = 2 nu - 1``.

    Returns ``tau, bw, K, Dn, to_cheb`` where ``(K g)_j = tau_j^2 int omega
    g(tau_j sigma)``, ``(Dn g)_j = int sigma^{1+e} g(tau_j sigma)`` and
    ``to_cheb`` maps node values to Chebyshev coefficients.
    """
    tau, bw = _cheb_nodes(N)
    # tanh-sinh abscissae r in (0, 1), then sigma = r^m so that the weight
    # sigma^{1+e} near zero is absorbed by the Jacobian when e < 0
    tt = np.arange(-_TS_RANGE, _TS_RANGE + 0.5 * _TS_STEP, _TS_STEP)
    y = 0.5 * np.pi * np.sinh(tt)
    log_r = -np.log1p(np.exp(-2 * y))
    one_minus_r = 1.0 / (1.0 + np.exp(2 * y))
    r = np.exp(log_r)
    wts = _TS_STEP * np.pi * np.cosh(tt) * r * one_minus_r
    m = 1.0 / (2.0 + e) if e < 0 else 1.0
    log_sigma = m * log_r
    jac_log = math.log(m) + (m - 1.0) * log_r
    sig = np.exp(log_sigma)
    om = _omega_times(e, log_sigma, jac_log) * wts
    pw = np.exp((1 + e) * log_sigma + jac_log) * wts
    K = np.empty((N, N))
    Dn = np.empty((N, N))
    for j in range(N):
        B = _bary_matrix(tau, bw, tau[j] * sig)
        K[j] = tau[j] ** 2 * (om @ B)
        Dn[j] = pw @ B
    V = np.polynomial.chebyshev.chebvander(2 * tau - 1, N - 1)
    to_cheb = np.linalg.inv(V)
    return tau, bw, K, Dn, to_cheb


def _tail(to_cheb, vals):
    c = np.abs(to_cheb @ vals.T) if vals.ndim > 1 else np.abs(to_cheb @ vals)
    top = np.max(c, axis=0)
    top = np.where(top == 0, 1.0, top)
    return np.max(c[-3:], axis=0) / top


def _weight_on_nodes(problem: BesselProblem, endpoint: str, lams, h, tau):
    t = h * tau
    L = problem.length
    s_f = problem.strength("b" if endpoint == "a" else "a")
    x = problem.a + t if endpoint == "a" else problem.b - t
    qv = problem.q(x)
    qv = np.broadcast_to(np.asarray(qv, dtype=float), t.shape)
    base = (s_f * s_f - 0.25) / (L - t) ** 2 + qv
    return base[None, :] - np.asarray(lams)[:, None]


def _solve_members(problem, endpoint, lams, h, N, want_hat=True):
    """Node values of the Volterra solutions for a batch of ``lams``."""
    s = problem.strength(endpoint)
    lams = np.atleast_1d(np.asarray(lams))
    dtype = complex if np.iscomplexobj(lams) else float
    out = {}
    tails = []

    def solve(e, rhs_const=True, extra=None):
        tau, bw, K, Dn, to_cheb = _nystrom(float(e), N)
        Wv = _weight_on_nodes(problem, endpoint, lams, h, tau).astype(dtype)
        A = np.eye(N)[None, :, :] - h * h * K[None, :, :] * Wv[:, None, :]
        return tau, K, Dn, to_cheb, Wv, A

    tau, K, Dn, to_cheb, Wv, A = solve(2 * s)
    w = np.linalg.solve(A, np.ones((len(lams), N, 1), dtype=dtype))[..., 0]
    g = Wv * w
    dn = g @ Dn.T
    dw = h * tau[None, :] * dn
    out["u"] = (2 * s, w, dw)
    tails.append(_tail(to_cheb, w))
    if want_hat and s < 1:
        if s == 0:
            # t^{1/2} (ln(1/t) w + z) with z'' + z'/t = W z + 2 w'/t, z(0) = 0
            rhs = h * h * (2 * dn) @ K.T
            z = np.linalg.solve(A, rhs[..., None])[..., 0]
            dz = h * tau[None, :] * ((Wv * z + 2 * dn) @ Dn.T)
            out["hat_log"] = (0.0, w, dw, z, dz)
            tails.append(_tail(to_cheb, z))
        else:
            tau2, K2, Dn2, to_cheb2, Wv2, A2 = solve(-2 * s)
            wh = np.linalg.solve(A2, np.ones((len(lams), N, 1), dtype=dtype))[..., 0]
            dwh = h * tau2[None, :] * ((Wv2 * wh) @ Dn2.T)
            out["hat"] = (-2 * s, wh, dwh)
            tails.append(_tail(to_cheb2, wh))
    tail = np.max(np.vstack(tails), axis=0)
    kappa = h * h * np.max(np.abs(K[None] * Wv[:, None, :]).sum(axis=2), axis=1)
    return out, tail, kappa


def _members_at(out, s, endpoint, h, N, t, idx=0):
    """Evaluate (U, U', Uh, Uh') at distances ``t`` (t-derivatives)."""
    tau, bw = _cheb_nodes(N)
    B = _bary_matrix(tau, bw, np.asarray(t, dtype=float) / h)
    t = np.asarray(t, dtype=float).ravel()
    _, w, dw = out["u"]
    wv, dwv = B @ w[idx], B @ dw[idx]
    nu = 0.5 + s
    U = t ** nu * wv
    dU = nu * t ** (nu - 1) * wv + t ** nu * dwv
    res = [U, dU]
    if "hat" in out:
        _, wh, dwh = out["hat"]
        wv, dwv = B @ wh[idx], B @ dwh[idx]
        m = 0.5 - s
        res += [t ** m * wv / (2 * s), (m * t ** (m - 1) * wv + t ** m * dwv) / (2 * s)]
    elif "hat_log" in out:
        _, w, dw, z, dz = out["hat_log"]
        wv, dwv, zv, dzv = B @ w[idx], B @ dw[idx], B @ z[idx], B @ dz[idx]
        lg = np.log(1.0 / t)
        y = lg * wv + zv
        dy = -wv / t + lg * dwv + dzv
        st = np.sqrt(t)
        res += [st * y, 0.5 / st * y + st * dy]
    return res


def _initial_width(problem: BesselProblem, lam_max: float) -> float:
    L = problem.length
    h = L / 4
    if lam_max > 0:
        h = min(h, 8.0 / math.sqrt(lam_max))
    return h


_TAIL_TOL = 1e-13


def _resolve_width(problem, endpoint, lams, h=None, N=_N_NODES, want_hat=True):
    L = problem.length
    lam_max = float(np.max(np.abs(np.atleast_1d(lams)))) if np.size(lams) else 0.0
    h = _initial_width(problem, lam_max) if h is None else h
    while True:
        out, tail, kappa = _solve_members(problem, endpoint, lams, h, N, want_hat)
        if np.all(tail <= _TAIL_TOL) and np.all(np.isfinite(tail)):
            return h, out, tail, kappa
        h *= 0.5
        if h < L / 64:
            raise FrameConstructionError(
                f"Volterra frame at {endpoint} not resolved on any interval wider than (b-a)/64 "
                f"(Chebyshev tail {float(np.max(tail)):.2e})")


def volterra_frame(problem: BesselProblem, endpoint: str, lam=0.0, tol: Tolerance = DEFAULT_TOL,
                   width: Optional[float] = None) -> SolutionFrame:
    """Frame at ``lam`` for a bounded potential, from the regularized Volterra equation.

    The default validity interval is the quarter of ``(a, b)`` next to the
    endpoint, shortened for large ``|lam|`` and halved until the Chebyshev
    coefficients of the collocated solution are resolved.  The discrete
    Volterra system is solved directly, which gives the fixed point of the
    successive approximation in one step.
    """
    if endpoint not in ("a", "b"):
        raise ValueError("endpoint must be 'a' or 'b'")
    s = problem.strength(endpoint)
    lam_arr = np.array([lam])
    h, out, tail, kappa = _resolve_width(problem, endpoint, lam_arr, width)
    N = _N_NODES
    has_hat = s < 1
    sign_u = 1.0 if endpoint == "a" else -1.0
    dsign = 1.0 if endpoint == "a" else -1.0

    def make(k, sign):
        def ev(x):
            t = _distance(problem, endpoint, x)
            if np.any(t <= 0) or np.any(t > h * (1 + 1e-12)):
                raise ValueError("x outside the frame's validity interval")
            vals = _members_at(out, s, endpoint, h, N, t)
            v = sign * vals[2 * k]
            d = sign * dsign * vals[2 * k + 1]
            if np.ndim(x) == 0:
                return v[0], d[0]
            return v, d
        return ev

    if endpoint == "a":
        validity = (problem.a, problem.a + h)
    else:
        validity = (problem.b - h, problem.b)
    info = {"width": h, "chebyshev_tail": float(tail[0]), "contraction": float(kappa[0])}
    return SolutionFrame(endpoint, lam, s, validity, "volterra", make(0, sign_u),
                         make(1, 1.0) if has_hat else None, info)


def frame_edge_states(problem: BesselProblem, endpoint: str, lams, width: Optional[float] = None,
                      want_hat: bool = True):
    """Batched frame values at the interior edge of a common validity interval.

    Returns ``(x_edge, U, dU, Uh, dUh)`` in the x variable, each array having
    one entry per spectral parameter (``Uh`` entries are ``None`` at a limit
    point endpoint or when ``want_hat`` is false).
    """
    lams = np.atleast_1d(np.asarray(lams))
    s = problem.strength(endpoint)
    h, out, _, _ = _resolve_width(problem, endpoint, lams, width, want_hat=want_hat)
    N = _N_NODES
    tau, bw = _cheb_nodes(N)
    # node N-1 is tau = 1, i.e. the frame edge: read off directly
    nu = 0.5 + s
    _, w, dw = out["u"]
    U = h ** nu * w[:, -1]
    dU = nu * h ** (nu - 1) * w[:, -1] + h ** nu * dw[:, -1]
    Uh = dUh = None
    if "hat" in out:
        _, wh, dwh = out["hat"]
        m = 0.5 - s
        Uh = h ** m * wh[:, -1] / (2 * s)
        dUh = (m * h ** (m - 1) * wh[:, -1] + h ** m * dwh[:, -1]) / (2 * s)
    elif "hat_log" in out:
        _, w, dw, z, dz = out["hat_log"]
        lg = math.log(1.0 / h)
        y = lg * w[:, -1] + z[:, -1]
        dy = -w[:, -1] / h + lg * dw[:, -1] + dz[:, -1]
        Uh = math.sqrt(h) * y
        dUh = 0.5 / math.sqrt(h) * y + math.sqrt(h) * dy
    if endpoint == "a":
        return problem.a + h, U, dU, Uh, dUh
    return problem.b - h, -U, dU, Uh, (None if dUh is None else -dUh)


# ---------------------------------------------------------------------------
# transport and diagnostics
# ---------------------------------------------------------------------------


def transport_frame(frame: SolutionFrame, problem: BesselProblem, lam, x_target,
                    member: str = "u", tol: Tolerance = DEFAULT_TOL):
    """Value and derivative of a frame member at an interior ``x_target``.

    Inside the validity interval the frame is evaluated directly; otherwise
    the member is integrated from the interior edge of that interval.
    ``member`` is ``"u"``, ``"u_hat"`` or ``"both"`` (then a pair of pairs is
    returned).
    """
    if not problem.a < x_target < problem.b:
        raise ValueError("x_target must lie strictly inside (a, b)")
    if member not in ("u", "u_hat", "both"):
        raise ValueError("member must be 'u', 'u_hat' or 'both'")
    evs = {"u": [frame.u], "u_hat": [frame.u_hat], "both": [frame.u, frame.u_hat]}[member]
    if frame.contains(x_target):
        res = [ev(x_target) for ev in evs]
    else:
        x0 = frame.edge
        starts = [ev(x0) for ev in evs]
        y0 = (np.array([p[0] for p in starts]), np.array([p[1] for p in starts]))
        sol = integrate_ode(problem.coefficient(lam), x0, y0, x_target, tol)
        res = [(sol.u[i], sol.du[i]) for i in range(len(evs))]
    return res[0] if member != "both" else (res[0], res[1])


def ode_residual(problem: BesselProblem, lam, evaluator: Evaluator, xs, step: Optional[float] = None) -> float:
    """Relative residual of ``(tau - lam) u`` at the points ``xs``.

    ``u''`` is obtained from the derivative evaluator by a five-point central
    difference; the residual is scaled by the largest of ``|u''|``,
    ``|(V - lam) u|`` and ``|u|/(b-a)^2`` over the points.
    """
    xs = np.asarray(xs, dtype=float)
    if step is None:
        step = 1e-3 * problem.length
    vals = []
    d2 = []
    for x in xs:
        hh = min(step, 0.01 * (x - problem.a), 0.01 * (problem.b - x))
        ds = [evaluator(x + k * hh)[1] for k in (-2, -1, 1, 2)]
        d2.append((ds[0] - 8 * ds[1] + 8 * ds[2] - ds[3]) / (12 * hh))
        vals.append(evaluator(x)[0])
    vals = np.array(vals)
    d2 = np.array(d2)
    pot = np.array([problem.potential(x) for x in xs]) - lam
    res = np.abs(d2 - pot * vals)
    # |u| / L^2 keeps the scale meaningful when both terms vanish (u linear, V = lam)
    scale = max(np.max(np.abs(d2)), np.max(np.abs(pot * vals)),
                np.max(np.abs(vals)) / problem.length ** 2, 1e-300)
    return float(np.max(res) / scale)


# ---------------------------------------------------------------------------
# Heun reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeunReduction:
    """Confluent Heun parameters of ``tau u = z u`` (q = 0) and normal-form coefficients.

    The normal form is ``v'' + (A + B/xi + C/(xi-1) + D/xi^2 + E/(xi-1)^2) v = 0``
    in ``xi = (x-a)/(b-a)``.
    """

    gamma: complex
    delta: complex
    epsilon: complex
    mu: complex
    nu: complex
    A: complex
    B: complex
    C: complex
    D: complex
    E: complex
    targets: tuple

    def identification_error(self) -> float:
        got = (self.A, self.B, self.C, self.D, self.E)
        return max(abs(g - t) for g, t in zip(got, self.targets))


def heun_reduction(problem: BesselProblem, z) -> HeunReduction:
    """Heun parameters for ``(tau - z) u = 0`` and the resulting normal-form coefficients.

    ``A = -eps^2/4``, ``B = [2 mu + gamma (delta - eps)]/2``,
    ``C = [2 nu - (eps + gamma) delta - 2 mu]/2``, ``D = (2 - gamma) gamma/4``,
    ``E = (2 - delta) delta/4``.  The targets are ``A = (b-a)^2 z``,
    ``B = C = 0``, ``D = 1/4 - s_a^2`` and ``E = 1/4 - s_b^2``; the factor
    ``(b-a)^2`` comes from rescaling ``x`` to ``xi``.
    """
    s_a, s_b = problem.s_a, problem.s_b
    L = problem.length
    rz = cmath.sqrt(complex(z))
    k = 2j * (problem.a - problem.b) * rz
    gamma = 1 + 2 * s_a
    delta = 1 - 2 * s_b
    eps = k
    mu = 0.5 * (1 + 2 * s_a) * (k + 2 * s_b - 1)
    nu = k * (1 + s_a - s_b)
    A = -eps * eps / 4
    B = (2 * mu + gamma * (delta - eps)) / 2
    C = (2 * nu - (eps + gamma) * delta - 2 * mu) / 2
    D = (2 - gamma) * gamma / 4
    E = (2 - delta) * delta / 4
    targets = (L * L * complex(z), 0j, 0j, 0.25 - s_a * s_a + 0j, 0.25 - s_b * s_b + 0j)
    return HeunReduction(complex(gamma), complex(delta), eps, mu, nu, A, B, C, D, E, targets)


# ---------------------------------------------------------------------------
# solutions on the whole interval
# ---------------------------------------------------------------------------


class Solution:
    """Solution of ``(tau - lam) u = 0`` evaluable anywhere in ``(a, b)``.

    The solution is ``c_hat * u_hat + c_u * u`` in terms of the frame at
    ``start``.  Near ``start`` the frame is evaluated directly, the middle
    part comes from dense ODE output between the two frame edges, and near
    the opposite endpoint the solution is re-expanded in that endpoint's
    frame (coefficients from Wronskians at the frame edge).  At a limit point
    opposite endpoint only multiples of the principal member can be
    represented there.
    """

    def __init__(self, problem: BesselProblem, lam, start: str, c_hat, c_u,
                 frames: Optional[dict] = None, tol: Tolerance = DEFAULT_TOL):
        if start not in ("a", "b"):
            raise ValueError("start must be 'a' or 'b'")
        self.problem = problem
        self.lam = lam
        self.start = start
        self.other = "b" if start == "a" else "a"
        self.tol = tol
        frames = dict(frames or {})
        for e in ("a", "b"):
            if e not in frames:
                frames[e] = volterra_frame(problem, e, lam, tol)
        self.frames = frames
        self.c_hat = c_hat
        self.c_u = c_u
        if c_hat != 0 and not frames[start].has_u_hat:
            raise FrameUndefinedError("limit point endpoint has no nonprincipal member")
        self._ode = None
        self._far = None

    def _near(self, x):
        f = self.frames[self.start]
        v, d = f.u(x)
        v, d = self.c_u * v, self.c_u * d
        if self.c_hat != 0:
            vh, dh = f.u_hat(x)
            v, d = v + self.c_hat * vh, d + self.c_hat * dh
        return v, d

    def _build(self):
        f0 = self.frames[self.start]
        f1 = self.frames[self.other]
        x0, x1 = f0.edge, f1.edge
        y0 = self._near(x0)
        if (x1 - x0) * (1 if self.start == "a" else -1) > 0:
            self._ode = integrate_ode(self.problem.coefficient(self.lam), x0, y0, x1, self.tol, dense=True)
            g1 = (self._ode.u, self._ode.du)
        else:
            g1 = self._near(x1)
        pv, pd = f1.u(x1)
        if f1.has_u_hat:
            hv, hd = f1.u_hat(x1)
            alpha = wronskian(g1[0], g1[1], pv, pd)  # coefficient of u_hat
            beta = wronskian(hv, hd, g1[0], g1[1])  # coefficient of u
            self._far = (alpha, beta, 0.0)
        else:
            beta = (g1[0] * pv + g1[1] * pd) / (pv * pv + pd * pd)
            resid = abs(wronskian(g1[0], g1[1], pv, pd)) / max(abs(g1[0]) + abs(g1[1]), 1e-300)
            self._far = (0.0, beta, resid)

    @property
    def far_coefficients(self):
        """``(c_hat, c_u, residual)`` in the opposite endpoint's frame."""
        if self._far is None:
            self._build()
        return self._far

    def _eval1(self, x):
        p = self.problem
        if not p.a < x < p.b:
            raise ValueError("x must lie strictly inside (a, b)")
        if self.frames[self.start].contains(x):
            return self._near(x)
        if self._far is None:
            self._build()
        f1 = self.frames[self.other]
        if f1.contains(x):
            alpha, beta, resid = self._far
            if resid > 1e-6:
                raise FrameUndefinedError("solution is not recessive at the limit point endpoint")
            v, d = f1.u(x)
            v, d = beta * v, beta * d
            if alpha != 0:
                vh, dh = f1.u_hat(x)
                v, d = v + alpha * vh, d + alpha * dh
            return v, d
        return self._ode(x)

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self._eval1(float(x))
        pairs = [self._eval1(float(v)) for v in np.ravel(x)]
        return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
