"""Singular first-order expressions, smooth step functions and decay probes.

The expressions are

* ``alpha_s = d/dx - (s + 1/2)/(x - a)`` with formal adjoint
  ``alpha_s^+ = -d/dx - (s + 1/2)/(x - a)``,
* ``beta_s = d/dx + (s + 1/2)/(b - x)`` with ``beta_s^+ = -d/dx + (s + 1/2)/(b - x)``,
* the two-point expression ``d/dx + phi`` where ``phi`` blends the two
  singular coefficients with smooth cut-offs near each endpoint.

``alpha^+ alpha`` reproduces the inverse-square operator exactly; in the
two-point case the blending leaves a bounded remainder ``qtilde``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import (
    ModelMismatchError,
    Tolerance,
    limit_extrapolate,
    quad_singular,
)
from .problem import BesselProblem

__all__ = [
    "SingularityError",
    "FirstOrderExpr",
    "apply",
    "smooth_step",
    "smooth_step_derivative",
    "phi",
    "phi_derivative",
    "qtilde",
    "factorization_residual",
    "DecayProbe",
    "decay_probe",
    "WitnessReport",
    "witness_check",
]


class SingularityError(ValueError):
    """Evaluation requested at a singular endpoint."""


_KINDS = ("alpha_at_a", "beta_at_b", "two_point")


@dataclass(frozen=True)
class FirstOrderExpr:
    kind: str
    s_a: float = 0.0
    s_b: float = 0.0
    a: float = 0.0
    b: float = 1.0
    step_width: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if not self.a < self.b:
            raise ValueError("need a < b")
        if self.kind == "two_point":
            eps = self.step_width if self.step_width is not None else (self.b - self.a) / 8
            if not 0 < eps < (self.b - self.a) / 2:
                raise ValueError("step width must lie in (0, (b-a)/2)")
            object.__setattr__(self, "step_width", float(eps))

    @property
    def s(self) -> float:
        """Strength of the single-endpoint expressions."""
        return self.s_b if self.kind == "beta_at_b" else self.s_a

    @classmethod
    def for_problem(cls, problem: BesselProblem, step_width: Optional[float] = None):
        return cls("two_point", problem.s_a, problem.s_b, problem.a, problem.b, step_width)


# ---------------------------------------------------------------------------
# step functions
# ---------------------------------------------------------------------------


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _S(t):
    b0 = _bump(t)
    b1 = _bump(1.0 - np.asarray(t, dtype=float))
    return b1 / (b0 + b1)


def _dS(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    b0 = np.exp(-1.0 / ti)
    b1 = np.exp(-1.0 / (1.0 - ti))
    out[inside] = -b0 * b1 * (1.0 / ti ** 2 + 1.0 / (1.0 - ti) ** 2) / (b0 + b1) ** 2
    return out


def _scalar_or_array(x, value):
    return float(value) if np.ndim(x) == 0 else value


def smooth_step(x, edge: str, eps: float, a: float = 0.0, b: float = 1.0):
    """C-infinity cut-off equal to 1 within ``eps`` of the chosen endpoint and 0 beyond ``2 eps``."""
    if not 0 < eps < (b - a) / 2:
        raise ValueError("step width must lie in (0, (b-a)/2)")
    xa = np.asarray(x, dtype=float)
    if edge == "left":
        val = _S((xa - (a + eps)) / eps)
    elif edge == "right":
        val = _S(((b - eps) - xa) / eps)
    else:
        raise ValueError("edge must be 'left' or 'right'")
    return _scalar_or_array(x, val)


def smooth_step_derivative(x, edge: str, eps: float, a: float = 0.0, b: float = 1.0):
    xa = np.asarray(x, dtype=float)
    if edge == "left":
        val = _dS((xa - (a + eps)) / eps) / eps
    elif edge == "right":
        val = -_dS(((b - eps) - xa) / eps) / eps
    else:
        raise ValueError("edge must be 'left' or 'right'")
    return _scalar_or_array(x, val)


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------


def _check_interior(expr: FirstOrderExpr, x):
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= expr.a) or np.any(xa >= expr.b):
        raise SingularityError("first-order expressions are singular at the endpoints")


def phi(expr: FirstOrderExpr, x):
    """Coefficient ``phi`` of the two-point expression ``d/dx + phi``."""
    _check_interior(expr, x)
    a, b, eps = expr.a, expr.b, expr.step_width
    ca, cb = expr.s_a + 0.5, expr.s_b + 0.5
    xa = np.asarray(x, dtype=float)
    val = (-ca / (xa - a) * smooth_step(xa, "left", eps, a, b)
           + cb / (b - xa) * smooth_step(xa, "right", eps, a, b))
    return _scalar_or_array(x, val)


def phi_derivative(expr: FirstOrderExpr, x):
    _check_interior(expr, x)
    a, b, eps = expr.a, expr.b, expr.step_width
    ca, cb = expr.s_a + 0.5, expr.s_b + 0.5
    xa = np.asarray(x, dtype=float)
    chi_a = smooth_step(xa, "left", eps, a, b)
    chi_b = smooth_step(xa, "right", eps, a, b)
    dchi_a = smooth_step_derivative(xa, "left", eps, a, b)
    dchi_b = smooth_step_derivative(xa, "right", eps, a, b)
    val = (ca / (xa - a) ** 2 * chi_a - ca / (xa - a) * dchi_a
           + cb / (b - xa) ** 2 * chi_b + cb / (b - xa) * dchi_b)
    return _scalar_or_array(x, val)


def _coefficient(expr: FirstOrderExpr, x):
    """Zeroth-order coefficient c with expression = d/dx + c."""
    if expr.kind == "alpha_at_a":
        return -(expr.s_a + 0.5) / (np.asarray(x, dtype=float) - expr.a)
    if expr.kind == "beta_at_b":
        return (expr.s_b + 0.5) / (expr.b - np.asarray(x, dtype=float))
    return phi(expr, x)


def _coefficient_derivative(expr: FirstOrderExpr, x):
    if expr.kind == "alpha_at_a":
        return (expr.s_a + 0.5) / (np.asarray(x, dtype=float) - expr.a) ** 2
    if expr.kind == "beta_at_b":
        return (expr.s_b + 0.5) / (expr.b - np.asarray(x, dtype=float)) ** 2
    return phi_derivative(expr, x)


def apply(expr: FirstOrderExpr, f_value, f_derivative, x, adjoint: bool = False):
    """Apply the expression (or its formal adjoint) to ``f`` at ``x``.

    All first-order expressions here have the shape ``D + c(x)`` with adjoint
    ``-D + c(x)``.
    """
    _check_interior(expr, x)
    c = _coefficient(expr, x)
    if adjoint:
        return -np.asarray(f_derivative) + c * np.asarray(f_value)
    return np.asarray(f_derivative) + c * np.asarray(f_value)


def qtilde(expr: FirstOrderExpr, x):
    """Bounded remainder ``phi^2 - phi' - (s_a^2-1/4)/(x-a)^2 - (s_b^2-1/4)/(b-x)^2``.

    The inverse-square terms cancel algebraically wherever a cut-off equals
    one, so the expanded form below is evaluated instead of the difference.
    """
    if expr.kind != "two_point":
        raise ValueError("qtilde is defined for the two-point expression")
    _check_interior(expr, x)
    a, b, eps = expr.a, expr.b, expr.step_width
    ca, cb = expr.s_a + 0.5, expr.s_b + 0.5
    xa = np.asarray(x, dtype=float)
    da, db = xa - a, b - xa
    chi_a = smooth_step(xa, "left", eps, a, b)
    chi_b = smooth_step(xa, "right", eps, a, b)
    dchi_a = smooth_step_derivative(xa, "left", eps, a, b)
    dchi_b = smooth_step_derivative(xa, "right", eps, a, b)
    # dividing twice keeps 0 / d^2 at zero when d^2 underflows
    val = ((chi_a - 1) * (ca * ca * (chi_a + 1) - ca) / da / da
           + (chi_b - 1) * (cb * cb * (chi_b + 1) - cb) / db / db
           - 2 * ca * cb * chi_a * chi_b / (da * db)
           + ca * dchi_a / da - cb * dchi_b / db)
    return _scalar_or_array(x, val)


def factorization_residual(target, f: Callable, grid, q: Optional[Callable] = None) -> float:
    """Largest relative mismatch between the second-order expression and its factorization.

    ``f(x)`` must return ``(f, f', f'')`` with analytic derivatives.  For the
    single-endpoint expressions the comparison is ``omega_s f`` versus
    ``alpha_s^+ (alpha_s f)``; for a :class:`BesselProblem` (or a two-point
    expression) it is ``tau f`` versus ``alpha^+ (alpha f) + (q - qtilde) f``.
    The residual at each point is scaled by ``1 + |tau f|``.
    """
    if isinstance(target, BesselProblem):
        expr = FirstOrderExpr.for_problem(target)
        q = target.q
    else:
        expr = target
    x = np.asarray(grid, dtype=float)
    _check_interior(expr, x)
    fv, df, d2f = (np.asarray(v) for v in f(x))
    c = _coefficient(expr, x)
    dc = _coefficient_derivative(expr, x)
    g = df + c * fv
    dg = d2f + dc * fv + c * df
    fact = -dg + c * g
    if expr.kind == "alpha_at_a":
        direct = -d2f + (expr.s_a ** 2 - 0.25) / (x - expr.a) ** 2 * fv
    elif expr.kind == "beta_at_b":
        direct = -d2f + (expr.s_b ** 2 - 0.25) / (expr.b - x) ** 2 * fv
    else:
        qv = np.zeros_like(x) if q is None else np.asarray(q(x), dtype=float) * np.ones_like(x)
        direct = (-d2f + ((expr.s_a ** 2 - 0.25) / (x - expr.a) ** 2
                          + (expr.s_b ** 2 - 0.25) / (expr.b - x) ** 2 + qv) * fv)
        fact = fact + (qv - qtilde(expr, x)) * fv
    return float(np.max(np.abs(direct - fact) / (1.0 + np.abs(direct))))


# ---------------------------------------------------------------------------
# decay probes
# ---------------------------------------------------------------------------

_MODES = ("sqrt", "sqrt_log", "right_sqrt")


@dataclass(frozen=True)
class DecayProbe:
    limit: float
    verdict: str
    distances: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)


def decay_probe(
    f: Callable[[float], float],
    endpoint: str = "a",
    mode: str = "sqrt",
    R: Optional[float] = None,
    interval=(0.0, 1.0),
    vanish_rel: float = 1e-6,
) -> DecayProbe:
    """Estimate ``lim f/w`` at an endpoint for the weight ``w`` of ``mode``.

    ``f`` is sampled as a function of the distance ``t > 0`` to the endpoint,
    which keeps tiny distances exact; ``endpoint`` therefore only names the
    end being probed (``right_sqrt`` always refers to ``b``).  Weights: ``sqrt`` and ``right_sqrt``
    use ``t**(1/2)``; ``sqrt_log`` uses ``(t log(R/t))**(1/2)`` with ``R`` larger
    than the interval length.

    The verdict is ``vanishes`` when the limit is below ``vanish_rel`` times
    the ratio ``|f/w|`` at mid-interval, ``diverges`` when the ratios grow
    monotonically without an extrapolable limit, and ``finite_nonzero``
    otherwise.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    a, b = interval
    L = b - a
    if mode == "sqrt_log":
        R = 2.0 * L if R is None else float(R)
        if R <= L:
            raise ValueError("R must exceed the interval length")
        # ladder on which 1/log(R/t) is geometric, so log-type decay becomes algebraic
        t0 = L / 16
        ell0 = math.log(R / t0)
        ts = np.array([R * math.exp(-ell0 * 2.0 ** k) for k in range(8)])
        ts = ts[ts > 1e-290]
        weight = lambda t: math.sqrt(t * math.log(R / t))
        abscissa = 1.0 / np.log(R / ts)
    else:
        ts = L / 16 * 4.0 ** -np.arange(13)
        weight = math.sqrt
        abscissa = ts
    ratios = np.array([f(t) / weight(t) for t in ts])
    mid = L / 2
    scale = abs(f(mid) / weight(mid)) or 1.0
    mags = np.abs(ratios)
    tail = mags[len(mags) // 2:]
    growing = bool(np.all(np.diff(tail) > 0)) and tail[-1] > 1.5 * tail[0]
    try:
        est = limit_extrapolate(abscissa, ratios, "algebraic", Tolerance(rel=1e-3, abs=1e-8 * scale))
        limit = float(np.real(est.value))
        if growing and abs(limit) < tail[-1]:
            # a sequence that keeps growing cannot converge below its last value
            raise ModelMismatchError("growing ratios", float(tail[-1]))
    except ModelMismatchError:
        if growing:
            return DecayProbe(math.inf, "diverges", ts, ratios)
        raise
    if abs(limit) < vanish_rel * scale:
        return DecayProbe(limit, "vanishes", ts, ratios)
    return DecayProbe(limit, "finite_nonzero", ts, ratios)


# ---------------------------------------------------------------------------
# witness functions for the first-order domain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessReport:
    s: float
    alpha_norm2: float
    alpha_norms: tuple
    derivative_norms: tuple
    alpha_in_l2: bool
    derivative_diverges: bool


def witness_check(s: float, interval=(0.0, 1.0), eps: Optional[float] = None,
                  refinements: int = 3, tol: Tolerance = Tolerance(rel=1e-9, abs=1e-12)) -> WitnessReport:
    """Check ``f = (x-a)^{s+1/2} chi`` for ``s`` in ``(-1, 0)``.

    ``alpha_s f`` is square integrable while ``f'`` is not.  Both integrals are
    evaluated on ``(a + delta_j, b)`` for a shrinking sequence ``delta_j``;
    the derivative integral must grow by more than ten times at every
    refinement while the ``alpha_s f`` integral stays put.
    """
    if not -1.0 < s < 0.0:
        raise ValueError("witness functions are defined for s in (-1, 0)")
    a, b = interval
    L = b - a
    eps = L / 8 if eps is None else eps
    p = s + 0.5

    def f_and_df(t):
        chi = smooth_step(a + t, "left", eps, a, b)
        dchi = smooth_step_derivative(a + t, "left", eps, a, b)
        return t ** p * chi, p * t ** (p - 1) * chi + t ** p * dchi

    def alpha_sq(t):
        # alpha_s f = t^p chi' exactly; forming f' - p f / t would cancel catastrophically
        return (t ** p * smooth_step_derivative(a + t, "left", eps, a, b)) ** 2

    def deriv_sq(t):
        return f_and_df(t)[1] ** 2

    # each refinement shrinks the cut-off so the divergent part grows 100-fold
    rho = 10.0 ** (-1.0 / abs(s))
    deltas = [eps * rho ** j for j in range(1, refinements + 2)]
    alpha_vals = []
    deriv_vals = []
    for d in deltas:
        if d <= 1e-300:
            break
        alpha_vals.append(float(quad_singular(alpha_sq, d, 2 * eps, tol).value))
        # the derivative integrand is smooth on [d, 2 eps] away from t = 0;
        # split geometrically so each piece is well resolved
        edges = np.geomspace(d, 2 * eps, 8)
        deriv_vals.append(float(sum(quad_singular(deriv_sq, lo, hi, tol).value
                                    for lo, hi in zip(edges[:-1], edges[1:]))))
    full = quad_singular(alpha_sq, 0.0, 2 * eps, tol)
    alpha_ok = math.isfinite(full.value) and all(
        abs(v - full.value) <= 1e-6 * max(1.0, abs(full.value)) for v in alpha_vals)
    growth = [deriv_vals[i + 1] / deriv_vals[i] for i in range(len(deriv_vals) - 1)]
    diverges = len(growth) >= 2 and all(g > 10.0 for g in growth)
    return WitnessReport(s, float(full.value), tuple(alpha_vals), tuple(deriv_vals), alpha_ok, diverges)
