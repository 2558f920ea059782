"""Endpoint classification and self-adjoint extensions.

Boundary conditions are phrased in the generalized boundary values
``(g~, g~')`` at each limit circle endpoint:

* separated: ``g~(a) cos(alpha) + g~'(a) sin(alpha) = 0`` and
  ``g~(b) cos(beta) + g~'(b) sin(beta) = 0``;
* coupled: ``(g~(b), g~'(b))^T = e^{i phi} R (g~(a), g~'(a))^T`` with
  ``det R = 1``.

The Friedrichs extension takes ``alpha = beta = 0``.  The Krein-von Neumann
extension is the one whose domain contains the kernel of the maximal
operator; it is computed from the ``lambda = 0`` frames.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .firstorder import FirstOrderExpr, phi as _phi, qtilde as _qtilde
from .numerics import DEFAULT_TOL, QuadratureError, Tolerance, integrate_ode, quad_singular
from .problem import BesselProblem
from .solutions import sigma, volterra_frame, wronskian
from .specialfn import EULER_GAMMA, digamma, gamma_fn, rgamma, trigamma

__all__ = [
    "LC",
    "LP",
    "ProblemClassification",
    "ExtensionSpec",
    "KreinData",
    "PositivityResult",
    "KreinUnavailableError",
    "FormDomainError",
    "classify",
    "friedrichs_spec",
    "positivity_lower_bound",
    "krein_spec",
    "krein_closed_form_q0",
    "krein_cot_q0",
    "krein_matrix_numeric",
    "quadratic_form",
    "comparison_function",
]

LC = "LC"
LP = "LP"


class KreinUnavailableError(RuntimeError):
    """The minimal operator is not known to be strictly positive."""


class FormDomainError(ValueError):
    """The function does not belong to the form domain (divergent form)."""


@dataclass(frozen=True)
class ProblemClassification:
    at_a: str
    at_b: str
    deficiency: int

    def is_lc(self, endpoint: str) -> bool:
        return (self.at_a if endpoint == "a" else self.at_b) == LC


def classify(problem: BesselProblem) -> ProblemClassification:
    """Limit circle iff ``s < 1``; the deficiency index counts limit circle endpoints."""
    at_a = LC if problem.s_a < 1 else LP
    at_b = LC if problem.s_b < 1 else LP
    return ProblemClassification(at_a, at_b, (at_a == LC) + (at_b == LC))


# ---------------------------------------------------------------------------
# extension specifications
# ---------------------------------------------------------------------------

_KINDS = ("separated", "coupled", "friedrichs", "krein", "trivial")


@dataclass(frozen=True)
class ExtensionSpec:
    """One self-adjoint extension.

    ``kind`` is ``separated`` (angles ``alpha``/``beta`` in ``[0, pi)``, ``None``
    at limit point endpoints), ``coupled`` (phase ``phi`` and real ``R`` with
    determinant one), ``trivial`` (both endpoints limit point, no
    conditions), or one of the named extensions ``friedrichs``/``krein``
    that :meth:`resolve` turns into a concrete condition.
    """

    kind: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    phi: float = 0.0
    R: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        for ang in (self.alpha, self.beta):
            if ang is not None and not 0.0 <= ang < math.pi:
                raise ValueError("separated angles must lie in [0, pi)")
        if self.kind == "coupled":
            if self.R is None:
                raise ValueError("coupled extension needs a matrix R")
            R = np.array(self.R, dtype=float)
            if R.shape != (2, 2):
                raise ValueError("R must be 2 x 2")
            if abs(np.linalg.det(R) - 1.0) > 1e-8:
                raise ValueError("R must have determinant one")
            object.__setattr__(self, "R", tuple(tuple(float(v) for v in row) for row in R))
            if not 0.0 <= self.phi < 2 * math.pi:
                raise ValueError("phase must lie in [0, 2 pi)")

    @classmethod
    def separated(cls, alpha=None, beta=None):
        return cls("separated", alpha=alpha, beta=beta)

    @classmethod
    def coupled(cls, phi, R):
        return cls("coupled", phi=float(phi) % (2 * math.pi), R=R)

    @classmethod
    def friedrichs(cls):
        return cls("friedrichs")

    @classmethod
    def krein(cls):
        return cls("krein")

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.R, dtype=float)

    def check(self, problem: BesselProblem) -> None:
        """Raise ``ValueError`` if the conditions do not fit the endpoint classification."""
        c = classify(problem)
        if self.kind == "coupled" and c.deficiency != 2:
            raise ValueError("coupled conditions need both endpoints limit circle")
        if self.kind == "separated":
            for ep, ang in (("a", self.alpha), ("b", self.beta)):
                if c.is_lc(ep) and ang is None:
                    raise ValueError(f"separated conditions need an angle at limit circle endpoint {ep}")
                if not c.is_lc(ep) and ang is not None:
                    raise ValueError(f"no condition may be imposed at limit point endpoint {ep}")
        if self.kind == "trivial" and c.deficiency != 0:
            raise ValueError("the trivial extension requires both endpoints limit point")

    def resolve(self, problem: BesselProblem, tol: Tolerance = DEFAULT_TOL) -> "ExtensionSpec":
        if self.kind == "friedrichs":
            return friedrichs_spec(problem)
        if self.kind == "krein":
            return krein_spec(problem, tol)[0]
        self.check(problem)
        return self


def friedrichs_spec(problem: BesselProblem) -> ExtensionSpec:
    """``g~ = 0`` at every limit circle endpoint."""
    c = classify(problem)
    if c.deficiency == 0:
        return ExtensionSpec.trivial()
    return ExtensionSpec.separated(0.0 if c.is_lc("a") else None, 0.0 if c.is_lc("b") else None)


# ---------------------------------------------------------------------------
# positivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PositivityResult:
    epsilon: float
    available: bool
    status: str


@functools.lru_cache(maxsize=256)
def _friedrichs_ground_state(problem: BesselProblem, tol: Tolerance) -> float:
    from .spectra import ground_state

    return ground_state(problem, ExtensionSpec.friedrichs(), tol)


def positivity_lower_bound(problem: BesselProblem, tol: Tolerance = DEFAULT_TOL) -> PositivityResult:
    """Lower bound of the minimal operator: the Friedrichs ground state energy.

    Krein data are only produced when ``epsilon > 1e-8 (b-a)^{-2}``.
    """
    eps = _friedrichs_ground_state(problem, tol)
    threshold = 1e-8 / problem.length ** 2
    if eps > threshold:
        return PositivityResult(eps, True, "ok")
    return PositivityResult(eps, False, "Krein construction unavailable: minimal operator not strictly positive")


def comparison_function(x):
    """``1/sin^2 x + 1 - x^{-2} - (pi - x)^{-2}`` on ``(0, pi)``."""
    x = np.asarray(x, dtype=float)
    return 1.0 / np.sin(x) ** 2 + 1.0 - x ** -2.0 - (np.pi - x) ** -2.0


# ---------------------------------------------------------------------------
# Krein data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KreinData:
    """``mode`` is ``angle_at_a``, ``angle_at_b``, ``matrix`` or ``trivial``."""

    mode: str
    cot_value: Optional[float] = None
    angle: Optional[float] = None
    R_K: Optional[tuple] = None

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.R_K, dtype=float)


def _angle(value, derivative) -> float:
    """Angle in ``[0, pi)`` with ``value cos + derivative sin = 0``."""
    ang = math.atan2(-value, derivative) % math.pi
    return 0.0 if ang >= math.pi else ang


def _cot(value, derivative) -> float:
    return -derivative / value if value != 0 else math.inf


def krein_matrix_numeric(problem: BesselProblem, tol: Tolerance = Tolerance(rel=1e-12, abs=1e-14)):
    """Boundary data at ``b`` of the ``lambda = 0`` frame at ``a`` (and vice versa).

    Returns ``(M_ab, M_ba)`` where column one of ``M_ab`` is the data of
    ``u_hat_a`` at ``b`` and column two that of ``u_a``; entries at limit
    point endpoints are ``nan``.  All frame members are transported to the
    midpoint and paired through Wronskians.
    """
    m = problem.midpoint
    fa = volterra_frame(problem, "a", 0.0, tol)
    fb = volterra_frame(problem, "b", 0.0, tol)
    coef = problem.coefficient(0.0)

    def carry(frame):
        members = [frame.u]
        if frame.has_u_hat:
            members.insert(0, frame.u_hat)
        starts = [ev(frame.edge) for ev in members]
        y0 = (np.array([p[0] for p in starts]), np.array([p[1] for p in starts]))
        sol = integrate_ode(coef, frame.edge, y0, m, tol)
        return [(sol.u[i], sol.du[i]) for i in range(len(members))]

    A = carry(fa)
    B = carry(fb)
    nan = float("nan")

    def data(at, g):
        """Boundary data of g at the endpoint whose frame members are ``at``."""
        if len(at) == 1:
            return (nan, nan)
        (hv, hd), (uv, ud) = at
        return (-wronskian(uv, ud, g[0], g[1]), wronskian(hv, hd, g[0], g[1]))

    def matrix(at, members):
        cols = [data(at, g) for g in members]
        if len(cols) == 1:
            cols = [(nan, nan)] + cols
        return np.array(cols).T

    return matrix(B, A), matrix(A, B)


def krein_spec(problem: BesselProblem, tol: Tolerance = DEFAULT_TOL, check_positivity: bool = True):
    """Krein-von Neumann extension as ``(ExtensionSpec, KreinData)``.

    * both limit point: trivial (no conditions);
    * one limit circle endpoint: a separated condition there, satisfied by
      the principal solution of the opposite endpoint;
    * both limit circle: coupled with ``phi = 0`` and ``R_K`` whose columns
      are the boundary data at ``b`` of ``(u_hat_a, u_a)``.
    """
    if check_positivity:
        pos = positivity_lower_bound(problem, tol)
        if not pos.available:
            raise KreinUnavailableError(f"{pos.status} (epsilon = {pos.epsilon:.3e})")
    c = classify(problem)
    if c.deficiency == 0:
        return ExtensionSpec.trivial(), KreinData("trivial")
    M_ab, M_ba = krein_matrix_numeric(problem)
    if c.deficiency == 2:
        R = tuple(tuple(float(v) for v in row) for row in M_ab)
        return ExtensionSpec.coupled(0.0, R), KreinData("matrix", R_K=R)
    if c.is_lc("b"):
        val, der = M_ab[:, 1]
        ang = _angle(val, der)
        return ExtensionSpec.separated(None, ang), KreinData("angle_at_b", _cot(val, der), ang)
    val, der = M_ba[:, 1]
    ang = _angle(val, der)
    return ExtensionSpec.separated(ang, None), KreinData("angle_at_a", _cot(val, der), ang)


# --- closed forms for q = 0 -------------------------------------------------


def _re(z) -> float:
    z = complex(z)
    if abs(z.imag) > 1e-8 * max(1.0, abs(z.real)):
        raise ArithmeticError("closed form produced a non-real value")
    return z.real


def _P(z, sg) -> complex:
    """``1 / (Gamma(z + sg) Gamma(z - sg))``."""
    return complex(rgamma(z + sg)) * complex(rgamma(z - sg))


def _rg_psi(w) -> complex:
    """``psi(w) / Gamma(w)``, an entire function (limit at the poles of psi)."""
    w = complex(w)
    n = round(-w.real)
    if n >= 0 and abs(w + n) < 1e-9:
        return -((-1) ** n) * math.factorial(n)
    return complex(rgamma(w)) * complex(digamma(w))


def _PG(z, sg, const) -> complex:
    """``P(z) (const - psi(z + sg) - psi(z - sg))`` without cancelling poles."""
    zp, zm = z + sg, z - sg
    return (complex(rgamma(zp)) * complex(rgamma(zm)) * const
            - complex(rgamma(zm)) * _rg_psi(zp) - complex(rgamma(zp)) * _rg_psi(zm))


def _u_a_at_b(sa, sb, L):
    """Boundary data ``(u~_a(b), u~'_a(b))`` of the principal solution at ``a``, s_b < 1.

    Uses the connection formulas; the ``s_b = 1/2`` removable point is
    absent from the ``Gamma(2 + 2 s_a) Gamma(2 - 2 s_b)`` form.
    """
    sg = sigma(sa, sb)
    A = L ** (sa + sb) * gamma_fn(1 + 2 * sa) * gamma_fn(1 + 2 * sb) * _P(0.5 + sa + sb, sg)
    if sb > 0:
        B = L ** (sa - sb) * gamma_fn(2 + 2 * sa) * gamma_fn(2 - 2 * sb) * _P(1.5 + sa - sb, sg) / (4 * sb)
    else:
        K = L ** sa * gamma_fn(1 + 2 * sa) * _P(0.5 + sa, sg)
        B = -K * (math.log(L) - 2 * EULER_GAMMA - digamma(0.5 + sa + sg) - digamma(0.5 + sa - sg))
    return _re(A), _re(B)


def _u_a_at_b_connection(sa, sb, L):
    """Same data in the form ``-L^{s_a-s_b} Gamma(1+2s_a) Gamma(-2s_b) P(1/2+s_a-s_b)``.

    This form has a removable singularity at ``s_b = 1/2``; it is used to
    check the explicit limit.
    """
    sg = sigma(sa, sb)
    return _re(-L ** (sa - sb) * gamma_fn(1 + 2 * sa) * gamma_fn(-2 * sb) * _P(0.5 + sa - sb, sg))


def _u_hat_a_at_b(sa, sb, L):
    """Boundary data at ``b`` of the nonprincipal solution at ``a``, both limit circle."""
    lnL = math.log(L)
    if sa > 0:
        sg = sigma(sa, sb)
        A = L ** (sb - sa) * gamma_fn(2 - 2 * sa) * gamma_fn(2 + 2 * sb) * _P(1.5 - sa + sb, sg) / (4 * sa)
        if sb > 0:
            B = (L ** (-sa - sb) * gamma_fn(2 - 2 * sa) * gamma_fn(2 - 2 * sb)
                 * _P(1.5 - sa - sb, sg) / (8 * sa * sb))
        else:
            # -K(-s) G(-s) / (2 s); the psi recurrence moves the arguments up by
            # one, which removes the apparent pole at s_a = 1/2
            B = -(L ** (-sa) * gamma_fn(2 - 2 * sa) / (4 * sa)
                  * _PG(1.5 - sa, sg, lnL - 2 * EULER_GAMMA + 2.0))
        return _re(A), _re(B)
    # s_a = 0: derivative in s_a of the principal data (logarithmic solution)
    sg0 = sigma(0.0, sb)
    A0 = L ** sb * gamma_fn(1 + 2 * sb) * _P(0.5 + sb, sg0)
    G0 = lnL - 2 * EULER_GAMMA - digamma(0.5 + sb + sg0) - digamma(0.5 + sb - sg0)
    A = -A0 * G0
    if sb > 0:
        B = -(L ** (-sb) * gamma_fn(2 - 2 * sb) / (4 * sb)
              * _PG(1.5 - sb, sg0, lnL + 2 * digamma(2.0)))
    else:
        z = 0.5 + 0.5j
        E0 = math.cosh(math.pi / 2) / math.pi
        G = lnL - 2 * EULER_GAMMA - 2 * complex(digamma(z)).real
        B = E0 * (G * G - 2 * complex(trigamma(z)).real)
    return _re(A), _re(B)


def krein_closed_form_q0(problem: BesselProblem) -> KreinData:
    """Closed-form Krein data for ``q = 0`` from Gamma/digamma/log formulas."""
    if not problem.q.is_zero:
        raise ValueError("closed-form Krein data require q = 0")
    c = classify(problem)
    L = problem.length
    sa, sb = problem.s_a, problem.s_b
    if c.deficiency == 0:
        return KreinData("trivial")
    if c.deficiency == 2:
        uh = _u_hat_a_at_b(sa, sb, L)
        u = _u_a_at_b(sa, sb, L)
        R = ((uh[0], u[0]), (uh[1], u[1]))
        return KreinData("matrix", R_K=R)
    if c.is_lc("b"):
        val, der = _u_a_at_b(sa, sb, L)
        return KreinData("angle_at_b", _cot(val, der), _angle(val, der))
    # mirror: data at a of the principal solution at b
    val, der = _u_a_at_b(sb, sa, L)
    # the reflection x -> a + b - x turns u_a into -u_b, which flips the sign
    # of the derivative component of the data
    der = -der
    return KreinData("angle_at_a", _cot(val, der), _angle(val, der))


def krein_cot_q0(problem: BesselProblem) -> float:
    """``cot`` of the Krein angle for ``q = 0`` and exactly one limit circle endpoint.

    Evaluates the explicit Gamma-quotient (``s > 0``) and digamma (``s = 0``)
    expressions directly, independently of the boundary data route used by
    :func:`krein_closed_form_q0`.
    """
    if not problem.q.is_zero:
        raise ValueError("closed-form Krein data require q = 0")
    c = classify(problem)
    if c.deficiency != 1:
        raise ValueError("the Krein angle exists only with exactly one limit circle endpoint")
    L = problem.length
    sa, sb = problem.s_a, problem.s_b
    sg = sigma(sa, sb)
    if c.is_lc("b"):
        if sb == 0:
            return _re(math.log(L) - 2 * EULER_GAMMA - digamma(0.5 + sa + sg) - digamma(0.5 + sa - sg))
        v = (gamma_fn(2 - 2 * sb) * gamma_fn(0.5 + sa + sb + sg) * gamma_fn(0.5 + sa + sb - sg)
             * rgamma(1 + 2 * sb) * rgamma(1.5 + sa - sb + sg) * rgamma(1.5 + sa - sb - sg))
        return _re(v * -(1 + 2 * sa) / (4 * sb * L ** (2 * sb)))
    if sa == 0:
        return _re(2 * EULER_GAMMA + digamma(0.5 + sb + sg) + digamma(0.5 + sb - sg) - math.log(L))
    v = (gamma_fn(2 - 2 * sa) * gamma_fn(0.5 + sa + sb + sg) * gamma_fn(0.5 + sa + sb - sg)
         * rgamma(1 + 2 * sa) * rgamma(1.5 - sa + sb + sg) * rgamma(1.5 - sa + sb - sg))
    return _re(v * (1 + 2 * sb) / (4 * sa * L ** (2 * sa)))


# ---------------------------------------------------------------------------
# quadratic form
# ---------------------------------------------------------------------------


def quadratic_form(problem: BesselProblem, f: Callable, tol: Tolerance = Tolerance(rel=1e-10, abs=1e-13),
                   step_width: Optional[float] = None) -> float:
    """``||alpha f||^2 + (f, (q - qtilde) f)`` with the two-point first-order expression.

    ``f(x)`` returns ``(f, f')``.  The integral is split at the edges of the
    cut-off regions so each piece is smooth apart from endpoint behavior.
    """
    expr = FirstOrderExpr.for_problem(problem, step_width)
    a, b, eps = problem.a, problem.b, expr.step_width

    def integrand(x):
        x = np.asarray(x, dtype=float)
        fv, df = f(x)
        fv = np.asarray(fv)
        af = np.asarray(df) + _phi(expr, x) * fv
        rest = (problem.q(x) - _qtilde(expr, x)) * np.abs(fv) ** 2
        return np.abs(af) ** 2 + rest

    cuts = [a, a + eps, a + 2 * eps, b - 2 * eps, b - eps, b]
    total = 0.0
    try:
        # overflow near an endpoint means divergence, reported below
        with np.errstate(over="ignore", invalid="ignore"):
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                if hi > lo:
                    total += quad_singular(integrand, lo, hi, tol).value
    except (QuadratureError, FloatingPointError, ValueError) as exc:
        raise FormDomainError(f"form integral does not converge: {exc}") from None
    if not math.isfinite(total):
        raise FormDomainError("form integral is not finite")
    return float(total)
