"""Hardy-type inequalities and two-weight Muckenhoupt constants.

Variants checked by :func:`hardy_report` (``t = x - a``, ``L = b - a``):

``power_12``
    ``int |f'|^2 >= 1/4 int |f|^2 / t^2`` for ``f`` in ``H^1_0((a, b))``.
``distance_13``
    the same with ``t`` replaced by the distance ``d(x)`` to ``{a, b}``.
``sine_14``
    ``int |f'|^2 >= c int |f|^2 / sin^2(pi t / L) + c int |f|^2`` with
    ``c = pi^2 / (4 L^2)``.
``log_refined_B1``
    ``int |f' - f/(2t)|^2 >= 1/4 int |f|^2 / (t^2 log^2(R/t))`` with
    ``R > L``; for ``f`` vanishing at both ends all boundary terms drop out.
``halfline_B11``
    ``int_a^r |f'|^2 >= 1/4 int_a^r |f|^2 / t^2`` with ``f(a) = 0`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .firstorder import decay_probe
from .numerics import QuadratureError, Tolerance, quad_singular

__all__ = [
    "VARIANTS",
    "HardyReport",
    "AdmissibilityError",
    "hardy_report",
    "LogRefinedReport",
    "log_refined_check",
    "MuckenhouptResult",
    "muckenhoupt",
    "empirical_constant",
]

VARIANTS = ("power_12", "distance_13", "sine_14", "log_refined_B1", "halfline_B11")

_QTOL = Tolerance(rel=1e-11, abs=1e-14)


class AdmissibilityError(ValueError):
    """The trial function is not in the admissible class of the variant."""


@dataclass(frozen=True)
class HardyReport:
    """``ratio = lhs / weighted`` where ``rhs = constant * weighted``."""

    variant: str
    lhs: float
    rhs: float
    weighted: float
    ratio: float
    constant: float
    satisfied: bool
    quad_error: float


def _integrate(g, a, b, tol=_QTOL):
    """Integral over ``(a, b)`` split at the midpoint, with an error estimate."""
    m = 0.5 * (a + b)
    total = 0.0
    err = 0.0
    for lo, hi, end in ((a, m, "a"), (m, b, "b")):
        try:
            r = quad_singular(g, lo, hi, tol)
            total += float(np.real(r.value))
            err += r.error
        except QuadratureError:
            v, e = _integrate_graded(g, lo, hi, end, tol)
            total += v
            err += e
    return total, err


def _integrate_graded(g, lo, hi, end, tol, chunk=8.0, depth=300):
    """Half-interval integral for slowly decaying endpoint singularities.

    With ``t = e^{-u}`` the distance to the singular end point, power-law
    behavior ``g ~ C t^gamma`` becomes a smooth exponential in ``u``; the
    ``u`` range is integrated in chunks down to ``10^-depth`` times the
    length or to the smallest distance still resolved in floating point next
    to the end point, whichever is larger.  The remaining tail is closed with
    the power law fitted at the two smallest distances.
    """
    L = hi - lo
    ep = lo if end == "a" else hi
    floor = max(L * 10.0 ** -depth, 1e3 * np.finfo(float).eps * abs(ep))

    def x_of(t):
        return lo + t if end == "a" else hi - t

    def G(u):
        t = np.exp(-u)
        return np.asarray(g(x_of(t))) * t

    u0, u1 = -math.log(L), -math.log(floor)
    cuts = np.append(np.arange(u0, u1, chunk), u1)
    total, err = 0.0, 0.0
    for v0, v1 in zip(cuts[:-1], cuts[1:]):
        try:
            r = quad_singular(G, v0, v1, Tolerance(rel=tol.rel, abs=max(1e-300, 1e-3 * tol.rel * abs(total))))
            val, e = r.value, r.error
        except QuadratureError as exc:
            # next to an end point away from the origin the abscissae carry
            # relative noise eps/t; keep the finest level and report the spread
            lo_v, hi_v = exc.last_levels
            val, e = hi_v, abs(hi_v - lo_v)
        total += float(np.real(val))
        err += float(e)
    g1, g2 = (float(np.real(np.asarray(g(np.array([x_of(t)]))).ravel()[0])) for t in (floor, 10 * floor))
    if g1 == 0:
        return total, err
    if g1 * g2 <= 0:
        raise QuadratureError("integrand changes sign at the smallest distances", (total, total))
    gamma = math.log(g2 / g1) / math.log(10.0)
    if gamma <= -1:
        raise QuadratureError("integrand not integrable at the end point", (total, math.inf))
    tail = g1 * floor / (gamma + 1)
    return total + tail, err + abs(tail) * 1e-3


def _check_decay(f, interval, ends):
    a, b = interval
    for e in ends:
        if e == "a":
            probe = decay_probe(lambda t: f(np.array([a + t]))[0][0], "a", "sqrt", interval=interval)
        else:
            probe = decay_probe(lambda t: f(np.array([b - t]))[0][0], "b", "right_sqrt", interval=interval)
        if probe.verdict != "vanishes":
            raise AdmissibilityError(
                f"f/sqrt(distance) does not vanish at {e} (probe verdict {probe.verdict})")


def hardy_report(f: Callable, variant: str, interval=(0.0, 1.0), R: Optional[float] = None,
                 admissibility: str = "probe") -> HardyReport:
    """Both sides of a Hardy-type inequality for the trial ``f`` (``x -> (f, f')``).

    ``admissibility="probe"`` runs decay probes at the endpoints where the
    variant requires ``f`` to vanish; ``"trust"`` skips them (for families
    whose decay is too slow to resolve numerically, such as ``t^{1/2+eps}``).
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if admissibility not in ("probe", "trust"):
        raise ValueError("admissibility must be 'probe' or 'trust'")
    a, b = (float(v) for v in interval)
    L = b - a
    if admissibility == "probe":
        _check_decay(f, (a, b), ("a",) if variant == "halfline_B11" else ("a", "b"))

    def fv(x):
        return np.asarray(f(x)[0])

    def df(x):
        return np.asarray(f(x)[1])

    if variant == "log_refined_B1":
        R = 2.0 * L if R is None else float(R)
        if R <= L:
            raise ValueError("R must exceed b - a")
        lhs, e1 = _integrate(lambda x: np.abs(df(x) - fv(x) / (2 * (x - a))) ** 2, a, b)
        wt, e2 = _integrate(lambda x: np.abs(fv(x) / ((x - a) * np.log(R / (x - a)))) ** 2, a, b)
        const = 0.25
        rhs = const * wt
    else:
        lhs, e1 = _integrate(lambda x: np.abs(df(x)) ** 2, a, b)
        if variant in ("power_12", "halfline_B11"):
            wt, e2 = _integrate(lambda x: np.abs(fv(x) / (x - a)) ** 2, a, b)
            const = 0.25
        elif variant == "distance_13":
            wt, e2 = _integrate(lambda x: np.abs(fv(x) / np.minimum(x - a, b - x)) ** 2, a, b)
            const = 0.25
        else:
            c = math.pi ** 2 / (4 * L ** 2)

            def g(x):
                return np.abs(fv(x) / np.sin(math.pi * (x - a) / L)) ** 2 + np.abs(fv(x)) ** 2

            wt, e2 = _integrate(g, a, b)
            const = c
        rhs = const * wt
    err = e1 + const * e2 + 1e-10 * max(abs(lhs), abs(rhs))
    ratio = lhs / wt if wt > 0 else math.inf
    lhs, rhs, wt, ratio, err = (float(v) for v in (lhs, rhs, wt, ratio, err))
    return HardyReport(variant, lhs, rhs, wt, ratio, const, bool(lhs >= rhs - err), err)


# ---------------------------------------------------------------------------
# logarithmic refinement on a subinterval
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogRefinedReport:
    """Both sides of the two identities and the combined inequality on ``[r0, r1]``."""

    weighted_lhs: float
    weighted_rhs: float
    alpha_lhs: float
    alpha_rhs: float
    inequality_lhs: float
    inequality_rhs: float
    weighted_identity_error: float
    alpha_identity_error: float
    inequality_holds: bool


def log_refined_check(f: Callable, r0: float, r1: float, s: float, R: float, a: float = 0.0,
                      tol: Tolerance = _QTOL) -> LogRefinedReport:
    """Logarithmically refined Hardy identities with all boundary terms.

    With ``t = x - a``, ``l = log(R/t)`` and ``alpha_s f = f' - (s + 1/2) f / t``:

    * weighted identity: ``int t l |(f t^{-1/2} l^{-1/2})'|^2`` equals
      ``int [|f'|^2 - |f|^2/(4t^2) - |f|^2/(4 t^2 l^2)] - [|f|^2/(2t)] + [|f|^2/(2 t l)]``;
    * alpha identity: ``int |alpha_s f|^2`` equals
      ``int [|f'|^2 + (s^2 - 1/4)|f|^2/t^2] - (s + 1/2)[|f|^2/t]``;
    * inequality: ``int |alpha_s f|^2 >= s^2 int |f|^2/t^2 + 1/4 int |f|^2/(t^2 l^2)
      - s [|f|^2/t] - [|f|^2/(2 t l)]``,

    where ``[g]`` is ``g(r1) - g(r0)``.
    """
    if not a < r0 < r1 < R + a:
        raise ValueError("need a < r0 < r1 < a + R")

    def fv(x):
        return np.asarray(f(x)[0])

    def df(x):
        return np.asarray(f(x)[1])

    def integ(g):
        return float(np.real(quad_singular(g, r0, r1, tol).value))

    def bracket(g):
        return float(np.real(g(np.array([r1]))[0] - g(np.array([r0]))[0]))

    def ell(x):
        return np.log(R / (x - a))

    def wd(x):
        t = x - a
        # t l |(f t^{-1/2} l^{-1/2})'|^2 = |f' - f/(2t) + f/(2 t l)|^2
        return np.abs(df(x) - fv(x) / (2 * t) + fv(x) / (2 * t * ell(x))) ** 2

    f2 = lambda x: np.abs(fv(x)) ** 2
    wl = integ(wd)
    I_d = integ(lambda x: np.abs(df(x)) ** 2)
    I_t2 = integ(lambda x: np.abs(fv(x) / (x - a)) ** 2)
    I_log = integ(lambda x: np.abs(fv(x) / ((x - a) * ell(x))) ** 2)
    B_t = bracket(lambda x: f2(x) / (x - a))
    B_log = bracket(lambda x: f2(x) / ((x - a) * ell(x)))
    wr = I_d - 0.25 * I_t2 - 0.25 * I_log - 0.5 * B_t + 0.5 * B_log

    al = integ(lambda x: np.abs(df(x) - (s + 0.5) * fv(x) / (x - a)) ** 2)
    ar = I_d + (s * s - 0.25) * I_t2 - (s + 0.5) * B_t

    il = al
    ir = s * s * I_t2 + 0.25 * I_log - s * B_t - 0.5 * B_log
    scale = max(1.0, abs(I_d), abs(I_t2))
    return LogRefinedReport(wl, wr, al, ar, il, ir, abs(wl - wr), abs(al - ar),
                            bool(il >= ir - 1e-9 * scale))


# ---------------------------------------------------------------------------
# Muckenhoupt two-weight constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuckenhouptResult:
    """``value`` is ``A`` (A_form) or ``B`` (B_form); ``bracket`` bounds the best constant."""

    kind: str
    p: float
    value: float
    bracket: tuple
    sup_location: Optional[float]
    infinite: bool = False


_DIVERGENT = 1e150


class _Cumulative:
    """Cumulative integrals of a weight on a geometric grid of ``(a, b)``."""

    def __init__(self, w, a, b, nodes):
        self.w = w
        self.a = a
        self.b = b
        self.nodes = nodes
        pieces = []
        edges = np.concatenate([[a], nodes, [b]])
        for lo, hi in zip(edges[:-1], edges[1:]):
            pieces.append(self._piece(lo, hi))
        self.pieces = np.array(pieces)
        # left[k] = int_a^{nodes[k]}, right[k] = int_{nodes[k]}^b
        c = np.cumsum(self.pieces)
        self.left = c[:-1]
        tail = np.cumsum(self.pieces[::-1])[::-1]
        self.right = tail[1:]

    def _piece(self, lo, hi):
        if hi <= lo:
            return 0.0
        v = None
        # pieces next to a far end point are only a few hundred ulps wide in
        # x, which caps the attainable relative accuracy
        for rel in (1e-12, 1e-7):
            try:
                v = float(np.real(quad_singular(self.w, lo, hi, Tolerance(rel=rel, abs=1e-300)).value))
                break
            except (QuadratureError, FloatingPointError, OverflowError):
                continue
        if v is None:
            return math.inf
        if not math.isfinite(v) or abs(v) > _DIVERGENT:
            return math.inf
        return v

    def left_at(self, c):
        k = int(np.searchsorted(self.nodes, c)) - 1
        if k < 0:
            return self._piece(self.a, c)
        return self.left[k] + self._piece(self.nodes[k], c)

    def right_at(self, c):
        k = int(np.searchsorted(self.nodes, c))
        if k >= len(self.nodes):
            return self._piece(c, self.b)
        return self.right[k] + self._piece(c, self.nodes[k])


def _log_grid(a, b, per_side=32, depth=150):
    L = b - a
    d = L * 10.0 ** -np.linspace(depth, math.log10(2.0), per_side)
    # distances below a few hundred ulps leave no interior sample points
    eps = np.finfo(float).eps
    left = a + d[d > 1e3 * eps * abs(a)]
    right = b - d[::-1][d[::-1] > 1e3 * eps * abs(b)]
    nodes = np.unique(np.concatenate([left, right]))
    return nodes[(nodes > a) & (nodes < b)]


def muckenhoupt(kind: str, u: Callable, v: Callable, p: float = 2.0, interval=(0.0, 1.0),
                per_side: int = 32) -> MuckenhouptResult:
    """Two-weight constant ``A`` (``kind="A_form"``) or ``B`` (``kind="B_form"``).

    ``A = sup_c (int_c^b u)^{1/p} (int_a^c v^{1-p'})^{1/p'}`` and
    ``B = sup_c (int_a^c u)^{1/p} (int_c^b v^{1-p'})^{1/p'}``; for ``p = 1``
    the ``v`` factor is the supremum of ``1/v``.  The supremum over ``c``
    is taken on a two-sided logarithmic grid reaching ``1e-150 (b-a)`` from
    either end, refined by golden-section search in ``log`` distance.
    Divergent inner integrals for every ``c`` give ``infinite=True``.
    """
    if kind not in ("A_form", "B_form"):
        raise ValueError("kind must be 'A_form' or 'B_form'")
    if not p >= 1:
        raise ValueError("p must lie in [1, inf)")
    a, b = (float(x) for x in interval)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return _muckenhoupt(kind, u, v, p, a, b, per_side)


def _muckenhoupt(kind, u, v, p, a, b, per_side):
    nodes = _log_grid(a, b, per_side)
    U = _Cumulative(lambda x: np.asarray(u(x), dtype=float), a, b, nodes)
    if p > 1:
        pp = p / (p - 1)
        V = _Cumulative(lambda x: np.asarray(v(x), dtype=float) ** (1 - pp), a, b, nodes)
        bound = p ** (1 / p) * pp ** (1 / pp)
    else:
        pp = math.inf
        inv = 1.0 / np.asarray(v(nodes), dtype=float)
        bound = 1.0

    def factors(c, k=None):
        if kind == "A_form":
            uf = U.right[k] if k is not None else U.right_at(c)
            if p > 1:
                vf = V.left[k] if k is not None else V.left_at(c)
            else:
                vf = float(np.max(inv[nodes <= c])) if np.any(nodes <= c) else float(1.0 / v(np.array([c]))[0])
        else:
            uf = U.left[k] if k is not None else U.left_at(c)
            if p > 1:
                vf = V.right[k] if k is not None else V.right_at(c)
            else:
                vf = float(np.max(inv[nodes >= c])) if np.any(nodes >= c) else float(1.0 / v(np.array([c]))[0])
        return uf, vf

    def log_obj(c, k=None):
        uf, vf = factors(c, k)
        if not (math.isfinite(uf) and math.isfinite(vf)):
            return math.inf
        if uf <= 0 or vf <= 0:
            return -math.inf
        lv = math.log(vf) / pp if p > 1 else math.log(vf)
        return math.log(uf) / p + lv

    vals = np.array([log_obj(c, k) for k, c in enumerate(nodes)])
    if np.all(np.isposinf(vals)):
        return MuckenhouptResult(kind, p, math.inf, (math.inf, math.inf), None, True)
    # with weights singular only at the end points an inner integral diverges
    # for every c or for none, so isolated infinite values are overflow of a
    # finite but huge factor; those nodes are dropped from the supremum
    ok = np.flatnonzero(np.isfinite(vals))
    if len(ok) == 0:
        return MuckenhouptResult(kind, p, 0.0, (0.0, 0.0), None, False)
    k = int(ok[np.argmax(vals[ok])])
    pos = int(np.searchsorted(ok, k))
    n = len(nodes)
    if pos in (0, len(ok) - 1) and len(ok) >= 3:
        # supremum approached at the end of the usable grid: growing means unbounded
        j = int(ok[1] if pos == 0 else ok[-2])
        jj = int(ok[2] if pos == 0 else ok[-3])
        grow = vals[k] - vals[j]
        if grow > 1e-3 and vals[j] - vals[jj] > 0.5 * grow:
            return MuckenhouptResult(kind, p, math.inf, (math.inf, math.inf), float(nodes[k]), True)
        best, loc = vals[k], float(nodes[k])
    elif k in (0, n - 1) or pos in (0, len(ok) - 1):
        best, loc = vals[k], float(nodes[k])
    else:
        # golden section on the log-distance to the nearer end point
        lo_c, hi_c = nodes[k - 1], nodes[k + 1]
        g = (math.sqrt(5) - 1) / 2
        x1 = hi_c - g * (hi_c - lo_c)
        x2 = lo_c + g * (hi_c - lo_c)
        f1, f2 = log_obj(x1), log_obj(x2)
        for _ in range(80):
            if hi_c - lo_c <= 1e-13 * max(abs(lo_c), abs(hi_c), b - a):
                break
            if f1 >= f2:
                hi_c, x2, f2 = x2, x1, f1
                x1 = hi_c - g * (hi_c - lo_c)
                f1 = log_obj(x1)
            else:
                lo_c, x1, f1 = x1, x2, f2
                x2 = lo_c + g * (hi_c - lo_c)
                f2 = log_obj(x2)
        best, loc = (f1, x1) if f1 >= f2 else (f2, x2)
        if vals[k] > best:
            best, loc = vals[k], float(nodes[k])
    value = math.exp(best)
    return MuckenhouptResult(kind, p, value, (value, bound * value), loc, False)


def empirical_constant(kind: str, u: Callable, v: Callable, f: Callable, p: float = 2.0,
                       interval=(0.0, 1.0), n: int = 4001) -> float:
    """Ratio ``(int u (int f)^p)^{1/p} / (int v f^p)^{1/p}`` for a nonnegative ``f``.

    The inner integral runs over ``(a, x)`` for ``A_form`` and ``(x, b)`` for
    ``B_form``; computed on a graded grid with the trapezoidal rule in the
    stretched variable.
    """
    a, b = interval
    s = np.linspace(0.0, 1.0, n)
    # cubic grading clusters points at both ends
    x = a + (b - a) * (3 * s ** 2 - 2 * s ** 3)
    x = x[1:-1]
    fx = np.asarray(f(x), dtype=float)
    F = np.concatenate([[0.0], np.cumsum(0.5 * (fx[1:] + fx[:-1]) * np.diff(x))])
    if kind == "B_form":
        F = F[-1] - F
    den = np.trapezoid(np.asarray(v(x)) * fx ** p, x)
    num = np.trapezoid(np.asarray(u(x)) * F ** p, x)
    return float((num / den) ** (1 / p))
