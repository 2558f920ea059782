"""Numerical kernel: ODE transport, endpoint-tolerant quadrature, root finding
and limit extrapolation.

Everything here is pure: functions take callbacks and tolerances and return
fresh result objects, so they may be called concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

__all__ = [
    "Tolerance",
    "Grid",
    "IntegrationError",
    "QuadratureError",
    "BracketError",
    "ModelMismatchError",
    "ODESolution",
    "QuadResult",
    "LimitEstimate",
    "integrate_ode",
    "quad_singular",
    "find_root",
    "limit_extrapolate",
]


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute accuracy request plus a work limit."""

    rel: float = 1e-10
    abs: float = 1e-12
    max_steps: int = 200_000

    def __post_init__(self):
        if not (self.rel > 0 and self.abs > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(self.rel * factor, self.abs * factor, self.max_steps)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Grid:
    """Samples on strictly increasing abscissae."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values)
        if pts.ndim != 1 or pts.shape != vals.shape[:1]:
            raise ValueError("points and values must be 1-d and of equal length")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid abscissae must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)


class IntegrationError(RuntimeError):
    """Step budget exhausted; usually a singularity is too close."""

    def __init__(self, message: str, x: float):
        super().__init__(f"{message} (at x = {x!r})")
        self.x = x


class QuadratureError(RuntimeError):
    def __init__(self, message: str, last_levels: tuple):
        super().__init__(f"{message}; last two levels: {last_levels!r}")
        self.last_levels = last_levels


class BracketError(ValueError):
    pass


class ModelMismatchError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (fit residual {residual:.3e})")
        self.residual = residual


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) for u'' = c(x) u
# ---------------------------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension (fourth order) of the Dormand-Prince pair
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@dataclass
class ODESolution:
    """Result of :func:`integrate_ode`.

    ``u`` and ``du`` are the value and derivative at ``x1``.  When dense output
    was requested, ``__call__`` evaluates ``(u, du)`` at any abscissa of the
    traversed segment.
    """

    x0: float
    x1: float
    u: np.ndarray
    du: np.ndarray
    nsteps: int
    nrejected: int
    _xs: list = field(default_factory=list, repr=False)
    _hs: list = field(default_factory=list, repr=False)
    _ys: list = field(default_factory=list, repr=False)
    _ks: list = field(default_factory=list, repr=False)

    @property
    def has_dense(self) -> bool:
        return bool(self._xs)

    def __call__(self, x):
        if not self._xs:
            raise RuntimeError("dense output was not requested")
        lo, hi = min(self.x0, self.x1), max(self.x0, self.x1)
        if not (lo <= x <= hi):
            raise ValueError(f"x = {x} outside the integrated segment [{lo}, {hi}]")
        xs = self._xs
        forward = self.x1 >= self.x0
        if forward:
            i = int(np.searchsorted(xs, x, side="right")) - 1
        else:
            i = int(np.searchsorted([-v for v in xs], -x, side="right")) - 1
        i = min(max(i, 0), len(xs) - 1)
        h = self._hs[i]
        theta = (x - xs[i]) / h
        powers = np.array([theta, theta ** 2, theta ** 3, theta ** 4])
        coeff = _P @ powers
        K = self._ks[i]
        y = self._ys[i] + h * np.tensordot(coeff, K, axes=(0, 0))
        return y[0], y[1]


_HUGE = 1e250


def _rms_norm(err, scale):
    # rms over the (value, derivative) pair, worst case over any batch axes,
    # so a batch is accepted only when every member meets the tolerance
    r = np.abs(err) / scale
    return float(np.max(np.sqrt(np.mean(r * r, axis=0))))


def integrate_ode(
    coef: Callable[[float], "float | np.ndarray"],
    x0: float,
    y0: Sequence,
    x1: float,
    tol: Tolerance = DEFAULT_TOL,
    dense: bool = False,
    h0: float | None = None,
) -> ODESolution:
    """Integrate the linear second-order equation ``u'' = coef(x) u``.

    Parameters
    ----------
    coef : callable
        Returns the coefficient at ``x``; may return an array to transport a
        batch of equations (for instance one per spectral parameter) in lock
        step.
    x0, x1 : float
        Start and end abscissae; ``x1 < x0`` integrates backwards.
    y0 : pair
        ``(u(x0), u'(x0))``.  Entries may be complex and may be arrays whose
        shape broadcasts against ``coef(x)``.
    tol : Tolerance
        Per-step local error control (embedded 5(4) pair, PI step control).
    dense : bool
        Keep the stage data needed to evaluate the solution anywhere on the
        segment.

    Raises
    ------
    IntegrationError
        If ``tol.max_steps`` accepted+rejected steps do not reach ``x1``, or
        if the solution grows to the floating point overflow range.
    """
    u0 = np.asarray(y0[0])
    du0 = np.asarray(y0[1])
    c0 = np.asarray(coef(x0))
    shape = np.broadcast_shapes(u0.shape, du0.shape, c0.shape)
    is_complex = np.iscomplexobj(u0) or np.iscomplexobj(du0) or np.iscomplexobj(c0)
    dtype = complex if is_complex else float
    y = np.empty((2,) + shape, dtype=dtype)
    y[0] = u0
    y[1] = du0

    span = x1 - x0
    if span == 0:
        return ODESolution(x0, x1, y[0].copy(), y[1].copy(), 0, 0)
    direction = 1.0 if span > 0 else -1.0

    def f(x, yy):
        out = np.empty_like(yy)
        out[0] = yy[1]
        out[1] = coef(x) * yy[0]
        return out

    rtol, atol = tol.rel, tol.abs
    x = x0
    if not np.all(np.isfinite(y)):
        raise IntegrationError("non-finite initial data", x0)
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = f(x, y)
    if not np.all(np.isfinite(k1)):
        raise IntegrationError("non-finite derivative at start", x0)

    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = _rms_norm(y, scale)
        d1 = _rms_norm(k1, scale)
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h = min(h, abs(span))
        y1 = y + direction * h * k1
        d2 = _rms_norm(f(x + direction * h, y1) - k1, scale) / h
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        h = min(100 * h, h1, abs(span))
    else:
        h = min(abs(h0), abs(span))

    sol = ODESolution(x0, x1, y[0], y[1], 0, 0)
    err_old = 1e-4
    nsteps = 0
    nrej = 0
    reject = False
    K = np.empty((7,) + y.shape, dtype=dtype)
    while True:
        if nsteps + nrej >= tol.max_steps:
            raise IntegrationError(
                "stiffness/singularity too close: step budget exhausted", float(x)
            )
        remaining = (x1 - x) * direction
        if h >= remaining:
            h = remaining
            last = True
        else:
            last = False
        hs = direction * h
        K[0] = k1
        for s in range(1, 7):
            dy = K[0] * (_A[s][0] * hs)
            for j in range(1, s):
                a = _A[s][j]
                if a != 0.0:
                    dy = dy + K[j] * (a * hs)
            if s < 6:
                K[s] = f(x + _C[s] * hs, y + dy)
            else:
                y_new = y + dy
                K[6] = f(x + hs, y_new)
        err_vec = np.tensordot(_E, K, axes=(0, 0)) * hs
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms_norm(err_vec, scale)
        if not math.isfinite(err):
            if np.max(np.abs(y)) > _HUGE:
                # the stages overflow because the solution itself is near the
                # floating point limit; shrinking the step cannot help
                raise IntegrationError("solution magnitude overflows", float(x))
            err = 1e10
        if err <= 1.0:
            if dense:
                sol._xs.append(x)
                sol._hs.append(hs)
                sol._ys.append(y.copy())
                sol._ks.append(K.copy())
            x = x1 if last else x + hs
            y = y_new
            k1 = K[6].copy()
            nsteps += 1
            if last:
                break
            fac = 0.9 * err ** -0.17 * err_old ** 0.04 if err > 0 else 10.0
            fac = min(10.0, max(0.2, fac))
            if reject:
                fac = min(1.0, fac)
            h *= fac
            err_old = max(err, 1e-4)
            reject = False
        else:
            nrej += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            reject = True
            if h < 1e-14 * max(1.0, abs(x)):
                raise IntegrationError("step size underflow", float(x))
    sol.u = y[0]
    sol.du = y[1]
    sol.nsteps = nsteps
    sol.nrejected = nrej
    return sol


# ---------------------------------------------------------------------------
# tanh-sinh quadrature
# ---------------------------------------------------------------------------

_TS_TMAX = 6.0


def _ts_nodes(level: int, new_only: bool):
    """Abscissae parameters t for the given level (step 2**-level)."""
    h = 2.0 ** -level
    if level == 0 or not new_only:
        n = int(round(_TS_TMAX / h))
        t = np.arange(-n, n + 1) * h
    else:
        n = int(round(_TS_TMAX / h))
        t = np.arange(-n + 1, n, 2) * h
    return t, h


def _ts_eval(f, a, b, t):
    half = 0.5 * (b - a)
    u = 0.5 * math.pi * np.sinh(t)
    # distance from the nearer endpoint, computed without cancellation
    e = np.exp(-2.0 * np.abs(u))
    dist = (b - a) * e / (1.0 + e)
    x = np.where(t < 0, a + dist, b - dist)
    w = half * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    ok = (x > a) & (x < b) & (w > 0)
    if not np.any(ok):
        return 0.0
    fx = np.asarray(f(x[ok]))
    if fx.shape != x[ok].shape:
        fx = np.array([f(xx) for xx in x[ok]])
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned non-finite values", (np.nan, np.nan))
    return np.sum(w[ok] * fx)


@dataclass(frozen=True)
class QuadResult:
    value: complex | float
    error: float
    levels: int

    def __float__(self):
        return float(np.real(self.value))


def quad_singular(
    f: Callable,
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
    min_level: int = 3,
    max_level: int = 12,
) -> QuadResult:
    """Integrate ``f`` over ``(a, b)`` with the double-exponential rule.

    ``f`` is called with a numpy array of abscissae strictly inside the
    interval.  Integrable algebraic or logarithmic endpoint singularities are
    handled without special treatment.  The step is halved until two successive
    levels agree to ``max(tol.abs, tol.rel * |I|)``.

    >>> round(quad_singular(lambda x: x ** -0.5, 0.0, 1.0).value, 12)
    2.0
    """
    if not b > a:
        if a == b:
            return QuadResult(0.0, 0.0, 0)
        r = quad_singular(f, b, a, tol, min_level, max_level)
        return QuadResult(-r.value, r.error, r.levels)
    t, h = _ts_nodes(0, False)
    s = _ts_eval(f, a, b, t)
    prev = s * h
    history = [prev]
    for level in range(1, max_level + 1):
        t, h = _ts_nodes(level, True)
        s = s + _ts_eval(f, a, b, t)
        cur = s * h
        history.append(cur)
        diff = abs(cur - prev)
        if level >= min_level and diff <= max(tol.abs, tol.rel * abs(cur)):
            return QuadResult(cur, float(diff), level)
        prev = cur
    raise QuadratureError("tanh-sinh levels failed to agree", (history[-2], history[-1]))


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


def find_root(f: Callable[[float], float], bracket, tol: Tolerance = DEFAULT_TOL) -> float:
    """Bracketed root of a real scalar function (Brent's method).

    >>> round(find_root(lambda x: x - 2.0, (0.0, 5.0)), 12)
    2.0
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise BracketError(f"f does not change sign on [{lo}, {hi}]")
    xtol = max(tol.abs, 4 * np.finfo(float).eps * max(abs(lo), abs(hi)))
    root = optimize.brentq(f, lo, hi, xtol=xtol, rtol=max(tol.rel, 4 * np.finfo(float).eps),
                           maxiter=max(100, min(tol.max_steps, 10_000)))
    return min(max(root, lo), hi)


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitEstimate:
    value: complex | float
    residual: float
    model: str


def _aitken(seq):
    out = []
    for i in range(len(seq) - 2):
        x0, x1, x2 = seq[i], seq[i + 1], seq[i + 2]
        den = (x2 - x1) - (x1 - x0)
        num = (x2 - x1) ** 2
        scale = max(abs(x0), abs(x1), abs(x2), 1e-300)
        if abs(den) <= 1e-14 * scale:
            # converged sequence: keep it; arithmetic progression: no limit
            out.append(x2 if abs(x2 - x1) <= 1e-13 * scale else math.nan)
        else:
            out.append(x2 - num / den)
    return out


def _iterated_aitken(seq):
    cur = list(seq)
    while len(cur) >= 3:
        cur = _aitken(cur)
    return cur[-1]


def _wynn(seq):
    n = len(seq)
    prev = [0.0] * (n + 1)
    cur = list(seq)
    best = cur[-1]
    k = 0
    while len(cur) >= 2:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            scale = max(abs(cur[i]), abs(cur[i + 1]), 1e-300)
            if abs(d) <= 1e-15 * scale:
                return cur[i + 1] if k % 2 == 0 else best
            nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        k += 1
        if k % 2 == 0 and cur:
            best = cur[-1]
    return best


def limit_extrapolate(samples, values=None, model: str = "algebraic",
                      tol: Tolerance = DEFAULT_TOL) -> LimitEstimate:
    """Estimate ``lim_{delta -> 0} v(delta)`` from samples on a geometric ladder.

    ``model='algebraic'`` assumes ``v = L + sum_j c_j delta**p_j`` and applies
    iterated Aitken extrapolation; ``model='algebraic-log'`` also allows
    ``delta**p * log(delta)`` terms and uses Wynn's epsilon algorithm.

    ``samples`` is either a :class:`Grid` (points are the deltas) or an array
    of deltas with ``values`` given separately.  The residual is the change of
    the estimate when the coarsest sample is dropped; with three samples the
    model is exactly determined and the residual is zero.
    """
    if isinstance(samples, Grid):
        deltas, vals = samples.points, samples.values
    else:
        deltas = np.asarray(samples, dtype=float)
        vals = np.asarray(values)
    if len(deltas) < 3:
        raise ValueError("limit extrapolation needs at least three samples")
    if np.any(deltas <= 0):
        raise ValueError("ladder spacings must be positive")
    order = np.argsort(-deltas)
    d = deltas[order]
    v = [vals[i] for i in order]
    ratios = d[:-1] / d[1:]
    if np.any(ratios <= 1) or np.ptp(np.log(ratios)) > 1e-6 * np.mean(np.log(ratios)):
        raise ValueError("samples must lie on a geometric ladder")
    if model == "algebraic":
        transform = _iterated_aitken
    elif model == "algebraic-log":
        transform = _wynn
    else:
        raise ValueError(f"unknown model {model!r}")
    est = transform(v)
    if len(v) == 3:
        resid = 0.0
    else:
        resid = float(abs(est - transform(v[1:])))
    if not np.isfinite(est):
        raise ModelMismatchError("extrapolation produced a non-finite value", float("inf"))
    if resid > max(tol.abs, tol.rel * abs(est)):
        raise ModelMismatchError("samples inconsistent with the declared decay model", resid)
    if not np.iscomplexobj(np.asarray(est)):
        est = float(est)
    return LimitEstimate(est, resid, model)
