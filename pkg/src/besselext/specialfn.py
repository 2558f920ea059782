"""Gamma, digamma, Gauss hypergeometric function and zeros of J0.

The hypergeometric function is only needed on ``0 <= xi <= 1`` with possibly
complex-conjugate upper parameters; the implementation uses the power series
for ``xi <= 1/2`` and the ``1 - xi`` connection formulas (including the
logarithmic cases) above that.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .numerics import DEFAULT_TOL, Tolerance

__all__ = [
    "PoleError",
    "ParameterError",
    "DivergenceError",
    "SeriesConvergenceError",
    "Hyp2F1Params",
    "EULER_GAMMA",
    "gamma_fn",
    "rgamma",
    "digamma",
    "trigamma",
    "hyp2f1",
    "hyp2f1_derivative",
    "gauss_value_at_one",
    "bessel_j0_zero",
]

EULER_GAMMA = 0.57721566490153286061


class PoleError(ValueError):
    """Argument is a pole (a nonpositive integer)."""


class ParameterError(ValueError):
    pass


class DivergenceError(ValueError):
    pass


class SeriesConvergenceError(RuntimeError):
    pass


def _as_number(z):
    if isinstance(z, (complex, np.complexfloating)):
        return complex(z), True
    return complex(float(z), 0.0), False


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0 and z.real == math.floor(z.real)


def _out(z: complex, was_complex: bool):
    return z if was_complex else z.real


# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _gamma_c(z: complex) -> complex:
    if z.real < 0.5:
        s = cmath.sin(math.pi * z)
        return math.pi / (s * _gamma_c(1.0 - z))
    z = z - 1.0
    x = _LANCZOS[0]
    for i in range(1, 9):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def gamma_fn(z):
    """Euler's Gamma function.

    Raises :class:`PoleError` at ``0, -1, -2, ...``.  Real input gives a
    real result.

    >>> round(gamma_fn(0.5) ** 2, 12) == round(math.pi, 12)
    True
    """
    zc, was_complex = _as_number(z)
    if _is_nonpositive_integer(zc):
        raise PoleError(f"Gamma has a pole at {z}")
    if zc.imag == 0.0 and zc.real == math.floor(zc.real) and 0 < zc.real <= 20:
        return _out(complex(math.factorial(int(zc.real) - 1)), was_complex)
    return _out(_gamma_c(zc), was_complex)


def rgamma(z):
    """``1/Gamma(z)``, equal to zero at the poles of Gamma."""
    zc, was_complex = _as_number(z)
    if _is_nonpositive_integer(zc):
        return _out(0j, was_complex)
    return _out(1.0 / _gamma_c(zc), was_complex)


# Bernoulli numbers B_2k / (2k) for the digamma asymptotic series
_PSI_COEF = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)
# B_2k for the trigamma series
_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def _digamma_c(z: complex) -> complex:
    if z.real < 0.5:
        return _digamma_c(1.0 - z) - math.pi / cmath.tan(math.pi * z)
    acc = 0j
    while abs(z) < 15.0:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    p = inv2
    for c in _PSI_COEF:
        series += c * p
        p *= inv2
    return acc + cmath.log(z) - 0.5 / z - series


def digamma(z):
    """Digamma function ``psi = Gamma'/Gamma``.

    >>> round(-digamma(1.0), 15)
    0.577215664901533
    """
    zc, was_complex = _as_number(z)
    if _is_nonpositive_integer(zc):
        raise PoleError(f"digamma has a pole at {z}")
    return _out(_digamma_c(zc), was_complex)


def _trigamma_c(z: complex) -> complex:
    if z.real < 0.5:
        s = cmath.sin(math.pi * z)
        return -_trigamma_c(1.0 - z) + (math.pi / s) ** 2
    acc = 0j
    while abs(z) < 15.0:
        acc += 1.0 / (z * z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = inv + 0.5 * inv2
    p = inv2 * inv
    for b in _B2K:
        series += b * p
        p *= inv2
    return acc + series


def trigamma(z):
    """First derivative of the digamma function."""
    zc, was_complex = _as_number(z)
    if _is_nonpositive_integer(zc):
        raise PoleError(f"trigamma has a pole at {z}")
    return _out(_trigamma_c(zc), was_complex)


# ---------------------------------------------------------------------------
# Gauss hypergeometric function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Hyp2F1Params:
    alpha: complex
    beta: complex
    gamma_param: complex
    xi: float

    def __post_init__(self):
        if not (0.0 <= float(self.xi) <= 1.0):
            raise ParameterError("xi must lie in [0, 1]")
        if _is_nonpositive_integer(complex(self.gamma_param)):
            raise ParameterError("third parameter is a nonpositive integer")


def _series_threshold(tol: Tolerance) -> float:
    # The tail of a slowly converging series is many times its last term, so
    # individual terms are driven far below the requested accuracy.
    return max(min(tol.rel * 1e-6, 1e-16), 1e-18)


def _series(a, b, c, z, tol: Tolerance, cap: int = 10_000):
    """Plain power series sum_n (a)_n (b)_n / ((c)_n n!) z^n."""
    term = 1.0 + 0j
    total = 1.0 + 0j
    small = 0
    thresh = _series_threshold(tol)
    for n in range(cap):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) <= thresh * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise SeriesConvergenceError("hypergeometric series did not converge within 10000 terms")


def _terminating(a, b, c, z):
    """Finite sum when a or b is a nonpositive integer."""
    m = None
    for p in (a, b):
        if _is_nonpositive_integer(p):
            k = int(round(-p.real))
            m = k if m is None else min(m, k)
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(m):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
    return total


def _connection_generic(a, b, c, z, tol):
    """15.3.6-type formula, c - a - b not an integer."""
    w = 1.0 - z
    d = c - a - b
    g1 = _gamma_c(c) * _gamma_c(d) * _rg(c - a) * _rg(c - b)
    g2 = _gamma_c(c) * _gamma_c(-d) * _rg(a) * _rg(b)
    t1 = g1 * _series(a, b, 1.0 - d, w, tol) if g1 != 0 else 0j
    t2 = g2 * cmath.exp(d * cmath.log(w)) * _series(c - a, c - b, 1.0 + d, w, tol) if g2 != 0 else 0j
    return t1 + t2, max(abs(t1), abs(t2))


def _rg(z: complex) -> complex:
    if _is_nonpositive_integer(z):
        return 0j
    return 1.0 / _gamma_c(z)


def _psi_run(z0: complex, count: int):
    """psi(z0 + n) for n = 0 .. count-1 via the recurrence."""
    out = np.empty(count, dtype=complex)
    p = _digamma_c(z0)
    for n in range(count):
        out[n] = p
        p += 1.0 / (z0 + n)
    return out


def _connection_log(a, b, m: int, z, tol, cap: int = 10_000):
    """Connection formula when c = a + b + m with integer m (log case)."""
    w = 1.0 - z
    lw = math.log(w)
    if m < 0:
        # c = a + b - k; reduce with Euler's transformation
        k = -m
        c = a + b - k
        # F(a,b;c;z) = (1-z)^{c-a-b} F(c-a, c-b; c; z), and (c-a)+(c-b) = c + k
        return cmath.exp(-k * lw) * _connection_log(c - a, c - b, k, z, tol, cap)
    c = a + b + m
    # finite part
    finite = 0j
    if m > 0:
        pref = math.factorial(m - 1) * _gamma_c(c) * _rg(a + m) * _rg(b + m)
        term = 1.0 + 0j
        for n in range(m):
            if n > 0:
                term *= (a + n - 1) * (b + n - 1) / (n * (n - m)) * w
            finite += term
        finite *= pref
    # logarithmic series
    pref2 = _gamma_c(c) * _rg(a) * _rg(b)
    if pref2 == 0:
        return finite
    pa = _psi_run(a + m, cap)
    pb = _psi_run(b + m, cap)
    total = 0j
    term = 1.0 / math.factorial(m)
    psi1 = -EULER_GAMMA
    psi_m1 = _digamma_c(complex(m + 1)).real
    small = 0
    for n in range(cap):
        if n > 0:
            term *= (a + m + n - 1) * (b + m + n - 1) / (n * (n + m)) * w
            psi1 += 1.0 / n
            psi_m1 += 1.0 / (n + m)
        piece = term * (lw - psi1 - psi_m1 + pa[n] + pb[n])
        total += piece
        if abs(piece) <= _series_threshold(tol) * abs(total) and n > 2:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise SeriesConvergenceError("logarithmic connection series did not converge")
    return finite - ((-w) ** m) * pref2 * total


_NEAR_INT = 0.05
_OFFSETS = (-4, -3, -2, -1, 1, 2, 3, 4)
_STEP = 0.03
_CANCEL = 1e3
_SERIES_FALLBACK = 0.9


def _upper(a, b, c, z, tol):
    """Evaluation for 1/2 < z < 1."""
    d = c - a - b
    m = round(d.real)
    eps = d - m
    if eps == 0:
        return _connection_log(a, b, int(m), z, tol)
    if abs(eps) >= _NEAR_INT:
        value, magnitude = _connection_generic(a, b, c, z, tol)
        if magnitude > _CANCEL * abs(value) and z <= _SERIES_FALLBACK:
            # the two connection terms cancel badly; the direct series is
            # still cheap this far from xi = 1
            return _series(a, b, c, z, tol)
        return value
    # Close to the logarithmic case the two generic terms cancel.  F is entire
    # in its first parameter, so interpolate in alpha between the exact log
    # case and well-separated generic evaluations.
    a0 = a + eps
    nodes = [0.0] + [k * _STEP for k in _OFFSETS]
    vals = [_connection_log(a0, b, int(m), z, tol)]
    vals += [_connection_generic(a0 - e, b, c, z, tol)[0] for e in nodes[1:]]
    result = 0j
    for i, xi in enumerate(nodes):
        li = 1.0 + 0j
        for j, xj in enumerate(nodes):
            if j != i:
                li *= (eps - xj) / (xi - xj)
        result += li * vals[i]
    return result


def hyp2f1(alpha, beta=None, gamma_param=None, xi=None, tol: Tolerance = DEFAULT_TOL) -> complex:
    """Gauss hypergeometric function ``F(alpha, beta; gamma; xi)`` for ``0 <= xi <= 1``.

    Accepts either a :class:`Hyp2F1Params` or the four values.  Returns a
    complex number (real parameters give a vanishing imaginary part).

    >>> abs(hyp2f1(0.5, 0.5, 2.0, 1.0) - 4 / math.pi) < 1e-13
    True
    """
    if isinstance(alpha, Hyp2F1Params):
        p = alpha
    else:
        p = Hyp2F1Params(alpha, beta, gamma_param, xi)
    a, b, c = complex(p.alpha), complex(p.beta), complex(p.gamma_param)
    z = float(p.xi)
    if z == 0.0:
        return 1.0 + 0j
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _terminating(a, b, c, z)
    if z == 1.0:
        return gauss_value_at_one(a, b, c)
    if z <= 0.5:
        return _series(a, b, c, z, tol)
    return _upper(a, b, c, z, tol)


def hyp2f1_derivative(alpha, beta, gamma_param, xi, tol: Tolerance = DEFAULT_TOL) -> complex:
    """``d/dxi F(alpha, beta; gamma; xi)``."""
    a, b, c = complex(alpha), complex(beta), complex(gamma_param)
    if a == 0 or b == 0:
        return 0j
    return a * b / c * hyp2f1(a + 1, b + 1, c + 1, xi, tol)


def gauss_value_at_one(alpha, beta, gamma_param) -> complex:
    """``Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))``, valid for ``Re(c-a-b) > 0``."""
    a, b, c = complex(alpha), complex(beta), complex(gamma_param)
    if _is_nonpositive_integer(c):
        raise DivergenceError("third parameter is a nonpositive integer")
    d = c - a - b
    if not d.real > 0:
        raise DivergenceError("F(a, b; c; 1) diverges unless Re(c - a - b) > 0")
    return _gamma_c(c) * _gamma_c(d) * _rg(c - a) * _rg(c - b)


def bessel_j0_zero(k: int) -> float:
    """k-th positive zero of ``J0``.

    McMahon's expansion seeds a Newton iteration on ``J0`` (``J0' = -J1``).
    """
    if int(k) != k or k < 1:
        raise ValueError("zero index must be a positive integer")
    beta = (k - 0.25) * math.pi
    x = beta + 1 / (8 * beta) - 31 / (384 * beta ** 3) + 3779 / (15360 * beta ** 5)
    for _ in range(50):
        step = _sp.j0(x) / _sp.j1(x)
        x += step
        if abs(step) <= 1e-15 * x:
            break
    return float(x)
