"""Verification suites run by ``besselext verify``.

Each suite returns a list of ``(name, passed, detail)`` triples.  The
checks are cheap, self-contained versions of the properties exercised by
the test suite; they use only the package itself.
"""
from __future__ import annotations

import math
from typing import Callable, Dict, List, Tuple

import numpy as np
from scipy import optimize

from .corpus import near_extremal_trial, trial_corpus
from .extensions import comparison_function, krein_closed_form_q0, krein_cot_q0, krein_matrix_numeric
from .hardy import hardy_report, muckenhoupt
from .numerics import Tolerance, limit_extrapolate
from .problem import BesselProblem, Potential
from .solutions import global_frame_q0, ode_residual, volterra_frame, wronskian
from .specialfn import (
    bessel_j0_zero,
    digamma,
    gamma_fn,
    gauss_value_at_one,
    hyp2f1,
    trigamma,
)

Check = Tuple[str, bool, str]

KREIN_GRID = (0.0, 0.25, 0.5, 0.75)
J01_SQUARED = 5.783185962946785


def _check(name: str, value: float, limit: float) -> Check:
    return (name, bool(value <= limit), f"{value:.3e} <= {limit:.3g}")


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def gauss_triples(n: int = 20, seed: int = 11):
    """Random ``(a, b, c)`` with ``Re(c - a - b) > 0``; every other triple has ``b = conj(a)``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        if i % 2:
            s, t = rng.uniform(-1, 1), rng.uniform(0.1, 2.0)
            out.append((complex(s, t), complex(s, -t), float(2 * s + rng.uniform(0.2, 3.0))))
        else:
            a, b = rng.uniform(-2, 2, 2)
            out.append((float(a), float(b), float(a + b + rng.uniform(0.2, 3.0))))
    return out


def gauss_extrapolated(a, b, c) -> complex:
    """``F(a, b; c; 1)`` as the limit of ``F(a, b; c; 1 - delta)`` on a geometric ladder."""
    deltas = 2.0 ** -np.arange(4, 40, 3)
    vals = np.array([complex(hyp2f1(a, b, c, 1 - d)) for d in deltas])
    return complex(limit_extrapolate(deltas, vals, "algebraic", Tolerance(rel=1e-9, abs=1e-9)).value)


def suite_specialfn() -> List[Check]:
    out = []
    zs = [0.3, 1.7, 4.25, -2.5, complex(0.5, 1.2), complex(-1.3, 0.4)]
    err = max(abs(gamma_fn(z + 1) - z * gamma_fn(z)) / abs(gamma_fn(z + 1)) for z in zs)
    out.append(_check("gamma recurrence", err, 1e-13))
    err = max(abs(gamma_fn(z) * gamma_fn(1 - z) * np.sin(np.pi * z) - np.pi) / np.pi for z in zs)
    out.append(_check("gamma reflection", err, 1e-12))
    err = max(abs(gamma_fn(z) * gamma_fn(z + 0.5) - 2 ** (1 - 2 * z) * math.sqrt(math.pi) * gamma_fn(2 * z))
              / abs(gamma_fn(2 * z)) for z in zs if z != -2.5)
    out.append(_check("gamma duplication", err, 1e-12))
    err = max(abs(digamma(z + 1) - digamma(z) - 1 / z) for z in zs)
    out.append(_check("digamma recurrence", err, 1e-12))
    err = max(abs(trigamma(z) - trigamma(z + 1) - 1 / z ** 2) for z in zs)
    out.append(_check("trigamma recurrence", err, 1e-11))
    worst, worst_im = 0.0, 0.0
    for a, b, c in gauss_triples():
        exact = complex(gauss_value_at_one(a, b, c))
        est = gauss_extrapolated(a, b, c)
        worst = max(worst, abs(est - exact) / max(1.0, abs(exact)))
        if isinstance(a, complex):
            worst_im = max(worst_im, abs(est.imag), abs(exact.imag))
    out.append(_check("Gauss value at one from extrapolation", worst, 1e-8))
    out.append(_check("conjugate parameters give real values", worst_im, 1e-10))
    worst = 0.0
    for a, b, c, z in [(0.3, -1.2, 1.7, 0.8), (1.5, 0.25, 2.2, 0.95), (-0.4, 0.7, 0.9, 0.6)]:
        lhs = complex(hyp2f1(a, b, c, z))
        rhs = (1 - z) ** (c - a - b) * complex(hyp2f1(c - a, c - b, c, z))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    out.append(_check("Euler transformation", worst, 1e-11))
    out.append(_check("first J0 zero squared", abs(bessel_j0_zero(1) ** 2 - J01_SQUARED) / J01_SQUARED, 1e-14))
    return out


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

FRAME_CASES = (
    (BesselProblem(0.0, 1.0, 0.5, 0.5), 0.0),
    (BesselProblem(0.0, 1.0, 0.0, 0.3), 0.0),
    (BesselProblem(0.0, 1.0, 0.25, 0.75), 7.5),
    (BesselProblem(-1.0, 1.5, 0.8, 0.0, Potential.poly([1.0, -2.0, 0.5])), 3.0),
    (BesselProblem(0.0, 2.0, 1.5, 0.6, Potential.const(2.0)), -4.0),
)


def frame_samples(frame):
    lo, hi = frame.validity
    return np.linspace(lo, hi, 7)[1:-1]


def suite_frames() -> List[Check]:
    out = []
    worst_w, worst_r = 0.0, 0.0
    for prob, lam in FRAME_CASES:
        for ep in ("a", "b"):
            fr = volterra_frame(prob, ep, lam)
            xs = frame_samples(fr)
            members = [fr.u]
            if fr.has_u_hat:
                members.append(fr.u_hat)
                W = wronskian(*fr.u_hat(xs), *fr.u(xs))
                worst_w = max(worst_w, float(np.max(np.abs(W - 1))))
            for m in members:
                worst_r = max(worst_r, ode_residual(prob, lam, m, xs))
    out.append(_check("W(u_hat, u) = 1 on Volterra frames", worst_w, 1e-9))
    out.append(_check("ODE residual of Volterra frames", worst_r, 1e-6))
    worst_w = 0.0
    for sa, sb in [(0.3, 0.6), (0.0, 0.0), (0.5, 0.25), (0.75, 0.0)]:
        prob = BesselProblem(0.0, 1.0, sa, sb)
        for ep in ("a", "b"):
            fr = global_frame_q0(prob, ep)
            xs = np.array([0.05, 0.2, 0.4]) if ep == "a" else 1 - np.array([0.05, 0.2, 0.4])
            W = wronskian(*fr.u_hat(xs), *fr.u(xs))
            worst_w = max(worst_w, float(np.max(np.abs(W - 1))))
    out.append(_check("W(u_hat, u) = 1 on hypergeometric frames", worst_w, 1e-9))
    return out


# ---------------------------------------------------------------------------
# Krein data
# ---------------------------------------------------------------------------


def suite_krein() -> List[Check]:
    out = []
    worst_det, worst_agree = 0.0, 0.0
    for L in (1.0, 2.5):
        for sa in KREIN_GRID:
            for sb in KREIN_GRID:
                prob = BesselProblem(0.0, L, sa, sb)
                M, _ = krein_matrix_numeric(prob)
                worst_det = max(worst_det, abs(np.linalg.det(M) - 1))
                C = krein_closed_form_q0(prob).matrix
                worst_agree = max(worst_agree, float(np.max(np.abs(M - C))))
    out.append(_check("det R_K = 1 on the strength grid", worst_det, 1e-10))
    out.append(_check("closed form and frame transport agree", worst_agree, 1e-6))
    worst = 0.0
    for sa in (1.0, 1.5, 2.7):
        for L in (1.0, 2.5):
            worst = max(worst, abs(krein_cot_q0(BesselProblem(0.0, L, sa, 0.5)) + (sa + 0.5) / L))
    out.append(_check("Dirichlet end point: cot = -(s_a + 1/2)/(b - a)", worst, 1e-10))
    worst = 0.0
    for sa in (1.0, 1.7):
        for sb in (0.0, 0.3, 0.8):
            for prob in (BesselProblem(0.0, 1.5, sa, sb), BesselProblem(0.0, 1.5, sb, sa)):
                cot = krein_cot_q0(prob)
                M_ab, M_ba = krein_matrix_numeric(prob)
                val, der = (M_ab if prob.s_b < 1 else M_ba)[:, 1]
                num = -der / val
                worst = max(worst, abs(cot - num) / max(1.0, abs(cot)))
    out.append(_check("explicit Krein angle formula matches frame transport", worst, 1e-6))
    return out


# ---------------------------------------------------------------------------
# Hardy-type inequalities and positivity comparison
# ---------------------------------------------------------------------------

HARDY_SUITE_VARIANTS = ("power_12", "distance_13", "sine_14", "halfline_B11")


def comparison_minimum():
    """Numerical minimum ``(x*, value)`` of the positivity comparison function on ``(0, pi)``."""
    res = optimize.minimize_scalar(lambda x: float(comparison_function(x)), bounds=(0.05, math.pi - 0.05),
                                   method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(res.fun)


def suite_hardy() -> List[Check]:
    out = []
    violations = 0
    not_strict = 0
    for trial in trial_corpus(50):
        for v in HARDY_SUITE_VARIANTS:
            r = hardy_report(trial, v)
            violations += not r.satisfied
            not_strict += not r.ratio > r.constant
    out.append(("50-trial corpus: no violations", violations == 0, f"{violations} violations"))
    out.append(("50-trial corpus: strict inequalities", not_strict == 0, f"{not_strict} non-strict"))
    r = hardy_report(near_extremal_trial(1e-3), "power_12", admissibility="trust")
    out.append(_check("near-extremal ratio at eps = 1e-3", r.ratio, 0.26))
    worst = 0.0
    for s in (0.1, 0.3, 0.5):
        m = muckenhoupt("B_form", lambda x, s=s: x ** (2 * s - 1), lambda x, s=s: x ** (2 * s + 1))
        worst = max(worst, abs(m.value - 1 / (2 * s)) * 2 * s)
        worst = max(worst, abs(m.bracket[1] - 2 * m.value) / m.value)
    out.append(_check("Muckenhoupt B = 1/(2s) with bracket [B, 2B]", worst, 1e-4))
    x, val = comparison_minimum()
    err = max(abs(val - (2 - 8 / math.pi ** 2)), abs(x - math.pi / 2) * 1e-3)
    out.append(_check("comparison function minimum 2 - 8/pi^2 at pi/2", err, 1e-8))
    return out


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "specialfn": suite_specialfn,
    "frames": suite_frames,
    "krein": suite_krein,
    "hardy": suite_hardy,
}
