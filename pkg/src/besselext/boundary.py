"""Generalized boundary values at limit circle endpoints.

For ``g`` in the maximal domain,

    g~(a)  = -W(u_a, g)(a),    g~'(a) = W(u_hat_a, g)(a),

and likewise at ``b``, where ``(u, u_hat)`` is the ``lambda = 0`` frame.
The Wronskians are sampled on a geometric ladder toward the endpoint and
extrapolated.  For ``q = 0`` the quotient limits against the pure power
forms are evaluated as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import DEFAULT_TOL, ModelMismatchError, Tolerance, limit_extrapolate
from .problem import BesselProblem
from .solutions import (
    FrameUndefinedError,
    Solution,
    SolutionFrame,
    local_frame_q0,
    volterra_frame,
    wronskian,
)

__all__ = ["BoundaryData", "BoundaryValueError", "boundary_values", "boundary_basis", "reference_frames"]


class BoundaryValueError(RuntimeError):
    """Boundary value extrapolation failed at the named endpoint."""

    def __init__(self, endpoint: str, message: str):
        super().__init__(f"endpoint {endpoint}: {message}")
        self.endpoint = endpoint


@dataclass(frozen=True)
class BoundaryData:
    """``(g~, g~')`` at each limit circle endpoint; ``None`` at limit point endpoints."""

    at_a: Optional[tuple] = None
    at_b: Optional[tuple] = None
    cross_check: dict = field(default_factory=dict, compare=False)

    def vector(self, endpoint: str):
        pair = self.at_a if endpoint == "a" else self.at_b
        if pair is None:
            raise FrameUndefinedError(f"no boundary data at limit point endpoint {endpoint}")
        return np.array(pair)


def reference_frames(problem: BesselProblem, tol: Tolerance = DEFAULT_TOL) -> dict:
    """``lambda = 0`` frames at both endpoints."""
    return {e: volterra_frame(problem, e, 0.0, tol) for e in ("a", "b")}


def _ladder(problem: BesselProblem, frame: SolutionFrame, kmax: int = 8):
    L = problem.length
    h = frame.info.get("width", L / 4) if frame.method == "volterra" else L / 4
    deltas = L * 2.0 ** -np.arange(kmax + 1) / 16
    return deltas[deltas <= h]


def _limit(endpoint, deltas, values, model, tol):
    vals = np.asarray(values)
    spread = np.max(np.abs(vals - vals[-1]))
    if spread <= max(tol.abs, tol.rel * np.max(np.abs(vals))):
        return vals[-1]
    try:
        return limit_extrapolate(deltas, vals, model, tol).value
    except ModelMismatchError as exc:
        raise BoundaryValueError(endpoint, f"Wronskian ladder does not extrapolate ({exc})") from None


def _quotient_check(problem, g, endpoint, s):
    """Boundary values from the quotient limits against the local power forms."""
    ep = problem.a if endpoint == "a" else problem.b
    L = problem.length
    if s == 0:
        # ladder geometric in 1/ln(1/t) so that the slow term is algebraic
        ell0 = math.log(16.0 / L) if L < 16 else 1.0
        ts = np.exp(-ell0 * 2.0 ** np.arange(6))
        floor = max(1e-150, 1e3 * np.finfo(float).eps * abs(ep))
        ts = ts[ts > floor]
        absc = 1.0 / np.log(1.0 / ts)
    else:
        ts = L * 2.0 ** -np.arange(0, 40, 4) / 16
        floor = max(1e-150, 1e3 * np.finfo(float).eps * abs(ep))
        ts = ts[ts > floor]
        absc = ts
    if len(ts) < 3:
        return None
    xs = ep + ts if endpoint == "a" else ep - ts
    gv = np.array([g(x)[0] for x in xs])
    (U, _), (Uh, _) = local_frame_q0(s, endpoint, xs, problem.a, problem.b)
    # solve g = g~ * Uh + g~' * U on each pair of neighbouring ladder points;
    # peeling g~ off first would amplify its error by Uh/U
    det = Uh[:-1] * U[1:] - Uh[1:] * U[:-1]
    gts = (gv[:-1] * U[1:] - gv[1:] * U[:-1]) / det
    gps = (Uh[:-1] * gv[1:] - Uh[1:] * gv[:-1]) / det
    if len(gts) < 3:
        return float(gts[-1]), float(gps[-1])
    loose = Tolerance(rel=1e-4, abs=1e-8)
    try:
        gt = limit_extrapolate(absc[1:], gts, "algebraic", loose).value
        gp = limit_extrapolate(absc[1:], gps, "algebraic", loose).value
    except ModelMismatchError:
        return None
    return gt, gp


def boundary_values(problem: BesselProblem, g: Callable, frames: Optional[dict] = None,
                    tol: Tolerance = DEFAULT_TOL, cross_check: bool = True) -> BoundaryData:
    """Generalized boundary values of ``g`` (an evaluator ``x -> (g, g')``).

    Raises :class:`BoundaryValueError` naming the endpoint if the Wronskian
    ladder does not extrapolate.  Certified accuracy is for solution-like
    ``g``; for other elements of the maximal domain the convergence along
    the ladder is slower and the extrapolation may fail.
    """
    frames = frames if frames is not None else reference_frames(problem, tol)
    out = {}
    checks = {}
    for endpoint in ("a", "b"):
        s = problem.strength(endpoint)
        if s >= 1:
            out[endpoint] = None
            continue
        fr = frames[endpoint]
        deltas = _ladder(problem, fr)
        ep = problem.a if endpoint == "a" else problem.b
        xs = ep + deltas if endpoint == "a" else ep - deltas
        Wu = []
        Wh = []
        for x in xs:
            gv, gd = g(x)
            uv, ud = fr.u(x)
            hv, hd = fr.u_hat(x)
            Wu.append(-wronskian(uv, ud, gv, gd))
            Wh.append(wronskian(hv, hd, gv, gd))
        model = "algebraic-log" if s == 0 else "algebraic"
        gt = _limit(endpoint, deltas, Wu, model, tol)
        gp = _limit(endpoint, deltas, Wh, model, tol)
        out[endpoint] = (gt, gp)
        if cross_check and problem.q.is_zero:
            checks[endpoint] = _quotient_check(problem, g, endpoint, s)
    return BoundaryData(out["a"], out["b"], checks)


def boundary_basis(problem: BesselProblem, lam, endpoint: str, tol: Tolerance = DEFAULT_TOL):
    """Solutions ``(theta, phi)`` of ``(tau - lam) u = 0`` with boundary data (1, 0) and (0, 1).

    These are the ``lam`` frame members ``(u_hat, u)``: their leading
    behavior matches the ``lambda = 0`` frame and the corrections vanish
    fast enough not to affect the boundary values.
    """
    if problem.strength(endpoint) >= 1:
        raise FrameUndefinedError(f"endpoint {endpoint} is limit point; it carries no boundary data")
    frames = {e: volterra_frame(problem, e, lam, tol) for e in ("a", "b")}
    theta = Solution(problem, lam, endpoint, 1.0, 0.0, frames, tol)
    phi = Solution(problem, lam, endpoint, 0.0, 1.0, frames, tol)
    return theta, phi
