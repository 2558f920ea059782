"""Eigenvalues and eigenfunctions of self-adjoint realizations.

Both endpoints are handled by the regularized frames: the ``lambda`` frame
members at each endpoint are the solutions with boundary data ``(1, 0)``
(nonprincipal ``theta``) and ``(0, 1)`` (principal ``phi``).  They are
transported from the frame edges to the midpoint, where the matching
determinant is formed from Wronskians:

* separated: ``D = W(chi_b, chi_a)`` with ``chi = sin(angle) theta - cos(angle) phi``
  (the principal member at a limit point endpoint);
* coupled: ``D = det(M - e^{i phi} R)`` where the columns of ``M`` are the
  boundary data at ``b`` of ``theta_a`` and ``phi_a``.

Since ``det M = det R = 1``, ``e^{-i phi} D = 2 cos(phi) - tr(adj(M) R)`` is
real, so a sign-change scan works for every phase.  Spectral parameters are
processed in batches: the Volterra frames and the ODE transport both
vectorize over ``lambda``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .extensions import ExtensionSpec, classify
from .numerics import DEFAULT_TOL, Tolerance, integrate_ode, quad_singular
from .problem import BesselProblem
from .solutions import Solution, frame_edge_states, ode_residual, volterra_frame, wronskian

__all__ = [
    "Spectrum",
    "Eigenpair",
    "EigenfunctionError",
    "matching_determinant",
    "eigenvalues",
    "ground_state",
    "eigenfunction",
    "boundary_residual",
]

_ODE_TOL = Tolerance(rel=1e-10, abs=1e-13)
_CHUNK = 48


class EigenfunctionError(RuntimeError):
    """The requested value is not an eigenvalue of the given extension."""


@dataclass(frozen=True)
class Spectrum:
    """``eigenvalues`` holds ``(lambda, multiplicity, residual)`` triples, sorted."""

    eigenvalues: tuple
    search_range: tuple
    extension: ExtensionSpec

    @property
    def values(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        out = []
        for lam, mult, _ in self.eigenvalues:
            out.extend([lam] * mult)
        return np.array(out)

    def __len__(self):
        return len(self.eigenvalues)


# ---------------------------------------------------------------------------
# batched frame data at the midpoint
# ---------------------------------------------------------------------------


def _members_at_mid(problem: BesselProblem, lams: np.ndarray):
    """``{endpoint: (theta, phi)}`` with each member a ``(value, derivative)`` pair of arrays.

    ``theta`` is ``None`` at a limit point endpoint.
    """
    m = problem.midpoint
    res = {}
    for e in ("a", "b"):
        lc = problem.strength(e) < 1
        x0, U, dU, Uh, dUh = frame_edge_states(problem, e, lams, want_hat=lc)
        if lc:
            v0 = np.stack([Uh, U])
            d0 = np.stack([dUh, dU])
        else:
            v0 = U[None, :]
            d0 = dU[None, :]
        lam_row = lams[None, :]
        pot = problem.singular_part if problem.q.is_zero else problem.potential

        def coef(x, lam_row=lam_row, pot=pot):
            return pot(x) - lam_row

        sol = integrate_ode(coef, x0, (v0, d0), m, _ODE_TOL)
        if lc:
            res[e] = ((sol.u[0], sol.du[0]), (sol.u[1], sol.du[1]))
        else:
            res[e] = (None, (sol.u[0], sol.du[0]))
    return res


def _chi(pair, angle):
    theta, phi = pair
    if angle is None or theta is None:
        return phi
    sa, ca = math.sin(angle), math.cos(angle)
    return (sa * theta[0] - ca * phi[0], sa * theta[1] - ca * phi[1])


def _data_at_b(mid, g):
    theta_b, phi_b = mid["b"]
    return -wronskian(phi_b[0], phi_b[1], g[0], g[1]), wronskian(theta_b[0], theta_b[1], g[0], g[1])


def _coupled_matrix(mid):
    """``M`` with shape ``(2, 2, n)``: columns are the data at b of ``theta_a``, ``phi_a``."""
    theta_a, phi_a = mid["a"]
    c0 = _data_at_b(mid, theta_a)
    c1 = _data_at_b(mid, phi_a)
    return np.array([[c0[0], c1[0]], [c0[1], c1[1]]])


def _resolve(problem: BesselProblem, ext: ExtensionSpec, tol: Tolerance) -> ExtensionSpec:
    return ext.resolve(problem, tol)


def _evaluate(problem: BesselProblem, ext: ExtensionSpec, lams):
    """Real matching function ``F``, the raw determinant ``D`` and (coupled) ``M - e^{i phi} R``."""
    lams = np.asarray(lams, dtype=float)
    order = np.argsort(lams)
    F = np.empty(lams.shape)
    D = np.empty(lams.shape, dtype=complex)
    E = np.empty((2, 2) + lams.shape, dtype=complex) if ext.kind == "coupled" else None
    for start in range(0, len(lams), _CHUNK):
        idx = order[start:start + _CHUNK]
        mid = _members_at_mid(problem, lams[idx])
        if ext.kind == "coupled":
            M = _coupled_matrix(mid)
            z = cmath.exp(1j * ext.phi)
            Mz = M - z * ext.matrix[:, :, None]
            d = Mz[0, 0] * Mz[1, 1] - Mz[0, 1] * Mz[1, 0]
            D[idx] = d
            F[idx] = (d / z).real
            E[:, :, idx] = Mz
        else:
            alpha = ext.alpha if ext.kind == "separated" else None
            beta = ext.beta if ext.kind == "separated" else None
            ca = _chi(mid["a"], alpha)
            cb = _chi(mid["b"], beta)
            d = wronskian(cb[0], cb[1], ca[0], ca[1])
            D[idx] = d
            F[idx] = d
    return F, D, E


def matching_determinant(problem: BesselProblem, ext: ExtensionSpec, lam, tol: Tolerance = DEFAULT_TOL):
    """Matching determinant at ``lam`` (scalar or array).

    Real for separated conditions and for ``phi in {0, pi}``; complex
    otherwise.  Complex ``lam`` is accepted for diagnostics through the
    scalar frame path.
    """
    ext = _resolve(problem, ext, tol)
    if np.iscomplexobj(lam):
        return _matching_complex(problem, ext, complex(lam))
    scalar = np.ndim(lam) == 0
    _, D, _ = _evaluate(problem, ext, np.atleast_1d(lam))
    if ext.kind != "coupled" or math.sin(ext.phi) == 0:
        D = D.real
    return D[0] if scalar else D


def _matching_complex(problem, ext, lam):
    m = problem.midpoint
    mid = {}
    for e in ("a", "b"):
        fr = volterra_frame(problem, e, lam, _ODE_TOL)
        members = [fr.u_hat, fr.u] if fr.has_u_hat else [fr.u]
        starts = [ev(fr.edge) for ev in members]
        y0 = (np.array([p[0] for p in starts]), np.array([p[1] for p in starts]))
        sol = integrate_ode(problem.coefficient(lam), fr.edge, y0, m, _ODE_TOL)
        pairs = [(sol.u[i], sol.du[i]) for i in range(len(members))]
        mid[e] = tuple(pairs) if fr.has_u_hat else (None, pairs[0])
    if ext.kind == "coupled":
        M = _coupled_matrix(mid)
        Mz = M - cmath.exp(1j * ext.phi) * ext.matrix
        return Mz[0, 0] * Mz[1, 1] - Mz[0, 1] * Mz[1, 0]
    alpha = ext.alpha if ext.kind == "separated" else None
    beta = ext.beta if ext.kind == "separated" else None
    ca = _chi(mid["a"], alpha)
    cb = _chi(mid["b"], beta)
    return wronskian(cb[0], cb[1], ca[0], ca[1])


# ---------------------------------------------------------------------------
# scan and refinement
# ---------------------------------------------------------------------------


def _scan_grid(lo: float, hi: float, L: float, density: float) -> np.ndarray:
    """Points with spacing a quarter of the local Weyl gap (divided by ``density``)."""
    base = math.pi ** 2 / L ** 2
    pts = [lo]
    x = lo
    while x < hi:
        gap = base + 2 * math.pi * math.sqrt(max(x, 0.0)) / L
        x = min(hi, x + gap / (4 * density))
        pts.append(x)
    return np.array(pts)


def _illinois(problem, ext, lo, hi, flo, fhi, xtol_rel, max_iter=60):
    """Vectorized regula falsi with Anderson-Bjorck scaling on sign-change brackets."""
    lo, hi, flo, fhi = (np.array(v, dtype=float) for v in (lo, hi, flo, fhi))
    side = np.zeros(lo.shape, dtype=int)
    done = np.zeros(lo.shape, dtype=bool)
    root = 0.5 * (lo + hi)
    fscale = np.maximum(np.abs(flo), np.abs(fhi))
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if not len(act):
            break
        l, h, fl, fh = lo[act], hi[act], flo[act], fhi[act]
        x = h - fh * (h - l) / (fh - fl)
        bad = ~((x > l) & (x < h))
        x[bad] = 0.5 * (l[bad] + h[bad])
        fx, _, _ = _evaluate(problem, ext, x)
        for k, i in enumerate(act):
            root[i] = x[k]
            if fx[k] == 0:
                done[i] = True
                continue
            if np.sign(fx[k]) == np.sign(fhi[i]):
                m = 1.0 - fx[k] / fhi[i]
                hi[i], fhi[i] = x[k], fx[k]
                if side[i] == 1:
                    flo[i] *= m if m > 0 else 0.5
                side[i] = 1
            else:
                m = 1.0 - fx[k] / flo[i]
                lo[i], flo[i] = x[k], fx[k]
                if side[i] == -1:
                    fhi[i] *= m if m > 0 else 0.5
                side[i] = -1
            width = hi[i] - lo[i]
            if width <= xtol_rel * max(1.0, abs(x[k])) or abs(fx[k]) <= 1e-13 * fscale[i]:
                done[i] = True
                if fhi[i] != flo[i]:
                    root[i] = lo[i] - flo[i] * width / (fhi[i] - flo[i])
    return root


def _hopeless(x3, f3) -> bool:
    """True if a parabola through three samples keeps clear of zero.

    A double root or a close pair of roots makes the fitted minimum of
    ``|F|`` reach (or cross) zero; a near miss leaves it well away.  On a
    coarse grid the cubic term of ``F`` can keep the fitted parabola off zero
    even at a true double root, so a deep dip (middle sample far below both
    neighbours) is never pruned.
    """
    (x0, x1, x2), (f0, f1, f2) = x3, f3
    if not (np.isfinite(f0) and np.isfinite(f2)):
        return False
    if abs(f1) < 0.1 * min(abs(f0), abs(f2)):
        return False
    d01 = (f1 - f0) / (x1 - x0)
    d12 = (f2 - f1) / (x2 - x1)
    c = (d12 - d01) / (x2 - x0)
    if c == 0:
        return False
    b = d01 - c * (x0 + x1)
    xm = min(max(-b / (2 * c), x0), x2)
    fm = f0 + d01 * (xm - x0) + c * (xm - x0) * (xm - x1)
    return bool(np.sign(fm) == np.sign(f1) and abs(fm) > 0.25 * abs(f1))


def _zoom(problem, ext, intervals, sqrt_tol, npts=33, max_levels=10):
    """Resolve local minima of ``|F|`` without a sign change (coupled case).

    Each interval is resampled around the smallest ``|F|`` until either a
    sign change appears (two nearby simple roots) or the interval is narrow;
    a narrow survivor is polished on the fastest varying entry of
    ``M - e^{i phi} R`` and accepted as a double root when all four entries
    nearly vanish there.  Returns ``(brackets, doubles)``.
    """
    brackets = []
    doubles = []
    rscale = max(1.0, float(np.max(np.abs(ext.matrix))))
    work = [tuple(iv) for iv in intervals]
    narrow = []
    for _ in range(max_levels):
        if not work:
            break
        grids = [np.linspace(l, r, npts) for l, r in work]
        F, _, E = _evaluate(problem, ext, np.concatenate(grids))
        nxt = []
        for k, (l, r) in enumerate(work):
            sl = slice(k * npts, (k + 1) * npts)
            f = F[sl]
            g = grids[k]
            sc = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)
            if len(sc):
                brackets.extend((g[i], g[i + 1], f[i], f[i + 1]) for i in sc)
                continue
            i = int(np.argmin(np.abs(f)))
            if i in (0, npts - 1) and abs(f[i]) > 1e-8 * np.max(np.abs(f)):
                # monotone toward the end of the interval: no interior minimum
                continue
            if 0 < i < npts - 1 and f[i] != 0 and _hopeless(g[i - 1:i + 2], f[i - 1:i + 2]):
                continue
            if f[i] == 0 or r - l <= 1e-7 * max(1.0, abs(g[i])):
                narrow.append((g[i], E[:, :, sl], g))
                continue
            nxt.append((g[max(i - 1, 0)], g[min(i + 1, npts - 1)]))
        work = nxt
    for approx, Ez, gz in narrow:
        x = _polish_double(problem, ext, approx, Ez, gz)
        _, _, Ex = _evaluate(problem, ext, [x])
        if np.max(np.abs(Ex)) <= sqrt_tol * rscale:
            doubles.append(x)
    return brackets, doubles


def _polish_double(problem, ext, approx, E, g, rtol=1e-13):
    """Locate a double root precisely through the entry that varies fastest."""
    flat = E.reshape(4, -1).real
    k = int(np.argmax(np.ptp(flat, axis=1)))
    e = flat[k]
    sc = np.flatnonzero(np.sign(e[:-1]) * np.sign(e[1:]) <= 0)
    if not len(sc):
        return approx
    i = sc[0]
    lo, hi, flo, fhi = g[i], g[i + 1], e[i], e[i + 1]
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    x = approx
    for _ in range(60):
        x = hi - fhi * (hi - lo) / (fhi - flo)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        _, _, Ex = _evaluate(problem, ext, [x])
        fx = Ex.reshape(4, -1)[k, 0].real
        if fx == 0 or hi - lo <= rtol * max(1.0, abs(x)):
            return x
        if np.sign(fx) == np.sign(fhi):
            hi, fhi = x, fx
            flo *= 0.5
        else:
            lo, flo = x, fx
            fhi *= 0.5
    return x


def eigenvalues(problem: BesselProblem, ext: ExtensionSpec, lam_range=(0.0, 100.0),
                tol: Tolerance = Tolerance(rel=1e-11, abs=1e-12), density: float = 1.0) -> Spectrum:
    """Eigenvalues in ``lam_range`` by scan, bracketing and polishing.

    ``density`` multiplies the scan density (doubling it is the
    grid-refinement rerun).  Double roots are only possible for coupled
    conditions; they are accepted when all entries of ``M - e^{i phi} R``
    fall below ``sqrt(tol.rel)`` (relative to ``R``).
    """
    lo, hi = (float(v) for v in lam_range)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError("need a finite range with lo < hi")
    ext = _resolve(problem, ext, tol)
    L = problem.length
    grid = _scan_grid(lo, hi, L, density)
    F, D, E = _evaluate(problem, ext, grid)
    coupled = ext.kind == "coupled"

    brackets = []
    exact = []
    for i in range(len(grid) - 1):
        if F[i] == 0:
            exact.append(grid[i])
        elif F[i] * F[i + 1] < 0:
            brackets.append((grid[i], grid[i + 1], F[i], F[i + 1]))
    if F[-1] == 0:
        exact.append(grid[-1])

    doubles = []
    if coupled:
        absF = np.abs(F)
        cand = []
        n = len(grid)
        for i in range(n):
            left = absF[i - 1] if i > 0 else np.inf
            right = absF[i + 1] if i < n - 1 else np.inf
            same = (i == 0 or F[i - 1] * F[i] > 0) and (i == n - 1 or F[i + 1] * F[i] > 0)
            if 0 < i < n - 1 and _hopeless(grid[i - 1:i + 2], F[i - 1:i + 2]):
                continue
            if absF[i] < left and absF[i] < right and same and F[i] != 0:
                cand.append((grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]))
        nb, doubles = _zoom(problem, ext, cand, math.sqrt(tol.rel))
        brackets.extend(nb)

    roots = []
    if brackets:
        b = np.array(brackets)
        r = _illinois(problem, ext, b[:, 0], b[:, 1], b[:, 2], b[:, 3], tol.rel)
        roots.extend((float(x), 1) for x in r)
    rscale = max(1.0, float(np.max(np.abs(ext.matrix)))) if coupled else 1.0
    for x in exact:
        mult = 1
        if coupled:
            i = int(np.flatnonzero(grid == x)[0])
            if np.max(np.abs(E[:, :, i])) <= math.sqrt(tol.rel) * rscale:
                mult = 2
        roots.append((float(x), mult))
    roots.extend((float(x), 2) for x in doubles)
    roots = [(x, m) for x, m in roots if lo - 1e-12 * max(1, abs(lo)) <= x <= hi + 1e-12 * max(1, abs(hi))]
    roots.sort()
    # merge roots found by several routes (or noise-split double roots)
    clusters = []
    for x, m in roots:
        if clusters and abs(x - clusters[-1][-1][0]) <= 1e3 * tol.rel * max(1.0, abs(x)):
            clusters[-1].append((x, m))
        else:
            clusters.append([(x, m)])
    merged = []
    for cl in clusters:
        dbl = [x for x, m in cl if m == 2]
        merged.append((dbl[0] if dbl else float(np.mean([x for x, _ in cl])), len(cl)))
    out = []
    if merged:
        lams = np.array([x for x, _ in merged])
        Fr, Dr, Er = _evaluate(problem, ext, lams)
        scale = max(1.0, float(np.median(np.abs(F))))
        for k, (x, count) in enumerate(merged):
            if coupled:
                ent = float(np.max(np.abs(Er[:, :, k]))) / rscale
                if ent <= math.sqrt(tol.rel):
                    # M - e^{i phi} R = 0: two independent solutions satisfy the condition
                    out.append((float(x), 2, ent))
                    continue
            out.append((float(x), 1, float(abs(Fr[k]) / scale)))
    out = tuple(out)
    return Spectrum(out, (lo, hi), ext)


def ground_state(problem: BesselProblem, ext: ExtensionSpec, tol: Tolerance = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of a semibounded extension.

    For the Friedrichs extension the form is bounded below by ``-sup|q|``,
    so the scan starts just below that and widens upward until a root is
    found.
    """
    ext = _resolve(problem, ext, tol)
    L = problem.length
    unit = math.pi ** 2 / L ** 2
    lo = -problem.q.sup_bound(problem.a, problem.b) - 0.05 * unit
    hi = lo + 4 * unit
    for _ in range(40):
        spec = eigenvalues(problem, ext, (lo, hi))
        if len(spec):
            return spec.eigenvalues[0][0]
        lo, hi = hi, hi + 2 * (hi - lo)
    raise RuntimeError("no eigenvalue found")


# ---------------------------------------------------------------------------
# eigenfunctions
# ---------------------------------------------------------------------------


@dataclass
class Eigenpair:
    """Normalized eigenfunction(s) at ``lam``.

    ``functions`` are evaluators ``x -> (u, u')``; ``xs``/``values`` hold a
    sampled copy.  ``residual`` is the relative ODE residual and
    ``boundary_residual`` the residual of the boundary conditions.
    """

    lam: float
    multiplicity: int
    functions: list
    xs: np.ndarray
    values: np.ndarray
    residual: float
    boundary_residual: float


class _Combo:
    def __init__(self, sols, coeffs, scale):
        self.sols = sols
        self.coeffs = coeffs
        self.scale = scale

    def __call__(self, x):
        v = 0
        d = 0
        for s, c in zip(self.sols, self.coeffs):
            if c == 0:
                continue
            sv, sd = s(x)
            v = v + c * sv
            d = d + c * sd
        return v * self.scale, d * self.scale


def _inner(problem, f, g):
    def integrand(x):
        return np.conj(f(x)[0]) * g(x)[0]

    tol = Tolerance(rel=1e-9, abs=1e-12)
    return complex(quad_singular(integrand, problem.a, problem.midpoint, tol).value
                   + quad_singular(integrand, problem.midpoint, problem.b, tol).value)


def boundary_residual(problem: BesselProblem, ext: ExtensionSpec, funcs) -> float:
    """Residual of the boundary conditions, from boundary data at both endpoints."""
    from .boundary import boundary_values

    worst = 0.0
    for f in funcs:
        bd = boundary_values(problem, f, cross_check=False,
                             tol=Tolerance(rel=1e-6, abs=1e-8))
        if ext.kind == "coupled":
            va, vb = np.asarray(bd.at_a), np.asarray(bd.at_b)
            r = vb - cmath.exp(1j * ext.phi) * ext.matrix @ va
            worst = max(worst, float(np.max(np.abs(r)) / max(1.0, np.max(np.abs(vb)))))
        elif ext.kind == "separated":
            for pair, ang in ((bd.at_a, ext.alpha), (bd.at_b, ext.beta)):
                if ang is None:
                    continue
                r = pair[0] * math.cos(ang) + pair[1] * math.sin(ang)
                worst = max(worst, abs(r) / max(1.0, abs(pair[0]), abs(pair[1])))
    return worst


def eigenfunction(problem: BesselProblem, ext: ExtensionSpec, lam: float,
                  tol: Tolerance = DEFAULT_TOL, samples: int = 101, check_boundary: bool = False) -> Eigenpair:
    """L2-normalized eigenfunction (orthonormal pair for a double eigenvalue)."""
    ext = _resolve(problem, ext, tol)
    frames = {e: volterra_frame(problem, e, lam, _ODE_TOL) for e in ("a", "b")}
    c = classify(problem)
    F, D, E = _evaluate(problem, ext, [lam])
    if ext.kind == "coupled":
        Mz = E[:, :, 0]
        theta = Solution(problem, lam, "a", 1.0, 0.0, frames, _ODE_TOL)
        phi = Solution(problem, lam, "a", 0.0, 1.0, frames, _ODE_TOL)
        rscale = max(1.0, float(np.max(np.abs(ext.matrix))))
        if np.max(np.abs(Mz)) <= 1e-5 * rscale:
            mult = 2
            basis = [(theta, phi), [(1.0, 0.0), (0.0, 1.0)]]
        else:
            mult = 1
            # null vector of the rank-one matrix M - e^{i phi} R
            _, sv, vh = np.linalg.svd(Mz)
            if sv[1] > 1e-6 * max(sv[0], 1.0):
                raise EigenfunctionError(f"lambda = {lam} is not an eigenvalue (singular value {sv[1]:.2e})")
            v = np.conj(vh[-1])
            basis = [(theta, phi), [tuple(v)]]
        sols, vecs = basis
        funcs = [_Combo(sols, vec, 1.0) for vec in vecs]
    else:
        alpha = ext.alpha if ext.kind == "separated" else None
        mult = 1
        if c.is_lc("a") and alpha is not None:
            g = Solution(problem, lam, "a", math.sin(alpha), -math.cos(alpha), frames, _ODE_TOL)
        else:
            g = Solution(problem, lam, "a", 0.0, 1.0, frames, _ODE_TOL)
        fa = abs(F[0])
        F2, _, _ = _evaluate(problem, ext, [lam * (1 + 1e-6) + 1e-6])
        if fa > 1e-4 * max(abs(F2[0]), 1e-300) and fa > 1e-8:
            raise EigenfunctionError(f"lambda = {lam} is not an eigenvalue (matching residual {fa:.2e})")
        funcs = [_Combo([g], [1.0], 1.0)]

    # Gram-Schmidt in L2
    ortho = []
    for f in funcs:
        for q in ortho:
            p = _inner(problem, q, f)
            f = _Combo([f, q], [1.0, -p], 1.0)
        nrm = math.sqrt(abs(_inner(problem, f, f)))
        ortho.append(_Combo([f], [1.0], 1.0 / nrm))

    lo = problem.a + problem.length / (2 * (samples - 1))
    hi = problem.b - problem.length / (2 * (samples - 1))
    xs = np.linspace(lo, hi, samples)
    values = np.array([np.asarray(f(xs)[0]) for f in ortho])
    probe = np.linspace(problem.a + 0.05 * problem.length, problem.b - 0.05 * problem.length, 9)
    residual = max(ode_residual(problem, lam, f, probe) for f in ortho)
    bres = boundary_residual(problem, ext, ortho) if check_boundary else float("nan")
    return Eigenpair(float(lam), mult, ortho, xs, values, float(residual), bres)
