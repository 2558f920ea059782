"""Golden problems and trial-function generators.

Golden cases live in a versioned plain-text fixture (``data/golden_v1.txt``)
so the expected values and their provenance are reviewable without reading
code.  Trial functions are evaluators ``x -> (f, f', f'')`` on an interval;
they are built by named, seeded generators so suites are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .problem import BesselProblem, ConfigError, parse_potential

__all__ = [
    "FIXTURE_VERSION",
    "GoldenCase",
    "golden_cases",
    "golden_case",
    "load_fixture",
    "Trial",
    "TRIAL_FAMILIES",
    "power_trial",
    "bump_trial",
    "sine_trial",
    "near_extremal_trial",
    "parse_trial",
    "trial_corpus",
    "polynomial_corpus",
]

FIXTURE_VERSION = 1
_FIXTURE = "golden_v1.txt"
_QUANTITIES = ("eigenvalues", "krein_matrix", "krein_cot")


@dataclass(frozen=True)
class GoldenCase:
    """A named problem with expected values, tolerances and their provenance."""

    name: str
    config: Dict[str, str]
    extension: str
    quantity: str
    expected: tuple
    rel_tol: float
    abs_tol: float
    lam_max: float
    provenance: str
    comment: str = field(default="", compare=False)

    def problem(self) -> BesselProblem:
        c = self.config
        return BesselProblem(float(c["a"]), float(c["b"]), float(c["sa"]), float(c["sb"]),
                             parse_potential(c.get("q", "0")))

    def cli_args(self) -> List[str]:
        """Arguments for the command line tool that reproduce this case as JSON."""
        args = []
        for key in ("a", "b", "sa", "sb", "q"):
            args += [f"--{key}", self.config[key]]
        if self.quantity == "eigenvalues":
            return ["spectrum", *args, "--ext", self.extension, "--lmax", repr(self.lam_max),
                    "--format", "json"]
        return ["krein", *args]

    def compare(self, values: Sequence[float]) -> float:
        """Largest violation ratio ``|v - e| / (abs_tol + rel_tol |e|)``; at most 1 passes."""
        got = np.asarray(values, dtype=float)
        exp = np.asarray(self.expected, dtype=float)
        if got.shape != exp.shape:
            return math.inf
        allowed = self.abs_tol + self.rel_tol * np.abs(exp)
        return float(np.max(np.abs(got - exp) / allowed))


def _parse_line(line: str, comment: str) -> GoldenCase:
    parts = [p.strip() for p in line.split(" | ")]
    if len(parts) != 9:
        raise ConfigError(f"golden fixture line has {len(parts)} fields, expected 9: {line!r}")
    name, prob, ext, qty, exp, rel, ab, lmax, prov = parts
    if qty not in _QUANTITIES:
        raise ConfigError(f"unknown quantity {qty!r} in golden case {name}")
    config = dict(kv.split("=", 1) for kv in prob.split())
    missing = {"a", "b", "sa", "sb", "q"} - set(config)
    if missing:
        raise ConfigError(f"golden case {name} lacks {sorted(missing)}")
    return GoldenCase(name, config, ext, qty, tuple(float(v) for v in exp.split()),
                      float(rel), float(ab), float(lmax), prov, comment)


def load_fixture(text: Optional[str] = None) -> List[GoldenCase]:
    """Parse the fixture (the packaged one when ``text`` is ``None``)."""
    if text is None:
        text = resources.files("besselext").joinpath("data", _FIXTURE).read_text(encoding="utf-8")
    version = None
    cases = []
    comment: List[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            comment = []
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("fixture-version"):
                version = int(body.split("=", 1)[1])
            else:
                comment.append(body)
            continue
        cases.append(_parse_line(line, " ".join(comment)))
        comment = []
    if version != FIXTURE_VERSION:
        raise ConfigError(f"fixture version {version} does not match {FIXTURE_VERSION}")
    return cases


def golden_cases() -> List[GoldenCase]:
    return load_fixture()


def golden_case(name: str) -> GoldenCase:
    for c in golden_cases():
        if c.name == name:
            return c
    raise KeyError(name)


# ---------------------------------------------------------------------------
# trial functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trial:
    """Named evaluator ``x -> (f, f', f'')`` on ``interval``."""

    name: str
    family: str
    interval: tuple
    func: Callable = field(repr=False, compare=False)

    def __call__(self, x):
        return self.func(x)


def _unit(interval):
    a, b = (float(v) for v in interval)
    return a, b, b - a


def power_trial(p: float, r: float, coeffs: Sequence[float] = (1.0,), interval=(0.0, 1.0)) -> Trial:
    """``y^p (1-y)^r P(y)`` with ``y = (x-a)/(b-a)`` and polynomial ``P``."""
    a, b, L = _unit(interval)
    P = Polynomial(coeffs)
    y_ = Polynomial([0, 1])
    # f_y = y^{p-1} (1-y)^{r-1} h and f_yy = y^{p-2} (1-y)^{r-2} k with polynomials h, k
    h = (p * (1 - y_) - r * y_) * P + y_ * (1 - y_) * P.deriv()
    k = ((p - 1) * (1 - y_) - (r - 1) * y_) * h + y_ * (1 - y_) * h.deriv()

    def f(x):
        y = (np.asarray(x, dtype=float) - a) / L
        z = 1.0 - y
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            v = y ** p * z ** r * P(y)
            d = y ** (p - 1) * z ** (r - 1) * h(y) / L
            d2 = y ** (p - 2) * z ** (r - 2) * k(y) / L ** 2
        return v, d, d2

    name = f"power:p={p!r},r={r!r},c=" + "/".join(repr(float(c)) for c in coeffs)
    return Trial(name, "power", (a, b), f)


def bump_trial(k: float, coeffs: Sequence[float] = (1.0,), interval=(0.0, 1.0)) -> Trial:
    """``exp(-k/(y(1-y))) P(y)``: flat at both ends."""
    a, b, L = _unit(interval)
    P = Polynomial(coeffs)
    P1, P2 = P.deriv(), P.deriv(2)

    def f(x):
        y = (np.asarray(x, dtype=float) - a) / L
        z = 1.0 - y
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            w = -k * (1 / y + 1 / z)
            e = np.exp(w)
            w1 = k * (1 / y ** 2 - 1 / z ** 2)
            w2 = -2 * k * (1 / y ** 3 + 1 / z ** 3)
            v = e * P(y)
            d = e * (w1 * P(y) + P1(y)) / L
            d2 = e * ((w2 + w1 ** 2) * P(y) + 2 * w1 * P1(y) + P2(y)) / L ** 2
        dead = e == 0
        v, d, d2 = (np.where(dead, 0.0, arr) for arr in (v, d, d2))
        return v, d, d2

    name = f"bump:k={k!r},c=" + "/".join(repr(float(c)) for c in coeffs)
    return Trial(name, "bump", (a, b), f)


def sine_trial(coeffs: Sequence[float], interval=(0.0, 1.0)) -> Trial:
    """``sum_n c_n sin(n pi y)``."""
    a, b, L = _unit(interval)
    c = np.asarray(coeffs, dtype=float)
    n = np.arange(1, len(c) + 1)
    w = n * math.pi / L

    def f(x):
        x = np.asarray(x, dtype=float)
        ph = np.multiply.outer(x - a, w)
        s, co = np.sin(ph), np.cos(ph)
        return s @ c, co @ (c * w), -(s @ (c * w ** 2))

    name = "sine:c=" + "/".join(repr(float(v)) for v in c)
    return Trial(name, "sine", (a, b), f)


def near_extremal_trial(eps: float, interval=(0.0, 1.0)) -> Trial:
    """``y^{1/2+eps} (1-y)``, the family approaching the constant 1/4 as ``eps -> 0``."""
    t = power_trial(0.5 + eps, 1.0, (1.0,), interval)
    return Trial(f"near_extremal:eps={eps!r}", "near_extremal", t.interval, t.func)


TRIAL_FAMILIES = {
    "power": power_trial,
    "bump": bump_trial,
    "sine": sine_trial,
    "near_extremal": near_extremal_trial,
}


def _floats(text: str) -> List[float]:
    return [float(v) for v in text.split("/")]


def parse_trial(spec: str, interval=(0.0, 1.0)) -> Trial:
    """Inverse of :attr:`Trial.name`, e.g. ``"power:p=0.7,r=1.2,c=1/0.5"``.

    Also accepts the short names ``parabola`` (``y (1-y)``) and ``sine``
    (``sin(pi y)``).
    """
    spec = spec.strip()
    if spec == "parabola":
        return power_trial(1.0, 1.0, (1.0,), interval)
    if spec == "sine":
        return sine_trial((1.0,), interval)
    family, _, rest = spec.partition(":")
    if family not in TRIAL_FAMILIES:
        raise ConfigError(f"unknown trial family {family!r}; expected one of {sorted(TRIAL_FAMILIES)}")
    try:
        kw = dict(item.split("=", 1) for item in rest.split(",")) if rest else {}
        if family == "power":
            return power_trial(float(kw["p"]), float(kw["r"]), _floats(kw.get("c", "1")), interval)
        if family == "bump":
            return bump_trial(float(kw["k"]), _floats(kw.get("c", "1")), interval)
        if family == "sine":
            return sine_trial(_floats(kw["c"]), interval)
        return near_extremal_trial(float(kw["eps"]), interval)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"cannot parse trial {spec!r}: {exc}") from None


def trial_corpus(n: int = 50, seed: int = 0, interval=(0.0, 1.0)) -> List[Trial]:
    """``n`` reproducible admissible trials cycling through power, bump and sine families.

    Power exponents are drawn from ``[0.6, 2.5]`` so ``f/sqrt(t)`` vanishes
    at a rate the endpoint probes resolve.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        fam = i % 3
        if fam == 0:
            p, r = (float(v) for v in np.round(rng.uniform(0.6, 2.5, 2), 6))
            coeffs = [1.0] + [float(v) for v in np.round(rng.uniform(-0.9, 0.9, 2), 6)]
            out.append(power_trial(p, r, coeffs, interval))
        elif fam == 1:
            k = float(np.round(rng.uniform(0.05, 1.0), 6))
            coeffs = [1.0, float(np.round(rng.uniform(-1.5, 1.5), 6))]
            out.append(bump_trial(k, coeffs, interval))
        else:
            m = int(rng.integers(1, 5))
            coeffs = [float(v) for v in np.round(rng.normal(size=m), 6)]
            if all(c == 0 for c in coeffs):
                coeffs[0] = 1.0
            out.append(sine_trial(coeffs, interval))
    return out


def polynomial_corpus(n: int = 12, seed: int = 0, interval=(0.0, 1.0), degree: int = 6) -> List[Trial]:
    """Random polynomials in ``y`` of degree at most ``degree``."""
    a, b, L = _unit(interval)
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        c = [float(v) for v in np.round(rng.normal(size=int(rng.integers(1, degree + 1)) + 1), 6)]
        P = Polynomial(c)
        P1, P2 = P.deriv(), P.deriv(2)

        def f(x, P=P, P1=P1, P2=P2):
            y = (np.asarray(x, dtype=float) - a) / L
            return P(y), P1(y) / L, P2(y) / L ** 2

        out.append(Trial("poly:c=" + "/".join(repr(v) for v in c), "poly", (a, b), f))
    return out
