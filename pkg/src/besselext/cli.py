"""Command line front end.

Every command prints one report on stdout (JSON unless CSV is requested)
and diagnostics on stderr.  Exit codes: 0 success, 1 verification failure,
2 usage or configuration error, 3 mathematically unavailable (for example
the Krein extension of an operator that is not strictly positive).

Problem parameters come from built-in defaults, then ``BESSELEXT_TOL``,
then a ``key = value`` config file (``--config``), then flags.
"""
from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

import click
import numpy as np

from . import __version__
from .corpus import parse_trial
from .extensions import (
    ExtensionSpec,
    KreinUnavailableError,
    classify,
    krein_closed_form_q0,
    krein_spec,
)
from .hardy import VARIANTS, AdmissibilityError, hardy_report, muckenhoupt
from .numerics import QuadratureError, Tolerance
from .problem import BesselProblem, ConfigError, parse_potential
from .spectra import eigenvalues

SCHEMA = 1
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_UNAVAILABLE = 0, 1, 2, 3
DEFAULT_REL_TOL = 1e-11
_KEYS = ("a", "b", "sa", "sb", "q", "tol")
_DEFAULTS = {"a": "0", "b": "1", "sa": "0.5", "sb": "0.5", "q": "0", "tol": repr(DEFAULT_REL_TOL)}


class Unavailable(Exception):
    """Raised for results that do not exist for the given problem."""


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def fmt_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    s = str(obj)
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def emit(report: dict) -> None:
    click.echo(to_json({"schema": SCHEMA, **report}))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def parse_config_text(text: str, source: str = "config") -> Dict[str, str]:
    """``key = value`` lines with ``#`` comments; unknown keys are errors."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}; known keys are {', '.join(_KEYS)}")
        if not value:
            raise ConfigError(f"{source}:{n}: empty value for {key!r}")
        out[key] = value
    return out


def resolve_config(flags: Dict[str, Optional[str]], config_file: Optional[str]) -> Dict[str, str]:
    cfg = dict(_DEFAULTS)
    env = os.environ.get("BESSELEXT_TOL")
    if env:
        cfg["tol"] = env.strip()
    if config_file:
        try:
            text = Path(config_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        cfg.update(parse_config_text(text, config_file))
    cfg.update({k: str(v) for k, v in flags.items() if v is not None})
    return cfg


def build_problem(cfg: Dict[str, str]) -> BesselProblem:
    try:
        vals = {k: float(cfg[k]) for k in ("a", "b", "sa", "sb")}
    except ValueError as exc:
        raise ConfigError(f"malformed number: {exc}") from None
    return BesselProblem(vals["a"], vals["b"], vals["sa"], vals["sb"], parse_potential(cfg["q"]))


def build_tol(cfg: Dict[str, str]) -> Tolerance:
    try:
        rel = float(cfg["tol"])
    except ValueError:
        raise ConfigError(f"malformed tolerance {cfg['tol']!r}") from None
    if not (rel > 0 and math.isfinite(rel)):
        raise ConfigError("tolerance must be a positive number")
    return Tolerance(rel=rel, abs=max(1e-15, 0.1 * rel))


def dump_config(cfg: Dict[str, str]) -> str:
    """Canonical config text; parsing it back gives the same problem and tolerance."""
    prob = build_problem(cfg)
    tol = build_tol(cfg)
    lines = ["# besselext problem configuration",
             f"a = {prob.a!r}", f"b = {prob.b!r}", f"sa = {prob.s_a!r}", f"sb = {prob.s_b!r}",
             f"q = {prob.q.spec()}", f"tol = {tol.rel!r}"]
    return "\n".join(lines) + "\n"


def problem_options(f):
    opts = [
        click.option("--a", "a", default=None, help="left end point"),
        click.option("--b", "b", default=None, help="right end point"),
        click.option("--sa", default=None, help="strength s_a >= 0 at a"),
        click.option("--sb", default=None, help="strength s_b >= 0 at b"),
        click.option("--q", default=None, help="potential: 0 | const:<c> | poly:<c0,c1,...>"),
        click.option("--tol", default=None, help="relative tolerance (overrides BESSELEXT_TOL)"),
        click.option("--config", "config_file", default=None, help="key = value config file"),
        click.option("--dump-config", is_flag=True, help="print the resolved config and exit"),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _setup(a, b, sa, sb, q, tol, config_file, dump):
    cfg = resolve_config({"a": a, "b": b, "sa": sa, "sb": sb, "q": q, "tol": tol}, config_file)
    prob = build_problem(cfg)
    tolerance = build_tol(cfg)
    if dump:
        click.echo(dump_config(cfg), nl=False)
        raise SystemExit(EXIT_OK)
    return prob, tolerance


def _problem_dict(p: BesselProblem) -> dict:
    return {"a": p.a, "b": p.b, "sa": p.s_a, "sb": p.s_b, "q": p.q.spec()}


# ---------------------------------------------------------------------------
# extension parsing
# ---------------------------------------------------------------------------


def _angle_or_none(text: str):
    t = text.strip().lower()
    if t in ("", "none", "-"):
        return None
    return float(t)


def parse_extension(text: str) -> ExtensionSpec:
    """``friedrichs``, ``krein``, ``trivial``, ``separated:<alpha,beta>`` or ``coupled:<phi,R11,R12,R21,R22>``.

    Angles are in radians; ``none`` marks a limit point endpoint.
    """
    t = text.strip()
    kind, _, rest = t.partition(":")
    try:
        if kind in ("friedrichs", "krein", "trivial") and not rest:
            return getattr(ExtensionSpec, kind)()
        if kind == "separated":
            parts = rest.split(",")
            if len(parts) != 2:
                raise ValueError("separated needs two angles alpha,beta")
            return ExtensionSpec.separated(_angle_or_none(parts[0]), _angle_or_none(parts[1]))
        if kind == "coupled":
            v = [float(p) for p in rest.split(",")]
            if len(v) != 5:
                raise ValueError("coupled needs phi,R11,R12,R21,R22")
            return ExtensionSpec.coupled(v[0], ((v[1], v[2]), (v[3], v[4])))
    except ValueError as exc:
        raise ConfigError(f"bad extension {text!r}: {exc}") from None
    raise ConfigError(f"bad extension {text!r}; expected friedrichs, krein, trivial, "
                      "separated:<alpha,beta> or coupled:<phi,R11,R12,R21,R22>")


def _ext_dict(ext: ExtensionSpec) -> dict:
    d = {"kind": ext.kind}
    if ext.kind == "separated":
        d["alpha"] = ext.alpha
        d["beta"] = ext.beta
    if ext.kind == "coupled":
        d["phi"] = ext.phi
        d["R"] = [list(r) for r in ext.R]
    return d


# ---------------------------------------------------------------------------
# spectrum with optional concurrent scan
# ---------------------------------------------------------------------------


def scan_spectrum(problem: BesselProblem, ext: ExtensionSpec, lo: float, hi: float,
                  tol: Tolerance, jobs: int = 1):
    """Eigenvalues on ``[lo, hi]``; with ``jobs > 1`` the range is split into overlapping pieces.

    Pieces are scanned concurrently and the results merged in ascending
    order; a root found in two overlapping pieces is reported once.
    """
    if jobs <= 1:
        spec = eigenvalues(problem, ext, (lo, hi), tol)
        return list(spec.eigenvalues), spec.extension
    resolved = ext.resolve(problem) if ext.kind in ("friedrichs", "krein") else ext
    edges = np.linspace(lo, hi, jobs + 1)
    pad = 1e-6 * max(1.0, hi - lo)
    pieces = [(max(lo, edges[i] - pad), min(hi, edges[i + 1] + pad)) for i in range(jobs)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(lambda r: eigenvalues(problem, resolved, r, tol).eigenvalues, pieces))
    merged: List[tuple] = []
    for part in parts:
        for lam, mult, res in part:
            if merged and abs(lam - merged[-1][0]) <= 1e3 * tol.rel * max(1.0, abs(lam)):
                if mult > merged[-1][1]:
                    merged[-1] = (lam, mult, res)
                continue
            merged.append((lam, mult, res))
    merged.sort()
    return merged, resolved


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


class _Group(click.Group):
    """Maps library exceptions to the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ConfigError as exc:
            click.echo(f"configuration error: {exc}", err=True)
            ctx.exit(EXIT_USAGE)
        except (KreinUnavailableError, Unavailable) as exc:
            click.echo(f"unavailable: {exc}", err=True)
            ctx.exit(EXIT_UNAVAILABLE)
        except AdmissibilityError as exc:
            click.echo(f"inadmissible trial function: {exc}", err=True)
            ctx.exit(EXIT_USAGE)


@click.group(cls=_Group)
@click.version_option(__version__, prog_name="besselext")
def main():
    """Bessel-type Sturm-Liouville operators: classification, extensions, spectra, Hardy checks."""


@main.command("classify")
@problem_options
def cmd_classify(a, b, sa, sb, q, tol, config_file, dump_config):
    """Limit point / limit circle type of both end points."""
    prob, _ = _setup(a, b, sa, sb, q, tol, config_file, dump_config)
    c = classify(prob)
    emit({"command": "classify", "problem": _problem_dict(prob),
          "at_a": c.at_a, "at_b": c.at_b, "n": c.deficiency})


@main.command("spectrum")
@problem_options
@click.option("--ext", "ext_text", default="friedrichs", show_default=True,
              help="friedrichs | krein | trivial | separated:<alpha,beta> | coupled:<phi,R11,R12,R21,R22>")
@click.option("--lmin", type=float, default=0.0, show_default=True)
@click.option("--lmax", type=float, default=100.0, show_default=True)
@click.option("--format", "out_format", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--jobs", type=click.IntRange(1, 64), default=1, show_default=True,
              help="concurrent scans over sub-ranges")
def cmd_spectrum(a, b, sa, sb, q, tol, config_file, dump_config, ext_text, lmin, lmax, out_format, jobs):
    """Eigenvalues with multiplicities and residuals in [lmin, lmax]."""
    prob, tolerance = _setup(a, b, sa, sb, q, tol, config_file, dump_config)
    if not lmax > lmin:
        raise ConfigError("need lmax > lmin")
    ext = parse_extension(ext_text)
    try:
        ext.check(prob) if ext.kind not in ("friedrichs", "krein") else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows, resolved = scan_spectrum(prob, ext, lmin, lmax, tolerance, jobs)
    if out_format == "csv":
        click.echo("lambda,multiplicity,residual")
        for lam, mult, res in rows:
            click.echo(f"{format(lam, '.17g')},{mult},{format(res, '.17g')}")
        return
    emit({"command": "spectrum", "problem": _problem_dict(prob), "extension": ext_text,
          "resolved": _ext_dict(resolved), "range": [lmin, lmax],
          "eigenvalues": [{"lambda": lam, "multiplicity": m, "residual": r} for lam, m, r in rows]})


def _krein_dump(data) -> dict:
    d = {"mode": data.mode}
    if data.mode == "matrix":
        R = data.matrix
        d["R_K"] = [list(r) for r in data.R_K]
        d["det"] = float(np.linalg.det(R))
    elif data.mode in ("angle_at_a", "angle_at_b"):
        d["cot"] = data.cot_value
        d["angle"] = data.angle
    return d


@main.command("krein")
@problem_options
def cmd_krein(a, b, sa, sb, q, tol, config_file, dump_config):
    """Krein-von Neumann boundary data, numeric and (for q = 0) closed form."""
    prob, tolerance = _setup(a, b, sa, sb, q, tol, config_file, dump_config)
    _, numeric = krein_spec(prob)
    report = {"command": "krein", "problem": _problem_dict(prob), "numeric": _krein_dump(numeric)}
    if prob.q.is_zero:
        closed = krein_closed_form_q0(prob)
        report["closed_form"] = _krein_dump(closed)
        if numeric.mode == "matrix":
            disc = float(np.max(np.abs(numeric.matrix - closed.matrix)))
        elif numeric.mode == "trivial":
            disc = 0.0
        else:
            disc = abs(math.remainder(numeric.angle - closed.angle, math.pi))
        report["discrepancy"] = disc
        report["agree"] = bool(disc <= 1e-6)
    else:
        report["closed_form"] = None
    emit(report)


def _load_trial(spec: str, interval):
    path = Path(spec)
    if path.is_file():
        lines = [ln.split("#", 1)[0].strip() for ln in path.read_text(encoding="utf-8").splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ConfigError(f"trial file {spec} is empty")
        spec = lines[0]
    return parse_trial(spec, interval)


@main.command("hardy")
@problem_options
@click.option("--variant", type=click.Choice(VARIANTS), required=True)
@click.option("--trial", "trial_spec", default="parabola", show_default=True,
              help="trial name (e.g. parabola, sine, near_extremal:eps=1e-3) or a file holding one")
@click.option("--R", "R", type=float, default=None, help="log weight scale (log_refined_B1)")
@click.option("--trust", is_flag=True, help="skip the end point decay probes")
def cmd_hardy(a, b, sa, sb, q, tol, config_file, dump_config, variant, trial_spec, R, trust):
    """Both sides of a Hardy-type inequality for a trial function on (a, b)."""
    prob, _ = _setup(a, b, sa, sb, q, tol, config_file, dump_config)
    interval = (prob.a, prob.b)
    trial = _load_trial(trial_spec, interval)
    try:
        r = hardy_report(trial, variant, interval, R, "trust" if trust else "probe")
    except QuadratureError as exc:
        raise Unavailable(f"quadrature did not converge: {exc}") from None
    emit({"command": "hardy", "interval": list(interval), "trial": trial.name, "variant": r.variant,
          "lhs": r.lhs, "rhs": r.rhs, "weighted": r.weighted, "ratio": r.ratio, "constant": r.constant,
          "satisfied": r.satisfied, "quad_error": r.quad_error})


def parse_weight(text: str, a: float, b: float):
    """Products of ``pow:<k>`` (``(x-a)^k``), ``rpow:<k>`` (``(b-x)^k``) and ``const:<c>``."""
    factors = []
    for part in text.split("*"):
        kind, _, val = part.strip().partition(":")
        try:
            if kind == "pow":
                factors.append(("pow", float(val)))
            elif kind == "rpow":
                factors.append(("rpow", float(val)))
            elif kind == "const":
                factors.append(("const", float(val)))
            elif kind == "1" and not val:
                factors.append(("const", 1.0))
            else:
                raise ValueError(f"unknown factor {part!r}")
        except ValueError as exc:
            raise ConfigError(f"bad weight {text!r}: {exc}") from None

    def w(x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        with np.errstate(over="ignore", divide="ignore"):
            for kind, v in factors:
                if kind == "pow":
                    out = out * (x - a) ** v
                elif kind == "rpow":
                    out = out * (b - x) ** v
                else:
                    out = out * v
        return out

    return w


@main.command("muckenhoupt")
@problem_options
@click.option("--kind", type=click.Choice(["A_form", "B_form"]), required=True)
@click.option("--u", "u_text", required=True, help="weight, e.g. pow:-0.4 or pow:-2*rpow:1")
@click.option("--v", "v_text", required=True, help="weight, e.g. pow:1.6 or const:1")
@click.option("--p", "p", type=float, default=2.0, show_default=True)
def cmd_muckenhoupt(a, b, sa, sb, q, tol, config_file, dump_config, kind, u_text, v_text, p):
    """Two-weight constant A or B with its best-constant bracket."""
    prob, _ = _setup(a, b, sa, sb, q, tol, config_file, dump_config)
    if not p >= 1:
        raise ConfigError("p must be at least 1")
    u = parse_weight(u_text, prob.a, prob.b)
    v = parse_weight(v_text, prob.a, prob.b)
    r = muckenhoupt(kind, u, v, p, (prob.a, prob.b))
    emit({"command": "muckenhoupt", "interval": [prob.a, prob.b], "kind": r.kind, "p": r.p,
          "u": u_text, "v": v_text, "value": r.value, "bracket": list(r.bracket),
          "sup_location": r.sup_location, "infinite": r.infinite})


@main.command("verify")
@click.option("--suite", type=click.Choice(["all", "frames", "krein", "hardy", "specialfn"]),
              default="all", show_default=True)
def cmd_verify(suite):
    """Run a verification suite; exit 1 naming the first failing check."""
    from .verify import SUITES

    names = list(SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        for check_name, passed, detail in SUITES[name]():
            checks.append({"suite": name, "name": check_name, "passed": bool(passed), "detail": detail})
    failed = [c for c in checks if not c["passed"]]
    emit({"command": "verify", "suite": suite, "passed": not failed, "count": len(checks),
          "failures": len(failed), "checks": checks})
    if failed:
        click.echo(f"verification failed: {failed[0]['suite']}/{failed[0]['name']}", err=True)
        sys.exit(EXIT_VERIFY)


if __name__ == "__main__":  # pragma: no cover
    main()
