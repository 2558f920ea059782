import json

import numpy as np
import pytest
import sympy as sp
from click.testing import CliRunner
from hypothesis import given, settings, strategies as st

from besselext.cli import main
from besselext.corpus import (
    FIXTURE_VERSION,
    bump_trial,
    golden_case,
    golden_cases,
    load_fixture,
    near_extremal_trial,
    parse_trial,
    polynomial_corpus,
    power_trial,
    sine_trial,
    trial_corpus,
)
from besselext.problem import ConfigError

LINE = "c1 | a=0 b=1 sa=0.5 sb=0.5 q=0 | krein | krein_cot | -2 | 0 | 1e-10 | 0 | exact"


def test_packaged_fixture_parses():
    cases = golden_cases()
    assert len(cases) == 6
    assert len({c.name for c in cases}) == len(cases)
    c = golden_case("bessel-j0")
    assert c.quantity == "eigenvalues" and c.provenance.startswith("oracle:")
    assert c.problem().s_a == 0.0
    with pytest.raises(KeyError):
        golden_case("missing")


def test_fixture_version_and_line_checks():
    ok = f"# fixture-version = {FIXTURE_VERSION}\n# a comment\n{LINE}\n"
    (case,) = load_fixture(ok)
    assert case.comment == "a comment" and case.expected == (-2.0,)
    with pytest.raises(ConfigError):
        load_fixture(f"# fixture-version = {FIXTURE_VERSION + 1}\n{LINE}\n")
    with pytest.raises(ConfigError):
        load_fixture(LINE + "\n")
    with pytest.raises(ConfigError):
        load_fixture(f"# fixture-version = {FIXTURE_VERSION}\n" + LINE.replace(" | exact", "") + "\n")
    with pytest.raises(ConfigError):
        load_fixture(f"# fixture-version = {FIXTURE_VERSION}\n" + LINE.replace("krein_cot", "volume") + "\n")
    with pytest.raises(ConfigError):
        load_fixture(f"# fixture-version = {FIXTURE_VERSION}\n" + LINE.replace(" q=0", "") + "\n")


def test_compare_scales_by_tolerance():
    (case,) = load_fixture(f"# fixture-version = {FIXTURE_VERSION}\n{LINE}\n")
    assert case.compare([-2.0]) == 0.0
    assert case.compare([-2.0 + 5e-11]) == pytest.approx(0.5)
    assert case.compare([1.0, 2.0]) == np.inf


def _golden_values(case, report):
    if case.quantity == "eigenvalues":
        return [e["lambda"] for e in report["eigenvalues"] for _ in range(e["multiplicity"])]
    if case.quantity == "krein_matrix":
        return list(np.ravel(report["numeric"]["R_K"]))
    return [report["numeric"]["cot"]]


@pytest.mark.parametrize("case", golden_cases(), ids=lambda c: c.name)
def test_golden_case_through_cli(case):
    res = CliRunner().invoke(main, case.cli_args())
    assert res.exit_code == 0, res.output
    report = json.loads(res.stdout)
    assert case.compare(_golden_values(case, report)) <= 1.0


X = sp.symbols("x")


def _check_against_sympy(trial, expr, xs):
    f0, f1, f2 = trial(xs)
    exprs = (expr, sp.diff(expr, X), sp.diff(expr, X, 2))
    for got, e in zip((f0, f1, f2), exprs):
        ref = np.array([float(e.subs(X, v)) for v in xs])
        np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-11)


def test_power_trial_derivatives():
    a, b = -0.5, 1.5
    xs = np.array([-0.3, 0.1, 0.7, 1.4])
    y = (X - a) / (b - a)
    expr = y ** sp.Rational(7, 10) * (1 - y) ** sp.Rational(6, 5) * (1 + y / 2 - y ** 2 / 4)
    _check_against_sympy(power_trial(0.7, 1.2, (1.0, 0.5, -0.25), (a, b)), expr, xs)


def test_bump_and_sine_trial_derivatives():
    xs = np.array([0.05, 0.3, 0.62, 0.97])
    expr = sp.exp(-sp.Rational(1, 2) / (X * (1 - X))) * (1 - 2 * X)
    _check_against_sympy(bump_trial(0.5, (1.0, -2.0)), expr, xs)
    expr = sp.sin(sp.pi * X) - 3 * sp.sin(3 * sp.pi * X)
    _check_against_sympy(sine_trial((1.0, 0.0, -3.0)), expr, xs)


def test_bump_trial_is_flat_at_the_ends():
    f, d, d2 = bump_trial(1.0)(np.array([0.0, 1e-5, 1.0]))
    assert np.all(f == 0) and np.all(d == 0) and np.all(d2 == 0)


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0.5, 4.0), r=st.floats(0.5, 4.0),
       c=st.lists(st.floats(-2, 2, allow_subnormal=False), min_size=1, max_size=3))
def test_trial_names_round_trip(p, r, c):
    t = power_trial(p, r, c)
    back = parse_trial(t.name)
    assert back.name == t.name
    xs = np.linspace(0.1, 0.9, 5)
    np.testing.assert_array_equal(back(xs)[0], t(xs)[0])


def test_parse_trial_forms_and_errors():
    assert parse_trial("parabola").name == power_trial(1.0, 1.0).name
    assert parse_trial("sine").family == "sine"
    assert parse_trial(near_extremal_trial(1e-3).name).family == "near_extremal"
    assert parse_trial(bump_trial(0.3, (1.0, 2.0)).name).name == bump_trial(0.3, (1.0, 2.0)).name
    for bad in ("cube", "power:p=1", "sine:c=a/b", "bump:q=1"):
        with pytest.raises(ConfigError):
            parse_trial(bad)


def test_corpora_are_reproducible():
    a = [t.name for t in trial_corpus(12)]
    assert a == [t.name for t in trial_corpus(12)]
    assert a != [t.name for t in trial_corpus(12, seed=1)]
    assert {t.family for t in trial_corpus(6)} == {"power", "bump", "sine"}
    polys = polynomial_corpus(5, interval=(1.0, 3.0))
    assert len(polys) == 5 and all(p.interval == (1.0, 3.0) for p in polys)
