import json

import numpy as np
import pytest
from click.testing import CliRunner
from hypothesis import given, settings, strategies as st

from besselext import cli
from besselext.cli import dump_config, main, parse_config_text, resolve_config, to_json


def run(args, env=None):
    return CliRunner().invoke(main, args, env=env)


def test_classify_reports_endpoint_types():
    res = run(["classify", "--sa", "0.25", "--sb", "1.5"])
    assert res.exit_code == 0
    rep = json.loads(res.stdout)
    assert rep["schema"] == 1 and rep["command"] == "classify"
    assert rep["n"] == 1
    assert rep["at_a"] != rep["at_b"]


def test_spectrum_output_is_byte_identical_across_runs():
    args = ["spectrum", "--sa", "0.25", "--sb", "0.75", "--ext", "krein", "--lmin", "-1", "--lmax", "120"]
    first, second = run(args), run(args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    rep = json.loads(first.stdout)
    assert rep["eigenvalues"][0]["multiplicity"] == 2
    assert abs(rep["eigenvalues"][0]["lambda"]) < 1e-8


def test_csv_format():
    res = run(["spectrum", "--lmax", "100", "--format", "csv"])
    assert res.exit_code == 0
    lines = res.stdout.strip().splitlines()
    assert lines[0] == "lambda,multiplicity,residual"
    vals = [float(ln.split(",")[0]) for ln in lines[1:]]
    np.testing.assert_allclose(vals, (np.pi * np.arange(1, 4)) ** 2, rtol=1e-9)


def test_jobs_give_the_same_spectrum():
    args = ["spectrum", "--sa", "0", "--sb", "0.3", "--q", "poly:1,-2", "--lmax", "400", "--format", "csv"]
    one = run(args).stdout.strip().splitlines()[1:]
    three = run(args + ["--jobs", "3"]).stdout.strip().splitlines()[1:]
    assert len(one) == len(three)
    a = np.array([float(ln.split(",")[0]) for ln in one])
    b = np.array([float(ln.split(",")[0]) for ln in three])
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_usage_errors_exit_2(tmp_path):
    assert run(["classify", "--q", "cubic:1"]).exit_code == 2
    assert run(["classify", "--sa", "abc"]).exit_code == 2
    assert run(["spectrum", "--ext", "robin"]).exit_code == 2
    assert run(["spectrum", "--lmin", "5", "--lmax", "1"]).exit_code == 2
    assert run(["classify", "--tol", "-1"]).exit_code == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run(["classify", "--config", str(bad)]).exit_code == 2
    assert run(["classify", "--config", str(tmp_path / "none.cfg")]).exit_code == 2
    assert run(["hardy", "--variant", "power_12", "--trial", "power:p=0.5,r=1"]).exit_code == 2


def test_krein_of_nonpositive_operator_exits_3():
    res = run(["krein", "--q", "const:-20"])
    assert res.exit_code == 3
    assert "unavailable" in res.stderr


def test_krein_report_agrees_with_closed_form():
    res = run(["krein", "--sa", "0.25", "--sb", "0.75"])
    assert res.exit_code == 0
    rep = json.loads(res.stdout)
    assert rep["agree"] is True
    assert rep["numeric"]["det"] == pytest.approx(1.0, abs=1e-10)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("# comment\nsa = 0.3\nb = 2\n")
    res = run(["classify", "--config", str(cfg), "--b", "3", "--dump-config"], env={"BESSELEXT_TOL": "1e-7"})
    assert res.exit_code == 0
    parsed = parse_config_text(res.stdout)
    assert parsed["sa"] == "0.3" and parsed["b"] == "3.0" and parsed["tol"] == "1e-07"
    res = run(["classify", "--tol", "1e-9", "--dump-config"], env={"BESSELEXT_TOL": "1e-7"})
    assert parse_config_text(res.stdout)["tol"] == "1e-09"


def test_dump_config_round_trip_through_file(tmp_path):
    first = run(["classify", "--a", "-1", "--sa", "0.2", "--q", "poly:1,0.5", "--dump-config"]).stdout
    path = tmp_path / "dump.cfg"
    path.write_text(first)
    assert run(["classify", "--config", str(path), "--dump-config"]).stdout == first


finite = st.floats(-5, 5, allow_nan=False, allow_subnormal=False)


@settings(max_examples=40, deadline=None)
@given(a=finite, length=st.floats(0.1, 10), sa=st.floats(0, 3), sb=st.floats(0, 3),
       q=st.one_of(st.just("0"), finite.map(lambda c: f"const:{c!r}"),
                   st.lists(finite, min_size=1, max_size=4).map(lambda c: "poly:" + ",".join(map(repr, c)))),
       tol=st.floats(1e-14, 1e-3))
def test_dump_config_is_a_fixed_point(a, length, sa, sb, q, tol):
    flags = {"a": repr(a), "b": repr(a + length), "sa": repr(sa), "sb": repr(sb), "q": q, "tol": repr(tol)}
    text = dump_config(resolve_config(flags, None))
    again = dump_config({**cli._DEFAULTS, **parse_config_text(text)})
    assert again == text


def test_hardy_and_muckenhoupt_commands():
    rep = json.loads(run(["hardy", "--variant", "power_12"]).stdout)
    assert rep["ratio"] == pytest.approx(1.0) and rep["satisfied"] is True
    rep = json.loads(run(["hardy", "--variant", "power_12", "--trial", "near_extremal:eps=1e-3",
                          "--trust"]).stdout)
    assert 0.25 < rep["ratio"] < 0.26
    rep = json.loads(run(["muckenhoupt", "--kind", "A_form", "--u", "pow:-2", "--v", "const:1"]).stdout)
    assert rep["value"] == pytest.approx(1.0, rel=1e-6) and rep["infinite"] is False
    rep = json.loads(run(["muckenhoupt", "--kind", "B_form", "--u", "pow:-2", "--v", "1"]).stdout)
    assert rep["infinite"] is True and rep["value"] == "inf"
    assert run(["muckenhoupt", "--kind", "A_form", "--u", "exp:1", "--v", "1"]).exit_code == 2


def test_trial_from_file(tmp_path):
    path = tmp_path / "trial.txt"
    path.write_text("# a trial\nsine:c=1.0/0.5\n")
    rep = json.loads(run(["hardy", "--variant", "sine_14", "--trial", str(path)]).stdout)
    assert rep["trial"] == "sine:c=1.0/0.5" and rep["satisfied"] is True


def test_verify_exit_codes(monkeypatch):
    res = run(["verify", "--suite", "specialfn"])
    assert res.exit_code == 0
    assert json.loads(res.stdout)["passed"] is True
    from besselext import verify

    monkeypatch.setitem(verify.SUITES, "specialfn", lambda: [("always fails", False, "1 > 0")])
    res = run(["verify", "--suite", "specialfn"])
    assert res.exit_code == 1
    assert "specialfn/always fails" in res.stderr


def test_json_writer():
    text = to_json({"x": 0.1, "y": [float("inf"), float("-inf"), float("nan")], "s": 'a"b', "n": None})
    assert json.loads(text) == {"x": 0.1, "y": ["inf", "-inf", "nan"], "s": 'a"b', "n": None}
    assert to_json(1 / 3) == "0.33333333333333331"


def test_version_option():
    res = run(["--version"])
    assert res.exit_code == 0 and "besselext" in res.stdout
