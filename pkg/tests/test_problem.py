import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besselext.problem import BesselProblem, ConfigError, Potential, parse_potential

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.one_of(
    st.just(Potential.zero()),
    finite.map(Potential.const),
    st.lists(finite, min_size=1, max_size=5).map(Potential.poly),
))
def test_potential_spec_round_trip(q):
    back = parse_potential(q.spec())
    if q.kind == "zero":
        assert back.is_zero
    else:
        assert back == q


@pytest.mark.parametrize("text", ["", "poly:", "poly:1,,2", "const:x", "cos:1", "poly:1,nan", "const:inf"])
def test_parse_potential_rejects(text):
    with pytest.raises(ConfigError):
        parse_potential(text)


def test_potential_evaluation_and_bounds():
    q = Potential.poly([1.0, -2.0, 3.0])
    x = np.array([0.0, 0.5, 2.0])
    np.testing.assert_allclose(q(x), 1 - 2 * x + 3 * x ** 2)
    assert q.sup_bound(0.0, 2.0) >= np.max(np.abs(q(np.linspace(0, 2, 101))))
    assert Potential.const(-3.0).sup_bound(0, 1) == 3.0
    assert Potential.zero()(np.ones(3)).shape == (3,)
    cb = Potential.callback(np.cos, 1.0)
    assert cb(0.0) == 1.0 and cb.sup_bound(0, 5) == 1.0
    with pytest.raises(ConfigError):
        cb.spec()
    with pytest.raises(ConfigError):
        Potential.callback(np.cos, -1.0)


def test_problem_validation():
    with pytest.raises(ConfigError):
        BesselProblem(1.0, 1.0)
    with pytest.raises(ConfigError):
        BesselProblem(0.0, 1.0, -0.1, 0.5)
    with pytest.raises(ConfigError):
        BesselProblem(0.0, math.inf)
    p = BesselProblem(0.0, 2.0, 0.3, 0.7, "poly:1,2")
    assert p.q == Potential.poly([1.0, 2.0])
    assert p.length == 2.0 and p.midpoint == 1.0
    assert p.strength("a") == 0.3 and p.strength("b") == 0.7
    with pytest.raises(ValueError):
        p.strength("c")


def test_problem_coefficient():
    p = BesselProblem(0.0, 1.0, 0.0, 1.5, Potential.const(2.0))
    c = p.coefficient(3.0)
    x = 0.25
    expected = -0.25 / x ** 2 + 2.0 / (x - 1) ** 2 + 2.0 - 3.0
    assert c(x) == pytest.approx(expected, rel=1e-14)
    assert p.with_q(Potential.zero()).potential(x) == pytest.approx(expected - 2.0 + 3.0)
