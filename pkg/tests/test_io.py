import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import any_pref
from homothetic import (
    CES,
    Leontief,
    Linear,
    Mixture,
    PiecewiseLinearE,
    Population,
    TwoGoodQ,
    log_expenditure,
)
from homothetic.io import (
    SchemaError,
    dumps,
    loads,
    market_from_dict,
    population_from_dict,
    population_to_dict,
    pref_from_dict,
)


@given(any_pref(3))
def test_preference_round_trip(pref):
    back = pref_from_dict(loads(dumps(pref.to_dict())))
    assert back == pref


@given(st.floats(allow_nan=False, allow_infinity=True))
def test_float_round_trip_is_exact(x):
    text = dumps([x, 1.0])
    back = loads(text)[0]
    val = float(back) if isinstance(back, str) else back
    assert val == x


def test_special_preferences_round_trip():
    for pref in (TwoGoodQ((1.0, 2.0), (0.0, 1.0, math.inf)), PiecewiseLinearE([(1, 0), (0.2, 0.7)]),
                 Mixture((-0.2, 1.2), (Leontief((1, 1)), CES((0.5, 0.5), 2.0)), signed=True)):
        back = pref_from_dict(loads(dumps(pref.to_dict())))
        assert back == pref
        assert log_expenditure(back, [2, 3]) == log_expenditure(pref, [2, 3])


def test_population_round_trip():
    pop = Population.of([(Linear((1, 0)), 1.0), (Linear((0, 1)), 2.0)])
    d = loads(dumps(population_to_dict(pop)))
    assert d["n"] == 2
    back = population_from_dict(d)
    assert [a.pref for a in back.agents] == [a.pref for a in pop.agents]
    np.testing.assert_array_equal(back.budgets, pop.budgets)


def test_dumps_is_valid_json_and_deterministic():
    obj = {"a": [0.1, 1 / 3, 2.0], "b": {"c": True, "d": None, "e": "x"}, "f": np.array([[1.0, 2.0]])}
    assert dumps(obj) == dumps(obj)
    parsed = json.loads(dumps(obj))
    assert parsed["a"][1] == 1 / 3
    assert "0.33333333333333331" in dumps(obj)


@pytest.mark.parametrize("bad", [
    {"kind": "linear"},
    {"kind": "unknown", "v": [1]},
    {"kind": "ces", "a": [0.5, 0.5], "sigma": 1.0},
    {"kind": "linear", "v": ["x", 1]},
    {"kind": "mixture", "weights": [1.0], "components": []},
    [],
])
def test_schema_errors(bad):
    with pytest.raises(SchemaError):
        pref_from_dict(bad)


def test_population_schema_errors():
    with pytest.raises(SchemaError):
        population_from_dict({"agents": []})
    with pytest.raises(SchemaError):
        population_from_dict({"n": 3, "agents": [{"budget": 1, "pref": {"kind": "linear", "v": [1, 1]}}]})
    with pytest.raises(SchemaError):
        population_from_dict({"agents": [{"budget": -1, "pref": {"kind": "linear", "v": [1, 1]}}]})


def test_market_parse():
    pop, X, tol = market_from_dict({
        "population": {"agents": [{"budget": 3, "pref": {"kind": "cobb_douglas", "a": [0.25, 0.75]}}]},
        "supply": [1, 1], "tol": 1e-8})
    assert pop.B == 3 and tol == 1e-8
    with pytest.raises(SchemaError):
        market_from_dict({"population": {"agents": [{"budget": 3, "pref": {"kind": "linear", "v": [1, 1]}}]},
                          "supply": [1, 1, 1]})


def test_malformed_json():
    with pytest.raises(SchemaError):
        loads("{not json")
