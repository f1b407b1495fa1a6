import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roadsense.errors import NoRuleFiredError
from roadsense.fuzzy import (FuzzyRule, FuzzySystem, FuzzyVariable, MembershipFunction, eval_membership,
                             eval_membership_array, fire_rule, fuzzify, infer, infer_batch, system_from_dict,
                             system_to_dict)
from roadsense.weather import VARIABLES

WIND, HUMIDITY, LIGHT, TEMPERATURE, RAIN = VARIABLES


@pytest.mark.parametrize("bp, x, expected", [
    ((0, 0, 3, 5), 0, 1.0),
    ((0, 0, 3, 5), 4, 0.5),
    ((3, 5, 7), 5, 1.0),
    ((0, 50, 100), 25, 0.5),
    ((0, 0, 3, 5), 5, 0.0),
    ((0, 0, 3, 5), 3, 1.0),
    ((5, 7, 10, 10), 10, 1.0),
    ((5, 7, 10, 10), 5, 0.0),
    ((0, 0, 50), 50, 0.0),
    ((50, 100, 100), 100, 1.0),
    ((3, 5, 7), 2.9, 0.0),
    ((3, 5, 7), 7.1, 0.0),
])
def test_eval_membership(bp, x, expected):
    assert eval_membership(MembershipFunction(bp), x) == expected


@pytest.mark.parametrize("bp", [(1, 0, 2), (0, 2, 1), (0, 1, 3, 2), (0, 1), (0, 1, 2, 3, 4), (0, math.nan, 1)])
def test_malformed_breakpoints_rejected_at_construction(bp):
    with pytest.raises(ValueError):
        MembershipFunction(bp)


def test_shape_from_breakpoint_count():
    assert MembershipFunction((0, 1, 2)).shape == "triangle"
    assert MembershipFunction((0, 1, 2, 3)).shape == "trapezoid"


breakpoints = st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=4).map(sorted)


@given(breakpoints, st.floats(-200, 200, allow_nan=False))
def test_degree_in_unit_interval_and_zero_outside_support(bp, x):
    mf = MembershipFunction(tuple(bp))
    d = eval_membership(mf, x)
    assert 0.0 <= d <= 1.0
    if x < bp[0] or x > bp[-1]:
        assert d == 0.0


@given(breakpoints, st.floats(-200, 200, allow_nan=False), st.floats(-200, 200, allow_nan=False))
def test_edges_are_monotone(bp, x1, x2):
    mf = MembershipFunction(tuple(bp))
    a, b, c, d = mf.corners
    lo, hi = sorted((x1, x2))
    if a <= lo and hi <= b:
        assert eval_membership(mf, lo) <= eval_membership(mf, hi)
    if c <= lo and hi <= d:
        assert eval_membership(mf, lo) >= eval_membership(mf, hi)


@given(breakpoints, st.lists(st.floats(-200, 200, allow_nan=False), min_size=1, max_size=20))
def test_vectorised_membership_matches_scalar(bp, xs):
    mf = MembershipFunction(tuple(bp))
    got = eval_membership_array(mf, np.array(xs))
    assert got.tolist() == [eval_membership(mf, x) for x in xs]


def test_fuzzify_wind_on_shared_edge():
    assert fuzzify(WIND, 4) == {"low": 0.5, "medium": 0.5, "high": 0.0}


def test_fuzzify_light_at_top_plateau():
    assert fuzzify(LIGHT, 100) == {"low": 0.0, "medium": 0.0, "high": 1.0}


def test_fuzzify_clamps_out_of_universe():
    assert fuzzify(WIND, 12) == fuzzify(WIND, 10) == {"low": 0.0, "medium": 0.0, "high": 1.0}
    assert fuzzify(TEMPERATURE, -5) == fuzzify(TEMPERATURE, 0)


def test_variable_rejects_breakpoints_outside_universe():
    with pytest.raises(ValueError):
        FuzzyVariable("x", (0, 10), {"low": (0, 0, 20)})


@pytest.mark.parametrize("var", [WIND, LIGHT, HUMIDITY], ids=lambda v: v.name)
def test_partition_of_unity(var):
    lo, hi = var.universe
    for x in np.linspace(lo, hi, 2001):
        assert sum(fuzzify(var, x).values()) == pytest.approx(1.0, abs=1e-12)


def test_temperature_does_not_tile():
    # every temperature term is zero at 30
    assert sum(fuzzify(TEMPERATURE, 30).values()) == 0.0


def _rule(**ante):
    return FuzzyRule(ante, "out")


def test_fire_rule_min():
    fz = {v: {"t": d} for v, d in zip("abcde", (0.8, 1.0, 0.6, 1.0, 1.0))}
    assert fire_rule(_rule(a="t", b="t", c="t", d="t", e="t"), fz) == 0.6
    fz["b"]["t"] = 0.0
    assert fire_rule(_rule(a="t", b="t", c="t"), fz) == 0.0
    assert fire_rule(_rule(a="t"), {"a": {"t": 0.37}}) == 0.37


def test_fire_rule_missing_variable_named():
    with pytest.raises(KeyError, match="'b'"):
        fire_rule(_rule(a="t", b="t"), {"a": {"t": 1.0}})


def _toy_system(tie_break=("x", "y")):
    var = FuzzyVariable("v", (0, 10), {"lo": (0, 0, 5), "hi": (5, 10, 10), "mid": (0, 5, 10)})
    rules = [FuzzyRule({"v": "lo"}, "x"), FuzzyRule({"v": "mid"}, "y"), FuzzyRule({"v": "hi"}, "y")]
    return FuzzySystem([var], ("x", "y"), rules, tie_break)


def test_infer_saturated_rule():
    label, acts = infer(_toy_system(), {"v": 0})
    assert label == "x" and acts == {"x": 1.0, "y": 0.0}


def test_infer_tie_break():
    # v = 2.5: lo = 0.5, mid = 0.5
    assert infer(_toy_system(("x", "y")), {"v": 2.5})[0] == "x"
    assert infer(_toy_system(("y", "x")), {"v": 2.5})[0] == "y"


def test_infer_no_rule_fired():
    var = FuzzyVariable("v", (0, 10), {"lo": (0, 0, 2), "hi": (8, 10, 10)})
    system = FuzzySystem([var], ("x", "y"), [FuzzyRule({"v": "lo"}, "x"), FuzzyRule({"v": "hi"}, "y")])
    with pytest.raises(NoRuleFiredError):
        infer(system, {"v": 5})


def test_system_validation():
    var = FuzzyVariable("v", (0, 1), {"lo": (0, 0, 1)})
    with pytest.raises(ValueError):
        FuzzySystem([var], ("x",), [])
    with pytest.raises(ValueError):
        FuzzySystem([var], ("x",), [FuzzyRule({"w": "lo"}, "x")])
    with pytest.raises(ValueError):
        FuzzySystem([var], ("x",), [FuzzyRule({"v": "hi"}, "x")])
    with pytest.raises(ValueError):
        FuzzySystem([var], ("x",), [FuzzyRule({"v": "lo"}, "z")])
    with pytest.raises(ValueError):
        FuzzySystem([var], ("x", "y"), [FuzzyRule({"v": "lo"}, "x")], ("x",))


readings = st.fixed_dictionaries({
    "wind": st.floats(-2, 12), "humidity": st.floats(-10, 110), "light": st.floats(-10, 110),
    "temperature": st.floats(-5, 50), "rain": st.floats(-10, 110)})


@given(readings)
def test_infer_properties(weather_inputs):
    from roadsense.weather import build_weather_system
    system = build_weather_system()
    label, acts = infer(system, weather_inputs)
    assert all(acts[label] >= v for v in acts.values())
    assert infer(system, weather_inputs) == (label, acts)
    # argmax invariance under positive scaling
    for k in (0.5, 3.0):
        scaled = {lab: v * k for lab, v in acts.items()}
        best = max(scaled.values())
        assert next(lab for lab in system.tie_break if scaled[lab] == best) == label


@settings(max_examples=50)
@given(st.lists(readings, min_size=1, max_size=30))
def test_infer_batch_matches_scalar(batch):
    from roadsense.weather import build_weather_system
    system = build_weather_system()
    arrays = {k: np.array([b[k] for b in batch]) for k in batch[0]}
    index, acts = infer_batch(system, arrays)
    for i, b in enumerate(batch):
        label, scalar_acts = infer(system, b)
        assert system.output_labels[index[i]] == label
        assert acts[i].tolist() == [scalar_acts[lab] for lab in system.output_labels]


def test_json_round_trip(weather_system, tmp_path):
    doc = system_to_dict(weather_system)
    path = tmp_path / "rules.json"
    path.write_text(json.dumps(doc))
    again = system_from_dict(json.loads(path.read_text()))
    assert again == weather_system
    assert doc["variables"][0]["terms"]["low"] == [0.0, 0.0, 3.0, 5.0]


def test_json_breakpoint_length_selects_shape():
    doc = {"variables": [{"name": "v", "universe": [0, 10], "terms": {"a": [0, 5, 10], "b": [0, 0, 5, 10]}}],
           "outputs": ["x"], "rules": [{"if": {"v": "a"}, "then": "x"}]}
    system = system_from_dict(doc)
    terms = system.variables[0].terms
    assert terms["a"].shape == "triangle" and terms["b"].shape == "trapezoid"
    assert system.tie_break == ("x",)


def test_malformed_json_document():
    with pytest.raises(ValueError):
        system_from_dict({"variables": []})
