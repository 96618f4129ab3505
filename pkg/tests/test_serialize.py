"""JSON plumbing: deterministic dumps, schema loading, safe expressions."""

import json
import math

import numpy as np
import pytest

from qentropy import WeightedPartition, uniform_partition
from qentropy.serialize import (
    dumps,
    expression_function,
    json_ready,
    load_input,
    partition_from_obj,
    partition_to_dict,
    pmf_from_obj,
)


def test_json_ready_maps_nonfinite_floats_to_strings():
    assert json_ready(math.inf) == "inf"
    assert json_ready(-math.inf) == "-inf"
    assert json_ready(math.nan) == "nan"
    assert json_ready(np.float64(0.25)) == 0.25
    assert json_ready(np.int64(3)) == 3
    assert json_ready(np.bool_(True)) is True
    assert json_ready(np.array([1.0, math.inf])) == [1.0, "inf"]
    assert json_ready({"a": (1, 2)}) == {"a": [1, 2]}


def test_dumps_is_deterministic_and_round_trips():
    payload = {"z": 1.0 / 3.0, "a": [0.1, 0.2], "flag": False}
    text = dumps(payload)
    assert text == dumps(payload)
    assert text.endswith("\n")
    back = json.loads(text)
    # shortest round-trip floats survive exactly
    assert back["z"] == 1.0 / 3.0
    # insertion order is preserved, not sorted
    assert list(back) == ["z", "a", "flag"]


def test_dumps_refuses_raw_nonfinite():
    # everything must pass through json_ready first; raw inf would otherwise
    # serialize as the non-JSON literal Infinity
    assert json.loads(dumps({"v": math.inf}))["v"] == "inf"


def test_load_input_inline_and_file(tmp_path):
    assert load_input('{"a": 1}') == {"a": 1}
    path = tmp_path / "spec.json"
    path.write_text('{"b": [1, 2]}', encoding="utf-8")
    assert load_input(str(path)) == {"b": [1, 2]}
    with pytest.raises(ValueError):
        load_input('{"a": ')
    # anything not starting with '{' is a path, even if it looks like JSON
    with pytest.raises(OSError):
        load_input("[1, 2]")
    toplevel = tmp_path / "list.json"
    toplevel.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError):
        load_input(str(toplevel))
    with pytest.raises(OSError):
        load_input(str(tmp_path / "missing.json"))


def test_partition_round_trip():
    part = uniform_partition(3, "lebesgue", (0.0, 1.5))
    obj = partition_to_dict(part)
    back = partition_from_obj(obj)
    assert isinstance(back, WeightedPartition)
    assert np.allclose(back.weights, part.weights, rtol=0, atol=0)
    assert [c.label for c in back.cells] == [c.label for c in part.cells]


def test_partition_shorthand():
    part = partition_from_obj({"n": 4, "mode": "uniform_probability"})
    assert np.allclose(part.weights, 0.25, rtol=0, atol=0)
    grid = partition_from_obj({"n": 2, "mode": "lebesgue", "interval": [0.0, 3.0]})
    assert np.allclose(grid.weights, 1.5, rtol=0, atol=0)
    with pytest.raises(ValueError):
        partition_from_obj({"cells": [{"label": "a"}]})  # weights missing
    with pytest.raises(ValueError):
        partition_from_obj({"weights": [1.0]})
    with pytest.raises(ValueError):
        partition_from_obj(42)


def test_pmf_from_obj():
    P = pmf_from_obj([0.25, 0.75])
    assert np.allclose(P.masses, [0.25, 0.75], rtol=0, atol=0)
    with pytest.raises(ValueError):
        pmf_from_obj([0.25, 0.7])
    with pytest.raises(ValueError):
        pmf_from_obj("nope")


def test_expression_function_evaluates_whitelisted_math():
    f = expression_function("2*x")
    x = np.array([0.25, 0.5])
    assert np.allclose(f(x), [0.5, 1.0], rtol=0, atol=0)
    g = expression_function("1 + 0.3*sin(2*pi*x)")
    assert np.allclose(g(x), 1.0 + 0.3 * np.sin(2.0 * math.pi * x), rtol=1e-15)
    h = expression_function("where(x < 0.5, 2.0, 0.0)")
    assert np.allclose(h(x), [2.0, 0.0], rtol=0, atol=0)
    const = expression_function("1.0")
    assert np.allclose(const(x), [1.0, 1.0], rtol=0, atol=0)


def test_expression_function_rejects_non_math():
    for bad in (
        "__import__('os').system('true')",
        "x.__class__",
        "open('/etc/passwd')",
        "lambda y: y",
        "[1 for _ in x]",
        "y + 1",
    ):
        with pytest.raises(ValueError):
            expression_function(bad)
