import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pytest

from vinolab.reports import csv_text, dumps, fraction_to_str, ndjson_lines, str_to_fraction, to_jsonable


@pytest.mark.parametrize("x", [Fraction(0), Fraction(-6, 7), Fraction(10**40, 3), 5])
def test_fraction_round_trip(x):
    s = fraction_to_str(x)
    assert "/" in s and str_to_fraction(s) == x


def test_str_to_fraction_rejects_plain():
    with pytest.raises(ValueError):
        str_to_fraction("3")


@dataclass
class _Rec:
    a: Fraction
    b: np.ndarray = field(repr=False)
    c: float = 0.5


def test_to_jsonable():
    out = to_jsonable({"x": _Rec(Fraction(1, 3), np.arange(3)), "s": {3, 1}, "z": 1 + 2j,
                       "n": np.int64(4), "f": np.float64(0.25), "t": np.bool_(True)})
    assert out == {"x": {"a": "1/3", "c": 0.5}, "s": [1, 3], "z": [1.0, 2.0], "n": 4, "f": 0.25, "t": True}
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_dumps_is_sorted_and_stable():
    a = dumps({"b": 1, "a": [Fraction(1, 2)]})
    assert a == '{"a": ["1/2"], "b": 1}'
    assert json.loads(a) == {"a": ["1/2"], "b": 1}


def test_ndjson_and_csv():
    assert list(ndjson_lines([{"a": 1}, {"b": 2}])) == ['{"a": 1}\n', '{"b": 2}\n']
    assert csv_text(["x", "y"], [(1, "a,b")]) == 'x,y\r\n1,"a,b"\r\n'
