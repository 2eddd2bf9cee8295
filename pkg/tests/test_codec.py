"""Tests for halfhop/codec.py"""
from halfhop.codec import FLOAT_FORMAT, jsonencode, tojson
import json
import numpy as np


FDAT = np.array((0.1, 1.0 / 3.0, 2.0 ** -40, 1e300, -7.25))  # Float data


def test_float_format():
    """'FLOAT_FORMAT' constant: text gives back the exact value"""
    for value in FDAT:
        assert float(FLOAT_FORMAT % value) == value

    # Integral values
    assert FLOAT_FORMAT % 1.0 == '1'
    assert FLOAT_FORMAT % np.float64(-3) == '-3'


def test_tojson():
    """'tojson' function: numpy types conversion"""
    value = {'a': np.arange(3), 'b': np.float64(0.5), 'c': (np.int64(2),),
             1: [np.nan, np.inf]}
    assert tojson(value) == {'a': [0, 1, 2], 'b': 0.5, 'c': [2],
                             '1': [None, None]}
    assert isinstance(tojson(np.int32(4)), int)


def test_jsonencode():
    """'jsonencode' function: deterministic output"""
    first = jsonencode({'b': 1, 'a': np.array([0.1, 0.2])})
    second = jsonencode({'a': np.array([0.1, 0.2]), 'b': 1})
    assert first == second
    assert first.endswith('}\n')
    assert first.index('"a"') < first.index('"b"')
    assert json.loads(first) == {'a': [0.1, 0.2], 'b': 1}
