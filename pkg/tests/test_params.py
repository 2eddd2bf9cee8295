"""Tests for halfhop/params.py"""
from halfhop import Params, ParamError
from halfhop.params import choice, unit_interval
import pytest
import numpy as np


# Test class and instance
class Example01(Params):
    """Test Params"""
    _default = {'01': 1, '02': 2.1, '03': None, 'mode': 'fast'}
    _dtype = {'01': int, '03': (np.ndarray, {'ndim': 2, 'dtype': np.float64}),
              'mode': str}
    _doc = {'01': 'doc 1', '02': 'doc 2'}

    _set_mode = staticmethod(choice('mode', ('fast', 'slow')))
    _set_02 = staticmethod(unit_interval('02'))


class Example02(Params):
    """Test Params without new keys"""
    _default = {'alpha': 0.5}
    _dtype = {'alpha': float}
    _nonewkey = True


EXAMPLE01 = Example01({'10': 1.5})


def test_params_default():
    """'Params' class: Default values"""
    items = {'01': 1, '03': None}

    for key in items:
        # Default value if not set
        assert EXAMPLE01[key] == items[key]
        # "default" method
        assert EXAMPLE01.default(key) == items[key]
        assert EXAMPLE01.isdefault(key)

    # Not default after value change
    example = Example01()
    example['01'] = 3
    assert example['01'] != items['01']
    assert not example.isdefault('01')

    # Default after value reset
    del example['01']
    assert example['01'] == items['01']

    # Error if no default
    with pytest.raises(KeyError) as excinfo:
        EXAMPLE01.default('10')
    assert 'No default value found for' in str(excinfo.value)

    with pytest.raises(KeyError) as excinfo:
        assert EXAMPLE01['20']
    assert 'No registered or default value for' in str(excinfo.value)

    # "get" falls back to its default argument
    assert EXAMPLE01.get('20', 5) == 5


def test_params_set_get():
    """'Params' class: setter"""
    example = Example01()

    # Setting false type, casted
    example['01'] = 2.0
    assert isinstance(example['01'], int)

    # Setting false type, incompatible
    with pytest.raises(ParamError) as excinfo:
        example['01'] = 'a'
    assert '01:' in str(excinfo.value)

    # Setting None value
    example['03'] = None
    assert example['03'] is None

    # Setting NumPy array with wrong dimensions
    with pytest.raises(ParamError) as excinfo:
        example['03'] = np.ones(5)
    assert 'array of 2 dimensions needed' in str(excinfo.value)

    # Setting NumPy array with wrong dtype
    example['03'] = np.ones((2, 2), dtype=np.int16)
    assert example['03'].dtype == np.dtype('float64')

    # Nested lists are casted to arrays
    example['03'] = [[1, 2], [3, 4]]
    assert isinstance(example['03'], np.ndarray)

    # New key
    example['20'] = 2
    assert '20' in example


def test_params_setters():
    """'Params' class: validating setters"""
    example = Example01()

    # Choice, case insensitive
    example['mode'] = 'SLOW'
    assert example['mode'] == 'slow'
    with pytest.raises(ParamError) as excinfo:
        example['mode'] = 'medium'
    assert 'mode must be one of fast, slow' in str(excinfo.value)

    # Unit interval
    example['02'] = 1.0
    with pytest.raises(ParamError) as excinfo:
        example['02'] = 1.5
    assert '02 must be in [0, 1]' in str(excinfo.value)

    # Setters also apply on initialization
    with pytest.raises(ParamError):
        Example01(mode='medium')


def test_params_write_limitations():
    """'Params' class: read only and no new keys"""
    # No new key
    example = Example02(alpha=0.25)
    assert example['alpha'] == 0.25
    with pytest.raises(ParamError) as excinfo:
        example['beta'] = 2
    assert "Unknown parameter 'beta'" in str(excinfo.value)
    with pytest.raises(ParamError):
        Example02(beta=1)

    # No change
    example = Example01({'01': 2})
    example._readonly = True
    with pytest.raises(PermissionError):
        example['01'] = 3
    with pytest.raises(PermissionError):
        del example['01']

    # Temporary write context manager
    with example._writeenabled():
        example['01'] = 3
    assert example['01'] == 3
    with pytest.raises(PermissionError):
        example['01'] = 4


def test_params_dict_methods():
    """'Params' class: generic dict methods"""
    example = Example01({'01': 2, '10': 4})

    # Registered keys first, then defaults
    assert list(example) == ['01', '10', '02', '03', 'mode']
    assert len(example) == 5
    assert '10' in example
    assert '02' in example
    assert '20' not in example
    assert dict(example.items())['02'] == 2.1

    # Equality with arrays
    first = Example01({'03': np.ones((2, 2))})
    second = Example01({'03': np.ones((2, 2))})
    assert first == second
    second['03'] = np.zeros((2, 2))
    assert first != second


def test_params_copy():
    """'Params' class: copy"""
    example = Example01({'03': np.ones((2, 2))})
    copy = example.copy()
    assert copy == example

    # Deep copy
    copy['03'][0, 0] = 5
    assert example['03'][0, 0] == 1

    # Changes
    copy = example.copy(**{'01': 7})
    assert copy['01'] == 7
    assert example['01'] == 1

    # Changes are validated
    with pytest.raises(ParamError):
        Example02().copy(beta=1)


def test_params_asdict():
    """'Params' class: asdict"""
    example = Example01({'01': 2, '03': np.eye(2)})
    result = example.asdict()
    assert result['01'] == 2
    assert result['02'] == 2.1
    assert result['03'] == [[1.0, 0.0], [0.0, 1.0]]


def test_params_doc():
    """'Params' class: keys documentation"""
    doc = {'01': 'doc 1', '02': 'doc 2', '03': ''}
    for key in doc:
        assert EXAMPLE01.doc(key) == doc[key]


def test_params_repr():
    """'Params' class: return a repr"""
    example = Example01({'01': 2, '10': 4, '23': 'z' * 80,
                         '24': np.ones((2, 2))})
    text = repr(example)
    assert text.startswith('Example01(')
    assert '<default>' in text
