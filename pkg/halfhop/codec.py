"""Numeric text encoding utilities"""

import json

import numpy as np

# Enough significant digits for any float64 to round-trip
FLOAT_FORMAT = '%.17g'


def tojson(value):
    """
    Convert numpy containers and scalars to JSON compatible Python objects.

    Parameters
    ----------
    value : object
        numpy.ndarray, numpy scalar, dict, list, tuple or any JSON
        compatible value.

    Return
    ------
    out : object
    """
    if isinstance(value, np.ndarray):
        return tojson(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(key): tojson(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [tojson(item) for item in value]
    if isinstance(value, float) and not np.isfinite(value):
        # JSON has no nan/inf
        return None
    return value


def jsonencode(value):
    """
    Encode a value as deterministic JSON text.

    Keys are sorted and floats use the shortest repr that round-trips, so
    identical inputs always give identical bytes.

    Parameters
    ----------
    value : object
        Value to encode (see "tojson").

    Return
    ------
    out : str
    """
    return json.dumps(tojson(value), sort_keys=True, indent=2,
                      allow_nan=False) + '\n'
