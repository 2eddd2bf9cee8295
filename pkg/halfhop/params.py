"""'Params' typed parameter set definition"""

from collections.abc import Mapping
from contextlib import contextmanager
from copy import deepcopy

import numpy as np


class Params(Mapping):
    """
    Parameter set with defaults, typing, documentation and validation.

    This class is intended to be subclassed and not to be used directly.

    Subclassing for activating features
    -----------------------------------
    Default values: overloading the "_default" class variable
        Values returned for keys that were never set.

        Example: _default = {'alpha': 0.5, 'seed': 0}

    Value types: overloading the "_dtype" class variable
        Values are casted to the given type when set. Advanced typing is
        possible with a tuple like (type, {argname: argvalue}). For numpy
        arrays, the "ndim" argument checks the number of dimensions.

        Example: _dtype = {'sigma': (np.ndarray, {'ndim': 2,
                                                  'dtype': np.float64})}

    Documented keys: overloading the "_doc" class variable
        Help string returned by the ".doc(key)" method.

    Validating setters: methods named "_set_<key>"
        Called with the casted value, must return the value to store or
        raise ParamError.

    Writing limitation: "_readonly" and "_nonewkey" class variables
        If "_readonly" is True, values can not be changed. If "_nonewkey" is
        True, only keys with a default value can be set. The
        "_writeenabled" context manager re-enables writing temporarily.

    Parameters
    ----------
    mapping : dict compatible, optional
        Initial values.
    **kwargs
        Initial values, applied after "mapping".
    """
    _default = {}
    _dtype = {}
    _doc = {}
    _readonly = False
    _nonewkey = False

    def __init__(self, mapping=None, **kwargs):
        self._values = {}
        with self._writeenabled(nonewkey=self._nonewkey):
            for key, value in dict(mapping or {}, **kwargs).items():
                self.set(key, value)

    def set(self, key, value):
        """
        Set the value for key.

        Parameters
        ----------
        key : str
            Parameter name.
        value : object
            Parameter value.
        """
        if self._readonly:
            raise PermissionError('{} is read only'.format(type(self).__name__))
        if self._nonewkey and key not in self._default:
            raise ParamError('Unknown parameter {!r} for {}'.format(
                key, type(self).__name__))

        value = self._cast(key, value)
        setter = getattr(self, '_set_{}'.format(key), None)
        if setter is not None and value is not None:
            value = setter(value)
        self._values[key] = value

    __setitem__ = set

    def _cast(self, key, value):
        """Cast value to the type registered for key"""
        dtype = self._dtype.get(key, object)
        if isinstance(dtype, tuple):
            dtype, kwargs = dtype
        else:
            kwargs = {}

        if value is None or dtype is object:
            return value

        if issubclass(dtype, np.ndarray):
            kwargs = dict(kwargs)
            ndim = kwargs.pop('ndim', 0)
            try:
                value = np.array(value, **kwargs)
            except (TypeError, ValueError) as error:
                raise ParamError('{}: {}'.format(key, error))
            if ndim and value.ndim != ndim:
                raise ParamError('{}: array of {} dimensions needed'.format(
                    key, ndim))
            return value

        if isinstance(value, dtype) and not kwargs:
            return value
        try:
            return dtype(value, **kwargs)
        except (TypeError, ValueError) as error:
            raise ParamError('{}: {}'.format(key, error))

    def get(self, key, default=None):
        """
        Return the value for key, or its default value.

        Parameters
        ----------
        key : str
            Parameter name.
        default : object, optional
            Returned if key has no value and no default value.
        """
        try:
            return self[key]
        except KeyError:
            return default

    def __getitem__(self, key):
        try:
            return self._values[key]
        except KeyError:
            try:
                return self._default[key]
            except KeyError:
                raise KeyError('No registered or default value for {!r}'.format(
                    key))

    def __delitem__(self, key):
        if self._readonly:
            raise PermissionError('{} is read only'.format(type(self).__name__))
        del self._values[key]

    def __iter__(self):
        # Registered keys first, then defaults, in declaration order
        keys = list(self._values)
        keys.extend(key for key in self._default if key not in self._values)
        return iter(keys)

    def __len__(self):
        return len(set(self._values) | set(self._default))

    def __contains__(self, key):
        return key in self._values or key in self._default

    def __eq__(self, other):
        if not isinstance(other, Mapping) or set(self) != set(other):
            return False
        for key in self:
            mine, theirs = self[key], other[key]
            if isinstance(mine, np.ndarray) or isinstance(theirs, np.ndarray):
                if not np.array_equal(mine, theirs):
                    return False
            elif mine != theirs:
                return False
        return True

    __hash__ = None

    def isdefault(self, key):
        """
        Return True if key holds its default value (never set).

        Parameters
        ----------
        key : str
            Parameter name.
        """
        return key not in self._values

    def default(self, key):
        """
        Return the default value for a key.

        Parameters
        ----------
        key : str
            Parameter name.
        """
        try:
            return self._default[key]
        except KeyError:
            raise KeyError('No default value found for {!r}'.format(key))

    def doc(self, key):
        """
        Return the documentation for the specified key.

        Parameters
        ----------
        key : str
            Parameter name.
        """
        return self._doc.get(key, '')

    def copy(self, **changes):
        """
        Return a deep copy, with optional changed values.

        Parameters
        ----------
        **changes
            Values to change in the copy.
        """
        new = deepcopy(self)
        with new._writeenabled(nonewkey=new._nonewkey):
            for key, value in changes.items():
                new.set(key, value)
        return new

    def asdict(self):
        """
        Return a JSON compatible dictionary of all values (defaults
        included). Arrays are converted to nested lists.
        """
        result = {}
        for key in self:
            value = self[key]
            if isinstance(value, Params):
                value = value.asdict()
            elif isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, np.generic):
                value = value.item()
            result[key] = value
        return result

    def __repr__(self):
        lines = [type(self).__name__, '(']
        for key in self:
            valuerepr = repr(self[key])
            if '\n' in valuerepr or len(valuerepr) > 61:
                valuerepr = ' '.join(valuerepr.split())
                valuerepr = '[...]'.join((valuerepr[:27], valuerepr[-27:]))
            flag = ' <default>' if self.isdefault(key) else ''
            lines.append('\n{!r}: {}{}'.format(key, valuerepr, flag))
        lines.append(')')
        return ''.join(lines)

    @contextmanager
    def _writeenabled(self, nonewkey=False):
        """
        This context manager temporary enable writing if _readonly and/or
        _nonewkey is set to True.

        Parameters
        ----------
        nonewkey : bool
            If True, new keys stay forbidden.
        """
        readonly = self._readonly
        previous = self._nonewkey
        self._readonly = False
        self._nonewkey = nonewkey
        try:
            yield
        finally:
            self._readonly = readonly
            self._nonewkey = previous


class ParamError(ValueError):
    """Raised when a parameter value is invalid."""


def unit_interval(key):
    """
    Return a setter checking that a value lies in [0, 1].

    Parameters
    ----------
    key : str
        Parameter name used in error message.
    """
    def setter(value):
        if not 0.0 <= value <= 1.0:
            raise ParamError('{} must be in [0, 1], got {!r}'.format(
                key, value))
        return value
    return setter


def choice(key, choices):
    """
    Return a setter checking that a value is one of "choices".

    Parameters
    ----------
    key : str
        Parameter name used in error message.
    choices : tuple of str
        Allowed values.
    """
    def setter(value):
        value = value.lower()
        if value not in choices:
            raise ParamError('{} must be one of {}, got {!r}'.format(
                key, ', '.join(choices), value))
        return value
    return setter
