"""Small input-validation helpers shared by the public entry points."""

import numpy as np

from .errors import InvalidParameterError


def as_float_array(x, name="array"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        arr = np.atleast_1d(arr.squeeze())
    if arr.ndim != 1:
        raise InvalidParameterError(f"{name} must be one-dimensional")
    return arr


def as_complex_array(x, name="array"):
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 1:
        arr = np.atleast_1d(arr.squeeze())
    if arr.ndim != 1:
        raise InvalidParameterError(f"{name} must be one-dimensional")
    return arr


def check_finite(arr, name="array"):
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    return arr


def check_strictly_increasing(arr, name="array"):
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise InvalidParameterError(f"{name} must be strictly increasing")
    return arr


def check_same_length(a, b, name_a="a", name_b="b"):
    if len(a) != len(b):
        raise InvalidParameterError(
            f"{name_a} and {name_b} must have the same length "
            f"({len(a)} != {len(b)})"
        )


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_non_negative(value, name):
    if not np.isfinite(value) or value < 0:
        raise InvalidParameterError(f"{name} must be >= 0, got {value!r}")
    return float(value)
