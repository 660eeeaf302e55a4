"""Small argument checks shared across modules."""

import numbers

import numpy as np

from .exceptions import DimensionMismatchError, InputError, SingleClassError


def check_int(value, name, minimum=1):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Integral):
        raise InputError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_positive_float(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise InputError(f"{name} must be a positive finite number, got {value}")
    return value


def check_dims(dims, name="dims"):
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise InputError(f"{name} must be three positive integers, got {dims}")
    return dims


def check_same_dims(a, b, what="volume dimensions"):
    if tuple(a) != tuple(b):
        raise DimensionMismatchError(f"{what} differ: {tuple(a)} vs {tuple(b)}")


def check_binary_labels(y):
    """Return ``(classes, y01)`` for a label vector with exactly two classes."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise InputError("labels must be one-dimensional")
    classes = np.unique(y)
    if classes.size != 2:
        raise SingleClassError(
            f"exactly two classes are required, found {classes.size}: {classes.tolist()}"
        )
    return classes, (y == classes[1]).astype(np.int64)
