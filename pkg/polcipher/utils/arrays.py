"""
Array coercion helpers shared by the services.
"""
import numpy as np

from polcipher.utils.exceptions import InvalidArgumentError


def as_finite(value, dtype, tail: tuple, name: str) -> np.ndarray:
    """
    Convert ``value`` to an array whose trailing shape is ``tail``.

    Args:
        value: Array-like input
        dtype: Target numpy dtype (float or complex)
        tail: Required trailing dimensions, e.g. ``(4,)`` or ``(2, 2)``
        name: Argument name used in error messages

    Returns:
        Array of the requested dtype

    Raises:
        InvalidArgumentError: If the shape is wrong or any entry is not finite
    """
    try:
        arr = np.asarray(value, dtype=dtype)
    except (TypeError, ValueError) as e:
        raise InvalidArgumentError(f"{name} is not numeric: {e}") from e

    if arr.ndim < len(tail) or arr.shape[arr.ndim - len(tail):] != tuple(tail):
        raise InvalidArgumentError(
            f"{name} must have trailing shape {tail}, got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return arr
