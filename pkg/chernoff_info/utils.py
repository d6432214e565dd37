import logging

import numpy as np

from .errors import ConsistencyError, RangeError


logger = logging.getLogger(__name__)

# Divergences in [-tolerance, 0) are rounding noise.
NEGATIVE_TOLERANCE = 1e-12


def clamp_nonnegative(value, scale=1.0):
    """
    Clamp a divergence that came out slightly negative to exactly 0.

    The tolerance is NEGATIVE_TOLERANCE times the magnitude of the terms
    that were combined to produce value.
    """
    value = float(value)
    if value >= 0:
        return value
    tol = NEGATIVE_TOLERANCE * max(1.0, abs(float(scale)))
    if value >= -tol:
        if value < -NEGATIVE_TOLERANCE:
            logger.warning("Clamped divergence %.3e to 0 (tolerance %.3e)", value, tol)
        return 0.0
    raise ConsistencyError("Divergence evaluated to %.17g, below the tolerance %.3e" % (value, tol))


def check_open_unit(alpha, name="alpha"):
    """Return alpha as a float, raising RangeError unless 0 < alpha < 1."""
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise RangeError("%s must be a real number, got %r" % (name, alpha))
    if not (0.0 < alpha < 1.0):
        raise RangeError("%s must lie in the open interval (0, 1), got %r" % (name, alpha))
    return alpha


def to_builtin(value):
    """Convert numpy scalars and arrays (possibly nested in dicts/lists) to builtin types."""
    if isinstance(value, dict):
        return dict((k, to_builtin(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "toDict"):
        return to_builtin(value.toDict())
    return value
