"""Scalar special functions, dB/dBm conversions, and reproducible random streams."""

import math

import numpy as np
from scipy import special

_SQRT2 = math.sqrt(2.0)


def _require_finite(name, x):
    if not np.all(np.isfinite(x)):
        raise ValueError("%s must be finite, got %r" % (name, x))


def q_function(x):
    """Gaussian tail probability Q(x) = P(Z > x) for a standard normal Z.

    Computed as 0.5 * erfc(x / sqrt(2)). Accepts a scalar or an array and
    returns the same shape. Strictly decreasing, Q(0) = 0.5, Q(-x) = 1 - Q(x).
    """
    arr = np.asarray(x, dtype=float)
    _require_finite("q_function argument", arr)
    out = 0.5 * special.erfc(arr / _SQRT2)
    return float(out) if arr.ndim == 0 else out


def db_to_linear(x_db):
    """Power ratio from dB: 10**(x/10)."""
    _require_finite("dB value", x_db)
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    """dB from a positive power ratio."""
    _require_finite("linear value", x)
    if x <= 0.0:
        raise ValueError("linear power ratio must be > 0, got %r" % (x,))
    return 10.0 * math.log10(x)


def dbm_to_watts(x_dbm):
    """Absolute power in watts from dBm (referenced to 1 mW)."""
    _require_finite("dBm value", x_dbm)
    return 1e-3 * 10.0 ** (x_dbm / 10.0)


def watts_to_dbm(w):
    """dBm from a positive power in watts."""
    _require_finite("watts value", w)
    if w <= 0.0:
        raise ValueError("power must be > 0 W, got %r" % (w,))
    return 10.0 * math.log10(w / 1e-3)


def random_stream(seed, stream_index=0):
    """Counter-based random stream keyed by (seed, stream_index).

    Streams with distinct indices are statistically independent and their
    output does not depend on how many other streams exist, so work can be
    split across any number of workers without changing the drawn values.
    """
    key = np.array([int(seed) % 2**64, int(stream_index) % 2**64],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_gamma(shape, rng, size=None):
    """Draw from Gamma(shape, scale=1) using the supplied generator.

    Returns a float when size is None, otherwise an array of that shape.
    """
    if not np.isfinite(shape) or shape <= 0.0:
        raise ValueError("gamma shape must be finite and > 0, got %r" % (shape,))
    out = rng.gamma(shape, size=size)
    return float(out) if size is None else out
