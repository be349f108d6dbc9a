"""Cancellation-free scalar kernels.

All kernels accept scalars or arrays and switch to a four-term Taylor
series for ``|x| < 1e-4``.
"""

import numpy as np

TAYLOR_SWITCH = 1e-4


def _taylor_mask(x):
    x = np.asarray(x, dtype=float)
    return x, np.abs(x) < TAYLOR_SWITCH


def sinh_ratio(x):
    """sinh(x)/x."""
    x, small = _taylor_mask(x)
    xs = np.where(small, 1.0, x)
    x2 = x * x
    series = 1.0 + x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0
    return np.where(small, series, np.sinh(xs) / xs)


def sinc(x):
    """Unnormalised sinc, sin(x)/x."""
    x, small = _taylor_mask(x)
    xs = np.where(small, 1.0, x)
    x2 = x * x
    series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    return np.where(small, series, np.sin(xs) / xs)


def one_minus_exp_ratio(x):
    """(1 - exp(-x))/x, accurate for all real x (overflows only when exp(-x) does)."""
    x, small = _taylor_mask(x)
    xs = np.where(small, 1.0, x)
    series = 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    with np.errstate(over="ignore"):
        full = -np.expm1(-xs) / xs
    return np.where(small, series, full)


def sinh_exp_ratio(x):
    """sinh(x)/(x e^x) = (1 - e^{-2x})/(2x); bounded by 1 for x > 0."""
    return one_minus_exp_ratio(2.0 * np.asarray(x, dtype=float))
