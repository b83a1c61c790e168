"""
Modified Bessel helpers for the reference kernels and particular solutions.

The kernels only ever need I_ν(r) divided by r^ν, written as entire
functions of s = r²; near s = 0 the quotient is summed from its power
series to avoid 0/0.
"""

import math

import numpy as np
from scipy.special import i0, i1, iv

__all__ = ["i0", "i1", "scaled_iv", "i1_over_r", "i2_over_r2"]

SERIES_CUTOFF = 1.0
SERIES_TERMS = 14


def _scaled_series(nu: int, s: np.ndarray) -> np.ndarray:
    term = np.full(s.shape, 1.0 / math.factorial(nu))
    total = term.copy()
    for k in range(1, SERIES_TERMS):
        term = term * (s / 4.0) / (k * (k + nu))
        total = total + term
    return total


def scaled_iv(nu: int, s):
    """
    I_ν(√s) / (√s/2)^ν as an entire function of s.

    Args:
        nu: Non-negative integer order.
        s: Real argument(s); s = r² with r the Bessel argument.

    Returns:
        Array of the same shape as s.
    """
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < SERIES_CUTOFF
    result = np.empty(s.shape)
    result[small] = _scaled_series(nu, s[small])
    large = ~small
    if np.any(large & (s < 0)):
        raise ValueError("negative arguments beyond the series range")
    r = np.sqrt(s[large])
    result[large] = iv(nu, r) / (r / 2.0) ** nu
    return result


def i1_over_r(s):
    """I₁(r)/r with s = r²; equals 1/2 at s = 0."""
    return scaled_iv(1, s) / 2.0


def i2_over_r2(s):
    """I₂(r)/r² with s = r²; equals 1/8 at s = 0."""
    return scaled_iv(2, s) / 4.0
