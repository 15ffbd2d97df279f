"""Compensated summation and underflow-safe products."""
from __future__ import annotations

import math

import numpy as np

# below this magnitude a factor product switches to log space
LOG_SWITCH = 1e-3


def compensated_sum(values) -> float:
    """Correctly rounded sum (Shewchuk partials via :func:`math.fsum`)."""
    return math.fsum(values)


def cumulative_sum(values) -> np.ndarray:
    """Running sums with Neumaier compensation.

    Element ``n`` of the result is the sum of ``values[:n+1]``.
    """
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    s = 0.0
    c = 0.0
    for i, v in enumerate(values.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


def signed_log_cumprod(factors) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative product returned as ``(sign, log|prod|)`` arrays.

    A zero factor pins the log to ``-inf`` and the sign to 0 from that index on.
    """
    factors = np.asarray(factors, dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(factors))
    finite = np.where(np.isneginf(logs), 0.0, logs)
    log_abs = cumulative_sum(finite)
    dead = np.cumsum(factors == 0) > 0
    log_abs[dead] = -np.inf
    sign = np.cumprod(np.sign(factors))
    return sign, log_abs


def cumprod(factors, log_switch: float = LOG_SWITCH) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative product of ``factors`` plus the natural log of its magnitude.

    The value array is taken from plain multiplication unless some factor has
    magnitude below ``log_switch`` (or the plain product underflows), in which
    case it is rebuilt from the log-space accumulation.
    """
    factors = np.asarray(factors, dtype=float)
    sign, log_abs = signed_log_cumprod(factors)
    linear = np.cumprod(factors)
    small = np.abs(factors) < log_switch
    underflow = (linear == 0) & (sign != 0)
    if np.any(small & (factors != 0)) or np.any(underflow):
        with np.errstate(under="ignore"):
            linear = sign * np.exp(log_abs)
    return linear, log_abs
