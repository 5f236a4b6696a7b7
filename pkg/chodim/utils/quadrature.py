#!/usr/bin/env python3
"""
Time-series quadrature and difference helpers on uniform grids
"""

import numpy as np
from scipy.integrate import cumulative_trapezoid

from chodim.core.exceptions import InsufficientSamplesError


def running_integral(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid integral starting at 0"""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 2:
        return np.zeros_like(values)
    return cumulative_trapezoid(values, times, initial=0.0)


def centered_rate(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Centered difference at interior grid points"""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 3:
        raise InsufficientSamplesError(3, int(times.size))
    return (values[2:] - values[:-2]) / (times[2:] - times[:-2])


def simpson_mean(values: np.ndarray) -> np.ndarray:
    """(v[i-1] + 4 v[i] + v[i+1]) / 6 at interior points"""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        raise InsufficientSamplesError(3, int(values.size))
    return (values[:-2] + 4.0 * values[1:-1] + values[2:]) / 6.0


def rate_residual(times: np.ndarray, half_log: np.ndarray, rate: np.ndarray, rule: str = "centered") -> np.ndarray:
    """|d/dt half_log - rate| at interior points

    rule "centered" compares with the pointwise rate; "simpson" compares with
    its Simpson mean over the same two steps.
    """
    slope = centered_rate(times, half_log)
    if rule == "centered":
        reference = np.asarray(rate, dtype=float)[1:-1]
    elif rule == "simpson":
        reference = simpson_mean(rate)
    else:
        raise ValueError(f"Unknown residual rule '{rule}'")
    return np.abs(slope - reference)
