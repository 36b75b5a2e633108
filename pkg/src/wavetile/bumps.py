"""Smooth compactly supported profiles used across the toolkit.

Everything here is vectorized over numpy arrays and returns exact zeros
outside the stated supports, which downstream support lemmas rely on.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


_STEP_ORDER = 8


@lru_cache(maxsize=None)
def _step_coef(order: int) -> tuple[tuple[float, ...], float]:
    # odd antiderivative of (1 - x^2)^order, and its value at 1
    coef = tuple((-1.0) ** i * math.comb(order, i) / (2 * i + 1)
                 for i in range(order + 1))
    return coef, sum(coef)


def smooth_step(t, order: int = _STEP_ORDER):
    """Cumulative-integral mollifier step: 0 for t <= -1, 1 for t >= 1.

    The normalized antiderivative of (1 - t^2)^order; class C^order with
    exact support, monotone, and s(t) + s(-t) = 1.
    """
    coef, top = _step_coef(order)
    t = np.asarray(t, dtype=float)
    x = np.clip(t, -1.0, 1.0)
    x2 = x * x
    acc = np.zeros(x.shape)
    for c in reversed(coef):
        acc = acc * x2 + c
    acc *= x
    out = (acc + top) / (2.0 * top)
    out[t <= -1.0] = 0.0
    out[t >= 1.0] = 1.0
    return out if out.ndim else float(out)


def rise(t, lo: float, hi: float):
    """Smooth 0 -> 1 transition across [lo, hi]."""
    if not hi > lo:
        raise ValueError("need hi > lo")
    t = np.asarray(t, dtype=float)
    return smooth_step((2.0 * t - (lo + hi)) / (hi - lo))


def plateau(t, inner: float, outer: float):
    """Even profile: 1 for |t| <= inner, 0 for |t| >= outer, smooth between."""
    if not 0 <= inner < outer:
        raise ValueError("need 0 <= inner < outer")
    t = np.abs(np.asarray(t, dtype=float))
    return rise(-t, -outer, -inner)


def bspline(t, order: int):
    """Cardinal B-spline of the given order (iterated indicator convolution).

    Support is [-order/2, order/2]; smoothness class C^(order-2); peak value
    at 0.  order >= 2.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    t = np.asarray(t, dtype=float)
    x = t + order / 2.0
    out = np.zeros(t.shape)
    fact = math.factorial(order - 1)
    for i in range(order + 1):
        sign = -1.0 if i % 2 else 1.0
        out += sign * math.comb(order, i) * np.maximum(x - i, 0.0) ** (order - 1)
    out /= fact
    out[(t <= -order / 2.0) | (t >= order / 2.0)] = 0.0
    return out if out.ndim else float(out)


def taper(t, half_width: float, order: int):
    """B-spline taper rescaled to support [-half_width, half_width], peak 1."""
    scale = (2.0 * half_width) / order
    peak = bspline(0.0, order)
    return bspline(np.asarray(t, dtype=float) / scale, order) / peak
