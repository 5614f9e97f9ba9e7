"""Scalar special functions shared by the index policies and the bound formulas."""

import math

from numba import njit

__all__ = ["log_plus", "lambert_w0", "lemma3_bound"]


@njit(cache=True)
def log_plus(x):
    """max(0, ln x) for x > 0."""
    if not x > 0.0:
        raise ValueError("log_plus requires x > 0")
    if x <= 1.0:
        return 0.0
    return math.log(x)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function for x >= 0.

    Solves w * exp(w) = x by Halley iteration started from ln(1 + x).
    """
    x = float(x)
    if not x >= 0.0 or math.isinf(x):
        raise ValueError(f"lambert_w0 requires finite x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    w = math.log1p(x)
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) < 1e-14:
            break
    return max(w, 0.0)


def lemma3_bound(n_j: float, delta_bar: float) -> float:
    """Upper bound on the expected stopping time of an arm with shifted gap ``delta_bar``.

    40/d^2 + (64/d^2) * W(n_j d^2 / 64).
    """
    if not delta_bar > 0:
        raise ValueError(f"delta_bar must be > 0, got {delta_bar!r}")
    if not n_j > 0:
        raise ValueError(f"n_j must be > 0, got {n_j!r}")
    d2 = delta_bar * delta_bar
    return 40.0 / d2 + 64.0 / d2 * lambert_w0(n_j * d2 / 64.0)
