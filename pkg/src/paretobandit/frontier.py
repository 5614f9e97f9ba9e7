"""Geometry of the set of achievable worst-case regret vectors.

A vector ``B`` of per-arm worst-case regret bounds over horizon ``n`` is
achievable (up to constant factors) iff for every arm ``i``

    B_i >= min(n, sum_{j != i} n / B_j).

The module offers membership tests, the canonical frontier points and the
lower-bound certificate obtained from a vector of worst-case regrets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "BoundVector",
    "FrontierReport",
    "InfeasibleBoundError",
    "contains",
    "harmonic_number",
    "uniform_point",
    "harmonic_point",
    "power_point",
    "simple_lower",
    "lower_bound_certificate",
]

# relative slack tolerance; boundary points must not flip on rounding
MEMBER_RTOL = 1e-9


class InfeasibleBoundError(ValueError):
    """A requested frontier point has entries outside (0, n]."""

    def __init__(self, message: str, min_b1: float | None = None):
        super().__init__(message)
        self.min_b1 = min_b1


@dataclass(frozen=True)
class BoundVector:
    n: int
    bounds: tuple[float, ...]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.n!r}")
        b = tuple(float(x) for x in self.bounds)
        if len(b) < 2:
            raise ValueError("a bound vector needs at least 2 arms")
        for i, x in enumerate(b):
            if not (0.0 < x <= self.n):
                raise ValueError(f"bound {i + 1} = {x!r} outside (0, n={self.n}]")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "bounds", b)

    @property
    def K(self) -> int:
        return len(self.bounds)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.bounds, dtype=float)


@dataclass(frozen=True)
class FrontierReport:
    member: bool
    slack: tuple[float, ...]


def contains(B: BoundVector) -> FrontierReport:
    b = B.as_array()
    inv = B.n / b
    others = inv.sum() - inv
    slack = b - np.minimum(B.n, others)
    member = bool(np.all(slack >= -MEMBER_RTOL * B.n))
    return FrontierReport(member=member, slack=tuple(float(s) for s in slack))


def harmonic_number(K: int) -> float:
    """sum_{k=2}^{K} 1/(k-1), summed directly."""
    return sum(1.0 / (k - 1) for k in range(2, K + 1))


def uniform_point(n: int, K: int) -> BoundVector:
    if K < 2:
        raise ValueError("K must be >= 2")
    if K - 1 > n:
        raise InfeasibleBoundError(f"sqrt(n(K-1)) exceeds n for n={n}, K={K}")
    b = math.sqrt(n * (K - 1))
    return BoundVector(n, (b,) * K)


def harmonic_point(B1: float, n: int, K: int) -> BoundVector:
    """Arm 1 favoured with bound B1; arm k gets (k-1) n H / B1."""
    if K < 2:
        raise ValueError("K must be >= 2")
    H = harmonic_number(K)
    min_b1 = (K - 1) * H
    if not (0 < B1 <= n):
        raise InfeasibleBoundError(f"B1={B1!r} outside (0, n={n}]", min_b1=min_b1)
    # compare on the same expression used for the entries
    if (K - 1) * n * H / B1 > n * (1 + MEMBER_RTOL):
        raise InfeasibleBoundError(
            f"B1={B1!r} too small: entries exceed n; minimal feasible B1 is {min_b1!r}",
            min_b1=min_b1,
        )
    # arm 1 must be the favoured arm (B1 <= B2); above that, arms k >= 3 leave the set
    max_b1 = math.sqrt(n * H)
    if B1 > max_b1 * (1 + MEMBER_RTOL):
        raise InfeasibleBoundError(
            f"B1={B1!r} exceeds sqrt(nH)={max_b1!r}, so arm 1 would not be the favoured arm",
            min_b1=min_b1,
        )
    entries = [float(B1)] + [min((k - 1) * n * H / B1, float(n)) for k in range(2, K + 1)]
    return BoundVector(n, tuple(entries))


def power_point(p: float, n: int, K: int) -> BoundVector:
    if not (0 < p < 1):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return harmonic_point(float(n) ** p, n, K)


def simple_lower(B1: float, k: int, n: int) -> float:
    """Necessary lower bound (k-1) n / B1 on the k-th smallest worst-case regret."""
    return (k - 1) * n / B1


def lower_bound_certificate(R: Sequence[float], n: int) -> FrontierReport:
    """Membership of min(n, 8 (R + K)) in the achievable set.

    For true worst-case regret vectors a non-member is impossible. Monte Carlo
    scans underestimate the worst case, so there the result is a diagnostic.
    """
    r = np.asarray(R, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("R must be a vector with at least 2 entries")
    if not np.all(np.isfinite(r)) or np.any(r < 0):
        raise ValueError("R entries must be finite and >= 0")
    K = r.size
    cert = np.minimum(float(n), 8.0 * (r + K))
    return contains(BoundVector(n, tuple(cert)))
