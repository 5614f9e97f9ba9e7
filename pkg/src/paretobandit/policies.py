"""Index and weight computations for the four agents.

* ``umoss``: Unbalanced MOSS, per-arm confidence horizon n_i = n^2 / B_i^2 and
  a downward shift sqrt(1/n_i).
* ``uucb``: Unbalanced UCB, log t confidence width with shift sqrt(log n / n_i).
* ``ucb``: the unshifted UCB baseline with the same width.
* ``exp3g``: exponential weights with a prior biased towards arm 1.

Arms are 0-based throughout. Unpulled arms get a +inf index, so every index
policy starts with one round-robin pass in arm order. Ties go to the lowest
arm index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .environments import StochasticInstance, gaps
from .frontier import BoundVector
from .numerics import log_plus

__all__ = [
    "POLICY_NAMES",
    "UnbalancedParams",
    "PolicyState",
    "umoss_index",
    "moss_index",
    "uucb_index",
    "ucb_index",
    "umoss_select",
    "uucb_select",
    "ucb_select",
    "select",
    "exp3_params",
    "exp3_probs",
    "exp3_update",
    "shifted_gap",
]

POLICY_NAMES = ("umoss", "uucb", "ucb", "exp3g")
DEFAULT_UCB_EPS = 0.05


@dataclass(frozen=True)
class UnbalancedParams:
    bounds: BoundVector
    ucb_eps: float = DEFAULT_UCB_EPS
    n_i: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.ucb_eps > 0:
            raise ValueError("ucb_eps must be > 0")
        b = self.bounds.as_array()
        n_i = float(self.bounds.n) ** 2 / b**2
        n_i.setflags(write=False)
        object.__setattr__(self, "n_i", n_i)

    @property
    def n(self) -> int:
        return self.bounds.n

    @property
    def K(self) -> int:
        return self.bounds.K


@dataclass
class PolicyState:
    """Per-episode state. ``t`` is the 1-based step about to be played."""

    K: int
    t: int = 1
    counts: np.ndarray = None
    sums: np.ndarray = None
    log_weights: np.ndarray = None

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.K, dtype=np.int64)
        if self.sums is None:
            self.sums = np.zeros(self.K, dtype=float)

    def mean_hat(self, arm: int) -> float:
        s = self.counts[arm]
        return self.sums[arm] / s if s > 0 else 0.0

    def record(self, arm: int, reward: float) -> None:
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.t += 1


@njit(cache=True)
def umoss_index(mean_hat, s, n_i):
    if s == 0:
        return np.inf
    return mean_hat + math.sqrt(4.0 / s * log_plus(n_i / s)) - math.sqrt(1.0 / n_i)


@njit(cache=True)
def moss_index(mean_hat, s, n, K):
    """Classical MOSS index, mean + sqrt((4/s) log+(n / (K s)))."""
    if s == 0:
        return np.inf
    return mean_hat + math.sqrt(4.0 / s * log_plus(n / (K * s)))


@njit(cache=True)
def uucb_index(mean_hat, s, t, n, n_i, eps):
    if s == 0:
        return np.inf
    return mean_hat + math.sqrt((2.0 + eps) * math.log(t) / s) - math.sqrt(math.log(n) / n_i)


@njit(cache=True)
def ucb_index(mean_hat, s, t, eps):
    if s == 0:
        return np.inf
    return mean_hat + math.sqrt((2.0 + eps) * math.log(t) / s)


def _argmax_first(values) -> int:
    best = 0
    for a in range(1, len(values)):
        if values[a] > values[best]:
            best = a
    return best


def umoss_select(state: PolicyState, params: UnbalancedParams) -> int:
    if state.t > params.n:
        raise ValueError("horizon exhausted")
    return _argmax_first([
        umoss_index(state.mean_hat(a), int(state.counts[a]), float(params.n_i[a]))
        for a in range(state.K)
    ])


def uucb_select(state: PolicyState, params: UnbalancedParams) -> int:
    return _argmax_first([
        uucb_index(state.mean_hat(a), int(state.counts[a]), state.t, float(params.n),
                   float(params.n_i[a]), params.ucb_eps)
        for a in range(state.K)
    ])


def ucb_select(state: PolicyState, ucb_eps: float = DEFAULT_UCB_EPS) -> int:
    return _argmax_first([
        ucb_index(state.mean_hat(a), int(state.counts[a]), state.t, ucb_eps)
        for a in range(state.K)
    ])


def select(name: str, state: PolicyState, params: UnbalancedParams | None = None,
           ucb_eps: float = DEFAULT_UCB_EPS) -> int:
    """Dispatch on policy name for the index policies."""
    if name == "umoss":
        return umoss_select(state, params)
    if name == "uucb":
        return uucb_select(state, params)
    if name == "ucb":
        return ucb_select(state, ucb_eps)
    raise ValueError(f"unknown index policy {name!r}")


def exp3_params(B1: float, n: int, K: int) -> tuple[np.ndarray, float]:
    """Prior favouring arm 1 and learning rate for a target regret B1 against arm 1."""
    if not 0 < B1 <= n:
        raise ValueError(f"B1 must lie in (0, n], got {B1!r}")
    if K < 2:
        raise ValueError("K must be >= 2")
    rho1 = math.exp(-B1 * B1 / (4.0 * K * n))
    prior = np.full(K, (1.0 - rho1) / (K - 1))
    prior[0] = rho1
    eta = B1 / (2.0 * K * n)
    return prior, eta


@njit(cache=True)
def softmax_into(log_weights, out):
    m = -np.inf
    for a in range(log_weights.shape[0]):
        if log_weights[a] > m:
            m = log_weights[a]
    if m == -np.inf:
        raise ValueError("all log-weights are -inf")
    total = 0.0
    for a in range(log_weights.shape[0]):
        out[a] = math.exp(log_weights[a] - m)
        total += out[a]
    for a in range(log_weights.shape[0]):
        out[a] /= total


def exp3_probs(log_weights) -> np.ndarray:
    lw = np.asarray(log_weights, dtype=float)
    if np.any(np.isnan(lw)) or np.any(lw == np.inf):
        raise ValueError("log-weights must be finite")
    out = np.empty_like(lw)
    softmax_into(lw, out)
    return out


def exp3_update(log_weights, chosen: int, gain: float, prob: float, eta: float) -> np.ndarray:
    """Importance-weighted loss update; only the chosen arm moves."""
    if not prob > 0:
        raise ValueError(f"prob must be > 0, got {prob!r}")
    lw = np.array(log_weights, dtype=float)
    lw[chosen] -= eta * (1.0 - gain) / prob
    return lw


def shifted_gap(instance: StochasticInstance, params: UnbalancedParams, i: int, j: int) -> float:
    """mu_i - mu_j + sqrt(1/n_j) - sqrt(1/n_i)."""
    d = gaps(instance).delta_pair[j, i]
    return float(d + math.sqrt(1.0 / params.n_i[j]) - math.sqrt(1.0 / params.n_i[i]))
