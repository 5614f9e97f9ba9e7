"""Episode execution and Monte Carlo regret estimation.

Seeding
-------
Replication ``r`` of a Monte Carlo run with master seed ``m`` uses the 64-bit
seed ``child_seed(m, r)``: the first word of
``numpy.random.SeedSequence(m, spawn_key=(r,))``, the same construction
``SeedSequence(m).spawn`` uses. That seed drives a PCG64 generator. For
stochastic instances the episode consumes exactly one draw per step (a
standard normal for Gaussian noise, a uniform for Bernoulli), the t-th draw
feeding the reward of the t-th pull. Exp3 episodes consume one uniform per
step for the arm choice.

Because every replication owns its stream and results are reduced in
replication order, estimates do not depend on thread count. All instances and
policies evaluated with the same master seed share replication streams
(common random numbers).
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .environments import GainMatrix, Noise, StochasticInstance, gaps
from .frontier import BoundVector
from .policies import (
    DEFAULT_UCB_EPS,
    POLICY_NAMES,
    UnbalancedParams,
    exp3_params,
    softmax_into,
    ucb_index,
    umoss_index,
    uucb_index,
)

__all__ = [
    "PolicySpec",
    "EpisodeResult",
    "RegretEstimate",
    "WorstCaseEstimate",
    "AdversarialEstimate",
    "child_seed",
    "replication_draws",
    "run_episode",
    "monte_carlo",
    "worst_case_scan",
    "worst_case_from_estimates",
    "run_adversarial",
    "tau_sample",
]

_KIND = {"umoss": 0, "uucb": 1, "ucb": 2}
_NOISE = {Noise.GAUSSIAN: 0, Noise.BERNOULLI: 1, Noise.NONE: 2}


@dataclass(frozen=True)
class PolicySpec:
    """A named policy plus its parameters.

    ``bounds`` is required for umoss/uucb, ``B1`` for exp3g. ``ucb`` needs
    neither.
    """

    name: str
    bounds: BoundVector | None = None
    ucb_eps: float = DEFAULT_UCB_EPS
    B1: float | None = None

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}; choose from {POLICY_NAMES}")
        if self.name in ("umoss", "uucb") and self.bounds is None:
            raise ValueError(f"policy {self.name!r} needs a bound vector")
        if self.name == "exp3g" and self.B1 is None:
            raise ValueError("policy 'exp3g' needs B1")
        if not self.ucb_eps > 0:
            raise ValueError("ucb_eps must be > 0")

    @classmethod
    def moss(cls, n: int, K: int) -> "PolicySpec":
        """Classical MOSS as Unbalanced MOSS with B_i = sqrt(nK) (so n_i = n/K)."""
        return cls("umoss", BoundVector(n, (math.sqrt(n * K),) * K))

    def params(self) -> UnbalancedParams:
        return UnbalancedParams(self.bounds, self.ucb_eps)

    def describe(self) -> dict:
        d = {"name": self.name}
        if self.bounds is not None:
            d["bounds"] = list(self.bounds.bounds)
        if self.name in ("uucb", "ucb"):
            d["ucb_eps"] = self.ucb_eps
        if self.B1 is not None:
            d["B1"] = self.B1
        return d


@dataclass
class EpisodeResult:
    pulls: np.ndarray
    pseudo_regret: np.ndarray
    chosen_arms: np.ndarray | None = None
    rewards: np.ndarray | None = None


@dataclass(frozen=True)
class RegretEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    reps: int
    mean_pulls: np.ndarray
    # max |pseudo_regret - sum_j delta_ji pulls_j| over all episodes
    identity_error: float = 0.0


@dataclass(frozen=True)
class WorstCaseEstimate:
    """Per-arm maximum of estimated regret over a finite grid.

    A lower estimate of the worst-case regret: the supremum over all mean
    vectors is never computed.
    """

    per_arm_max: np.ndarray
    stderr: np.ndarray
    argmax_instance: tuple[int, ...]
    grid: tuple[StochasticInstance, ...] = field(repr=False)
    estimates: tuple[RegretEstimate, ...] = field(repr=False)


@dataclass(frozen=True)
class AdversarialEstimate:
    regret: float
    stderr: float
    reps: int
    best_arm: int
    mean_pulls: np.ndarray


def child_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _draw(rng: np.random.Generator, n: int, noise: Noise) -> np.ndarray:
    if noise is Noise.GAUSSIAN:
        return rng.standard_normal(n)
    if noise is Noise.BERNOULLI:
        return rng.random(n)
    return np.zeros(n)


@functools.lru_cache(maxsize=2)
def replication_draws(master_seed: int, reps: int, n: int, noise: Noise) -> np.ndarray:
    """The (reps, n) block of per-step draws, row r from child_seed(master_seed, r)."""
    noise = Noise(noise)
    out = np.empty((reps, n))
    for r in range(reps):
        out[r] = _draw(_rng(child_seed(master_seed, r)), n, noise)
    out.setflags(write=False)
    return out


@njit(nogil=True, cache=True)
def _index_batch(kind, means, n_i, eps, horizon, noise, draws,
                 pulls, collected, trace_arm, trace_reward):
    reps = draws.shape[0]
    K = means.shape[0]
    idx = np.empty(K)
    sums = np.empty(K)
    counts = np.empty(K, dtype=np.int64)
    keep_trace = trace_arm.shape[0] > 0
    for r in range(reps):
        for a in range(K):
            idx[a] = np.inf
            sums[a] = 0.0
            counts[a] = 0
        total = 0.0
        for t in range(1, horizon + 1):
            if kind != 0:
                for a in range(K):
                    mh = sums[a] / counts[a] if counts[a] > 0 else 0.0
                    if kind == 1:
                        idx[a] = uucb_index(mh, counts[a], t, float(horizon), n_i[a], eps)
                    else:
                        idx[a] = ucb_index(mh, counts[a], t, eps)
            best = 0
            for a in range(1, K):
                if idx[a] > idx[best]:
                    best = a
            if noise == 0:
                x = means[best] + draws[r, t - 1]
            elif noise == 1:
                x = 1.0 if draws[r, t - 1] < means[best] else 0.0
            else:
                x = means[best]
            sums[best] += x
            counts[best] += 1
            # offset by arm 0 so equal-mean instances give exactly zero regret
            total += means[best] - means[0]
            if kind == 0:
                idx[best] = umoss_index(sums[best] / counts[best], counts[best], n_i[best])
            if keep_trace:
                trace_arm[r, t - 1] = best
                trace_reward[r, t - 1] = x
        for a in range(K):
            pulls[r, a] = counts[a]
        collected[r] = total


@njit(nogil=True, cache=True)
def _exp3_batch(log_prior, eta, gains, uniforms, pulls, learner_gain, trace_arm):
    reps = uniforms.shape[0]
    n = gains.shape[0]
    K = gains.shape[1]
    lw = np.empty(K)
    p = np.empty(K)
    keep_trace = trace_arm.shape[0] > 0
    for r in range(reps):
        for a in range(K):
            lw[a] = log_prior[a]
            pulls[r, a] = 0
        total = 0.0
        for t in range(n):
            softmax_into(lw, p)
            u = uniforms[r, t]
            c = 0.0
            chosen = -1
            for a in range(K):
                c += p[a]
                if u < c:
                    chosen = a
                    break
            if chosen < 0:
                # cumulative sum fell short of 1 by rounding
                for a in range(K):
                    if p[a] > 0.0:
                        chosen = a
            g = gains[t, chosen]
            total += g
            pulls[r, chosen] += 1
            lw[chosen] -= eta * (1.0 - g) / p[chosen]
            if keep_trace:
                trace_arm[r, t] = chosen
        learner_gain[r] = total


def _chunks(reps: int, threads: int) -> list[tuple[int, int]]:
    threads = max(1, min(int(threads), reps))
    bounds = np.linspace(0, reps, threads + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _parallel(fn, reps: int, threads: int) -> None:
    chunks = _chunks(reps, threads)
    if len(chunks) == 1:
        fn(*chunks[0])
        return
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        for fut in [pool.submit(fn, a, b) for a, b in chunks]:
            fut.result()


def _check_index_spec(policy: PolicySpec, instance: StochasticInstance, n: int) -> np.ndarray:
    if policy.name == "exp3g":
        raise ValueError("exp3g runs on gain matrices; use run_adversarial")
    if n < 1:
        raise ValueError("n must be >= 1")
    if policy.bounds is not None:
        if policy.bounds.n != n:
            raise ValueError(f"policy configured for horizon {policy.bounds.n}, episode has n={n}")
        if policy.bounds.K != instance.K:
            raise ValueError(f"policy has {policy.bounds.K} arms, instance has {instance.K}")
        return np.array(policy.params().n_i, dtype=float)
    return np.ones(instance.K)


def _run_index(policy, instance, n, draws, threads, trace=False):
    n_i = _check_index_spec(policy, instance, n)
    reps = draws.shape[0]
    K = instance.K
    means = instance.as_array()
    pulls = np.zeros((reps, K), dtype=np.int64)
    collected = np.zeros(reps)
    if trace:
        t_arm = np.zeros((reps, n), dtype=np.int64)
        t_rew = np.zeros((reps, n))
    else:
        t_arm = np.zeros((0, 0), dtype=np.int64)
        t_rew = np.zeros((0, 0))
    kind = _KIND[policy.name]
    noise = _NOISE[instance.noise]

    def work(a, b):
        _index_batch(kind, means, n_i, float(policy.ucb_eps), n, noise, draws[a:b],
                     pulls[a:b], collected[a:b],
                     t_arm[a:b] if trace else t_arm, t_rew[a:b] if trace else t_rew)

    _parallel(work, reps, threads)
    pseudo = n * (means[None, :] - means[0]) - collected[:, None]
    return pulls, pseudo, (t_arm, t_rew) if trace else None


def run_episode(policy: PolicySpec, instance: StochasticInstance, n: int, seed: int,
                trace: bool = False) -> EpisodeResult:
    """One episode of an index policy; replication r of ``monte_carlo`` equals
    ``run_episode(..., seed=child_seed(master_seed, r))``."""
    draws = _draw(_rng(seed), n, instance.noise)[None, :]
    pulls, pseudo, tr = _run_index(policy, instance, n, draws, 1, trace)
    res = EpisodeResult(pulls=pulls[0], pseudo_regret=pseudo[0])
    if trace:
        res.chosen_arms = tr[0][0]
        res.rewards = tr[1][0]
    return res


def monte_carlo(policy: PolicySpec, instance: StochasticInstance, n: int, reps: int,
                master_seed: int, threads: int = 1) -> RegretEstimate:
    if reps < 2:
        raise ValueError("reps must be >= 2")
    draws = replication_draws(int(master_seed), int(reps), int(n), instance.noise)
    pulls, pseudo, _ = _run_index(policy, instance, n, draws, threads)
    # pseudo-regret identity R_i = sum_j delta_ji T_j, checked on every episode
    ident = pulls @ gaps(instance).delta_pair
    err = float(np.max(np.abs(pseudo - ident)))
    return RegretEstimate(
        mean=pseudo.mean(axis=0),
        stderr=pseudo.std(axis=0, ddof=1) / math.sqrt(reps),
        reps=int(reps),
        mean_pulls=pulls.mean(axis=0),
        identity_error=err,
    )


def worst_case_from_estimates(grid: Sequence[StochasticInstance],
                              estimates: Sequence[RegretEstimate]) -> WorstCaseEstimate:
    if not grid:
        raise ValueError("grid must be non-empty")
    if len({inst.K for inst in grid}) != 1:
        raise ValueError("all grid instances must share K")
    means = np.stack([e.mean for e in estimates])
    errs = np.stack([e.stderr for e in estimates])
    arg = np.argmax(means, axis=0)
    cols = np.arange(means.shape[1])
    return WorstCaseEstimate(
        per_arm_max=means[arg, cols],
        stderr=errs[arg, cols],
        argmax_instance=tuple(int(a) for a in arg),
        grid=tuple(grid),
        estimates=tuple(estimates),
    )


def worst_case_scan(policy: PolicySpec, grid: Sequence[StochasticInstance], n: int, reps: int,
                    master_seed: int, threads: int = 1) -> WorstCaseEstimate:
    """Grid approximation (from below) of the worst-case regret against each arm."""
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    ests = [monte_carlo(policy, inst, n, reps, master_seed, threads) for inst in grid]
    return worst_case_from_estimates(grid, ests)


def run_adversarial(policy: PolicySpec, gains: GainMatrix, reps: int, master_seed: int,
                    threads: int = 1, n: int | None = None, K: int | None = None) -> AdversarialEstimate:
    """Monte Carlo estimate of max_i E[sum_t g_{i,t} - g_{I_t,t}] for a fixed gain table."""
    if policy.name != "exp3g":
        raise ValueError("run_adversarial needs an exp3g policy")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if (n is not None and n != gains.n) or (K is not None and K != gains.K):
        raise ValueError(f"gain matrix is {gains.n}x{gains.K}, expected {n}x{K}")
    prior, eta = exp3_params(policy.B1, gains.n, gains.K)
    uniforms = np.empty((reps, gains.n))
    for r in range(reps):
        uniforms[r] = _rng(child_seed(master_seed, r)).random(gains.n)
    g = np.ascontiguousarray(gains.gains)
    pulls = np.zeros((reps, gains.K), dtype=np.int64)
    learner = np.zeros(reps)
    no_trace = np.zeros((0, 0), dtype=np.int64)

    def work(a, b):
        _exp3_batch(np.log(prior), eta, g, uniforms[a:b], pulls[a:b], learner[a:b], no_trace)

    _parallel(work, reps, threads)
    totals = g.sum(axis=0)
    best = int(np.argmax(totals))
    return AdversarialEstimate(
        regret=float(totals[best] - learner.mean()),
        stderr=float(learner.std(ddof=1) / math.sqrt(reps)),
        reps=int(reps),
        best_arm=best,
        mean_pulls=pulls.mean(axis=0),
    )


def _widths(n_j: float, s: np.ndarray) -> np.ndarray:
    return np.sqrt(4.0 / s * np.log(np.maximum(n_j / s, 1.0)))


def tau_sample(n_j: float, mu_j: float, delta_bar: float, noise: Noise,
               rng: np.random.Generator, cap: int | None = None) -> tuple[int, bool]:
    """First sample count s at which mean_s + width_s <= mu_j + delta_bar / 2.

    Rewards are drawn in doubling blocks. Returns ``(tau, censored)``; a
    censored sample is reported at the cap (default 10 n_j).
    """
    if not delta_bar > 0:
        raise ValueError("delta_bar must be > 0")
    noise = Noise(noise)
    if cap is None:
        cap = max(1, int(math.ceil(10 * n_j)))
    target = mu_j + delta_bar / 2.0
    done = 0
    running = 0.0
    block = 64
    while done < cap:
        m = min(block, cap - done)
        if noise is Noise.GAUSSIAN:
            x = mu_j + rng.standard_normal(m)
        elif noise is Noise.BERNOULLI:
            x = (rng.random(m) < mu_j).astype(float)
        else:
            x = np.full(m, float(mu_j))
        s = np.arange(done + 1, done + m + 1, dtype=float)
        csum = running + np.cumsum(x)
        hit = np.flatnonzero(csum / s + _widths(n_j, s) <= target)
        if hit.size:
            return int(done + hit[0] + 1), False
        running = float(csum[-1])
        done += m
        block *= 2
    return int(cap), True
