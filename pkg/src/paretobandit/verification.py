"""Monte Carlo checks of the probabilistic inequalities behind the regret bounds.

Every check is one-sided: it passes when the empirical quantity is at most
the theoretical bound plus three standard errors. Checks are pure functions
of their inputs and seed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .environments import GainMatrix, Noise, StochasticInstance, format_float, gaps
from .frontier import BoundVector, contains, lower_bound_certificate, power_point
from .numerics import lemma3_bound
from .policies import exp3_params
from .simulation import (
    PolicySpec,
    WorstCaseEstimate,
    child_seed,
    run_adversarial,
    tau_sample,
    worst_case_scan,
)

__all__ = [
    "BoundCheckReport",
    "REPORT_COLUMNS",
    "report_rows",
    "maximal_bound",
    "peeling_bound",
    "worst_case_bound",
    "gap_regret_bound",
    "exp3_prior_bound",
    "exp3_closed_form_bound",
    "check_maximal",
    "check_peeling",
    "check_tau",
    "check_regret_bound",
    "regret_bound_reports",
    "check_exp3_bound",
    "tradeoff_ladder",
    "CalibrationRow",
    "uucb_calibration",
]

SLACK_SE = 3.0
CENSOR_LIMIT = 1e-3
REGRET_CONSTANT = 252.0
# samples per block for the vectorised concentration checks
_BLOCK = 1000

REPORT_COLUMNS = ("name", "empirical", "theoretical", "stderr", "reps", "pass", "ratio", "detail")


@dataclass(frozen=True)
class BoundCheckReport:
    name: str
    empirical: float
    theoretical: float
    stderr: float
    reps: int
    inconclusive: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.empirical <= self.theoretical + SLACK_SE * self.stderr

    @property
    def status(self) -> str:
        if self.inconclusive:
            return "inconclusive"
        return "pass" if self.passed else "fail"

    @property
    def ratio(self) -> float:
        return self.empirical / self.theoretical if self.theoretical else math.inf

    def row(self) -> list[str]:
        return [self.name, format_float(self.empirical), format_float(self.theoretical),
                format_float(self.stderr), str(self.reps), self.status,
                format_float(self.ratio), self.detail]

    def text(self) -> str:
        return (f"[{self.status.upper():>12}] {self.name}: empirical={self.empirical:.6g} "
                f"(se {self.stderr:.3g}) bound={self.theoretical:.6g}"
                + (f" {self.detail}" if self.detail else ""))


def report_rows(reports: Sequence[BoundCheckReport]) -> list[list[str]]:
    return [list(REPORT_COLUMNS)] + [r.row() for r in reports]


# -- theoretical bounds ------------------------------------------------------

def maximal_bound(n: int, epsilon: float) -> float:
    return math.exp(-epsilon * epsilon / (2.0 * n))


def peeling_bound(n_i: float, delta: float) -> float:
    return min(1.0, 20.0 / (n_i * delta * delta))


def worst_case_bound(B: BoundVector) -> np.ndarray:
    return REGRET_CONSTANT * B.as_array()


def gap_regret_bound(instance: StochasticInstance, B: BoundVector) -> float:
    """min_i (n Delta_i + 252 B_i): bound on regret against the optimal arm."""
    return float(np.min(B.n * gaps(instance).delta + worst_case_bound(B)))


def exp3_prior_bound(eta: float, rho_best: float, n: int, K: int) -> float:
    return eta * K * n + math.log(1.0 / rho_best) / eta


def exp3_closed_form_bound(B1: float, n: int, K: int, best_arm: int) -> float:
    if best_arm == 0:
        return float(B1)
    return B1 / 2.0 + 2.0 * K * n / B1 * math.log(4.0 * K * n * (K - 1) / (B1 * B1))


# -- concentration -----------------------------------------------------------

def _blocks(reps: int):
    for b, start in enumerate(range(0, reps, _BLOCK)):
        yield b, min(_BLOCK, reps - start)


@functools.lru_cache(maxsize=8)
def _walk_maxima(n: int, reps: int, seed: int) -> np.ndarray:
    out = np.empty(reps)
    pos = 0
    for b, m in _blocks(reps):
        x = np.random.Generator(np.random.PCG64(child_seed(seed, b))).standard_normal((m, n))
        out[pos:pos + m] = np.cumsum(x, axis=1).max(axis=1)
        pos += m
    return out


def check_maximal(n: int, epsilon: float, reps: int, seed: int) -> BoundCheckReport:
    """P(max_t S_t >= epsilon) for a standard Gaussian random walk vs exp(-eps^2 / 2n)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    hits = _walk_maxima(int(n), int(reps), int(seed)) >= epsilon
    p = float(hits.mean())
    return BoundCheckReport(
        name=f"maximal[n={n},eps={format_float(epsilon)}]",
        empirical=p,
        theoretical=maximal_bound(n, epsilon),
        stderr=math.sqrt(p * (1 - p) / reps),
        reps=int(reps),
    )


@functools.lru_cache(maxsize=8)
def _peeling_z(n_i: float, n: int, reps: int, seed: int) -> np.ndarray:
    s = np.arange(1, n + 1, dtype=float)
    width = np.sqrt(4.0 / s * np.log(np.maximum(n_i / s, 1.0)))
    out = np.empty(reps)
    pos = 0
    for b, m in _blocks(reps):
        x = np.random.Generator(np.random.PCG64(child_seed(seed, b))).standard_normal((m, n))
        # mu - mu_hat_s - width_s with zero-mean noise
        out[pos:pos + m] = (-np.cumsum(x, axis=1) / s - width).max(axis=1)
        pos += m
    return out


def check_peeling(n_i: float, n: int, delta: float, reps: int, seed: int) -> BoundCheckReport:
    """P(Z >= delta) vs min(1, 20 / (n_i delta^2)) where Z is the worst shortfall of the
    optimistic estimate over the first n samples of a unit-variance Gaussian arm."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    z = _peeling_z(float(n_i), int(n), int(reps), int(seed))
    p = float((z >= delta).mean())
    return BoundCheckReport(
        name=f"peeling[n_i={format_float(n_i)},n={n},delta={format_float(delta)}]",
        empirical=p,
        theoretical=peeling_bound(n_i, delta),
        stderr=math.sqrt(p * (1 - p) / reps),
        reps=int(reps),
    )


def check_tau(n_j: float, delta_bar: float, reps: int, seed: int,
              noise: Noise = Noise.GAUSSIAN) -> BoundCheckReport:
    """Mean stopping time vs its ProductLog bound; inconclusive if >= 0.1% censored."""
    if not 0 < delta_bar <= 2:
        raise ValueError("delta_bar must lie in (0, 2]")
    taus = np.empty(reps)
    censored = 0
    for r in range(reps):
        rng = np.random.Generator(np.random.PCG64(child_seed(seed, r)))
        taus[r], c = tau_sample(n_j, 0.0 if noise is not Noise.BERNOULLI else 0.5,
                                delta_bar, noise, rng)
        censored += c
    rate = censored / reps
    return BoundCheckReport(
        name=f"tau[n_j={format_float(n_j)},delta_bar={format_float(delta_bar)}]",
        empirical=float(taus.mean()),
        theoretical=lemma3_bound(n_j, delta_bar),
        stderr=float(taus.std(ddof=1) / math.sqrt(reps)),
        reps=int(reps),
        inconclusive=rate >= CENSOR_LIMIT,
        detail=f"censored={format_float(rate)}",
    )


# -- regret bounds -------------------------------------------------------------

def regret_bound_reports(B: BoundVector, wc: WorstCaseEstimate, label: str = "") -> list[BoundCheckReport]:
    """Per-arm worst-case scan vs 252 B_i, then per-instance regret vs min_i(n Delta_i + 252 B_i)."""
    reps = wc.estimates[0].reps
    bound = worst_case_bound(B)
    prefix = f"{label}:" if label else ""
    out = []
    for i in range(B.K):
        out.append(BoundCheckReport(
            name=f"{prefix}worst_case[arm={i + 1}]",
            empirical=float(wc.per_arm_max[i]),
            theoretical=float(bound[i]),
            stderr=float(wc.stderr[i]),
            reps=reps,
            detail=f"argmax_instance={wc.argmax_instance[i]}",
        ))
    for k, (inst, est) in enumerate(zip(wc.grid, wc.estimates)):
        best = gaps(inst).optimal_arm
        out.append(BoundCheckReport(
            name=f"{prefix}gap_regret[instance={k}]",
            empirical=float(est.mean[best]),
            theoretical=gap_regret_bound(inst, B),
            stderr=float(est.stderr[best]),
            reps=reps,
        ))
    return out


def check_regret_bound(policy: PolicySpec, B: BoundVector, grid: Sequence[StochasticInstance],
                       n: int, reps: int, seed: int, threads: int = 1) -> list[BoundCheckReport]:
    if not contains(B).member:
        raise ValueError("the regret bound only holds for B inside the achievable set")
    wc = worst_case_scan(policy, grid, n, reps, seed, threads)
    return regret_bound_reports(B, wc)


def check_exp3_bound(B1: float, n: int, K: int, gains: Mapping[str, GainMatrix] | Sequence[GainMatrix],
                     reps: int, seed: int, threads: int = 1) -> list[BoundCheckReport]:
    """Adversarial regret of biased-prior Exp3 against the generic and the closed-form bound."""
    if not isinstance(gains, Mapping):
        gains = {str(k): g for k, g in enumerate(gains)}
    prior, eta = exp3_params(B1, n, K)
    policy = PolicySpec("exp3g", B1=B1)
    out = []
    for name, g in gains.items():
        est = run_adversarial(policy, g, reps, seed, threads, n=n, K=K)
        tag = f"[{name},B1={format_float(B1)},K={K}]"
        detail = f"best_arm={est.best_arm + 1}"
        out.append(BoundCheckReport(f"exp3_prior{tag}", est.regret,
                                    exp3_prior_bound(eta, prior[est.best_arm], n, K),
                                    est.stderr, reps, detail=detail))
        out.append(BoundCheckReport(f"exp3_closed_form{tag}", est.regret,
                                    exp3_closed_form_bound(B1, n, K, est.best_arm),
                                    est.stderr, reps, detail=detail))
    return out


# -- lower-bound tradeoff ------------------------------------------------------

@dataclass(frozen=True)
class LadderRung:
    exponent: float
    B1: float
    arm2_worst: float
    arm2_stderr: float
    scan: WorstCaseEstimate

    def certificate_member(self, n: int) -> bool:
        """Diagnostic only: scanned regrets underestimate the true worst case."""
        return lower_bound_certificate(np.maximum(self.scan.per_arm_max, 0.0), n).member


def tradeoff_ladder(exponents: Sequence[float], n: int, grid: Sequence[StochasticInstance],
                    reps: int, seed: int, threads: int = 1) -> list[LadderRung]:
    """Two-arm Unbalanced MOSS with B = (n^p, n^(1-p)) for each exponent p, scanning the
    worst-case regret against arm 2 over ``grid``."""
    rungs = []
    for p in exponents:
        B = power_point(p, n, 2)
        wc = worst_case_scan(PolicySpec("umoss", B), grid, n, reps, seed, threads)
        rungs.append(LadderRung(float(p), B.bounds[0], float(wc.per_arm_max[1]),
                                float(wc.stderr[1]), wc))
    return rungs


# -- Unbalanced UCB calibration -----------------------------------------------------

@dataclass(frozen=True)
class CalibrationRow:
    instance: int
    optimal_arm: int
    regret: float
    stderr: float
    scale: float

    @property
    def constant(self) -> float:
        return self.regret / self.scale


def uucb_calibration(B: BoundVector, grid: Sequence[StochasticInstance], reps: int, seed: int,
                     threads: int = 1, ucb_eps: float = 0.05) -> list[CalibrationRow]:
    """Regret of Unbalanced UCB against the optimal arm, divided by B_{i*} sqrt(log n).

    The largest ratio is the empirical constant of the problem-independent
    shape. It is reported, never checked against a threshold.
    """
    policy = PolicySpec("uucb", B, ucb_eps)
    wc = worst_case_scan(policy, grid, B.n, reps, seed, threads)
    rows = []
    for k, (inst, est) in enumerate(zip(wc.grid, wc.estimates)):
        best = gaps(inst).optimal_arm
        rows.append(CalibrationRow(k, best, float(est.mean[best]), float(est.stderr[best]),
                                   B.bounds[best] * math.sqrt(math.log(B.n))))
    return rows
