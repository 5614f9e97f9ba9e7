"""Experiment configuration, the figure reproductions and the verification suites.

Bound vectors are given as a string:

* ``"uniform"``: every entry sqrt(n (K-1))
* ``"moss"``: every entry sqrt(n K), which makes Unbalanced MOSS classical MOSS
* ``"harmonic:X"``: favoured arm 1 with bound X, arm k gets (k-1) n H / X
* ``"power:p"``: harmonic with X = n^p
* ``"a,b,..."``: explicit entries

Numeric tokens accept plain numbers, fractions (``1/3``), ``n`` and ``n^x``.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

from . import __version__
from .environments import GainMatrix, StochasticInstance, format_float, gaps
from .frontier import BoundVector, harmonic_point, power_point, uniform_point
from .simulation import PolicySpec, RegretEstimate, monte_carlo, worst_case_from_estimates
from .verification import (
    BoundCheckReport,
    check_exp3_bound,
    check_maximal,
    check_peeling,
    check_tau,
    regret_bound_reports,
)

__all__ = [
    "ConfigError",
    "GridSpec",
    "ExperimentConfig",
    "parse_number",
    "parse_vector",
    "parse_bounds",
    "fig1_config",
    "fig2_config",
    "fig1",
    "fig2",
    "standard_gain_matrices",
    "concentration_suite",
    "regret_suite",
    "exp3_suite",
    "SUITES",
    "run_suite",
    "write_csv",
]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def parse_number(token: str, n: int | None = None) -> float:
    tok = token.strip()
    try:
        if tok == "n" or tok.startswith("n^"):
            if n is None:
                raise ConfigError(f"token {token!r} needs a horizon")
            return float(n) if tok == "n" else float(n) ** parse_number(tok[2:])
        if "/" in tok:
            a, b = tok.split("/", 1)
            return float(a) / float(b)
        return float(tok)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse {token!r} as a number") from None


def parse_vector(text: str, n: int | None = None, name: str = "vector") -> list[float]:
    """Comma-separated numeric tokens; errors name the 1-based position."""
    out = []
    for pos, tok in enumerate(text.split(","), start=1):
        try:
            out.append(parse_number(tok, n))
        except ConfigError as exc:
            raise ConfigError(f"{name}: entry {pos}: {exc}") from None
    return out


def parse_bounds(spec: str, n: int, K: int) -> BoundVector:
    spec = spec.strip()
    try:
        if spec == "uniform":
            return uniform_point(n, K)
        if spec == "moss":
            return BoundVector(n, (math.sqrt(n * K),) * K)
        if spec.startswith("harmonic:"):
            return harmonic_point(parse_number(spec[9:], n), n, K)
        if spec.startswith("power:"):
            return power_point(parse_number(spec[6:], n), n, K)
        vals = parse_vector(spec, n, name="b")
        if len(vals) != K:
            raise ConfigError(f"b: expected {K} entries, got {len(vals)}")
        return BoundVector(n, tuple(vals))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"b: {exc}") from None


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    step: float

    def points(self) -> list[float]:
        if not self.step > 0 or self.stop < self.start:
            raise ConfigError("grid: need step > 0 and stop >= start")
        m = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [round(self.start + i * self.step, 10) for i in range(m + 1)]


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 5000
    K: int = 2
    reps: int = 2000
    seed: int = 1
    threads: int = 1
    b: str = "uniform"
    ucb_eps: float = 0.05
    grid: GridSpec = field(default_factory=lambda: GridSpec(-0.5, 0.5, 0.025))
    out: str | None = None

    def validate(self) -> "ExperimentConfig":
        for name in ("n", "K", "reps", "threads"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name}: must be a positive integer, got {v!r}")
        if self.K < 2:
            raise ConfigError("K: must be >= 2")
        if self.reps < 2:
            raise ConfigError("reps: must be >= 2")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed: must be a 64-bit non-negative integer, got {self.seed!r}")
        if not self.ucb_eps > 0:
            raise ConfigError("ucb_eps: must be > 0")
        self.grid.points()
        self.bounds()
        return self

    def bounds(self) -> BoundVector:
        return parse_bounds(self.b, self.n, self.K)

    def resolved(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d.pop("out")
        d.pop("threads")  # results do not depend on it
        d["grid"] = dataclasses.asdict(self.grid)
        d["bounds"] = list(self.bounds().bounds)
        d["version"] = __version__
        return d

    @classmethod
    def from_dict(cls, data: dict, base: "ExperimentConfig") -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        data = dict(data)
        if "grid" in data:
            g = data["grid"]
            try:
                data["grid"] = GridSpec(float(g["start"]), float(g["stop"]), float(g["step"]))
            except (KeyError, TypeError, ValueError):
                raise ConfigError("grid: needs numeric start, stop and step") from None
        return dataclasses.replace(base, **data)

    @classmethod
    def load(cls, path: str | Path, base: "ExperimentConfig") -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        return cls.from_dict(data, base)


def fig1_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig("fig1", n=5000, K=2, reps=2000, b="power:1/3",
                           grid=GridSpec(-0.5, 0.5, 0.025))
    return dataclasses.replace(cfg, **overrides)


def fig2_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig("fig2", n=5000, K=10, reps=2000, b="harmonic:n^0.5",
                           grid=GridSpec(0.0, 0.5, 0.025))
    return dataclasses.replace(cfg, **overrides)


@dataclass
class FigureResult:
    config: ExperimentConfig
    header: list[str]
    rows: list[list[Any]]
    instances: list[StochasticInstance]
    moss: list[RegretEstimate]
    umoss: list[RegretEstimate]

    def column(self, name: str) -> np.ndarray:
        j = self.header.index(name)
        return np.array([r[j] for r in self.rows], dtype=float)


def _compare(cfg: ExperimentConfig, instances: Sequence[StochasticInstance]):
    moss = PolicySpec.moss(cfg.n, cfg.K)
    umoss = PolicySpec("umoss", cfg.bounds(), cfg.ucb_eps)
    m_est, u_est = [], []
    for inst in instances:
        m_est.append(monte_carlo(moss, inst, cfg.n, cfg.reps, cfg.seed, cfg.threads))
        u_est.append(monte_carlo(umoss, inst, cfg.n, cfg.reps, cfg.seed, cfg.threads))
    return m_est, u_est


def fig1(cfg: ExperimentConfig | None = None) -> FigureResult:
    """Two arms, mu = (0, -delta): regret against the optimal arm for MOSS and Unbalanced MOSS."""
    cfg = (cfg or fig1_config()).validate()
    if cfg.K != 2:
        raise ConfigError("K: fig1 uses 2 arms")
    deltas = cfg.grid.points()
    instances = [StochasticInstance((0.0, -d)) for d in deltas]
    m_est, u_est = _compare(cfg, instances)
    rows = []
    for d, inst, m, u in zip(deltas, instances, m_est, u_est):
        i = gaps(inst).optimal_arm
        rows.append([d, m.mean[i], m.stderr[i], u.mean[i], u.stderr[i]])
    header = ["delta", "moss_regret", "moss_stderr", "umoss_regret", "umoss_stderr"]
    return FigureResult(cfg, header, rows, instances, m_est, u_est)


def fig2(cfg: ExperimentConfig | None = None) -> FigureResult:
    """K arms, mu_k = delta * [k == i*], for every optimal arm i*."""
    cfg = (cfg or fig2_config()).validate()
    deltas = cfg.grid.points()
    keys, instances = [], []
    for star in range(cfg.K):
        for d in deltas:
            mu = np.zeros(cfg.K)
            mu[star] = d
            keys.append((star, d))
            instances.append(StochasticInstance(tuple(mu)))
    m_est, u_est = _compare(cfg, instances)
    rows = []
    for (star, d), inst, m, u in zip(keys, instances, m_est, u_est):
        i = gaps(inst).optimal_arm
        theta = round(d + star / 2.0, 10)
        rows.append([theta, star + 1, d, m.mean[i], m.stderr[i], u.mean[i], u.stderr[i]])
    header = ["theta", "i_star", "delta", "moss_regret", "moss_stderr", "umoss_regret", "umoss_stderr"]
    return FigureResult(cfg, header, rows, instances, m_est, u_est)


# -- verification suites -------------------------------------------------------

def standard_gain_matrices(n: int, K: int) -> dict[str, GainMatrix]:
    """Five frozen gain tables: constant, single best arm, alternating, two random."""
    t = np.arange(n)[:, None]
    arm = np.arange(K)[None, :]
    single = np.zeros((n, K))
    single[:, K - 1] = 1.0
    rng_a = np.random.Generator(np.random.PCG64(1001))
    rng_b = np.random.Generator(np.random.PCG64(1002))
    p = 0.4 + 0.2 * np.arange(K) / (K - 1)
    return {
        "constant": GainMatrix(np.full((n, K), 0.5)),
        "single_best": GainMatrix(single),
        "alternating": GainMatrix(((t + arm) % 2 == 0).astype(float)),
        "random_uniform": GainMatrix(rng_a.random((n, K))),
        "random_tilted": GainMatrix((rng_b.random((n, K)) < p).astype(float)),
    }


def concentration_suite(seed: int = 1, reps: int | None = None) -> list[BoundCheckReport]:
    r_big = reps or 100_000
    r_tau = reps or 10_000
    out = [check_maximal(100, eps, r_big, seed) for eps in (20.0, 30.0)]
    out += [check_peeling(1000.0, 1000, d, r_big, seed) for d in (0.25, 0.5, 1.0)]
    out += [check_tau(nj, db, r_tau, seed) for nj in (16.0, 1000.0) for db in (0.5, 1.0, 2.0)]
    return out


def regret_suite(seed: int = 1, reps: int | None = None, threads: int = 1,
                 n: int = 5000, figures: dict | None = None) -> list[BoundCheckReport]:
    """Worst-case scans of Unbalanced MOSS on the two figure grids vs 252 B.

    ``figures`` may carry precomputed ``{"fig1": FigureResult, "fig2": ...}``.
    """
    figures = figures or {}
    out = []
    for label, make, run in (("fig1", fig1_config, fig1), ("fig2", fig2_config, fig2)):
        res = figures.get(label)
        if res is None:
            over = {"seed": seed, "threads": threads, "n": n}
            if reps:
                over["reps"] = reps
            res = run(make(**over))
        wc = worst_case_from_estimates(res.instances, res.umoss)
        out += regret_bound_reports(res.config.bounds(), wc, label=label)
    return out


def exp3_suite(seed: int = 1, reps: int | None = None, threads: int = 1,
               n: int = 5000) -> list[BoundCheckReport]:
    out = []
    for K in (2, 10):
        mats = standard_gain_matrices(n, K)
        for B1 in (50.0, 200.0):
            out += check_exp3_bound(B1, n, K, mats, reps or 1000, seed, threads)
    return out


SUITES = ("concentration", "regret", "exp3", "all")


def run_suite(name: str, seed: int = 1, reps: int | None = None, threads: int = 1,
              n: int = 5000) -> list[BoundCheckReport]:
    if name == "concentration":
        return concentration_suite(seed, reps)
    if name == "regret":
        return regret_suite(seed, reps, threads, n)
    if name == "exp3":
        return exp3_suite(seed, reps, threads, n)
    if name == "all":
        return (concentration_suite(seed, reps) + regret_suite(seed, reps, threads, n)
                + exp3_suite(seed, reps, threads, n))
    raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


# -- output ----------------------------------------------------------------------

def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(dest: str | Path | TextIO, meta: dict[str, Any], header: Sequence[str] | None,
              rows: Iterable[Sequence[Any]]) -> None:
    """CSV preceded by '#' comment lines holding version, resolved config and seed."""
    buf = io.StringIO()
    buf.write(f"# paretobandit {__version__}\n")
    buf.write("# config: " + json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n")
    if "seed" in meta:
        buf.write(f"# seed: {meta['seed']}\n")
    if header is not None:
        buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        dest.write(buf.getvalue())
