"""Stochastic bandit instances, gap tables, the lower-bound instance family and gain files."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "Noise",
    "StochasticInstance",
    "GapTable",
    "GainMatrix",
    "GainFileError",
    "pull",
    "gaps",
    "thm1_family",
    "eps_schedule",
    "load_gains",
    "save_gains",
    "format_float",
]


class Noise(str, enum.Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"
    # deterministic rewards; handy for tests and the noiseless stopping-time check
    NONE = "none"


@dataclass(frozen=True)
class StochasticInstance:
    means: tuple[float, ...]
    noise: Noise = Noise.GAUSSIAN

    def __post_init__(self):
        m = tuple(float(x) for x in self.means)
        if len(m) < 1:
            raise ValueError("an instance needs at least one arm")
        if not all(np.isfinite(m)):
            raise ValueError("means must be finite")
        if max(m) - min(m) > 1.0 + 1e-12:
            raise ValueError(f"mean spread {max(m) - min(m)!r} exceeds 1")
        noise = Noise(self.noise)
        if noise is Noise.BERNOULLI and not all(0.0 <= x <= 1.0 for x in m):
            raise ValueError("Bernoulli means must lie in [0, 1]")
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "noise", noise)

    @property
    def K(self) -> int:
        return len(self.means)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.means, dtype=float)


@dataclass(frozen=True)
class GapTable:
    delta: np.ndarray
    # delta_pair[j, i] = mu_i - mu_j
    delta_pair: np.ndarray
    optimal_arm: int


@dataclass(frozen=True)
class GainMatrix:
    gains: np.ndarray

    def __post_init__(self):
        g = np.array(self.gains, dtype=float)
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise ValueError(f"gains must be a non-empty n x K matrix, got shape {g.shape}")
        bad = np.argwhere(~((g >= 0.0) & (g <= 1.0)))
        if bad.size:
            r, c = bad[0]
            raise GainFileError(f"gain {g[r, c]!r} outside [0, 1]", row=int(r) + 1, col=int(c) + 1)
        g.setflags(write=False)
        object.__setattr__(self, "gains", g)

    @property
    def n(self) -> int:
        return self.gains.shape[0]

    @property
    def K(self) -> int:
        return self.gains.shape[1]


class GainFileError(ValueError):
    """Malformed or out-of-range gain data; row and col are 1-based."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        where = f" at row {row}, column {col}" if row is not None else ""
        super().__init__(message + where)
        self.row = row
        self.col = col


def pull(instance: StochasticInstance, arm: int, rng: np.random.Generator) -> float:
    """One reward from ``arm`` (0-based); consumes exactly one draw from ``rng``."""
    if not 0 <= arm < instance.K:
        raise IndexError(f"arm {arm} out of range for K={instance.K}")
    mu = instance.means[arm]
    if instance.noise is Noise.GAUSSIAN:
        return mu + rng.standard_normal()
    if instance.noise is Noise.BERNOULLI:
        return 1.0 if rng.random() < mu else 0.0
    return mu


def gaps(instance: StochasticInstance) -> GapTable:
    mu = instance.as_array()
    best = int(np.argmax(mu))  # first maximiser: lowest index wins ties
    delta = mu[best] - mu
    pair = mu[None, :] - mu[:, None]
    return GapTable(delta=delta, delta_pair=pair, optimal_arm=best)


def thm1_family(eps: Sequence[float], base: float = 0.5,
                noise: Noise = Noise.GAUSSIAN) -> list[StochasticInstance]:
    """The K hard instances used to prove the lower bound.

    Instance k puts arm 1 at ``base``, arm k (k != 1) at ``base + eps_k`` and
    every other arm j at ``base - eps_j``, so arm k is optimal in instance k.
    Arms must be pre-sorted so that eps[0] is the smallest entry.
    """
    e = np.asarray(eps, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise ValueError("eps must be a vector with at least 2 entries")
    if np.any(e <= 0) or np.any(e > 0.5):
        raise ValueError("every eps_k must lie in (0, 1/2]")
    if e[0] > e.min():
        raise ValueError("eps_1 must be the minimum; sort arms by regret first")
    K = e.size
    family = []
    for k in range(K):
        mu = base - e.copy()
        mu[0] = base
        if k != 0:
            mu[k] = base + e[k]
        family.append(StochasticInstance(tuple(mu), noise))
    return family


def eps_schedule(R: Sequence[float], n: int, c: float = 4.0, floor: float = 1e-3) -> np.ndarray:
    """eps_k = min(1/2, c R_k / n), clamped below at ``floor``."""
    r = np.asarray(R, dtype=float)
    if np.any(r < 0):
        raise ValueError("R entries must be >= 0")
    if not c > 2:
        raise ValueError("c must exceed 2")
    if not 0 < floor <= 0.5:
        raise ValueError("floor must lie in (0, 1/2]")
    return np.maximum(np.minimum(0.5, c * r / n), floor)


def format_float(x: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(x))


def load_gains(path: str | Path) -> GainMatrix:
    text = Path(path).read_text()
    rows = []
    width = None
    for r, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise GainFileError(f"expected {width} columns, found {len(cells)}", row=r, col=len(cells))
        row = []
        for c, cell in enumerate(cells, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise GainFileError(f"cannot parse {cell!r} as a number", row=r, col=c) from None
            if not 0.0 <= v <= 1.0:
                raise GainFileError(f"gain {v!r} outside [0, 1]", row=r, col=c)
            row.append(v)
        rows.append(row)
    if not rows:
        raise GainFileError("empty gain file")
    return GainMatrix(np.array(rows, dtype=float))


def save_gains(gains: GainMatrix, path: str | Path) -> None:
    lines = [",".join(format_float(v) for v in row) for row in gains.gains]
    Path(path).write_text("\n".join(lines) + "\n")
