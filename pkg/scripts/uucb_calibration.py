"""Empirical constant of Unbalanced UCB: regret to the optimal arm over B_{i*} sqrt(log n).

Reported only; there is no pass/fail threshold.

    python scripts/uucb_calibration.py [--reps 500]
"""

import argparse

from paretobandit.environments import StochasticInstance
from paretobandit.experiments import GridSpec, parse_bounds
from paretobandit.verification import uucb_calibration


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--b", default="power:1/3")
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    B = parse_bounds(args.b, args.n, 2)
    deltas = GridSpec(-0.2, 0.2, 0.025).points()
    grid = [StochasticInstance((0.0, -d)) for d in deltas]
    rows = uucb_calibration(B, grid, args.reps, args.seed, args.threads)
    print("delta,optimal_arm,regret,stderr,scale,constant")
    for d, r in zip(deltas, rows):
        print(f"{d!r},{r.optimal_arm + 1},{r.regret!r},{r.stderr!r},{r.scale!r},{r.constant!r}")
    worst = max(rows, key=lambda r: r.constant)
    print(f"# largest constant {worst.constant:.4f} at delta={deltas[worst.instance]}")


if __name__ == "__main__":
    main()
