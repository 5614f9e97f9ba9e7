"""Worst-case regret against arm 2 as the favoured-arm bound B_1 = n^p shrinks.

    python scripts/tradeoff_ladder.py [--reps 2000] [--exponents 0.2,0.3333,0.5]
"""

import argparse

from paretobandit.environments import StochasticInstance
from paretobandit.experiments import GridSpec, parse_vector
from paretobandit.verification import tradeoff_ladder


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--exponents", default="0.2,1/3,0.5")
    args = ap.parse_args()
    grid = [StochasticInstance((0.0, -d)) for d in GridSpec(-0.5, 0.0, 0.025).points()]
    rungs = tradeoff_ladder(parse_vector(args.exponents), args.n, grid, args.reps, args.seed, args.threads)
    print("p,B1,arm2_worst,arm2_stderr,ratio_to_n_over_B1,certificate_member")
    for r in rungs:
        print(f"{r.exponent!r},{r.B1!r},{r.arm2_worst!r},{r.arm2_stderr!r},"
              f"{r.arm2_worst * r.B1 / args.n!r},{str(r.certificate_member(args.n)).lower()}")


if __name__ == "__main__":
    main()
