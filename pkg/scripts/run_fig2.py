"""Ten arms, harmonic bounds with B_1 = sqrt(n): MOSS vs Unbalanced MOSS for every optimal arm.

    python scripts/run_fig2.py --out fig2.csv [--reps 2000] [--threads 4]
"""

import argparse
import dataclasses
import time

from paretobandit.experiments import fig2, fig2_config, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="fig2.csv")
    ap.add_argument("--reps", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    over = {k: v for k, v in vars(args).items() if v is not None and k != "out"}
    cfg = dataclasses.replace(fig2_config(), **over)
    t0 = time.perf_counter()
    res = fig2(cfg)
    write_csv(args.out, cfg.resolved(), res.header, res.rows)
    print(f"wrote {args.out} ({len(res.rows)} rows, {time.perf_counter() - t0:.1f}s)")
    for row in res.rows:
        if row[2] == 0.5:
            print("i*={:2d}  moss {:8.2f} +- {:.2f}  umoss {:8.2f} +- {:.2f}".format(row[1], *row[3:]))


if __name__ == "__main__":
    main()
