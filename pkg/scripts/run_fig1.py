"""Two-arm comparison of MOSS and Unbalanced MOSS with B = (n^(1/3), n^(2/3)).

    python scripts/run_fig1.py --out fig1.csv [--reps 2000] [--threads 4]
"""

import argparse
import dataclasses
import time

from paretobandit.experiments import fig1, fig1_config, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="fig1.csv")
    ap.add_argument("--reps", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    over = {k: v for k, v in vars(args).items() if v is not None and k != "out"}
    cfg = dataclasses.replace(fig1_config(), **over)
    t0 = time.perf_counter()
    res = fig1(cfg)
    write_csv(args.out, cfg.resolved(), res.header, res.rows)
    print(f"wrote {args.out} ({len(res.rows)} rows, {time.perf_counter() - t0:.1f}s)")
    for row in res.rows:
        if row[0] in (-0.25, 0.0, 0.25):
            print("delta={:+.3f}  moss {:8.2f} +- {:.2f}  umoss {:8.2f} +- {:.2f}".format(*row))


if __name__ == "__main__":
    main()
