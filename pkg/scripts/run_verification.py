"""Run one or all verification suites and write the report CSV.

    python scripts/run_verification.py all --out verify.csv
"""

import argparse
import sys

from paretobandit.experiments import SUITES, run_suite, write_csv
from paretobandit.verification import report_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("suite", choices=SUITES)
    ap.add_argument("--out", default="verify.csv")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--reps", type=int)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    reports = run_suite(args.suite, args.seed, args.reps, args.threads)
    rows = report_rows(reports)
    write_csv(args.out, {"suite": args.suite, "seed": args.seed, "reps": args.reps}, rows[0], rows[1:])
    for r in reports:
        print(r.text())
    failed = sum(r.status == "fail" for r in reports)
    print(f"{len(reports)} checks, {failed} failed; wrote {args.out}")
    sys.exit(2 if failed else 0)


if __name__ == "__main__":
    main()
