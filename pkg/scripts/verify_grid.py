"""Exact detailed-balance and stationarity audit over a parameter grid.

    python scripts/verify_grid.py --max-n 6
"""

import argparse
import time
from dataclasses import dataclass, field
from fractions import Fraction as F

from efcpd import (
    Params,
    build_generator,
    check_detailed_balance,
    restricted_pd_distribution,
    stationary_distribution,
)


@dataclass
class GridConfig:
    pairs: list = field(default_factory=lambda: [
        (F(1, 2), F(1, 2)), (F(1, 2), F(2)), (F(1, 3), F(1, 4)), (F(1, 2), F(-1, 4)), (F(2, 3), F(1)),
    ])
    max_n: int = 6
    max_solve_n: int = 5


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=GridConfig.max_n)
    ap.add_argument("--max-solve-n", type=int, default=GridConfig.max_solve_n)
    args = ap.parse_args()
    cfg = GridConfig(max_n=args.max_n, max_solve_n=args.max_solve_n)

    print("alpha\ttheta\tn\tpairs\tmax_violation\tstationary_equals_pd\tseconds")
    failures = 0
    for alpha, theta in cfg.pairs:
        params = Params(alpha, theta)
        for n in range(1, cfg.max_n + 1):
            t0 = time.perf_counter()
            gen = build_generator(params, n)
            rho = restricted_pd_distribution(params, n)
            report = check_detailed_balance(gen, rho)
            same = "-"
            if n <= cfg.max_solve_n:
                same = stationary_distribution(gen).probs == rho.probs
                failures += not same
            failures += report.max_violation != 0
            print(f"{alpha}\t{theta}\t{n}\t{report.pairs_checked}\t{report.max_violation}\t{same}\t"
                  f"{time.perf_counter() - t0:.2f}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
