"""Long run of the split-and-merge chain against direct GEM(1) sampling.

    python scripts/split_merge_longrun.py --steps 1000000
"""

import argparse
import math

from efcpd.samplers import make_rng
from efcpd.simulate import SplitMergeConfig, agree, direct_gem_statistics, split_merge_experiment

# values under PD(0, 1): ln 2, the Golomb-Dickman constant, 1/(1 + theta)
REFERENCE = {"p_x1_gt_half": math.log(2), "mean_x1": 0.6243299885435509, "mean_sum_sq": 0.5}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=SplitMergeConfig.steps)
    ap.add_argument("--burn-in", type=int, default=SplitMergeConfig.burn_in)
    ap.add_argument("--thin", type=int, default=SplitMergeConfig.thin)
    ap.add_argument("--direct", type=int, default=100_000, help="direct GEM(1) replicas")
    ap.add_argument("--seed", type=int, default=SplitMergeConfig.seed)
    args = ap.parse_args()
    cfg = SplitMergeConfig(args.steps, args.burn_in, args.thin, args.seed)

    rng = make_rng(cfg.seed)
    chain = split_merge_experiment(cfg.steps, cfg.burn_in, cfg.thin, rng)
    direct = direct_gem_statistics(1.0, args.direct, rng)
    print(f"steps {cfg.steps}, burn-in {cfg.burn_in}, final support {chain.final_support}, "
          f"max mass error {chain.max_mass_error:.1e}")
    for key, ref in REFERENCE.items():
        a, b = getattr(chain, key), direct[key]
        print(f"{key:14s} chain {a.mean:.4f} +- {a.se:.4f}   direct {b.mean:.4f} +- {b.se:.4f}"
              f"   reference {ref:.4f}   agree(3se) {agree(a, b)}")


if __name__ == "__main__":
    main()
