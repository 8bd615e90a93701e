"""How often does unit-transfer hill climbing find the exact penalized optimum?

    python scripts/local_search_campaign.py --trials 200 --seekers 12 --providers 4
"""
import argparse
import logging

import numpy as np

from m2m_recourse import PenaltyConfig, WeightMatrix, local_search_penalized, optimal_capacity, solve_penalized

log = logging.getLogger("campaign")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seekers", type=int, default=12)
    ap.add_argument("--providers", type=int, default=4)
    ap.add_argument("--beta-max", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    rng = np.random.default_rng(args.seed)
    n, m = args.seekers, args.providers
    hits, shortfall = 0, []
    for t in range(args.trials):
        W = WeightMatrix(1.0 - rng.random((n, m)))
        cuts = np.sort(rng.integers(0, n + 1, size=m - 1))
        initial = tuple(int(k) for k in np.diff(np.concatenate([[0], cuts, [n]])))
        P = PenaltyConfig(tuple(rng.uniform(0, args.beta_max, size=m)), initial)
        _, _, local = local_search_penalized(W, P, n, optimal_capacity(W, n))
        _, _, exact = solve_penalized(W, P, n)
        gap = exact.objective - local.objective
        if gap <= 1e-9:
            hits += 1
        else:
            shortfall.append(gap)
            log.info("trial %d: local search short by %.3g", t, gap)
    print(f"{hits}/{args.trials} trials reached the exact optimum")
    if shortfall:
        print(f"mean shortfall when missed: {np.mean(shortfall):.3g}")


if __name__ == "__main__":
    main()
