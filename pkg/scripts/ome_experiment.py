"""Equilibration experiment over several seeds and both network families.

Prints the decay ratio avg regret_n(T) / avg regret_n(10) and the log-log
slope of cumulative regret_n for each run, and writes one SVG per family
for the first seed.

    python scripts/ome_experiment.py --seeds 0-19 --T 1000 --out runs/ome
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from omo.equilibrium import run_ome
from omo.learners import OMOMD, LearnerConfig, default_eta
from omo.maps import max_map_norm
from omo.networks import MLN, SUPPLY_CHAIN, NetworkSpec, gen_pool
from omo.plot import write_svg
from omo.regret import AVERAGE_EQUILIBRIUM, HINDSIGHT, growth_exponent


def seed_range(text: str) -> list[int]:
    lo, _, hi = text.partition("-")
    return list(range(int(lo), int(hi or lo) + 1))


def one_run(family: str, seed: int, T: int, pool_size: int, comparator: str):
    pool = gen_pool(NetworkSpec.for_family(family, seed=seed), pool_size)
    L = max(max_map_norm(F, pool.domain) for F in pool.maps)
    eta = default_eta(pool.domain.diameter() / 2, L, T)
    trace = run_ome(pool, LearnerConfig(OMOMD, eta), T, comparator=comparator)
    avg = trace.running_average("regret_n")
    return trace, float(avg[-1] / avg[9]), growth_exponent(trace.cum_regret_n)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="7", help="single seed or inclusive range such as 0-19")
    ap.add_argument("--T", type=int, default=1000)
    ap.add_argument("--pool-size", type=int, default=10)
    ap.add_argument("--comparator", default=HINDSIGHT, choices=[HINDSIGHT, AVERAGE_EQUILIBRIUM])
    ap.add_argument("--out", default="runs/ome")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = seed_range(args.seeds)

    for family in (MLN, SUPPLY_CHAIN):
        ratios, slopes = [], []
        print(f"{family}: seed  ratio   slope")
        for k, seed in enumerate(seeds):
            trace, ratio, slope = one_run(family, seed, args.T, args.pool_size, args.comparator)
            ratios.append(ratio)
            slopes.append(slope)
            print(f"  {seed:>4}  {ratio:7.3f}  {slope:7.3f}")
            if k == 0:
                write_svg(out / f"{family}-seed{seed}.svg", trace.t, {
                    "avg regret_n": trace.running_average("regret_n"),
                    "avg regret_s": trace.running_average("regret_s"),
                    "avg loss_inf": trace.running_average("loss_inf"),
                }, title=f"{family}, seed {seed}, {args.comparator} comparator")
        ratios, slopes = np.array(ratios), np.array(slopes)
        print(f"  ratio < 0.2 in {np.sum(ratios < 0.2)}/{len(seeds)} runs; "
              f"slope < 0.9 in {np.sum(slopes < 0.9)}/{len(seeds)} runs")


if __name__ == "__main__":
    main()
