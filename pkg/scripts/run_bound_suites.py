"""Print how tight the greedy bounds are on seeded random instances.

For each instance the script reports achieved / bound and, when the subset
count is small enough, achieved / optimum from exhaustive enumeration.

    python3 scripts/run_bound_suites.py --instances 100 --seed 1
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from tracesel.generate import random_block_problem
from tracesel.oracle import exhaustive_min_trace
from tracesel.problem import ColumnProblem
from tracesel.selection import minimal_k, run_block_selection, run_column_selection


@dataclass(frozen=True)
class SuiteConfig:
    instances: int = 100
    seed: int = 1
    max_n: int = 8
    max_m: int = 16
    enum_limit: int = 20_000


def _summarize(name, ratios, gaps):
    ratios = np.asarray(ratios)
    line = (f"{name:>12}: {len(ratios):5d} runs  achieved/bound "
            f"median {np.median(ratios):.3f}  max {ratios.max():.3f}")
    if gaps:
        gaps = np.asarray(gaps)
        line += (f"  achieved/optimum median {np.median(gaps):.4f}  max {gaps.max():.4f}"
                 f"  optimal in {np.mean(gaps <= 1 + 1e-9):.0%}")
    print(line)


def column_suite(cfg):
    rng = np.random.default_rng(cfg.seed)
    ratios, gaps = [], []
    for _ in range(cfg.instances):
        n = int(rng.integers(2, cfg.max_n + 1))
        m = int(rng.integers(n, cfg.max_m + 1))
        problem = ColumnProblem(rng.standard_normal((n, m)))
        rep = run_column_selection(problem, n)
        ratios.append(rep.achieved_trace / rep.bound)
        if math.comb(m, n) <= cfg.enum_limit:
            gaps.append(rep.achieved_trace / exhaustive_min_trace(problem, n).best_value)
    _summarize("columns k=n", ratios, gaps)


def block_suite(cfg):
    rng = np.random.default_rng(cfg.seed + 1)
    ratios, gaps = {}, {}
    for _ in range(cfg.instances):
        n = int(rng.integers(1, cfg.max_n + 1))
        m = int(rng.integers(n, cfg.max_m + 1))
        problem = random_block_problem(n, m, rng)
        for k in range(minimal_k(problem), m + 1):
            rep = run_block_selection(problem, k)
            ratios.setdefault(rep.bound_name, []).append(rep.achieved_trace / rep.bound)
            if math.comb(m, k) <= cfg.enum_limit:
                best = exhaustive_min_trace(problem, k).best_value
                gaps.setdefault(rep.bound_name, []).append(rep.achieved_trace / best)
    for name in sorted(ratios):
        _summarize(name, ratios[name], gaps.get(name, []))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=SuiteConfig.instances)
    p.add_argument("--seed", type=int, default=SuiteConfig.seed)
    p.add_argument("--enum-limit", type=int, default=SuiteConfig.enum_limit)
    args = p.parse_args(argv)
    cfg = SuiteConfig(instances=args.instances, seed=args.seed, enum_limit=args.enum_limit)
    column_suite(cfg)
    block_suite(cfg)


if __name__ == "__main__":
    main()
