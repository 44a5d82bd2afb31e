#!/usr/bin/env python
"""Replicated simulation study for one trend pattern / data scenario.

Example: python scripts/run_scenario.py --tp 1 --ds DS1C --reps 100 --out results/ds1c.json
"""
import argparse
import json
from dataclasses import replace

from rtme.mcmc import SamplerConfig
from rtme.study import DESK_SAMPLER, StudyConfig, run_scenario


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--tp", type=int, default=1)
    p.add_argument("--ds", default="DS0")
    p.add_argument("--days", type=int, default=50)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--full", action="store_true", help="8 chains x 4000 iterations instead of the desk sampler")
    p.add_argument("--out")
    a = p.parse_args()
    sampler = SamplerConfig() if a.full else DESK_SAMPLER
    cfg = StudyConfig(a.tp, a.ds, a.days, a.reps, a.seed, replace(sampler))

    def progress(i, row):
        print(f"rep {i + 1:3d}: mse {row['mse']:.4f} coverage {row['coverage_pct']:.1f}%", flush=True)

    res = run_scenario(cfg, progress)
    text = json.dumps(res, indent=2)
    print(text)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text + "\n")


if __name__ == "__main__":
    main()
