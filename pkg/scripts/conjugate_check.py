#!/usr/bin/env python
"""Compare sampler R_t means with the closed-form Gamma-Poisson posterior.

With no measurement error, a single serial interval and iid Gamma(a, scale b)
priors on R_t, each R_t has posterior mean (a + I_t) / (1/b + Lambda_t).
"""
import argparse
import json
import time

import numpy as np

from rtme.mcmc import IidGammaPrior, ModelSpec, SamplerConfig, mcse_mean, run_mcmc
from rtme.renewal import infection_pressure
from rtme.types import CaseSeries, SerialIntervalEstimate


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--days", type=int, default=30)
    p.add_argument("--seed", type=int, default=30)
    p.add_argument("--iters", type=int, default=6000)
    p.add_argument("--out")
    a = p.parse_args()
    rng = np.random.default_rng(a.seed)
    counts = rng.poisson(40 * np.exp(0.03 * np.arange(a.days)))
    w = (0.2, 0.5, 0.3)
    shape, scale = 1.0, 5.0
    spec = ModelSpec(CaseSeries.from_counts(counts), (SerialIntervalEstimate(w),), None, ar_order=0,
                     rt_prior=IidGammaPrior(shape, scale))
    t0 = time.perf_counter()
    draws = run_mcmc(spec, SamplerConfig(chains=4, burn_in=1000, total_iterations=a.iters, thin=1, rng_seed=2))
    secs = time.perf_counter() - t0
    lam = infection_pressure(counts, w)
    exact = (shape + counts) / (1 / scale + lam)
    exact[0] = shape * scale
    z = [(draws.r[:, :, t].mean() - exact[t]) / mcse_mean(draws.r[:, :, t]) for t in range(a.days)]
    res = {"seconds": secs, "max_abs_z": float(np.max(np.abs(z))), "z": [float(v) for v in z]}
    text = json.dumps(res, indent=2)
    print(text)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text + "\n")


if __name__ == "__main__":
    main()
