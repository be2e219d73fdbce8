"""Kolmogorov distance of the rescaled top eigenvalue to TW1 over an N grid (null case)."""

import numpy as np

from _common import setup
from edgelab.config import NullRateConfig
from edgelab.edge_stats import THEOREM_EXPONENT, null_edge_experiment, sigma_xi
from edgelab.ensembles import EntryDistribution

cfg, rec = setup(NullRateConfig, "null_edge_rate", __doc__)
exp = null_edge_experiment(cfg.xi, list(cfg.ns), cfg.reps, seed=cfg.seed, dist=EntryDistribution(cfg.dist),
                           workers=cfg.workers)
fit = exp.fit
rows = [(int(n), d, h, d * n**THEOREM_EXPONENT) for n, d, h in zip(fit.ns, fit.deltas, fit.halfwidths)]
rec.csv("rate.csv", ["n", "delta", "dkw", "delta_scaled"], rows)
rec.json("rate.json", {"slope": fit.slope, "intercept": fit.intercept, "bound_respect": fit.bound_respect,
                       "decreasing": fit.decreasing, "sigma_xi": sigma_xi(cfg.xi),
                       "means": {str(n): float(np.mean(s.samples)) for n, s in exp.samples.items()}})
rec.finish()
for r in rows:
    print("N=%4d  delta=%.4f  dkw=%.4f  delta*N^(2/9)=%.3f" % r)
print(f"slope {fit.slope:.3f}  decreasing {fit.decreasing}")
