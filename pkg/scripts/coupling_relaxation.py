"""Edge gap between DBM runs started from Gaussian and Rademacher data under shared noise."""

import numpy as np

from _common import setup
from edgelab.config import CouplingConfig
from edgelab.dbm import coupling_experiment

cfg, rec = setup(CouplingConfig, "coupling_relaxation", __doc__)
s = coupling_experiment(cfg.n, cfg.xi, range(cfg.seed, cfg.seed + cfg.runs), dt=cfg.dt,
                        probe_times=cfg.probe_times, data_seed=cfg.seed)
rec.csv("gaps.csv", ["run"] + [f"edge_gap_t{t:g}" for t in s.probe_times],
        ([int(sd), *row] for sd, row in zip(s.seeds, s.edge_gaps)))
scaled = s.median_scaled()
rec.json("coupling.json", {"decay_fraction": s.decay_fraction, "probe_times": list(s.probe_times),
                           "median_gap_times_nt": list(scaled),
                           "median_max_gap": list(np.median(s.max_gaps, axis=0))})
rec.finish()
print(f"decay fraction {s.decay_fraction:.2f}")
for t, v in zip(s.probe_times, scaled):
    print(f"t={t:g}: median gap * N t = {v:.3f}")
