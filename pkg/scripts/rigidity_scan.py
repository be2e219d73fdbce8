"""Rigidity pass rates and the hard-edge scaling of the bulk deviation."""

import numpy as np

from _common import setup
from edgelab.characteristics import phi_default
from edgelab.config import RigidityConfig
from edgelab.edge_stats import rigidity_check
from edgelab.ensembles import spectrum_sample
from edgelab.spectral_laws import mp_edges

cfg, rec = setup(RigidityConfig, "rigidity_scan", __doc__)


def replicas(m, n):
    return np.array([spectrum_sample(m, n, seed=cfg.seed, replica=r) for r in range(cfg.reps)])


rates = {}
for xi in cfg.xis:
    rep = rigidity_check(replicas(int(round(cfg.n / xi)), cfg.n), mp_edges(xi), cfg.n, phi_default(cfg.n),
                         cfg.epsilon, cfg.omega)
    rates[str(xi)] = rep.soft_pass_rate
    print(f"xi={xi}: soft pass rate {rep.soft_pass_rate:.3f} (threshold {rep.soft_threshold:.3f})")
dev = {}
for n in cfg.hard_ns:
    rep = rigidity_check(replicas(n, n), mp_edges(1.0), n, phi_default(n), cfg.epsilon, cfg.omega)
    dev[n] = float(np.mean(rep.hard_deviation))
    print(f"N={n}: mean bulk deviation {dev[n]:.3e}, N * deviation {n * dev[n]:.3f}")
ns = sorted(dev)
ratios = [dev[a] / dev[b] for a, b in zip(ns[:-1], ns[1:])]
rec.json("rigidity.json", {"soft_pass_rates": rates, "hard_mean_deviation": {str(k): v for k, v in dev.items()},
                           "halving_ratios": ratios})
rec.finish()
print("ratios between successive N:", np.round(ratios, 3).tolist())
