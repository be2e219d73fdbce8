"""Two-sample distance between rescaled edge samples of two entry distributions."""

from _common import setup
from edgelab.config import UniversalityConfig
from edgelab.edge_stats import kolmogorov_distance, rescale_extremes, two_sample_distance
from edgelab.ensembles import EntryDistribution, edge_sample
from edgelab.spectral_laws import mp_edges

cfg, rec = setup(UniversalityConfig, "distribution_universality", __doc__)
m = int(round(cfg.n / cfg.xi))
law = mp_edges(cfg.xi)
samples = {}
for i, name in enumerate(cfg.dists):
    raw = edge_sample(m, cfg.n, cfg.reps, EntryDistribution(name), seed=cfg.seed + i)[:, 0]
    samples[name] = rescale_extremes(raw, law, cfg.n, name).samples
a, b = cfg.dists
dist = two_sample_distance(samples[a], samples[b])
rec.json("universality.json", {"two_sample_distance": dist,
                               "to_tw1": {k: kolmogorov_distance(v)[0] for k, v in samples.items()}})
rec.finish()
print(f"{a} vs {b}: two-sample distance {dist:.4f}")
