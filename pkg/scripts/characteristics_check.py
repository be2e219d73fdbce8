"""Increments of the characteristic flow near the soft edge and in the bulk, plus the integral ratio."""

from _common import setup
from edgelab.characteristics import (EdgeCurveS, VelocityField, integral_bound_check,
                                     verify_characteristics_asymptotics)
from edgelab.config import CharacteristicsConfig
from edgelab.spectral_laws import mp_edges

cfg, rec = setup(CharacteristicsConfig, "characteristics_check", __doc__)
z_edge = EdgeCurveS(cfg.n, cfg.phi, mp_edges(cfg.xi)).point(cfg.edge_e)
out = {"z_edge": z_edge}
for kind in ("general", "sc"):
    fld = VelocityField.make(cfg.xi, kind)
    rep = verify_characteristics_asymptotics(fld, [z_edge], cfg.times)
    out[kind] = {"passed": rep.passed, "rows": rep.rows}
    for r in rep.rows:
        print(f"{kind:8s} t={r['t']:<5g} Re ratio {r['re_ratio']:8.3f}  Im ratio {r['im_ratio']:7.3f}")
fld = VelocityField.make(cfg.xi)
bulk = verify_characteristics_asymptotics(fld, [complex(*cfg.bulk_z)], cfg.times, bulk=True)
out["bulk"] = {"passed": bulk.passed, "rows": bulk.rows}
out["integral_ratio"] = {str(t): integral_bound_check(fld, z_edge, t, cfg.n, cfg.phi) for t in cfg.integral_times}
print("bulk Im ratios", [round(float(r["im_ratio"]), 3) for r in bulk.rows])
print("integral ratios", out["integral_ratio"])
rec.json("characteristics.json", out)
rec.finish()
