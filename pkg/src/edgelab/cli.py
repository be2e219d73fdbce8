"""Command-line entry point: ``edgelab <subcommand> ...`` or ``python -m edgelab``.

Every run writes ``manifest.json`` (configuration echo, seed, version, wall
time, tolerances) into its output directory first, then the result files,
which carry the manifest's SHA-256. Floats are written with 17 significant
digits. Exit codes: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
FIGURE1_XIS = (1.0, 0.36, 0.09)


class UsageError(Exception):
    pass


# --------------------------------------------------------------- serialization

def _fmt(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class Recorder:
    """Writes the manifest first and stamps later files with its hash."""

    def __init__(self, out_dir: Path, command: str, config: dict, seed, tolerances: dict | None = None):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.start = time.perf_counter()
        self.manifest = {"command": command, "config": config, "seed": seed, "version": __version__,
                         "numpy": np.__version__, "tolerances": tolerances or {}}
        self._write_manifest()

    def _write_manifest(self, wall: float | None = None):
        body = dict(self.manifest)
        if wall is not None:
            body["wall_time_s"] = wall
        text = dumps(body)
        (self.out / "manifest.json").write_text(text + "\n")
        if wall is None:
            self.hash = _sha(text)

    def _target(self, name: str) -> Path:
        path = (self.out / name).resolve()
        if not path.is_relative_to(self.out.resolve()):
            raise UsageError(f"output {name!r} would leave the run directory {self.out}")
        return path

    def json(self, name: str, payload: dict) -> Path:
        path = self._target(name)
        path.write_text(dumps({"manifest_sha256": self.hash, "result": payload}) + "\n")
        return path

    def csv(self, name: str, header, rows) -> Path:
        path = self._target(name)
        buf = io.StringIO()
        buf.write(f"# manifest_sha256={self.hash}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        path.write_text(buf.getvalue())
        return path

    def finish(self):
        self._write_manifest(round(time.perf_counter() - self.start, 3))


def read_csv(path) -> tuple[list[str], np.ndarray]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]) if len(lines) > 1 else np.empty((0, len(header)))
    return header, data


# ----------------------------------------------------------------- helpers

def _dist(name: str):
    from .ensembles import EntryDistribution, KINDS

    if name not in KINDS:
        raise UsageError(f"--dist must be one of {', '.join(KINDS)}")
    return EntryDistribution(name)


def _load_population(path: str):
    from .deformed_mp import Population

    p = Path(path)
    if not p.is_file():
        raise UsageError(f"population file not found: {p}")
    try:
        if p.suffix == ".json":
            values = np.asarray(json.loads(p.read_text()), dtype=float)
        else:
            values = np.loadtxt(p, dtype=float, ndmin=1)
        return Population(values)
    except ValueError as exc:
        raise UsageError(f"cannot read population file {p}: {exc}") from exc


def _check_xi(xi: float):
    if not 0 < xi <= 1:
        raise UsageError("--xi must lie in (0, 1]")


def _ns(text: str) -> list[int]:
    try:
        ns = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--ns must be comma-separated integers, got {text!r}") from exc
    if any(n < 2 for n in ns):
        raise UsageError("--ns entries must be at least 2")
    return ns


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


# ---------------------------------------------------------------- commands

def cmd_law(a):
    from .spectral_laws import AspectRatio, mp_edges, mp_mass, sv_mass

    _check_xi(a.xi)
    law = mp_edges(AspectRatio.from_dims(a.n, a.m) if a.n and a.m else a.xi)
    rec = Recorder(a.out_dir, "law", vars_of(a), None)
    rec.json("law.json", {"xi": law.xi, "lambda_minus": law.lambda_minus, "lambda_plus": law.lambda_plus,
                          "sqrt_edges": list(law.sqrt_edges), "mp_mass": mp_mass(law), "sv_mass": sv_mass(law)})
    rec.finish()


def cmd_locations(a):
    from .spectral_laws import mp_edges, quantile_residuals, typical_locations

    _check_xi(a.xi)
    law = mp_edges(a.xi)
    loc = typical_locations(law, a.n)
    res = quantile_residuals(law, loc) if a.check else None
    rec = Recorder(a.out_dir, "locations", vars_of(a), None, {"bracket": 1e-12})
    rec.csv("locations.csv", ["k", "gamma"], ((k + 1, g) for k, g in enumerate(loc.gamma)))
    if res is not None:
        rec.json("residuals.json", {"max_abs_residual": float(np.max(np.abs(res)))})
    rec.finish()


def cmd_deformed(a):
    from .deformed_mp import deformed_law, fc_density

    _check_xi(a.xi)
    pop = _load_population(a.population)
    law = deformed_law(pop, a.xi)
    rec = Recorder(a.out_dir, "deformed", vars_of(a), None, {"solver": law.solver_tol})
    payload = {"xi_plus": law.xi_plus, "e_plus_native": law.e_plus, "e_plus": law.edge(a.normalization),
               "gamma0": law.gamma0, "normalization": a.normalization}
    rec.json("deformed.json", payload)
    if a.density_points:
        hi = law.edge(a.normalization) * 1.05
        es = np.linspace(0, hi, a.density_points + 1)[1:]
        rec.csv("density.csv", ["e", "rho"], ((e, fc_density(law, e, normalization=a.normalization)) for e in es))
    rec.finish()


def cmd_sample_edge(a):
    from .edge_stats import kolmogorov_distance, rescale_extremes, rescale_separable
    from .deformed_mp import deformed_law
    from .ensembles import edge_sample
    from .spectral_laws import mp_edges

    _check_xi(a.xi)
    dist = _dist(a.dist)
    m = int(round(a.n / a.xi))
    pop = _load_population(a.population) if a.population else None
    if pop is not None and pop.size != m:
        raise UsageError(f"population has {pop.size} entries but M = {m}")
    rec = Recorder(a.out_dir, "sample-edge", vars_of(a), a.seed)
    raw = edge_sample(m, a.n, a.reps, dist, seed=a.seed, population=None if pop is None else pop.sigmas,
                      workers=a.workers)
    if pop is None:
        es = rescale_extremes(raw[:, 0], mp_edges(a.n / m), a.n, dist.kind)
    else:
        es = rescale_separable(raw[:, 0], deformed_law(pop, a.n / m), a.n, dist.kind)
    delta, hw = kolmogorov_distance(es.samples)
    rec.csv("edge.csv", ["replica", "lambda_max", "s_max", "rescaled"],
            ((i, r[0], r[1], s) for i, (r, s) in enumerate(zip(raw, es.samples))))
    rec.json("edge.json", {"reps": a.reps, "rescale_constant": es.rescale_constant, "edge": es.edge,
                           "delta": delta, "dkw": hw, "mean": float(np.mean(es.samples)),
                           "variance": float(np.var(es.samples))})
    rec.finish()


def cmd_dbm(a):
    from . import dbm
    from .ensembles import EntryDistribution, spectrum_sample

    _check_xi(a.xi)
    m = int(round(a.n / a.xi))
    xi = a.n / m
    init = dbm.SymmetrizedConfig.from_positive(spectrum_sample(m, a.n, EntryDistribution("gaussian"), seed=a.seed))
    rec = Recorder(a.out_dir, "dbm", vars_of(a), a.seed, {"guard": dbm.DEFAULT_GUARD / a.n, "dt_min": dbm.DEFAULT_DT_MIN})
    if a.couple == "wishart":
        other = dbm.SymmetrizedConfig.from_positive(
            spectrum_sample(m, a.n, EntryDistribution("rademacher"), seed=a.seed + 1))
        cs = dbm.couple(init, other, xi, a.dt, a.t_end, seed=a.seed, record_every=a.record_every)
        traj = cs.traj
    else:
        traj = dbm.simulate(init, xi, a.dt, a.t_end, seed=a.seed, record_every=a.record_every)
    rows = []
    for i, t in enumerate(traj.times):
        if a.record == "edge":
            rows.append((t, a.n, traj.positive[i, 0, -1]))
            if a.couple == "wishart":
                rows.append((t, -1, abs(traj.positive[i, 0, -1] - traj.positive[i, 1, -1])))
        elif a.record == "gaps":
            gaps = np.diff(traj.positive[i, 0])
            rows.extend((t, k + 1, g) for k, g in enumerate(gaps))
        else:
            z = _complex(a.z)
            v = np.ones(2 * a.n)
            obs = dbm.observable(traj.full(0)[i], v, z, t, xi)
            rows.append((t, 0, obs.s_of_z.real))
            rows.append((t, 1, obs.s_of_z.imag))
    rec.csv("dbm.csv", ["t", "k", "value"], rows)
    rec.json("dbm.json", {"accepted": traj.accepted, "rejected": traj.rejected, "params": traj.params})
    rec.finish()


def cmd_characteristics(a):
    from .characteristics import VelocityField, flow, verify_characteristics_asymptotics

    _check_xi(a.xi)
    fld = VelocityField.make(a.xi, "general" if a.field == "general" else "sc")
    z0 = _complex(a.z0)
    rec = Recorder(a.out_dir, "characteristics", vars_of(a), None, {"rtol": 1e-12})
    ts = np.linspace(0, a.t_end, a.points + 1)[1:]
    path = flow(fld, z0, a.t_end, t_eval=ts)
    rec.csv("path.csv", ["t", "re", "im"], ((t, z.real, z.imag) for t, z in zip(path.times, path.points)))
    if a.verify:
        grid = [float(t) for t in a.verify_times.split(",")]
        rep = verify_characteristics_asymptotics(fld, [z0], grid)
        rec.json("verify.json", {"passed": rep.passed, "band": rep.band,
                                 "rows": [{k: v for k, v in r.items()} for r in rep.rows]})
    rec.finish()


def cmd_tw(a):
    from .tracy_widom import build_tw_reference

    rec = Recorder(a.out_dir, "tw", vars_of(a), None)
    ref = build_tw_reference(a.method, cross_check=not a.no_check)
    mean, var = ref.moments()
    rec.csv(a.out, ["s", "F1"], zip(ref.s, ref.cdf_values))
    rec.json("tw.json", {"method": ref.method, "est_error": ref.est_error, "mean": mean, "variance": var})
    rec.finish()


def cmd_rate(a):
    from .edge_stats import null_edge_experiment, sigma_xi

    _check_xi(a.xi)
    ns = _ns(a.ns)
    if len(set(ns)) < 4:
        raise UsageError("rate needs at least 4 distinct N values in --ns")
    dist = _dist(a.dist)
    rec = Recorder(a.out_dir, "rate", vars_of(a), a.seed)
    exp = null_edge_experiment(a.xi, ns, a.reps, seed=a.seed, dist=dist, workers=a.workers)
    f = exp.fit
    rec.json(a.out, {"per_N": {str(int(n)): {"delta": d, "dkw": h} for n, d, h in zip(f.ns, f.deltas, f.halfwidths)},
                     "slope": f.slope, "intercept": f.intercept, "bound_respect": f.bound_respect,
                     "decreasing": f.decreasing, "sigma_xi": sigma_xi(a.xi), "seed": a.seed,
                     "versions": {"edgelab": __version__, "numpy": np.__version__}})
    rec.finish()


def cmd_rigidity(a):
    from .characteristics import phi_default
    from .edge_stats import rigidity_check
    from .ensembles import spectrum_sample
    from .spectral_laws import mp_edges

    _check_xi(a.xi)
    m = int(round(a.n / a.xi))
    law = mp_edges(a.n / m)
    phi = phi_default(a.n) if a.phi is None else a.phi
    rec = Recorder(a.out_dir, "rigidity", vars_of(a), a.seed)
    svals = np.array([spectrum_sample(m, a.n, _dist(a.dist), seed=a.seed, replica=r) for r in range(a.reps)])
    rep = rigidity_check(svals, law, a.n, phi, epsilon=a.epsilon, omega=a.omega)
    rec.json("rigidity.json", {"phi": phi, "soft_threshold": rep.soft_threshold, "soft_pass_rate": rep.soft_pass_rate,
                               "soft_max": float(np.max(rep.soft)), "hard_threshold": rep.hard_threshold,
                               "hard_pass_rate": rep.hard_pass_rate,
                               "hard_mean_deviation": None if rep.hard_deviation is None
                               else float(np.mean(rep.hard_deviation))})
    rec.finish()


def figure1_rows(points: int = 401):
    from .spectral_laws import mp_edges, sv_density

    xs = np.linspace(0.0, 2.0, points)
    cols = [sv_density(mp_edges(xi), xs) for xi in FIGURE1_XIS]
    return ["x"] + [f"rho_xi_{xi:g}" for xi in FIGURE1_XIS], list(zip(xs, *cols))


def histogram_rows(samples, bins: int = 60):
    from .tracy_widom import default_reference

    counts, edges = np.histogram(samples, bins=bins)
    width = edges[1] - edges[0]
    mids = 0.5 * (edges[1:] + edges[:-1])
    ref = default_reference()
    tw = (ref.cdf(edges[1:]) - ref.cdf(edges[:-1])) * len(samples)
    return ["left", "right", "count", "tw_expected"], list(zip(edges[:-1], edges[1:], counts, tw)), width, mids


def cmd_plotdata(a):
    rec = Recorder(a.out_dir, "plotdata", vars_of(a), None)
    if a.kind == "figure1":
        header, rows = figure1_rows(a.points)
        rec.csv("figure1.csv", header, rows)
    elif a.kind == "histogram":
        if not a.record:
            raise UsageError("--record (an edge.csv from sample-edge) is required for histogram")
        p = Path(a.record)
        if not p.is_file():
            raise UsageError(f"record file not found: {p}")
        header, data = read_csv(p)
        if "rescaled" not in header:
            raise UsageError(f"{p} has no 'rescaled' column")
        header, rows, _, _ = histogram_rows(data[:, header.index("rescaled")], a.bins)
        rec.csv("histogram.csv", header, rows)
    elif a.kind == "loglog":
        if not a.record:
            raise UsageError("--record (a rate.json) is required for loglog")
        p = Path(a.record)
        if not p.is_file():
            raise UsageError(f"record file not found: {p}")
        per_n = json.loads(p.read_text())["result"]["per_N"]
        rows = [(np.log(int(n)), np.log(v["delta"]), int(n), v["delta"], v["dkw"]) for n, v in per_n.items()]
        rec.csv("loglog.csv", ["log_n", "log_delta", "n", "delta", "dkw"], sorted(rows))
    rec.finish()


def vars_of(a) -> dict:
    return {k: v for k, v in vars(a).items() if k not in ("func",)}


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edgelab", description="Edge statistics of sample covariance matrices.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out-dir", default=f"runs/{name}", help="directory for manifest and results")
        sp.set_defaults(func=func)
        return sp

    sp = add("law", cmd_law, "edges and masses of the Marchenko-Pastur law")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)

    sp = add("locations", cmd_locations, "typical singular-value locations")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--check", action="store_true", help="also report quadrature residuals")

    sp = add("deformed", cmd_deformed, "edge constants of the deformed law for a population file")
    sp.add_argument("--population", required=True, help="text (one value per line) or JSON list")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--normalization", choices=("native", "data"), default="data")
    sp.add_argument("--density-points", type=int, default=0)

    sp = add("sample-edge", cmd_sample_edge, "Monte-Carlo top eigenvalues")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--dist", default="gaussian")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--population")
    sp.add_argument("--workers", type=int, default=1)

    sp = add("dbm", cmd_dbm, "singular-value Dyson Brownian motion")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--xi", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=2e-4)
    sp.add_argument("--t-end", type=float, default=0.2)
    sp.add_argument("--couple", choices=("none", "wishart"), default="none")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--record", choices=("edge", "gaps", "observable"), default="edge")
    sp.add_argument("--record-every", type=int, default=25)
    sp.add_argument("--z", default="2+0.1j", help="spectral parameter for --record observable")

    sp = add("characteristics", cmd_characteristics, "integrate a characteristic path")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--z0", required=True)
    sp.add_argument("--t-end", type=float, required=True)
    sp.add_argument("--field", choices=("general", "sc"), default="general")
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--verify-times", default="0.01,0.1,0.5")

    sp = add("tw", cmd_tw, "tabulate the TW1 distribution function")
    sp.add_argument("--out", default="tw1.csv")
    sp.add_argument("--method", choices=("painleve", "fredholm"), default="painleve")
    sp.add_argument("--no-check", action="store_true", help="skip the cross-method error estimate")

    sp = add("rate", cmd_rate, "Kolmogorov distance to TW1 across an N grid")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--ns", required=True, help="comma-separated N values (at least 4)")
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dist", default="gaussian")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", default="rate.json")

    sp = add("rigidity", cmd_rigidity, "rigidity pass rates")
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dist", default="gaussian")
    sp.add_argument("--phi", type=float)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--omega", type=float, default=0.1)

    sp = add("plotdata", cmd_plotdata, "CSV series for plotting")
    sp.add_argument("--kind", choices=("figure1", "histogram", "loglog"), required=True)
    sp.add_argument("--record", help="input record for histogram/loglog")
    sp.add_argument("--bins", type=int, default=60)
    sp.add_argument("--points", type=int, default=401)
    return p


def _numeric_errors() -> tuple:
    from .characteristics import PathError
    from .dbm import CollisionError, StepUnderflow
    from .deformed_mp import ConvergenceError
    from .ode import IntegrationError
    from .tracy_widom import TracyWidomError

    return (PathError, CollisionError, StepUnderflow, ConvergenceError, IntegrationError, TracyWidomError,
            FloatingPointError, np.linalg.LinAlgError, ArithmeticError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        print(f"edgelab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _numeric_errors() as exc:
        print(f"edgelab {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"edgelab {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
