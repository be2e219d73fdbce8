"""Edge statistics: rescaling of extreme eigenvalues, Kolmogorov distances to TW1,
rigidity of singular values and convergence-rate fits.

Scale convention. With entries of variance 1/M the top eigenvalue of X^T X
fluctuates as lambda_+ + sigma_xi N^{-2/3} TW1 with

    sigma_xi = sqrt(xi) (1 + sqrt(xi))^{4/3},

which is 2^{4/3} at xi = 1 and equals xi / gamma0 for the identity
population, so the null and separable rescalings agree on Sigma = Id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp

from .deformed_mp import DeformedLaw, Population, deformed_law
from .ensembles import GAUSSIAN, EntryDistribution, edge_sample
from .spectral_laws import SpectralLaw, mp_edges, typical_locations
from .tracy_widom import (S_MAX, S_MIN, TracyWidomError, TWReference, build_tw_reference,
                          default_reference, tw1_cdf)

__all__ = [
    "TWReference", "TracyWidomError", "build_tw_reference", "default_reference", "tw1_cdf",
    "S_MIN", "S_MAX", "sigma_xi", "EdgeSampleSet", "rescale_extremes", "rescale_separable",
    "kolmogorov_distance", "dkw_halfwidth", "two_sample_distance", "RigidityReport",
    "rigidity_check", "RateFit", "rate_fit", "EdgeExperiment", "null_edge_experiment",
    "separable_edge_experiment", "two_atom_population",
]

DKW_ALPHA = 0.05
RIGIDITY_OMEGA = 0.1
RIGIDITY_EPSILON = 0.1
THEOREM_EXPONENT = 2.0 / 9.0
SEPARABLE_EXPONENT = 1.0 / 57.0


def sigma_xi(xi: float) -> float:
    root = np.sqrt(xi)
    return float(root * (1 + root) ** (4.0 / 3.0))


@dataclass(frozen=True)
class EdgeSampleSet:
    xi: float
    n: int
    dist: str
    population: tuple | None
    samples: np.ndarray
    rescale_constant: float
    edge: float


def rescale_extremes(raw, law: SpectralLaw, n: int, dist: str = "gaussian") -> EdgeSampleSet:
    """(lambda_N - lambda_+) N^{2/3} / sigma_xi for each raw top eigenvalue."""
    raw = np.asarray(raw, dtype=float)
    scale = sigma_xi(law.xi)
    return EdgeSampleSet(xi=law.xi, n=n, dist=dist, population=None,
                         samples=(raw - law.lambda_plus) * n ** (2.0 / 3.0) / scale,
                         rescale_constant=scale, edge=law.lambda_plus)


def rescale_separable(raw, law: DeformedLaw, n: int, dist: str = "gaussian") -> EdgeSampleSet:
    """gamma0 N^{2/3} (mu_N - E_+), with mu_N converted from data units to the law's native units."""
    raw = np.asarray(raw, dtype=float)
    mu = raw / law.scale("data")
    return EdgeSampleSet(xi=law.xi, n=n, dist=dist, population=tuple(np.unique(law.population.sigmas)),
                         samples=law.gamma0 * n ** (2.0 / 3.0) * (mu - law.e_plus),
                         rescale_constant=1.0 / law.gamma0, edge=law.e_plus)


def dkw_halfwidth(n: int, alpha: float = DKW_ALPHA) -> float:
    return float(np.sqrt(np.log(2.0 / alpha) / (2.0 * n)))


def kolmogorov_distance(samples, cdf=tw1_cdf, alpha: float = DKW_ALPHA) -> tuple[float, float]:
    """Exact sup_x |F_n(x) - F(x)| for continuous F, plus the DKW half-width."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("no samples")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite samples")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    delta = float(max(np.max(np.abs(i / n - f)), np.max(np.abs((i - 1) / n - f))))
    return delta, dkw_halfwidth(n, alpha)


def two_sample_distance(a, b) -> float:
    return float(ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float)).statistic)


# ------------------------------------------------------------------ rigidity

@dataclass
class RigidityReport:
    soft: np.ndarray  # per replica: max_k N^{2/3} khat^{1/3} |s_k - gamma_k| over the soft-edge range
    hard: np.ndarray | None  # per replica: max_k N |s_k - gamma_k| over k <= (1 - omega) N, xi = 1 only
    hard_deviation: np.ndarray | None  # the same without the factor N
    soft_threshold: float
    hard_threshold: float | None
    omega: float
    epsilon: float

    @property
    def soft_pass(self) -> np.ndarray:
        return self.soft <= self.soft_threshold

    @property
    def hard_pass(self) -> np.ndarray | None:
        return None if self.hard is None else self.hard <= self.hard_threshold

    @property
    def soft_pass_rate(self) -> float:
        return float(np.mean(self.soft_pass))

    @property
    def hard_pass_rate(self) -> float | None:
        return None if self.hard is None else float(np.mean(self.hard_pass))


def rigidity_check(svals, law: SpectralLaw, n: int, phi: float, epsilon: float = RIGIDITY_EPSILON,
                   omega: float = RIGIDITY_OMEGA) -> RigidityReport:
    """Rigidity statistics for one replica (shape (N,)) or many (shape (R, N)).

    For xi < 1 every k is tested against phi^{1/2} with khat = min(k, N + 1 - k).
    At xi = 1 the soft-edge test covers k > (1 - omega) N with khat = N + 1 - k
    and the same threshold; the rest of the spectrum gets the hard-edge
    statistic N |s_k - gamma_k| against N^epsilon.
    """
    s = np.atleast_2d(np.asarray(svals, dtype=float))
    if s.shape[1] != n:
        raise ValueError(f"expected {n} singular values per replica, got {s.shape[1]}")
    gamma = typical_locations(law, n).gamma
    dev = np.abs(s - gamma[None, :])
    k = np.arange(1, n + 1)
    cut = int(np.floor((1 - omega) * n))
    if law.hard_edge:
        soft_idx = k > cut
        khat = (n + 1 - k)[soft_idx]
        soft = np.max(n ** (2 / 3) * khat ** (1 / 3) * dev[:, soft_idx], axis=1)
        bulk = np.max(dev[:, ~soft_idx], axis=1)
        hard, hard_dev, hard_thr = n * bulk, bulk, float(n**epsilon)
    else:
        khat = np.minimum(k, n + 1 - k)
        soft = np.max(n ** (2 / 3) * khat ** (1 / 3) * dev, axis=1)
        hard = hard_dev = hard_thr = None
    return RigidityReport(soft=soft, hard=hard, hard_deviation=hard_dev, soft_threshold=float(np.sqrt(phi)),
                          hard_threshold=hard_thr, omega=omega, epsilon=epsilon)


# ------------------------------------------------------------------ rate fit

@dataclass(frozen=True)
class RateFit:
    ns: np.ndarray
    deltas: np.ndarray
    halfwidths: np.ndarray
    slope: float
    intercept: float
    exponent: float
    bound_respect: float  # max_N delta N^{exponent}

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.deltas) < 0))


def _fit(ns, deltas, halfwidths, exponent: float) -> RateFit:
    ns = np.asarray(ns, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    hws = np.asarray(halfwidths, dtype=float)
    if ns.shape != deltas.shape or ns.shape != hws.shape:
        raise ValueError("ns, deltas and halfwidths must have equal length")
    if np.any(deltas <= 0):
        raise ValueError("every delta must be positive")
    order = np.argsort(ns)
    ns, deltas, hws = ns[order], deltas[order], hws[order]
    # var(log delta) ~ (hw / delta)^2, so weight by the inverse
    w = np.where(hws > 0, (deltas / np.where(hws > 0, hws, 1.0)) ** 2, 1.0)
    x, y = np.log(ns), np.log(deltas)
    design = np.stack([x, np.ones_like(x)], axis=1) * np.sqrt(w)[:, None]
    (slope, intercept), *_ = np.linalg.lstsq(design, y * np.sqrt(w), rcond=None)
    return RateFit(ns=ns, deltas=deltas, halfwidths=hws, slope=float(slope), intercept=float(intercept),
                   exponent=exponent, bound_respect=float(np.max(deltas * ns**exponent)))


def rate_fit(ns, deltas, halfwidths=None, exponent: float = THEOREM_EXPONENT) -> RateFit:
    """Weighted least squares of log delta on log N; needs at least four distinct N."""
    ns = np.asarray(ns, dtype=float)
    if np.unique(ns).size < 4:
        raise ValueError("rate_fit needs at least 4 distinct N values")
    if halfwidths is None:
        halfwidths = np.zeros_like(ns)
    return _fit(ns, deltas, halfwidths, exponent)


# --------------------------------------------------------------- experiments

@dataclass
class EdgeExperiment:
    fit: RateFit
    samples: dict = field(default_factory=dict)  # N -> EdgeSampleSet
    sigma: float = float("nan")
    seed: int = 0
    reps: int = 0


def null_edge_experiment(xi: float, ns, reps: int, seed: int = 0, dist: EntryDistribution = GAUSSIAN,
                         workers: int = 1, cdf=None, exponent: float = THEOREM_EXPONENT) -> EdgeExperiment:
    """Kolmogorov distance of the rescaled top eigenvalue to TW1 across an N grid.

    M is round(N / xi). Each N uses its own seed offset so grids can be
    extended without reusing streams.
    """
    law = mp_edges(xi)
    cdf = tw1_cdf if cdf is None else cdf
    sets, deltas, hws = {}, [], []
    for n in ns:
        m = int(round(n / xi))
        raw = edge_sample(m, int(n), reps, dist, seed=seed + 7919 * int(n), workers=workers)[:, 0]
        es = rescale_extremes(raw, mp_edges(xi), int(n), dist.kind)
        sets[int(n)] = es
        d, h = kolmogorov_distance(es.samples, cdf)
        deltas.append(d)
        hws.append(h)
    fit = rate_fit(ns, deltas, hws, exponent) if len(set(ns)) >= 4 else _fit(ns, deltas, hws, exponent)
    return EdgeExperiment(fit=fit, samples=sets, sigma=sigma_xi(law.xi), seed=seed, reps=reps)


def two_atom_population(m: int, atoms=(1.0, 2.0)) -> Population:
    """First half of the M population entries at atoms[0], the rest at atoms[1]."""
    half = m // 2
    return Population(np.concatenate([np.full(half, atoms[0]), np.full(m - half, atoms[1])]))


def separable_edge_experiment(pop_factory, xi: float, ns, reps: int, seed: int = 0,
                              dist: EntryDistribution = GAUSSIAN, workers: int = 1,
                              exponent: float = SEPARABLE_EXPONENT) -> EdgeExperiment:
    """Kolmogorov distance of gamma0 N^{2/3} (mu_N - E_+) to TW1 for X^T Sigma X.

    ``pop_factory(m)`` builds the population for each M; gamma0 and E_+ come
    from :func:`edgelab.deformed_mp.deformed_law` unchanged. The slope is
    reported for any grid size, but with fewer than four N it is descriptive
    only.
    """
    sets, deltas, hws = {}, [], []
    for n in ns:
        m = int(round(n / xi))
        pop = pop_factory(m)
        law = deformed_law(pop, n / m)
        raw = edge_sample(m, int(n), reps, dist, seed=seed + 7919 * int(n), population=pop.sigmas,
                          workers=workers)[:, 0]
        es = rescale_separable(raw, law, int(n), dist.kind)
        sets[int(n)] = es
        d, h = kolmogorov_distance(es.samples)
        deltas.append(d)
        hws.append(h)
    fit = _fit(ns, deltas, hws, exponent)
    return EdgeExperiment(fit=fit, samples=sets, sigma=float("nan"), seed=seed, reps=reps)
