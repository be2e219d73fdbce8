"""Random data matrices, covariance spectra and the Gaussian-divisible construction.

Entries are x_ij = M^{-1/2} q_ij with q standardized (mean 0, variance 1).
Every random draw comes from a Philox stream keyed by (seed, replica, tag),
so a replica's matrix does not depend on which worker produced it or in
which order replicas ran.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.linalg import eigh
from scipy.stats import ks_2samp

KINDS = ("gaussian", "rademacher", "uniform", "two-point-matched")

# tags separating independent streams that share (seed, replica)
TAG_DATA = 0
TAG_GAUSSIAN_PART = 1
TAG_ROTATED = 2


def rng_for(seed: int, replica: int = 0, tag: int = TAG_DATA) -> np.random.Generator:
    """Counter-based generator for one (seed, replica, tag) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replica), int(tag)])))


@dataclass(frozen=True)
class EntryDistribution:
    """Law of a standardized entry q.

    ``moments`` holds E q, E q^2, E q^3, E q^4. ``theta`` is the
    sub-exponential tail constant; it is carried as metadata only.
    ``fourth`` tunes the symmetric three-point law {-a, 0, a}: it puts mass
    1/fourth on the pair and uses a = sqrt(fourth), so any value >= 1 is
    reachable while the first three moments stay Gaussian.
    """

    kind: str
    fourth: float = 3.0
    theta: float = 1.0
    moments: tuple[float, float, float, float] = field(default=None)

    def __post_init__(self):
        if self.moments is None:
            if self.kind not in KINDS:
                raise ValueError(f"kind must be one of {KINDS}")
            fourth = {"gaussian": 3.0, "rademacher": 1.0, "uniform": 9.0 / 5.0}.get(self.kind, self.fourth)
            if fourth < 1:
                raise ValueError("a standardized law has fourth moment >= 1")
            object.__setattr__(self, "moments", (0.0, 1.0, 0.0, float(fourth)))

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal(shape)
        if self.kind == "rademacher":
            return 2.0 * rng.integers(0, 2, size=shape) - 1.0
        if self.kind == "uniform":
            return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=shape)
        if self.kind == "two-point-matched":
            p = 1.0 / self.fourth
            u = rng.random(shape)
            a = np.sqrt(self.fourth)
            return np.where(u < p / 2, -a, np.where(u < p, a, 0.0))
        raise ValueError(f"cannot sample derived law {self.kind!r}")

    def mixed_with_gaussian(self, t: float) -> "EntryDistribution":
        """Moments of e^{-t/2} q + (1 - e^{-t})^{1/2} g with g standard normal."""
        a2 = np.exp(-t)
        b2 = -np.expm1(-t)
        m1, m2, m3, m4 = self.moments
        mom = (np.sqrt(a2) * m1, a2 * m2 + b2, a2**1.5 * m3, a2**2 * m4 + 6 * a2 * b2 * m2 + 3 * b2**2)
        return EntryDistribution(kind=f"{self.kind}+gaussian", theta=self.theta, moments=tuple(map(float, mom)))


GAUSSIAN = EntryDistribution("gaussian")


@dataclass(frozen=True)
class DataMatrix:
    m: int
    n: int
    entries: np.ndarray
    seed: int
    dist: EntryDistribution
    replica: int = 0


@dataclass(frozen=True)
class CovarianceSample:
    model: str  # "null" or "separable"
    eigenvalues: np.ndarray
    singular_values: np.ndarray | None = None


def sample_data(m: int, n: int, dist: EntryDistribution = GAUSSIAN, seed: int = 0, replica: int = 0) -> DataMatrix:
    if n < 1 or m < n:
        raise ValueError("need M >= N >= 1")
    q = dist.draw(rng_for(seed, replica, TAG_DATA), (m, n))
    return DataMatrix(m=m, n=n, entries=q / np.sqrt(m), seed=seed, dist=dist, replica=replica)


def _as_array(x) -> np.ndarray:
    arr = x.entries if isinstance(x, DataMatrix) else np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries")
    return arr


def covariance(x) -> CovarianceSample:
    """Spectrum of H = X^T X.

    The eigenvalues are taken as squared singular values of X rather than
    from the Gram matrix, which keeps relative accuracy at the hard edge.
    """
    s = np.sort(np.linalg.svd(_as_array(x), compute_uv=False))
    return CovarianceSample(model="null", eigenvalues=s * s, singular_values=s)


def separable(x, sigma) -> CovarianceSample:
    """Spectrum of Q = X^T Sigma X for diagonal Sigma (given by its diagonal or as a matrix)."""
    arr = _as_array(x)
    sig = np.asarray(sigma, dtype=float)
    if sig.ndim == 2:
        if not np.allclose(sig, np.diag(np.diag(sig))):
            raise ValueError("Sigma must be diagonal")
        sig = np.diag(sig)
    if sig.shape != (arr.shape[0],) or np.any(sig <= 0):
        raise ValueError("Sigma must be a positive diagonal of length M")
    s = np.sort(np.linalg.svd(np.sqrt(sig)[:, None] * arr, compute_uv=False))
    return CovarianceSample(model="separable", eigenvalues=s * s)


def symmetrized_block(x) -> np.ndarray:
    """[[0, X^T], [X, 0]] for square X; its eigenvalues are the mirrored singular values."""
    arr = _as_array(x)
    m, n = arr.shape
    if m != n:
        raise ValueError("symmetrized block needs M = N")
    out = np.zeros((2 * n, 2 * n))
    out[:n, n:] = arr.T
    out[n:, :n] = arr
    return out


def gaussian_divisible(x0: DataMatrix, t: float, seed: int | None = None) -> DataMatrix:
    """e^{-t/2} X0 + (1 - e^{-t})^{1/2} X_G with X_G Gaussian of variance 1/M."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return x0
    seed = x0.seed if seed is None else seed
    g = rng_for(seed, x0.replica, TAG_GAUSSIAN_PART).standard_normal((x0.m, x0.n)) / np.sqrt(x0.m)
    entries = np.exp(-t / 2) * x0.entries + np.sqrt(-np.expm1(-t)) * g
    return DataMatrix(m=x0.m, n=x0.n, entries=entries, seed=seed, dist=x0.dist.mixed_with_gaussian(t),
                      replica=x0.replica)


def moment_gap(dist_a: EntryDistribution, dist_b: EntryDistribution, tol: float = 1e-12) -> tuple[int, float]:
    """(highest k with the first k moments equal, |E q_a^4 - E q_b^4|)."""
    matched = 0
    for ma, mb in zip(dist_a.moments, dist_b.moments):
        if abs(ma - mb) > tol:
            break
        matched += 1
    return matched, abs(dist_a.moments[3] - dist_b.moments[3])


# ---------------------------------------------------------------- edge samples

def _edge_replica(replica: int, m: int, n: int, dist: EntryDistribution, seed: int,
                  population: np.ndarray | None) -> tuple[float, float]:
    x = sample_data(m, n, dist, seed, replica).entries
    if population is not None:
        x = np.sqrt(population)[:, None] * x
    lam = top_eigenvalue(x.T @ x)
    return float(lam), float(np.sqrt(max(lam, 0.0)))


def top_eigenvalue(gram: np.ndarray) -> float:
    """Largest eigenvalue only (LAPACK evr on one index)."""
    k = gram.shape[0] - 1
    return float(eigh(gram, eigvals_only=True, subset_by_index=[k, k], driver="evr")[0])


def edge_sample(m: int, n: int, reps: int, dist: EntryDistribution = GAUSSIAN, seed: int = 0,
                population=None, workers: int = 1, first_replica: int = 0) -> np.ndarray:
    """Largest eigenvalue and singular value for each replica, shape (reps, 2).

    Results are identical for any ``workers`` value because each replica owns
    its random stream.
    """
    pop = None if population is None else np.asarray(population, dtype=float)
    fn = partial(_edge_replica, m=m, n=n, dist=dist, seed=seed, population=pop)
    idx = range(first_replica, first_replica + reps)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            out = list(ex.map(fn, idx, chunksize=max(1, reps // (4 * workers))))
    else:
        out = [fn(r) for r in idx]
    return np.array(out, dtype=float).reshape(reps, 2)


def spectrum_sample(m: int, n: int, dist: EntryDistribution = GAUSSIAN, seed: int = 0, replica: int = 0) -> np.ndarray:
    """Sorted singular values of one replica."""
    return covariance(sample_data(m, n, dist, seed, replica)).singular_values


# ------------------------------------------------------- rotated population test

@dataclass(frozen=True)
class RotationReport:
    statistic: float
    p_value: float
    passed: bool
    level: float
    rotated_max: np.ndarray
    diagonal_max: np.ndarray


def rotate_population_test(sigma_full, seed: int = 0, n: int = 50, reps: int = 2000,
                           dist: EntryDistribution = GAUSSIAN, level: float = 0.01) -> RotationReport:
    """Compare the top eigenvalue of X^T Sigma X with that of X^T D X, D = diag(eigenvalues of Sigma).

    For Gaussian X the two laws coincide by rotation invariance; the report
    holds a two-sample Kolmogorov-Smirnov test.
    """
    if dist.kind != "gaussian":
        raise ValueError("rotation invariance needs Gaussian entries")
    sigma_full = np.asarray(sigma_full, dtype=float)
    if sigma_full.ndim != 2 or not np.allclose(sigma_full, sigma_full.T):
        raise ValueError("Sigma must be a symmetric matrix")
    is_diag = np.array_equal(sigma_full, np.diag(np.diag(sigma_full)))
    # keep the diagonal's own order when Sigma is already diagonal
    d = np.diag(sigma_full).copy() if is_diag else np.linalg.eigvalsh(sigma_full)
    if np.min(d) <= 0:
        raise ValueError("Sigma must be positive definite")
    m = sigma_full.shape[0]
    if m < n:
        raise ValueError("need M >= N")
    # both arms use the same X per replica; with shared draws the KS
    # p-value is conservative, and a diagonal Sigma reproduces the sample exactly
    root = np.diag(np.sqrt(d)) if is_diag else _sqrtm_psd(sigma_full)
    rot, diag = np.empty(reps), np.empty(reps)
    for r in range(reps):
        x = rng_for(seed, r, TAG_DATA).standard_normal((m, n)) / np.sqrt(m)
        xs = root @ x
        rot[r] = top_eigenvalue(xs.T @ xs)
        xd = np.sqrt(d)[:, None] * x
        diag[r] = top_eigenvalue(xd.T @ xd)
    res = ks_2samp(rot, diag)
    return RotationReport(statistic=float(res.statistic), p_value=float(res.pvalue),
                          passed=bool(res.pvalue > level), level=level, rotated_max=rot, diagonal_max=diag)


def _sqrtm_psd(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def embed_population(block: np.ndarray, m: int) -> np.ndarray:
    """Sigma = diag(block, 1, ..., 1) of size m."""
    out = np.eye(m)
    k = block.shape[0]
    out[:k, :k] = block
    return out
