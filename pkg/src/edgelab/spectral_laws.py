"""Marchenko-Pastur law for eigenvalues and its symmetrized singular-value counterpart.

Conventions: X is M x N with entries of variance 1/M, H = X^T X, xi = N / M in (0, 1].
Eigenvalues of H follow rho_MP on [lambda_-, lambda_+] = [(1 - sqrt xi)^2, (1 + sqrt xi)^2].
Singular values s_k = sqrt(lambda_k) are mirrored (s_{-k} = -s_k) and follow the even
density rho, which at xi = 1 is the semicircle on [-2, 2].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class AspectRatio:
    """xi = N / M, kept exact when built from integer dimensions."""

    xi: float
    n: int | None = None
    m: int | None = None
    exact: Fraction | None = None

    def __post_init__(self):
        if not (0 < self.xi <= 1):
            raise ValueError(f"aspect ratio must lie in (0, 1], got {self.xi}")
        if self.exact is not None and self.n is not None and self.exact == 1 and self.n != self.m:
            raise ValueError("xi = 1 requires N = M")

    @classmethod
    def from_dims(cls, n: int, m: int) -> "AspectRatio":
        if n < 1 or m < 1:
            raise ValueError("dimensions must be positive")
        frac = Fraction(n, m)
        return cls(xi=float(frac), n=n, m=m, exact=frac)

    @classmethod
    def of(cls, value) -> "AspectRatio":
        if isinstance(value, AspectRatio):
            return value
        if isinstance(value, Fraction):
            return cls(xi=float(value), exact=value)
        return cls(xi=float(value))


@dataclass(frozen=True)
class SpectralLaw:
    xi: float
    lambda_minus: float
    lambda_plus: float
    sqrt_edges: tuple[float, float]
    ratio: AspectRatio = field(repr=False, compare=False, default=None)

    @property
    def hard_edge(self) -> bool:
        return self.lambda_minus == 0.0


@dataclass(frozen=True)
class TypicalLocations:
    gamma: np.ndarray  # gamma_1 < ... < gamma_N; gamma_{-k} = -gamma_k implied

    def symmetrized(self) -> np.ndarray:
        return np.concatenate([-self.gamma[::-1], self.gamma])


@dataclass(frozen=True)
class EdgeDistances:
    kappa: float
    a: float
    b: float


def mp_edges(ratio) -> SpectralLaw:
    """Eigenvalue and singular-value edges for the aspect ratio (AspectRatio, Fraction or float)."""
    r = AspectRatio.of(ratio)
    xi = r.xi
    root = np.sqrt(xi)
    lam_minus = 0.0 if xi == 1 else (1 - root) ** 2
    lam_plus = (1 + root) ** 2
    return SpectralLaw(xi=xi, lambda_minus=float(lam_minus), lambda_plus=float(lam_plus),
                       sqrt_edges=(float(abs(1 - root)), float(1 + root)), ratio=r)


def mp_density(law: SpectralLaw, x):
    """rho_MP(x); returns +inf at x = 0 when xi = 1 (integrable singularity)."""
    x = np.asarray(x, dtype=float)
    lm, lp, xi = law.lambda_minus, law.lambda_plus, law.xi
    prod = np.clip((x - lm) * (lp - x), 0.0, None)
    inside = (x > lm) & (x < lp) & (x > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(inside, np.sqrt(prod) / (2 * np.pi * xi * np.where(x > 0, x, 1.0)), 0.0)
    if law.hard_edge:
        val = np.where(x == 0, np.inf, val)
    return val if val.ndim else float(val)


def sv_density(law: SpectralLaw, x):
    """Symmetrized singular-value density rho(x) = |x| rho_MP(x^2)."""
    x = np.asarray(x, dtype=float)
    y = x * x
    lm, lp, xi = law.lambda_minus, law.lambda_plus, law.xi
    if law.hard_edge:
        val = np.sqrt(np.clip(4 - y, 0.0, None)) / (2 * np.pi)
    else:
        prod = np.clip((y - lm) * (lp - y), 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(prod > 0, np.sqrt(prod) / (2 * np.pi * xi * np.abs(x)), 0.0)
    return val if val.ndim else float(val)


def _theta_integrand(law: SpectralLaw, theta):
    # rho_MP(x) dx under x = lm + (lp - lm) sin^2(theta); smooth on [0, pi/2]
    lm, lp, xi = law.lambda_minus, law.lambda_plus, law.xi
    width = lp - lm
    s2 = np.sin(theta) ** 2
    c2 = np.cos(theta) ** 2
    if law.hard_edge:
        return (4 / np.pi) * c2
    return width**2 * 2 * s2 * c2 / (2 * np.pi * xi * (lm + width * s2))


def _theta_of(law: SpectralLaw, x):
    lm, lp = law.lambda_minus, law.lambda_plus
    u = np.clip((np.asarray(x, dtype=float) - lm) / (lp - lm), 0.0, 1.0)
    return np.arcsin(np.sqrt(u))


def mp_cdf(law: SpectralLaw, x, method: str = "gl"):
    """Marchenko-Pastur distribution function.

    ``gl`` uses 64-point Gauss-Legendre on the sine-squared substitution, whose
    integrand is analytic; ``quad`` uses adaptive Gauss-Kronrod on the same
    substitution and is kept as an independent check.
    """
    theta = _theta_of(law, x)
    if method == "quad":
        vals = np.vectorize(lambda th: quad(lambda t: _theta_integrand(law, t), 0.0, th,
                                            epsabs=1e-15, epsrel=1e-13, limit=200)[0])(theta)
    elif method == "gl":
        half = 0.5 * theta[..., None]
        nodes = half * (_GL_NODES + 1)
        vals = np.sum(_GL_WEIGHTS * _theta_integrand(law, nodes), axis=-1) * half[..., 0]
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = np.asarray(vals, dtype=float)
    return vals if vals.ndim else float(vals)


def mp_mass(law: SpectralLaw) -> float:
    """Total mass of rho_MP by adaptive quadrature on the substituted integrand."""
    return quad(lambda t: _theta_integrand(law, t), 0.0, np.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def sv_mass(law: SpectralLaw) -> float:
    """Total mass of rho over both mirrored intervals, integrating in the singular-value variable.

    On [a, b] = sqrt edges use s = a + (b - a) sin^2(phi), which removes the
    square-root vanishing at both ends.
    """
    a, b = law.sqrt_edges

    def integrand(phi):
        s = a + (b - a) * np.sin(phi) ** 2
        return sv_density(law, s) * (b - a) * np.sin(2 * phi)

    half = quad(integrand, 0.0, np.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return 2 * half


def sv_cdf(law: SpectralLaw, x):
    """Distribution function of rho: 1/2 +- F_MP(x^2)/2 by symmetry."""
    x = np.asarray(x, dtype=float)
    half = 0.5 * mp_cdf(law, x * x)
    val = np.where(x >= 0, 0.5 + half, 0.5 - half)
    return val if val.ndim else float(val)


def _as_upper_complex(z):
    z = np.asarray(z, dtype=complex)
    # normalize -0.0 imaginary parts so real arguments sit on the upper lip
    return z.real + 1j * (z.imag + 0.0)


def mp_stieltjes(law: SpectralLaw, z):
    """m_MP(z) = int rho_MP(x) / (x - z) dx.

    The square root of (z - l-)(z - l+) is formed as a product of two roots
    anchored at the edges, which puts the cut exactly on the support; a sign
    check then enforces Im m > 0 for Im z > 0.
    """
    z = _as_upper_complex(z)
    lm, lp, xi = law.lambda_minus, law.lambda_plus, law.xi
    on_support = (z.imag == 0) & (z.real >= lm) & (z.real <= lp)
    if np.any(on_support) or np.any(z == 0):
        raise ValueError("z lies on the support; evaluate via the inversion limit instead")
    root = np.sqrt(z - lm) * np.sqrt(z - lp)
    m = _stable_root_ratio(1 - xi - z, root, 2 * xi * z, 2.0)
    wrong = (z.imag > 0) & (m.imag <= 0)
    if np.any(wrong):
        m = np.where(wrong, _stable_root_ratio(1 - xi - z, -root, 2 * xi * z, 2.0), m)
    return m if m.ndim else complex(m)


def _stable_root_ratio(a, root, denom, conj_numer):
    """(a + root) / denom, switching to conj_numer / (a - root) where a + root cancels.

    Valid because (a + root)(a - root) = conj_numer * denom for both transforms here.
    """
    plus = a + root
    minus = a - root
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(plus) >= np.abs(minus), plus / denom, conj_numer / minus)


def mp_quadratic_residual(law: SpectralLaw, z, m):
    xi = law.xi
    return xi * z * m * m + (z + xi - 1) * m + 1


def sv_branch_root(law: SpectralLaw, z):
    """sqrt((z^2 - l-)(z^2 - l+)) as four edge-anchored roots; cuts on the mirrored supports."""
    z = _as_upper_complex(z)
    a, b = law.sqrt_edges
    return np.sqrt(z - a) * np.sqrt(z + a) * np.sqrt(z - b) * np.sqrt(z + b)


def sv_stieltjes(law: SpectralLaw, z):
    """m(z) = int rho(x) / (x - z) dx, equal to z m_MP(z^2)."""
    z = _as_upper_complex(z)
    a, b = law.sqrt_edges
    on_support = (z.imag == 0) & (np.abs(z.real) >= a) & (np.abs(z.real) <= b)
    if np.any(on_support):
        raise ValueError("z lies on the support; evaluate via the inversion limit instead")
    xi = law.xi
    root = sv_branch_root(law, z)
    m = _stable_root_ratio(1 - xi - z * z, root, 2 * xi * z, 2 * z)
    m = np.where(z == 0, 0.0, m)  # gap centre when xi < 1 (odd density)
    wrong = (z.imag > 0) & (m.imag <= 0)
    if np.any(wrong):
        m = np.where(wrong, _stable_root_ratio(1 - xi - z * z, -root, 2 * xi * z, 2 * z), m)
    return m if m.ndim else complex(m)


def empirical_stieltjes(svals, z):
    """m_N(z) = (1/2N) sum over the mirrored set of 1/(s - z) = (1/N) sum z / (s_k^2 - z^2)."""
    s = np.asarray(svals, dtype=float)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(s[:, None] ** 2 == zz[None, :] ** 2):
        raise ValueError("z coincides with a singular value")
    vals = np.mean(zz[None, :] / (s[:, None] ** 2 - zz[None, :] ** 2), axis=0)
    return vals if np.ndim(z) else complex(vals[0])


def eigen_stieltjes(evals, w):
    """S_N(w) = (1/N) sum 1/(lambda_k - w)."""
    lam = np.asarray(evals, dtype=float)
    ww = np.atleast_1d(np.asarray(w, dtype=complex))
    vals = np.mean(1.0 / (lam[:, None] - ww[None, :]), axis=0)
    return vals if np.ndim(w) else complex(vals[0])


def edge_distances(law: SpectralLaw, z) -> EdgeDistances:
    """kappa, a, b of z relative to the positive singular-value interval."""
    z = complex(z)
    lo, hi = law.sqrt_edges
    e, eta = z.real, abs(z.imag)
    kappa = min(abs(z - lo), abs(z - hi))
    if lo <= e <= hi:
        a = eta
        b = float(np.hypot(min(e - lo, hi - e), eta))
    else:
        a = min(abs(z - lo), abs(z - hi))
        b = eta
    return EdgeDistances(kappa=float(kappa), a=float(a), b=b)


def typical_locations(law: SpectralLaw, n: int, bracket_tol: float = 1e-12) -> TypicalLocations:
    """gamma_k with F_MP(gamma_k^2) = k / N, i.e. int_{-inf}^{gamma_k} rho = (N + k) / 2N.

    All k are bisected together in the substitution angle, then one Newton
    step on the eigenvalue quantile polishes each root.
    """
    if n < 1:
        raise ValueError("n must be positive")
    lm, lp = law.lambda_minus, law.lambda_plus
    targets = np.arange(1, n) / n
    lo = np.zeros_like(targets)
    hi = np.full_like(targets, np.pi / 2)
    width = lp - lm
    while np.max(hi - lo) * width > bracket_tol:
        mid = 0.5 * (lo + hi)
        x = lm + width * np.sin(mid) ** 2
        below = mp_cdf(law, x) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < 1e-16:
            break
    x = lm + width * np.sin(0.5 * (lo + hi)) ** 2
    dens = mp_density(law, x)
    step = np.where(dens > 0, (mp_cdf(law, x) - targets) / np.where(dens > 0, dens, 1.0), 0.0)
    x_new = x - step
    x = np.where(np.abs(step) < width * 1e-9, x_new, x)
    gamma = np.concatenate([np.sqrt(np.clip(x, 0.0, None)), [np.sqrt(lp)]])
    return TypicalLocations(gamma=gamma)


def quantile_residuals(law: SpectralLaw, loc: TypicalLocations) -> np.ndarray:
    """int_{-inf}^{gamma_k} rho - (N + k)/(2N), computed by adaptive quadrature."""
    n = len(loc.gamma)
    k = np.arange(1, n + 1)
    return sv_cdf_quad(law, loc.gamma) - (n + k) / (2 * n)


def sv_cdf_quad(law: SpectralLaw, x):
    x = np.asarray(x, dtype=float)
    return 0.5 + 0.5 * np.sign(x) * mp_cdf(law, x * x, method="quad")


def sample_sv_law(law: SpectralLaw, size: int, rng: np.random.Generator, table: int = 20001) -> np.ndarray:
    """Draws from rho by inverting a tabulated eigenvalue CDF, then random mirroring."""
    theta = np.linspace(0.0, np.pi / 2, table)
    x = law.lambda_minus + (law.lambda_plus - law.lambda_minus) * np.sin(theta) ** 2
    cdf = mp_cdf(law, x)
    cdf[-1] = 1.0
    lam = np.interp(rng.uniform(size=size), cdf, x)
    signs = rng.choice([-1.0, 1.0], size=size)
    return signs * np.sqrt(lam)
