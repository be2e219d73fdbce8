"""Deformed Marchenko-Pastur law for a diagonal population Sigma = diag(sigma_1..sigma_M).

All formulas here are in the *native* convention, where the data entries have
variance 1/N and Q = X^T Sigma X. Samplers in :mod:`edgelab.ensembles` use
variance 1/M, which multiplies the whole spectrum by xi = N/M. The
``normalization`` argument converts between the two: ``"native"`` returns the
formula values, ``"data"`` returns values in the units of the sampled matrices.
Which one matches simulation is checked by Monte Carlo in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORMALIZATIONS = ("native", "data")
DEFAULT_TOL = 1e-13


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Population:
    sigmas: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.sigmas, dtype=float).ravel())
        if s.size == 0:
            raise ValueError("population must be non-empty")
        if not np.all(np.isfinite(s)) or s[0] <= 0:
            raise ValueError("population entries must be positive and finite")
        s.setflags(write=False)
        object.__setattr__(self, "sigmas", s)

    @classmethod
    def identity(cls, m: int) -> "Population":
        return cls(np.ones(m))

    @property
    def size(self) -> int:
        return self.sigmas.size

    @property
    def sigma_max(self) -> float:
        return float(self.sigmas[-1])


@dataclass(frozen=True)
class DeformedLaw:
    xi: float
    population: Population
    xi_plus: float
    e_plus: float  # native units
    gamma0: float
    solver_tol: float = DEFAULT_TOL
    scaling_variant: str = "cubed"

    def scale(self, normalization: str) -> float:
        """Multiplier taking native spectral values to the requested units."""
        _check_norm(normalization)
        return self.xi if normalization == "data" else 1.0

    def edge(self, normalization: str = "native") -> float:
        return self.e_plus * self.scale(normalization)


@dataclass(frozen=True)
class PopulationFlowState:
    t: float
    sigmas_t: np.ndarray


def _check_norm(normalization: str) -> None:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def _weights(sig: np.ndarray, form: str) -> np.ndarray:
    if form == "weighted":
        return sig
    if form == "printed":
        return np.ones_like(sig)
    raise ValueError(f"unknown fixed-point form {form!r}")


def _rhs(sig: np.ndarray, xi: float, z: complex, m: complex, form: str = "weighted") -> complex:
    return 1.0 / (-z + np.mean(_weights(sig, form) / (sig * m + 1.0)) / xi)


def _newton(sig, xi, z, m, tol, form="weighted", iters=50):
    w = _weights(sig, form)
    for _ in range(iters):
        denom = sig * m + 1.0
        d = -z + np.mean(w / denom) / xi
        fp = 1.0 - np.mean(w * sig / denom**2) / xi / d**2
        step = (m - 1.0 / d) / fp
        m = m - step
        if abs(step) <= tol * max(1.0, abs(m)):
            break
    return m


def fixed_point_residual(pop: Population, xi: float, z: complex, m: complex, form: str = "weighted") -> float:
    return float(abs(m - _rhs(pop.sigmas, xi, z, m, form)))


def solve_mfc(pop: Population, xi: float, z: complex, tol: float = DEFAULT_TOL,
              omega: float = 0.5, max_iter: int = 20000, eta_start: float = 10.0,
              form: str = "weighted") -> complex:
    """Solve m = 1/(-z + xi^{-1} int t d rho_hat(t) / (t m + 1)) on the upper-half-plane branch.

    ``form="printed"`` drops the factor t in the numerator. Both agree for the
    identity population; only the weighted form reproduces simulated spectra
    of X^T Sigma X for other populations, so it is the default.

    The solution is followed from z = E + i eta_start down to the target
    imaginary part in geometric steps; at each stage a few damped sweeps
    ``m <- (1 - omega) m + omega RHS(m)`` are followed by Newton refinement.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("solve_mfc needs Im z > 0")
    sig = pop.sigmas
    eta_target = z.imag
    eta = max(eta_start, eta_target)
    ladder = []
    while eta > eta_target * 1.5:
        ladder.append(eta)
        eta *= 0.5
    etas = ladder + [eta_target]

    m = -1.0 / complex(z.real, etas[0])  # large-|z| behaviour
    res = np.inf
    for eta in etas:
        zz = complex(z.real, eta)
        for _ in range(20):
            m = (1 - omega) * m + omega * _rhs(sig, xi, zz, m, form)
        m_new = _newton(sig, xi, zz, m, tol * 1e-2, form)
        if np.isfinite(m_new) and m_new.imag >= 0:
            m = m_new
        else:  # fall back to plain damped sweeps
            for _ in range(max_iter):
                m = (1 - omega) * m + omega * _rhs(sig, xi, zz, m, form)
                res = abs(m - _rhs(sig, xi, zz, m, form))
                if res < tol:
                    break
    res = abs(m - _rhs(sig, xi, z, m, form))
    if not (res < tol) or m.imag < 0:
        raise ConvergenceError("m_fc iteration did not converge", float(res))
    return m


def fc_stieltjes(law: DeformedLaw, z: complex, normalization: str = "native") -> complex:
    """m_fc at z in the requested units (data units rescale z and m by xi)."""
    c = law.scale(normalization)
    return solve_mfc(law.population, law.xi, complex(z) / c, tol=law.solver_tol) / c


def fc_density(law: DeformedLaw, e: float, eta_limit: float = 5e-6, normalization: str = "native") -> float:
    """(1/pi) Im m_fc(e + i eta), Richardson-extrapolated from eta = 2 eta_limit and eta_limit."""
    if eta_limit <= 0:
        raise ValueError("eta_limit must be positive")
    r1 = fc_stieltjes(law, complex(e, 2 * eta_limit), normalization).imag
    r2 = fc_stieltjes(law, complex(e, eta_limit), normalization).imag
    return max(0.0, (2 * r2 - r1) / np.pi)


def _xi_equation(sig: np.ndarray, xi: float, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tx = sig[None, :] * x[:, None]
    with np.errstate(divide="ignore"):
        return np.mean((tx / (1 - tx)) ** 2, axis=1) - xi


def solve_xi_plus(pop: Population, xi: float, scan_points: int = 10_000) -> float:
    """Largest root of int (t x / (1 - t x))^2 d rho_hat(t) = xi on (0, 1/sigma_M)."""
    sig = pop.sigmas
    upper = 1.0 / pop.sigma_max
    grid = upper * np.arange(1, scan_points) / scan_points
    vals = _xi_equation(sig, xi, grid)
    neg = np.nonzero(vals < 0)[0]
    if neg.size == 0:
        raise ValueError("no sign change on (0, 1/sigma_M): population assumption violated")
    lo = grid[neg[-1]]
    hi = grid[neg[-1] + 1] if neg[-1] + 1 < grid.size else upper
    if not (_xi_equation(sig, xi, hi)[0] >= 0 or hi == upper):
        raise ValueError("no root of the edge equation in (0, 1/sigma_M)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _xi_equation(sig, xi, mid)[0] < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if root * pop.sigma_max >= 1:
        raise ValueError("xi_plus * sigma_M >= 1")
    return float(root)


def right_endpoint(pop: Population, xi: float, xi_plus: float) -> float:
    tx = pop.sigmas * xi_plus
    return float((1 + np.mean(tx / (1 - tx)) / xi) / xi_plus)


def scaling_gamma0(pop: Population, xi: float, xi_plus: float, variant: str = "cubed") -> float:
    """gamma0 from 1/gamma0^3 = xi^{-1} int (t/(1 - t xi_plus))^p d rho_hat + xi_plus^{-3}.

    ``variant="cubed"`` uses p = 3; ``"linear"`` keeps p = 1 for comparison
    only, since it does not reduce to the identity-population value.
    """
    base = pop.sigmas / (1 - pop.sigmas * xi_plus)
    if variant == "cubed":
        integral = np.mean(base**3)
    elif variant == "linear":
        integral = np.mean(base)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float((integral / xi + xi_plus**-3) ** (-1.0 / 3.0))


def deformed_law(pop: Population, xi: float, solver_tol: float = DEFAULT_TOL,
                 scaling_variant: str = "cubed") -> DeformedLaw:
    if not (0 < xi <= 1):
        raise ValueError("xi must lie in (0, 1]")
    xp = solve_xi_plus(pop, xi)
    return DeformedLaw(xi=float(xi), population=pop, xi_plus=xp, e_plus=right_endpoint(pop, xi, xp),
                       gamma0=scaling_gamma0(pop, xi, xp, scaling_variant), solver_tol=solver_tol,
                       scaling_variant=scaling_variant)


def population_flow(pop: Population, t: float) -> PopulationFlowState:
    """Harmonic interpolation 1/sigma(t) = e^{-t}/sigma(0) + 1 - e^{-t}."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return PopulationFlowState(t=0.0, sigmas_t=pop.sigmas.copy())
    inv = 1.0 + np.exp(-t) * (1.0 / pop.sigmas - 1.0)
    return PopulationFlowState(t=float(t), sigmas_t=1.0 / inv)
