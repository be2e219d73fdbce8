"""Tracy-Widom (beta = 1) distribution function computed two independent ways.

Painleve route: the Hastings-McLeod solution q of q'' = s q + 2 q^3 is
integrated backward from s = 8, seeded with Airy data, together with
I(s) = int_s^inf (x - s) q(x)^2 dx and J(s) = int_s^inf q(x) dx, so that
F2 = exp(-I) and F1 = exp(-(I + J) / 2).

Fredholm route: F1(s) = det(1 - K_s) on L^2(0, inf) with K_s(x, y) = Ai(x + y + s),
discretized by Gauss-Legendre (Nystrom).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.integrate import simpson

from .airy import airy_ai
from .ode import IntegrationError, integrate

S_MIN = -12.0
S_MAX = 8.0
GRID_STEP = 0.01
# Below this point the backward shot drifts off the separatrix in double
# precision; the left-tail expansion of q takes over (F1 < 1e-9 there).
PAINLEVE_SWITCH = -8.0


class TracyWidomError(RuntimeError):
    pass


def default_grid(step: float = GRID_STEP) -> np.ndarray:
    n = int(round((S_MAX - S_MIN) / step))
    return np.linspace(S_MIN, S_MAX, n + 1)


def hastings_mcleod_left_tail(s):
    """Left-tail expansion q(s) ~ sqrt(-s/2) (1 + 1/(8 s^3) - 73/(128 s^6) + 10657/(1024 s^9))."""
    s = np.asarray(s, dtype=float)
    return np.sqrt(-s / 2) * (1 + 1 / (8 * s**3) - 73 / (128 * s**6) + 10657 / (1024 * s**9))


def _airy_tail_integrals(s0: float) -> tuple[float, float, float, float, float]:
    a, ap = airy_ai(s0, derivative=True)
    # closed forms for int_s^inf Ai^2 and int_s^inf (x - s) Ai^2
    i0 = (2 * s0**2 * a**2 - 2 * s0 * ap**2 - a * ap) / 3
    ip0 = -(ap**2 - s0 * a**2)
    x, w = np.polynomial.legendre.leggauss(64)
    lo, hi = s0, s0 + 30.0
    j0 = float(np.sum(w * airy_ai(0.5 * (hi - lo) * x + 0.5 * (hi + lo))) * 0.5 * (hi - lo))
    return a, ap, i0, ip0, j0


def painleve_solution(grid: np.ndarray, rtol: float = 1e-14) -> dict[str, np.ndarray]:
    """q, q', I, J on ``grid`` (ascending, inside [S_MIN, S_MAX])."""
    grid = np.asarray(grid, dtype=float)
    if grid[-1] > S_MAX or grid[0] < S_MIN - 1e-12:
        raise ValueError("grid must lie inside [S_MIN, S_MAX]")
    s0 = S_MAX
    a, ap, i0, ip0, j0 = _airy_tail_integrals(s0)

    def rhs(s, y):
        q, qp, _, ip, _ = y
        return np.array([qp, s * q + 2 * q**3, ip, q * q, -q])

    def guard(s, y):
        bound = 2 * np.sqrt(max(-s, 0.0) / 2) + 1
        return "blow-up: shot left the Hastings-McLeod separatrix" if abs(y[0]) > bound else None

    back = grid[::-1]
    upper = back[back >= PAINLEVE_SWITCH]
    lower = back[back < PAINLEVE_SWITCH]
    try:
        sol = integrate(
            rhs, s0, np.array([a, ap, i0, ip0, j0]), np.concatenate([upper, [PAINLEVE_SWITCH]]),
            rtol=rtol, atol=1e-300, h_max=0.05, guard=guard,
        )
    except IntegrationError as exc:
        raise TracyWidomError(f"Painleve integration failed: {exc}") from exc
    if sol.status != "ok":
        raise TracyWidomError(sol.message)
    states = sol.y[:-1]
    switch_state = sol.y[-1]

    if len(lower):
        def rhs_tail(s, y):
            q = hastings_mcleod_left_tail(s)
            return np.array([y[1], q * q, -q])

        tail = integrate(rhs_tail, PAINLEVE_SWITCH, switch_state[[2, 3, 4]], lower, rtol=1e-13, atol=1e-300)
        q_low = hastings_mcleod_left_tail(lower)
        h = 1e-6
        qp_low = (hastings_mcleod_left_tail(lower + h) - hastings_mcleod_left_tail(lower - h)) / (2 * h)
        low_states = np.column_stack([q_low, qp_low, tail.y[:, 0], tail.y[:, 1], tail.y[:, 2]])
        states = np.vstack([states, low_states])
    states = states[::-1]
    return {"s": grid, "q": states[:, 0], "qp": states[:, 1], "I": states[:, 2], "J": states[:, 4]}


def tw1_cdf_painleve(grid: np.ndarray) -> np.ndarray:
    sol = painleve_solution(grid)
    return np.exp(-0.5 * (sol["I"] + sol["J"]))


def tw2_cdf_painleve(grid: np.ndarray) -> np.ndarray:
    return np.exp(-painleve_solution(grid)["I"])


def _fredholm_length(s: float) -> float:
    # Ai(x) < 1e-17 for x > 12.5, so the kernel vanishes for x + s beyond that
    return max(12.5 - s, 4.0)


def tw1_cdf_fredholm(s, nodes: int = 64) -> np.ndarray:
    """Nystrom approximation of det(1 - K_s) for each s."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    x, w = np.polynomial.legendre.leggauss(nodes)
    out = np.empty_like(s_arr)
    eye = np.eye(nodes)
    for i, si in enumerate(s_arr):
        length = _fredholm_length(si)
        xi = 0.5 * length * (x + 1)
        sw = np.sqrt(0.5 * length * w)
        kernel = airy_ai(si + xi[:, None] + xi[None, :])
        out[i] = np.linalg.det(eye - sw[:, None] * kernel * sw[None, :])
    return out if np.ndim(s) else out[0]


@dataclass(frozen=True)
class TWReference:
    """Tabulated F1 on [S_MIN, S_MAX] with a cross-method error estimate."""

    s: np.ndarray
    cdf_values: np.ndarray
    method: str
    est_error: float
    beta: int = 1

    @property
    def _interp(self) -> PchipInterpolator:
        return _pchip(self.s.tobytes(), self.cdf_values.tobytes())

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.clip(self._interp(np.clip(x, S_MIN, S_MAX)), 0.0, 1.0)
        vals = np.where(x < S_MIN, 0.0, np.where(x > S_MAX, 1.0, vals))
        return vals if vals.ndim else float(vals)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        vals = self._interp.derivative()(np.clip(x, S_MIN, S_MAX))
        vals = np.where((x < S_MIN) | (x > S_MAX), 0.0, np.maximum(vals, 0.0))
        return vals if vals.ndim else float(vals)

    def moments(self) -> tuple[float, float]:
        """Mean and variance from E X = int (1 - F) over x > 0 minus int F over x < 0."""
        s, f = self.s, self.cdf_values
        neg, pos = s <= 0, s >= 0
        mean = simpson(1 - f[pos], x=s[pos]) - simpson(f[neg], x=s[neg])
        second = 2 * simpson(s[pos] * (1 - f[pos]), x=s[pos]) - 2 * simpson(s[neg] * f[neg], x=s[neg])
        return float(mean), float(second - mean**2)

    def ppf(self, u):
        """Inverse CDF by monotone interpolation of the table."""
        u = np.asarray(u, dtype=float)
        f = np.maximum.accumulate(self.cdf_values)
        keep = np.concatenate([[True], np.diff(f) > 0])
        return np.interp(u, f[keep], self.s[keep])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.ppf(rng.uniform(size=n))


@lru_cache(maxsize=8)
def _pchip(s_bytes: bytes, f_bytes: bytes) -> PchipInterpolator:
    return PchipInterpolator(np.frombuffer(s_bytes), np.frombuffer(f_bytes))


def build_tw_reference(method: str = "painleve", step: float = GRID_STEP, cross_check: bool = True,
                       nodes: int = 64) -> TWReference:
    """Tabulate F1 with one route and estimate the error against the other."""
    grid = default_grid(step)
    if method == "painleve":
        values = tw1_cdf_painleve(grid)
    elif method == "fredholm":
        values = tw1_cdf_fredholm(grid, nodes=nodes)
    else:
        raise ValueError(f"unknown method {method!r}")
    est = float("nan")
    if cross_check:
        other = tw1_cdf_fredholm(grid, nodes=nodes) if method == "painleve" else tw1_cdf_painleve(grid)
        est = float(np.max(np.abs(values - other)))
    return TWReference(s=grid, cdf_values=values, method=method, est_error=est)


@lru_cache(maxsize=1)
def default_reference() -> TWReference:
    return build_tw_reference("painleve", cross_check=False)


def tw1_cdf(s):
    """F1(s) from the cached Painleve table; exactly 0 / 1 outside [S_MIN, S_MAX]."""
    return default_reference().cdf(s)
