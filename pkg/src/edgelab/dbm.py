"""Symmetrized singular-value Dyson Brownian motion and the coupled observable.

Particles are labelled -N..-1, 1..N and stored in that order, so index ``i``
of a length-2N array holds label ``i - N`` for ``i < N`` and ``i - N + 1``
otherwise. Only the positive half is ever integrated; the negative half is
its mirror image, which makes s_{-k} = -s_k exact rather than approximate.

Dynamics (positive labels, l ranging over the symmetrized set without +-k):

    ds_k = dB_k / sqrt(N) + [ -s_k / (2 xi) + (1/xi - 1) / (2 s_k)
                              + (1/2N) sum_{l != +-k} 1 / (s_k - s_l) ] dt
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_GUARD = 1e-3  # collision guard is DEFAULT_GUARD / N
DEFAULT_DT_MIN = 1e-9


class CollisionError(RuntimeError):
    pass


class StepUnderflow(RuntimeError):
    pass


# ----------------------------------------------------------------- containers

@dataclass(frozen=True)
class SymmetrizedConfig:
    s: np.ndarray  # length 2N, labels -N..-1, 1..N
    time: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        if s.ndim != 1 or s.size % 2:
            raise ValueError("a symmetrized configuration has even length 2N")
        n = s.size // 2
        if not np.array_equal(s[:n], -s[n:][::-1]):
            raise ValueError("configuration is not mirror symmetric")
        if np.any(np.diff(s) <= 0):
            raise ValueError("configuration must be strictly increasing")
        object.__setattr__(self, "s", s)

    @classmethod
    def from_positive(cls, pos, time: float = 0.0) -> "SymmetrizedConfig":
        pos = np.sort(np.asarray(pos, dtype=float))
        if pos[0] <= 0:
            raise ValueError("positive half must be strictly positive")
        return cls(np.concatenate([-pos[::-1], pos]), time)

    @property
    def n(self) -> int:
        return self.s.size // 2

    @property
    def positive(self) -> np.ndarray:
        return self.s[self.n:]


@dataclass(frozen=True)
class VProfile:
    v: np.ndarray  # length 2N in label order
    time: float


@dataclass(frozen=True)
class ObservableSample:
    z: complex
    f: complex
    s_of_z: complex
    time: float


@dataclass
class Trajectory:
    """Positions of K stacked particle systems on the base time grid."""

    xi: float
    times: np.ndarray
    positive: np.ndarray  # shape (T, K, N)
    accepted: int = 0
    rejected: int = 0
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def config(self, step: int, which: int = 0) -> SymmetrizedConfig:
        return SymmetrizedConfig.from_positive(self.positive[step, which], float(self.times[step]))

    def full(self, which: int = 0) -> np.ndarray:
        """Symmetrized positions, shape (T, 2N)."""
        p = self.positive[:, which, :]
        return np.concatenate([-p[:, ::-1], p], axis=1)


@dataclass
class CoupledState:
    """Two trajectories driven by the same Brownian increments, with gap diagnostics."""

    traj: Trajectory
    shared_noise_seed: int | None
    nu: float | None = None

    @property
    def times(self) -> np.ndarray:
        return self.traj.times

    @property
    def max_gap(self) -> np.ndarray:
        p = self.traj.positive
        return np.max(np.abs(p[:, 0, :] - p[:, 1, :]), axis=1)

    @property
    def edge_gap(self) -> np.ndarray:
        p = self.traj.positive
        return np.abs(p[:, 0, -1] - p[:, 1, -1])

    def final(self, which: int) -> SymmetrizedConfig:
        return self.traj.config(-1, which)


# --------------------------------------------------------------------- drift

def _positive_drift(pos: np.ndarray, xi: float) -> np.ndarray:
    """Drift of the positive labels; ``pos`` may be stacked with shape (..., N)."""
    n = pos.shape[-1]
    diff = pos[..., :, None] - pos[..., None, :]
    idx = np.arange(n)
    diff[..., idx, idx] = np.inf  # drops l = k
    # the mirror partner -s_k would enter the second sum as 1/(2 s_k); remove it
    pair = (1.0 / diff).sum(axis=-1) + (1.0 / (pos[..., :, None] + pos[..., None, :])).sum(axis=-1) - 0.5 / pos
    return -pos / (2 * xi) + 0.5 * (1 / xi - 1) / pos + pair / (2 * n)


def _collision_report(pos: np.ndarray, guard: float):
    """Indices (as labels) of the first pair closer than ``guard``, or None."""
    gaps = np.diff(pos)
    if pos[0] * 2 < guard:
        return (-1, 1)
    bad = np.nonzero(gaps < guard)[0]
    if bad.size:
        return (int(bad[0]) + 1, int(bad[0]) + 2)
    return None


def drift(config: SymmetrizedConfig, xi: float, guard: float | None = None) -> np.ndarray:
    """Deterministic drift for all 2N labels; antisymmetric in the label."""
    pos = config.positive
    n = config.n
    guard = DEFAULT_GUARD / n if guard is None else guard
    hit = _collision_report(pos, guard)
    if hit is not None:
        raise CollisionError(f"particles {hit[0]} and {hit[1]} are closer than the guard {guard:.3g}")
    d = _positive_drift(pos, xi)
    return np.concatenate([-d[::-1], d])


def eigenvalue_drift(lam: np.ndarray, xi: float, confining: bool = True) -> np.ndarray:
    """Drift of the eigenvalue flow lambda = s^2.

    With ``confining`` the Ornstein-Uhlenbeck term -lambda/xi is included;
    it is the image of -s/(2 xi) and keeps MP(xi) stationary. Without it the
    result is the drift of the plain Wishart process M_0 + B/sqrt(N).
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    diff = lam[:, None] - lam[None, :]
    eye = np.eye(n, dtype=bool)
    ratio = np.where(eye, 0.0, (lam[:, None] + lam[None, :]) / np.where(eye, 1.0, diff))
    out = 1.0 / xi + ratio.sum(axis=1) / n
    return out - lam / xi if confining else out


# ------------------------------------------------------------------ stepping

def _gaps(pos: np.ndarray) -> np.ndarray:
    """Gap to the mirror partner (2 s_1) followed by consecutive gaps."""
    return np.concatenate([2 * pos[..., :1], np.diff(pos, axis=-1)], axis=-1)


def _violates(new: np.ndarray, old: np.ndarray, guard: float, hard_edge: bool = False) -> bool:
    """Reject a step that breaks ordering or closes a gap too fast.

    A gap may not drop below min(guard, old_gap / 2): gaps wider than twice
    the guard must stay above the guard, narrower ones may shrink only by
    half per step, so the step size adapts to the local gap scale.
    """
    if not np.all(np.isfinite(new)):
        return True
    g_new = _gaps(new)
    floor = np.minimum(guard, _gaps(old) / 2)
    if hard_edge:
        g_new = g_new[..., 1:]
        floor = floor[..., 1:]
    return bool(np.any(g_new <= 0) or np.any(g_new < floor))


def _energy_parts(x: np.ndarray, xi: float):
    """Gradient and Hessian of the convex energy H with drift = -grad H (positive half)."""
    n = x.size
    c = 1.0 / (2 * n)
    diff = x[:, None] - x[None, :]
    summ = x[:, None] + x[None, :]
    eye = np.eye(n, dtype=bool)
    inv_d2 = np.where(eye, 0.0, 1.0 / np.where(eye, 1.0, diff) ** 2)
    inv_s2 = np.where(eye, 0.0, 1.0 / summ**2)
    hess = c * (inv_s2 - inv_d2)
    hess[np.diag_indices(n)] = (1 / (2 * xi) + 0.5 * (1 / xi - 1) / x**2
                                + c * (inv_d2.sum(axis=1) + inv_s2.sum(axis=1)))
    return -_positive_drift(x, xi), hess


def _energy(x: np.ndarray, xi: float) -> float:
    n = x.size
    iu = np.triu_indices(n, 1)
    d = (x[None, :] - x[:, None])[iu]
    sm = (x[None, :] + x[:, None])[iu]
    val = np.sum(x**2) / (4 * xi) - (np.sum(np.log(d)) + np.sum(np.log(sm))) / (2 * n)
    if xi != 1:
        val -= 0.5 * (1 / xi - 1) * np.sum(np.log(x))
    return float(val)


def implicit_step(x: np.ndarray, h: float, shift: np.ndarray, xi: float, tol: float = 1e-13,
                  max_iter: int = 100) -> np.ndarray:
    """Drift-implicit Euler step x_new = x + h b(x_new) + shift for one system.

    x_new minimizes |u - (x + shift)|^2 / (2h) + H(u), a strictly convex
    problem on the ordered chamber, so the result is ordered whenever the
    Newton iteration (with backtracking that keeps iterates ordered) converges.
    """
    y = x + shift
    u = x.copy()

    def phi(v):
        return float(np.sum((v - y) ** 2) / (2 * h)) + _energy(v, xi)

    def feasible(v):
        return np.all(np.diff(v) > 0) and (v[0] > 0 if xi != 1 else v[0] > -v[1])

    val = phi(u)
    for _ in range(max_iter):
        grad_h, hess = _energy_parts(u, xi)
        grad = (u - y) / h + grad_h
        hess[np.diag_indices(u.size)] += 1 / h
        step = np.linalg.solve(hess, grad)
        lam = 1.0
        while True:
            trial = u - lam * step
            if feasible(trial):
                tval = phi(trial)
                if tval <= val + 1e-14 * abs(val):
                    break
            lam *= 0.5
            if lam < 1e-12:
                raise StepUnderflow("implicit step line search failed")
        u, val = trial, tval
        if np.max(np.abs(lam * step)) <= tol * max(1.0, np.max(np.abs(u))):
            break
    if xi == 1:
        u[0] = abs(u[0])
    return u


@dataclass
class _Stepper:
    xi: float
    n: int
    guard: float
    dt_min: float
    seed: int | None
    max_depth: int = 8
    accepted: int = 0
    rejected: int = 0
    implicit: int = 0

    def _bridge_normal(self, step: int, depth: int, pos: int) -> np.ndarray:
        ss = np.random.SeedSequence([int(self.seed), 1, step, depth, pos])
        return np.random.Generator(np.random.Philox(ss)).standard_normal(self.n)

    def advance(self, x: np.ndarray, h: float, dw: np.ndarray | None, step: int,
                depth: int = 0, pos: int = 0) -> np.ndarray:
        """Advance stacked positions over [t, t+h] with Brownian increment ``dw``."""
        shift = 0.0 if dw is None else dw / np.sqrt(self.n)
        if depth >= self.max_depth:
            self.implicit += 1
            self.accepted += 1
            shifts = np.broadcast_to(shift, x.shape)
            return np.stack([implicit_step(x[i], h, shifts[i], self.xi) for i in range(x.shape[0])])
        new = x + _positive_drift(x, self.xi) * h + shift
        hard = self.xi == 1
        if hard:
            # s_1 meeting its mirror -s_1 at the origin is a relabelling
            new[..., 0] = np.abs(new[..., 0])
        if not _violates(new, x, self.guard, hard):
            self.accepted += 1
            return new
        self.rejected += 1
        half = h / 2
        if half < self.dt_min:
            raise StepUnderflow(f"step fell below dt_min={self.dt_min:g} at base step {step}")
        if dw is None:
            dw1 = dw2 = None
        else:
            # Brownian bridge midpoint, keyed so refinement is reproducible
            dw1 = dw / 2 + np.sqrt(h / 4) * self._bridge_normal(step, depth, pos)
            dw2 = dw - dw1
        mid = self.advance(x, half, dw1, step, depth + 1, 2 * pos)
        return self.advance(mid, half, dw2, step, depth + 1, 2 * pos + 1)


def simulate(inits, xi: float, dt: float, t_end: float, seed: int | None = 0,
             guard: float | None = None, dt_min: float = DEFAULT_DT_MIN, record_every: int = 1,
             max_depth: int = 8) -> Trajectory:
    """Run K systems (one per initial config) on a common base grid with shared noise.

    ``seed=None`` switches the noise off. Rejected steps (ordering lost or a
    gap below the guard in any system) are split in two with a Brownian
    bridge, recursively, so every system still sees the same path. At
    xi = 1 nothing in the drift pushes s_1 away from 0, and a crossing of
    s_1 with its mirror is folded back (s_1 -> |s_1|), which is how
    s_1 = sqrt(lambda_1) behaves when lambda_1 touches 0. After
    ``max_depth`` halvings the sub-step is taken drift-implicitly instead,
    which cannot break the ordering.
    """
    inits = [inits] if isinstance(inits, SymmetrizedConfig) else list(inits)
    n = inits[0].n
    if any(c.n != n for c in inits):
        raise ValueError("all systems need the same N")
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    guard = DEFAULT_GUARD / n if guard is None else guard
    steps = int(np.ceil(t_end / dt - 1e-12)) if t_end > 0 else 0
    t0 = inits[0].time
    x = np.stack([c.positive for c in inits]).astype(float)
    stepper = _Stepper(xi=xi, n=n, guard=guard, dt_min=dt_min, seed=seed, max_depth=max_depth)
    base = None if seed is None else np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), 0])))
    times = [t0]
    out = [x.copy()]
    t = t0
    for j in range(steps):
        h = min(dt, t0 + t_end - t)
        dw = None if base is None else base.standard_normal(n) * np.sqrt(h)
        x = stepper.advance(x, h, dw, j)
        t = t0 + t_end if j == steps - 1 else t + h
        if (j + 1) % record_every == 0 or j == steps - 1:
            times.append(t)
            out.append(x.copy())
    return Trajectory(xi=xi, times=np.array(times), positive=np.array(out), accepted=stepper.accepted,
                      rejected=stepper.rejected, seed=seed,
                      params={"dt": dt, "t_end": t_end, "guard": guard, "dt_min": dt_min, "n": n,
                              "implicit_steps": stepper.implicit, "max_depth": max_depth})


def evolve(config: SymmetrizedConfig, xi: float, dt: float, t_end: float, noise_stream: int | None = 0,
           **kwargs) -> SymmetrizedConfig:
    """Final configuration after running for ``t_end``."""
    traj = simulate(config, xi, dt, t_end, seed=noise_stream, record_every=max(1, int(np.ceil(t_end / dt))), **kwargs)
    return traj.config(-1)


def couple(init_a: SymmetrizedConfig, init_b: SymmetrizedConfig, xi: float, dt: float, t_end: float,
           seed: int | None = 0, record_every: int = 1, nu: float | None = None, **kwargs) -> CoupledState:
    if init_a.n != init_b.n:
        raise ValueError("coupled systems need the same N")
    traj = simulate([init_a, init_b], xi, dt, t_end, seed=seed, record_every=record_every, **kwargs)
    return CoupledState(traj=traj, shared_noise_seed=seed, nu=nu)


def interpolate_init(init_a: SymmetrizedConfig, init_b: SymmetrizedConfig, nu: float) -> SymmetrizedConfig:
    """x(0) = nu * a + (1 - nu) * b."""
    if not 0 <= nu <= 1:
        raise ValueError("nu must lie in [0, 1]")
    if nu == 1:
        return init_a
    if nu == 0:
        return init_b
    return SymmetrizedConfig.from_positive(nu * init_a.positive + (1 - nu) * init_b.positive, init_a.time)


# ------------------------------------------------------------------ v-flow

def v_generator(x: np.ndarray, xi: float) -> np.ndarray:
    """Matrix A with dv/dt = A v for the full 2N system at frozen positions ``x``."""
    n2 = x.size
    n = n2 // 2
    diff = x[:, None] - x[None, :]
    mask = ~np.eye(n2, dtype=bool)
    mask[np.arange(n2), n2 - 1 - np.arange(n2)] = False  # exclude the mirror partner
    w = np.where(mask, 1.0 / np.where(mask, diff, 1.0) ** 2, 0.0) / (2 * n)
    a = w - np.diag(w.sum(axis=1))
    a[np.diag_indices(n2)] += 0.5 * (1 - 1 / xi) / x**2
    return a


def v_generator_half(pos: np.ndarray, xi: float) -> np.ndarray:
    """The generator folded onto positive labels, valid for mirror-symmetric v.

    Label l and its mirror -l both couple to k, with weights 1/(s_k - s_l)^2
    and 1/(s_k + s_l)^2; -k itself stays excluded.
    """
    n = pos.size
    eye = np.eye(n, dtype=bool)
    diff = pos[:, None] - pos[None, :]
    summ = pos[:, None] + pos[None, :]
    w = np.where(eye, 0.0, 1.0 / np.where(eye, 1.0, diff) ** 2 + 1.0 / summ**2) / (2 * n)
    a = w - np.diag(w.sum(axis=1))
    a[np.diag_indices(n)] += 0.5 * (1 - 1 / xi) / pos**2
    return a


def v_rhs(x: np.ndarray, v: np.ndarray, xi: float) -> np.ndarray:
    return v_generator(np.asarray(x, dtype=float), xi) @ np.asarray(v, dtype=float)


@dataclass
class VSeries:
    times: np.ndarray
    v: np.ndarray  # (T, 2N)
    vmin: np.ndarray
    vmax: np.ndarray
    substeps: int = 0

    def profile(self, i: int) -> VProfile:
        return VProfile(v=self.v[i], time=float(self.times[i]))


def evolve_v(v0, trajectory: Trajectory, xi: float | None = None, which: int = 0,
             neg_tol: float = 1e-12, dt_min: float = DEFAULT_DT_MIN) -> VSeries:
    """Backward-Euler integration of the parabolic v-equation along a recorded path.

    Positions are frozen at the start of each recorded interval. The implicit
    matrix I - h A has nonnegative inverse with row sums at most one, so the
    discrete flow keeps v >= 0 and never raises max v. A step that still
    produced negative entries beyond ``neg_tol`` (round-off only) is halved.
    Only the positive half is integrated, with the folded generator, and the
    negative half is its mirror, so v_{-k} = v_k holds exactly.
    """
    xi = trajectory.xi if xi is None else xi
    full0 = np.asarray(v0, dtype=float)
    n = full0.size // 2
    if full0.size != 2 * n or not np.array_equal(full0[:n], full0[n:][::-1]):
        raise ValueError("v0 must be mirror symmetric (v_{-k} = v_k)")
    if np.any(full0 < 0):
        raise ValueError("v0 must be nonnegative")
    v = full0[n:].copy()
    pos = trajectory.positive[:, which, :]
    times = trajectory.times
    out = [v.copy()]
    sub = 0
    scale = max(float(np.max(np.abs(v))), 1e-300)
    for i in range(len(times) - 1):
        a = v_generator_half(pos[i], xi)
        h_total = times[i + 1] - times[i]
        pieces = 1
        while True:
            h = h_total / pieces
            if h < dt_min:
                raise StepUnderflow("v-flow step fell below dt_min")
            lhs = np.eye(v.size) - h * a
            trial = v.copy()
            for _ in range(pieces):
                trial = np.linalg.solve(lhs, trial)
            if np.min(trial) >= -neg_tol * scale:
                break
            pieces *= 2
        sub += pieces
        v = trial
        out.append(v.copy())
    half = np.array(out)
    arr = np.concatenate([half[:, ::-1], half], axis=1)
    return VSeries(times=times.copy(), v=arr, vmin=arr.min(axis=1), vmax=arr.max(axis=1), substeps=sub)


# -------------------------------------------------------------- observable

def observable(x, v, z: complex, t: float, xi: float) -> ObservableSample:
    """f_t(z) = e^{-t/(2 xi)} sum v_k / (x_k - z) and s_t(z) = (1/2N) sum 1 / (x_k - z)."""
    x = np.asarray(x.s if isinstance(x, SymmetrizedConfig) else x, dtype=float)
    v = np.asarray(v.v if isinstance(v, VProfile) else v, dtype=float)
    z = complex(z)
    r = 1.0 / (x - z)
    return ObservableSample(z=z, f=complex(np.exp(-t / (2 * xi)) * np.sum(v * r)), s_of_z=complex(np.mean(r)),
                            time=float(t))


@dataclass(frozen=True)
class DriftIdentity:
    term_by_term: complex
    closed_form: complex
    residual: float
    scale: float
    terms: dict


def drift_identity_check(config: SymmetrizedConfig, v, z: complex, xi: float, t: float = 0.0) -> DriftIdentity:
    """Deterministic part of df_t assembled two ways.

    (a) the separate pieces A1, B1, B2, I2..I5 obtained from the v-equation
        and from Ito's rule applied to 1/(x_k - z);
    (b) the regrouped expression (s_t + z/2xi) f' + f''/(4N) + the two
        singularity-free sums.
    """
    x = config.s
    v = np.asarray(v, dtype=float)
    n = config.n
    n2 = 2 * n
    z = complex(z)
    e = np.exp(-t / (2 * xi))
    c = 1 - 1 / xi
    r = 1.0 / (x - z)

    mask = ~np.eye(n2, dtype=bool)
    mask[np.arange(n2), n2 - 1 - np.arange(n2)] = False
    dx = x[:, None] - x[None, :]  # x_k - x_l
    safe = np.where(mask, dx, 1.0)

    f = e * np.sum(v * r)
    a1 = -f / (2 * xi)
    b1 = e * np.sum(r * 0.5 * c * v / x**2)
    b2 = e * np.sum(r * np.sum(np.where(mask, (v[None, :] - v[:, None]) / safe**2, 0.0), axis=1) / (2 * n))
    i2 = e / (2 * xi) * np.sum(v * x * r**2)
    i3 = 0.5 * c * e * np.sum(v / x * r**2)
    i4 = e / (2 * n) * np.sum(np.where(mask, (v * r**2)[:, None] / np.where(mask, -dx, 1.0), 0.0))
    i5 = e / n * np.sum(v * r**3)
    terms = {"A1": a1, "B1": b1, "B2": b2, "I2": i2, "I3": i3, "I4": i4, "I5": i5}
    route_a = sum(terms.values())

    fz = e * np.sum(v * r**2)
    fzz = 2 * e * np.sum(v * r**3)
    s_t = np.mean(r)
    rp = 1.0 / (x + z)
    route_b = ((s_t + z / (2 * xi)) * fz + fzz / (4 * n)
               + e / (2 * n) * np.sum(v * r**2 * rp)
               + c * e * (np.sum(3 * z * v / (2 * x**2) * r * rp) + np.sum(z**3 * v / x**2 * r**2 * rp**2)))
    # floating-point scale: total absolute size of every summand entering route (a)
    pair_abs = np.abs(np.where(mask, (v[None, :] - v[:, None]) / safe**2, 0.0)).sum(axis=1)
    scale = float(
        np.sum(np.abs(v * r)) / (2 * xi)
        + np.sum(np.abs(r * 0.5 * c * v / x**2))
        + np.sum(np.abs(r) * pair_abs) / (2 * n)
        + np.sum(np.abs(v * x * r**2)) / (2 * xi)
        + np.sum(np.abs(0.5 * c * v / x * r**2))
        + np.sum(np.abs(np.where(mask, (v * r**2)[:, None] / np.where(mask, dx, 1.0), 0.0))) / (2 * n)
        + np.sum(np.abs(v * r**3)) / n
    ) * e
    return DriftIdentity(term_by_term=complex(route_a), closed_form=complex(route_b),
                         residual=float(abs(route_a - route_b)), scale=scale, terms=terms)


def ito_drift_direct(config: SymmetrizedConfig, v, z: complex, xi: float, t: float = 0.0) -> complex:
    """Third assembly straight from the particle drift and v-equation, for cross-checks."""
    x = config.s
    v = np.asarray(v, dtype=float)
    e = np.exp(-t / (2 * xi))
    r = 1.0 / (x - complex(z))
    f = e * np.sum(v * r)
    dv = v_rhs(x, v, xi)
    b = drift(config, xi, guard=0.0)
    return complex(-f / (2 * xi) + e * np.sum(dv * r) + e * np.sum(v * (-b * r**2 + r**3 / config.n)))


# --------------------------------------------------------- coupling runs

PROBE_TIMES = (0.02, 0.05, 0.1, 0.2)


@dataclass
class CouplingSummary:
    n: int
    xi: float
    seeds: np.ndarray
    probe_times: np.ndarray
    edge_gaps: np.ndarray  # (seeds, probes)
    max_gaps: np.ndarray

    @property
    def decay_fraction(self) -> float:
        """Share of runs whose edge gap at the last probe is below the one at the first."""
        return float(np.mean(self.edge_gaps[:, -1] < self.edge_gaps[:, 0]))

    def median_scaled(self) -> np.ndarray:
        """median over runs of gap * N t at each probe time."""
        return np.median(self.edge_gaps * self.n * self.probe_times[None, :], axis=0)


def coupling_experiment(n: int, xi: float, seeds, dt: float = 2e-4, probe_times=PROBE_TIMES,
                        dist_a=None, dist_b=None, data_seed: int = 1000) -> CouplingSummary:
    """Couple DBM started from two data ensembles (Gaussian and Rademacher by default).

    Run ``sd`` uses data replicas ``sd`` of streams ``data_seed`` and
    ``data_seed + 1`` and noise seed ``sd``.
    """
    from .ensembles import EntryDistribution, spectrum_sample

    dist_a = EntryDistribution("gaussian") if dist_a is None else dist_a
    dist_b = EntryDistribution("rademacher") if dist_b is None else dist_b
    m = int(round(n / xi))
    xi_eff = n / m
    probes = np.asarray(probe_times, dtype=float)
    steps = np.round(probes / dt).astype(int)
    if np.any(np.abs(steps * dt - probes) > 1e-12):
        raise ValueError("probe times must be multiples of dt")
    every = int(np.gcd.reduce(steps))
    edge, full = [], []
    for sd in seeds:
        a = SymmetrizedConfig.from_positive(spectrum_sample(m, n, dist_a, seed=data_seed, replica=int(sd)))
        b = SymmetrizedConfig.from_positive(spectrum_sample(m, n, dist_b, seed=data_seed + 1, replica=int(sd)))
        cs = couple(a, b, xi_eff, dt, float(probes[-1]), seed=int(sd), record_every=every)
        idx = [int(np.argmin(np.abs(cs.times - t))) for t in probes]
        edge.append(cs.edge_gap[idx])
        full.append(cs.max_gap[idx])
    return CouplingSummary(n=n, xi=xi_eff, seeds=np.asarray(seeds), probe_times=probes,
                           edge_gaps=np.array(edge), max_gaps=np.array(full))
