"""Characteristics dz/dt = g(z) of the advection equation for the observable.

Two velocity fields are provided:

* ``general``: g(z) = ((1 - xi) + sqrt((z^2 - l-)(z^2 - l+))) / (2 xi z) = m(z) + z / (2 xi),
  the root taken as a product of four edge-anchored roots;
* ``sc``: g_sc(z) = sqrt((z - 1)^2 - xi) / xi, a square-root field with the same
  right edge, whose flow has a closed form and serves as the comparison model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .ode import integrate
from .spectral_laws import SpectralLaw, _stable_root_ratio, edge_distances, mp_edges, sv_branch_root, sv_density

# phi(N) = exp(C0 (log log N)^2) with phi(100) = 8
C0 = float(np.log(8.0) / np.log(np.log(100.0)) ** 2)
RATIO_BAND = 16.0
INTEGRAL_BOUND = 64.0


def phi_default(n: float) -> float:
    return float(np.exp(C0 * np.log(np.log(n)) ** 2))


class PathError(RuntimeError):
    pass


@dataclass(frozen=True)
class VelocityField:
    xi: float
    law: SpectralLaw
    kind: str = "general"

    def __post_init__(self):
        if self.kind not in ("general", "sc"):
            raise ValueError("kind must be 'general' or 'sc'")

    @classmethod
    def make(cls, xi: float, kind: str = "general") -> "VelocityField":
        return cls(xi=float(xi), law=mp_edges(xi), kind=kind)


@dataclass
class CharPath:
    z0: complex
    times: np.ndarray
    points: np.ndarray
    tol: float
    accepted: int = 0


@dataclass(frozen=True)
class EdgeCurveS:
    n: float
    phi: float
    law: SpectralLaw

    @property
    def e_range(self) -> tuple[float, float]:
        lo, hi = self.law.sqrt_edges
        margin = self.phi**2 * self.n ** (-2.0 / 3.0)
        return lo + margin, hi - margin

    def kappa(self, e: float) -> float:
        lo, hi = self.law.sqrt_edges
        return min(abs(e - lo), abs(e - hi))

    def point(self, e: float) -> complex:
        lo, hi = self.e_range
        if not lo < e < hi:
            raise ValueError(f"E={e} lies outside the curve's range ({lo:.6g}, {hi:.6g})")
        return complex(e, self.phi**2 / (self.n * np.sqrt(self.kappa(e))))

    def points(self, count: int = 200) -> np.ndarray:
        lo, hi = self.e_range
        if lo >= hi:
            return np.empty(0, dtype=complex)
        es = np.linspace(lo, hi, count + 2)[1:-1]
        return np.array([self.point(e) for e in es])


def _sqrt_cut(w: np.ndarray, c: float) -> np.ndarray:
    """sqrt(w^2 - c^2) with its cut on [-c, c], ~ w at infinity."""
    return np.sqrt(w - c) * np.sqrt(w + c)


def velocity(fld: VelocityField, z):
    z = np.asarray(z, dtype=complex)
    if fld.kind == "general":
        a, b = fld.law.sqrt_edges
        on_support = (z.imag == 0) & (np.abs(z.real) >= a) & (np.abs(z.real) <= b)
        if np.any(on_support):
            raise ValueError("z lies on the support")
        # 1 - xi + R = (a + R) + z^2 with a = 1 - xi - z^2; the first part cancels
        # near z = 0 in the gap, so it is taken in conjugate form when needed
        a_ = 1 - fld.xi - z * z
        g = _stable_root_ratio(a_, sv_branch_root(fld.law, z), 2 * fld.xi * z, 2 * z) + z / (2 * fld.xi)
    else:
        g = _sqrt_cut(z - 1, np.sqrt(fld.xi)) / fld.xi
    return g if g.ndim else complex(g)


def sc_closed_form(xi: float, z0: complex, t) -> np.ndarray:
    """z_t for the sc field: w + sqrt(w^2 - xi) grows like e^{t/xi}, with w = z - 1."""
    w0 = complex(z0) - 1
    c = np.sqrt(xi)
    amp = (w0 + _sqrt_cut(np.asarray(w0), c)) * np.exp(np.asarray(t, dtype=float) / xi)
    return 1 + (amp + xi / amp) / 2


def flow(fld: VelocityField, z0: complex, t_end: float, t_eval=None, rtol: float = 1e-12,
         atol: float = 1e-14) -> CharPath:
    """Integrate the characteristic from z0 with the adaptive Dormand-Prince solver."""
    z0 = complex(z0)
    if z0.imag <= 0:
        raise ValueError("need Im z0 > 0")
    if t_end == 0:
        return CharPath(z0=z0, times=np.array([0.0]), points=np.array([z0]), tol=rtol)
    t_eval = np.array([t_end]) if t_eval is None else np.asarray(t_eval, dtype=float)

    def guard(t, y):
        if y[0].imag <= 0:
            return f"path reached the real axis at t={t:.6g}, z={y[0]:.6g}"
        return None

    sol = integrate(lambda t, y: np.array([velocity(fld, y[0])]), 0.0, np.array([z0]), t_eval,
                    rtol=rtol, atol=atol, guard=guard)
    if sol.status != "ok":
        raise PathError(sol.message)
    return CharPath(z0=z0, times=np.concatenate([[0.0], sol.t]), points=np.concatenate([[z0], sol.y[:, 0]]),
                    tol=rtol, accepted=sol.accepted)


# --------------------------------------------------------------- asymptotics

@dataclass
class AsymptoticsReport:
    rows: list = field(default_factory=list)
    band: float = RATIO_BAND

    @property
    def passed(self) -> bool:
        lo, hi = 1 / self.band, self.band
        return all(lo <= r[k] <= hi for r in self.rows for k in ("re_ratio", "im_ratio") if r.get(k) is not None)

    def failures(self) -> list:
        lo, hi = 1 / self.band, self.band
        return [r for r in self.rows
                if any(r.get(k) is not None and not lo <= r[k] <= hi for k in ("re_ratio", "im_ratio"))]


def verify_characteristics_asymptotics(fld: VelocityField, z0s, ts, band: float = RATIO_BAND,
                                       bulk: bool = False) -> AsymptoticsReport:
    """Ratios of measured increments of z_t to the edge models.

    Edge points: Re(z_t - z0) against t a/kappa^{1/2} + t^2 and
    Im(z_t - z0) against t b/kappa^{1/2}. With ``bulk`` only the imaginary
    increment is tested, against t.
    """
    report = AsymptoticsReport(band=band)
    ts = np.sort(np.asarray(ts, dtype=float))
    for z0 in z0s:
        path = flow(fld, z0, ts[-1], t_eval=ts)
        d = edge_distances(fld.law, z0)
        for t, zt in zip(path.times[1:], path.points[1:]):
            inc = zt - z0
            row = {"z0": complex(z0), "t": float(t), "re_inc": inc.real, "im_inc": inc.imag}
            if bulk:
                row["im_model"] = t
                row["im_ratio"] = inc.imag / t
                row["re_ratio"] = None
            else:
                root_k = np.sqrt(d.kappa)
                row["re_model"] = t * d.a / root_k + t * t
                row["im_model"] = t * d.b / root_k
                row["re_ratio"] = inc.real / row["re_model"]
                row["im_ratio"] = inc.imag / row["im_model"]
            report.rows.append(row)
    return report


# ----------------------------------------------------------- integral bound

def _kappa_real(law: SpectralLaw, x):
    lo, hi = law.sqrt_edges
    return np.minimum(np.abs(x - lo), np.abs(x - hi))


def _inner_integral(law: SpectralLaw, z: complex, s: float) -> float:
    """int rho(x) dx / (|z - x|^4 max(kappa(x), s^2)) over the symmetrized support."""
    lo, hi = law.sqrt_edges
    width = hi - lo

    def integrand(theta, sign):
        x = lo + width * np.sin(theta) ** 2
        jac = width * np.sin(2 * theta)
        k = _kappa_real(law, x)
        return sv_density(law, x) * jac / (abs(z - sign * x) ** 4 * max(k, s * s, 1e-300))

    x0 = min(max(z.real, lo), hi)
    th0 = float(np.arcsin(np.sqrt((x0 - lo) / width)))
    eta = max(abs(z.imag), 1e-300)
    # dx/dtheta at th0 converts the peak width eta to angle units
    dth = eta / max(width * abs(np.sin(2 * th0)), 1e-12)
    pts = sorted({min(max(th0 + k * dth, 1e-15), np.pi / 2 - 1e-15) for k in (-30, -3, -1, 0, 1, 3, 30)})
    pos = quad(integrand, 0.0, np.pi / 2, args=(1.0,), points=pts, limit=1000, epsabs=0.0, epsrel=1e-9)[0]
    neg = quad(integrand, 0.0, np.pi / 2, args=(-1.0,), limit=200, epsabs=0.0, epsrel=1e-9)[0]
    return pos + neg


def integral_bound_lhs(fld: VelocityField, z: complex, t: float, n: float, phi: float,
                       panels: int = 40, order: int = 16) -> float:
    """(phi^4/N^2) int_0^t ds int rho(x) dx / (|z_{t-s} - x|^4 max(kappa(x), s^2)).

    The outer integral runs over u = t - s on geometrically graded panels
    (the integrand is sharpest at u = 0, where Im z_u is smallest), with
    Gauss-Legendre nodes; z_u comes from the characteristic flow.
    """
    if t <= 0:
        return 0.0
    eta0 = abs(complex(z).imag)
    first = min(t, max(eta0 * 1e-2, t * 1e-12))
    edges = np.concatenate([[0.0], np.geomspace(first, t, panels)])
    xg, wg = np.polynomial.legendre.leggauss(order)
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        us.append(0.5 * (b - a) * xg + 0.5 * (b + a))
        ws.append(0.5 * (b - a) * wg)
    us = np.concatenate(us)
    ws = np.concatenate(ws)
    path = flow(fld, z, t, t_eval=us)
    total = 0.0
    for u, w, zu in zip(us, ws, path.points[1:]):
        total += w * _inner_integral(fld.law, complex(zu), t - u)
    return float(phi**4 / n**2 * total)


def integral_bound_check(fld: VelocityField, z: complex, t: float, n: float, phi: float, **kwargs) -> float:
    """LHS divided by kappa(E) / max(kappa(E), t^2)."""
    lo, hi = fld.law.sqrt_edges
    e = complex(z).real
    kap = min(abs(e - lo), abs(e - hi))
    return integral_bound_lhs(fld, z, t, n, phi, **kwargs) / (kap / max(kap, t * t))


def compare_fields(xi: float, z0: complex, ts) -> np.ndarray:
    """|z_t - z0| under the general field divided by the same under the sc field."""
    ts = np.sort(np.asarray(ts, dtype=float))
    gen = flow(VelocityField.make(xi, "general"), z0, ts[-1], t_eval=ts).points[1:]
    sc = flow(VelocityField.make(xi, "sc"), z0, ts[-1], t_eval=ts).points[1:]
    return np.abs(gen - z0) / np.abs(sc - z0)
