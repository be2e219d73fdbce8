"""Adaptive Dormand-Prince 5(4) integrator for real or complex first-order systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class IntegrationError(RuntimeError):
    pass


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray  # shape (len(t), *y0.shape)
    accepted: int = 0
    rejected: int = 0
    status: str = "ok"
    message: str = ""
    extra: dict = field(default_factory=dict)


def integrate(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t_eval,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h0: float | None = None,
    h_max: float = np.inf,
    max_steps: int = 1_000_000,
    guard: Callable[[float, np.ndarray], str | None] | None = None,
) -> Solution:
    """Integrate y' = fun(t, y) from t0 and report the state at each point of ``t_eval``.

    ``t_eval`` must be monotone in the direction of integration (forward or
    backward). Steps are clipped so every output point is hit exactly, so no
    interpolation error enters the reported values. ``guard`` may inspect each
    accepted state and return a message to stop early; the solution is then
    truncated to the points reached and ``status`` is set to "stopped".
    """
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    out = np.empty((len(t_eval),) + y.shape, dtype=y.dtype)
    direction = 1.0 if t_eval[-1] >= t0 else -1.0
    if np.any(direction * np.diff(np.concatenate([[t0], t_eval])) < 0):
        raise ValueError("t_eval must be monotone in the integration direction")

    t = float(t0)
    k1 = np.asarray(fun(t, y))
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((np.abs(y) / scale) ** 2))
        d1 = np.sqrt(np.mean((np.abs(k1) / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(abs(h0), h_max)
    accepted = rejected = 0
    sol = Solution(t=t_eval, y=out)

    for i, target in enumerate(t_eval):
        while direction * (target - t) > 0:
            if accepted + rejected >= max_steps:
                raise IntegrationError(f"step budget exhausted at t={t:.6g}")
            step = min(h, abs(target - t))
            last = step == abs(target - t)
            hs = direction * step
            ks = [k1]
            for j in range(1, 7):
                yj = y + hs * sum(a * kk for a, kk in zip(_A[j], ks) if a != 0.0)
                ks.append(np.asarray(fun(t + _C[j] * hs, yj)))
            y_new = y + hs * sum(b * kk for b, kk in zip(_B5, ks) if b != 0.0)
            err_vec = hs * sum(e * kk for e, kk in zip(_E, ks))
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.sqrt(np.mean((np.abs(err_vec) / scale) ** 2)))
            if not np.isfinite(err):
                rejected += 1
                h = step / 4
                if h < 1e-14 * max(1.0, abs(t)):
                    raise IntegrationError(f"non-finite state near t={t:.6g}")
                continue
            if err <= 1.0:
                t = target if last else t + hs
                y = y_new
                k1 = ks[6]
                accepted += 1
                if guard is not None:
                    msg = guard(t, y)
                    if msg:
                        sol.t, sol.y = t_eval[:i], out[:i]
                        sol.status, sol.message = "stopped", msg
                        sol.accepted, sol.rejected = accepted, rejected
                        return sol
                factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err**-0.2))
                # a clipped final step says nothing about the natural step size
                h = min(h_max, max(h, step * factor) if last else step * factor)
            else:
                rejected += 1
                h = step * max(0.2, 0.9 * err**-0.2)
                if h < 1e-14 * max(1.0, abs(t)):
                    raise IntegrationError(f"step size underflow at t={t:.6g}")
        out[i] = y
    sol.accepted, sol.rejected = accepted, rejected
    return sol
