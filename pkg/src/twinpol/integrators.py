"""Fixed-step classic Runge-Kutta engine shared by both propagators.

Accuracy is certified by dt/2 re-run agreement rather than adaptivity; the
step size must already resolve the fastest interaction-picture phase.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def rk4_step(rhs: Callable, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(rhs: Callable, y0: np.ndarray, t0: float, dt: float, n_steps: int,
              observer: Callable | None = None, observe_every: int = 1) -> np.ndarray:
    """Advance y through n_steps of RK4, reporting state every observe_every steps.

    The observer is called as observer(t, y) at t0 and after every
    observe_every-th step; dt may be negative for backward propagation.
    """
    y = np.array(y0, copy=True)
    t = t0
    if observer is not None:
        observer(t, y)
    for step in range(1, n_steps + 1):
        y = rk4_step(rhs, t, y, dt)
        t = t0 + step * dt
        if observer is not None and step % observe_every == 0:
            observer(t, y)
    return y
