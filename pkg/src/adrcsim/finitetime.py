"""Finite-time reaching laws: closed-form settling times and a numerical check.

The scalar system e' = -k * sgn(e) * |e|**alpha with k > 0 and alpha in
(0, 1) reaches zero in finite time |e0|**(1-alpha) / ((1-alpha)*k); the same
structure underlies the observer's error dynamics.  This module evaluates
the closed forms and integrates the scalar system directly so the two
routes can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simcore import rk4_step

__all__ = [
    "FiniteTimeSpec",
    "ReachingRun",
    "settling_time",
    "lyapunov_settling_bound",
    "capture_band",
    "simulate_reaching_law",
]


@dataclass(frozen=True)
class FiniteTimeSpec:
    """Parameters of the scalar reaching law and its Lyapunov-decay bound.

    k, alpha define e' = -k*sgn(e)*|e|**alpha; e0 is the initial error.
    c > 1 and V0 >= 0 parameterize the settling bound derived from
    V' + c*V**a <= 0.
    """

    k: float
    alpha: float
    e0: float
    c: float = 2.0
    V0: float = 0.0

    def __post_init__(self):
        if self.k <= 0.0:
            raise ValueError("k must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.c <= 1.0:
            raise ValueError("c must exceed 1")
        if self.V0 < 0.0:
            raise ValueError("V0 must be non-negative")


def settling_time(spec: FiniteTimeSpec) -> float:
    """Exact time at which the reaching law hits zero:
    |e0|**(1-alpha) / ((1-alpha) * k)."""
    if spec.e0 == 0.0:
        return 0.0
    return abs(spec.e0) ** (1.0 - spec.alpha) / ((1.0 - spec.alpha) * spec.k)


def lyapunov_settling_bound(spec: FiniteTimeSpec, alpha_eff: float | None = None) -> float:
    """Upper settling estimate V0**(1-a) / (c*(1-a)) from the decay
    inequality V' + c*V**a <= 0.

    For the observer error bound use a = (1 + alpha)/2, which is the default.
    """
    a = (1.0 + spec.alpha) / 2.0 if alpha_eff is None else alpha_eff
    if not 0.0 < a < 1.0:
        raise ValueError("effective exponent must lie in (0, 1)")
    if spec.V0 == 0.0:
        return 0.0
    return spec.V0 ** (1.0 - a) / (spec.c * (1.0 - a))


def capture_band(spec: FiniteTimeSpec, dt: float) -> float:
    """One-step capture radius (k*dt)**(1/(1-alpha)): inside it a single
    explicit step reaches the origin, so the state is pinned to zero there
    instead of chattering."""
    return (spec.k * dt) ** (1.0 / (1.0 - spec.alpha))


@dataclass
class ReachingRun:
    """Trajectory of the integrated reaching law and its empirical settling."""

    times: np.ndarray
    values: np.ndarray
    settled: float  # first pinned time; nan if the horizon ended first
    band: float


def simulate_reaching_law(
    spec: FiniteTimeSpec, dt: float, horizon: float | None = None
) -> ReachingRun:
    """Integrate e' = -k*sgn(e)*|e|**alpha with exact-reaching regularization.

    Once |e| falls inside the one-step capture band the state is set to
    exactly zero and stays there; the first pinned time is the empirical
    settling time.  The default horizon is 1.2x the predicted settling time.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    t_pred = settling_time(spec)
    if horizon is None:
        horizon = 1.2 * t_pred if t_pred > 0.0 else dt
    n = max(1, math.ceil(horizon / dt))
    band = capture_band(spec, dt)
    k, alpha = spec.k, spec.alpha

    def deriv(t, s):
        e = s[0]
        if e > 0.0:
            return (-k * e ** alpha,)
        if e < 0.0:
            return (k * (-e) ** alpha,)
        return (0.0,)

    values = np.empty(n + 1)
    values[0] = spec.e0
    e = float(spec.e0)
    settled = math.nan
    pinned = abs(e) < band
    if pinned:
        e = 0.0
        values[0] = 0.0
        settled = 0.0
    for i in range(n):
        if not pinned:
            e = rk4_step(deriv, (e,), i * dt, dt)[0]
            if abs(e) < band:
                e = 0.0
                pinned = True
                settled = (i + 1) * dt
        values[i + 1] = e

    return ReachingRun(
        times=dt * np.arange(n + 1), values=values, settled=settled, band=band
    )
