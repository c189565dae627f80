"""Deterministic fixed-step integration, test signals and actuator limits.

Everything downstream (motor models, observers, the assembled control loop)
is integrated with the classical 4th-order Runge-Kutta scheme at a fixed
step.  The default step of 1e-4 s is small enough to keep the stiff
high-gain observer dynamics (gains up to omega0**3 = 42875 at omega0 = 35)
stable without an implicit solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TimeGrid",
    "SimTrace",
    "NoiseSpec",
    "GaussianHold",
    "DerivativeError",
    "DivergenceError",
    "rk4_step",
    "integrate",
    "gaussian_noise",
    "saturate",
    "step_signal",
]

#: abort threshold for integration: any state beyond this is treated as blow-up
DIVERGENCE_GUARD = 1e9


class DerivativeError(RuntimeError):
    """A derivative evaluation produced a non-finite value."""

    def __init__(self, channel: int, t: float):
        super().__init__(
            f"non-finite derivative in state channel {channel} at t = {t:.9g}"
        )
        self.channel = channel
        self.t = t


class DivergenceError(RuntimeError):
    """Integration aborted because a state left the sanity bound.

    Carries the last valid time and, when available, the truncated trace
    accumulated up to that point.
    """

    def __init__(self, t_last: float, trace: "SimTrace | None" = None):
        super().__init__(f"state diverged; last valid time t = {t_last:.9g}")
        self.t_last = t_last
        self.trace = trace


@dataclass(frozen=True)
class TimeGrid:
    """Uniform simulation grid [t0, tf] with step dt.

    dt must divide the horizon exactly (to 1e-9 relative tolerance) so that
    tf itself lands on a grid point.
    """

    t0: float
    tf: float
    dt: float

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.tf <= self.t0:
            raise ValueError(f"tf ({self.tf}) must exceed t0 ({self.t0})")
        steps = (self.tf - self.t0) / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(
                f"dt = {self.dt} does not divide the horizon [{self.t0}, {self.tf}]"
            )

    @property
    def n_steps(self) -> int:
        return round((self.tf - self.t0) / self.dt)

    def times(self) -> np.ndarray:
        """Grid points including both endpoints (n_steps + 1 values)."""
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass
class SimTrace:
    """Time-indexed record of named scalar channels on a uniform grid."""

    times: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) < 1:
            raise ValueError("times must be a non-empty 1-d array")
        if len(self.times) > 1:
            steps = np.diff(self.times)
            if not np.all(steps > 0):
                raise ValueError("times must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
                raise ValueError("times must be uniformly spaced")
        for name, values in self.channels.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.times.shape:
                raise ValueError(
                    f"channel {name!r} has {values.shape[0] if values.ndim else 0} "
                    f"samples, expected {len(self.times)}"
                )
            self.channels[name] = values

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.channels[name]
        except KeyError:
            raise KeyError(
                f"trace has no channel {name!r}; available: {sorted(self.channels)}"
            ) from None

    def __contains__(self, name: str) -> bool:
        return name in self.channels

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded zero-order-hold Gaussian measurement noise.

    A fresh zero-mean draw with the given variance is made every
    ``sample_period`` seconds and held constant in between, mimicking a
    sensor sampled slower than the integration step.
    """

    seed: int
    variance: float
    sample_period: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be non-negative")
        if self.sample_period <= 0.0:
            raise ValueError("sample_period must be positive")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


class GaussianHold:
    """Realization of a :class:`NoiseSpec` as a pure function of time.

    Draw k covers t in [t0 + k*T, t0 + (k+1)*T).  The draw sequence is a
    prefix-stable function of the seed: extending the horizon regenerates
    from scratch, which yields bit-identical values for any earlier time.
    """

    def __init__(self, spec: NoiseSpec, t0: float = 0.0):
        self.spec = spec
        self.t0 = t0
        self._draws = np.empty(0)

    def _ensure(self, k: int) -> None:
        if k >= len(self._draws):
            n = max(1024, 2 * (k + 1))
            rng = np.random.default_rng(self.spec.seed)
            self._draws = rng.normal(0.0, self.spec.std, n)

    def value(self, t: float) -> float:
        if self.spec.variance == 0.0:
            return 0.0
        k = int((t - self.t0) / self.spec.sample_period + 1e-9)
        if k < 0:
            k = 0
        self._ensure(k)
        return float(self._draws[k])

    __call__ = value


@lru_cache(maxsize=64)
def _noise_source(spec: NoiseSpec) -> GaussianHold:
    return GaussianHold(spec)


def gaussian_noise(spec: NoiseSpec, t: float) -> float:
    """Sample the held noise realization of ``spec`` at time ``t``.

    Reproducible: the value depends only on the spec (incl. seed) and on
    which hold interval ``t`` falls in.
    """
    return _noise_source(spec).value(t)


def saturate(u: float, lo: float, hi: float) -> float:
    """Clamp an actuator command to [lo, hi]."""
    if lo >= hi:
        raise ValueError(f"saturation bounds must satisfy lo < hi, got [{lo}, {hi}]")
    if u > hi:
        return hi
    if u < lo:
        return lo
    return float(u)


def step_signal(amplitude: float, t_on: float, t: float) -> float:
    """0 before t_on, ``amplitude`` from t_on onwards."""
    return amplitude if t >= t_on else 0.0


Deriv = Callable[[float, Sequence[float]], Sequence[float]]


def _check_finite(k: Sequence[float], t: float) -> None:
    for j, v in enumerate(k):
        if not math.isfinite(v):
            raise DerivativeError(j, t)


def rk4_step(deriv: Deriv, state: Sequence[float], t: float, dt: float) -> list[float]:
    """Advance ``state`` by one classical Runge-Kutta step of size ``dt``.

    ``deriv(t, state)`` must return one slope per state.  Local error is
    O(dt**5) for smooth derivatives.  Raises :class:`DerivativeError` if any
    stage produces a non-finite slope.
    """
    k1 = deriv(t, state)
    if not all(map(math.isfinite, k1)):
        _check_finite(k1, t)
    h2 = 0.5 * dt
    th = t + h2
    s = [x + h2 * k for x, k in zip(state, k1)]
    k2 = deriv(th, s)
    if not all(map(math.isfinite, k2)):
        _check_finite(k2, th)
    s = [x + h2 * k for x, k in zip(state, k2)]
    k3 = deriv(th, s)
    if not all(map(math.isfinite, k3)):
        _check_finite(k3, th)
    s = [x + dt * k for x, k in zip(state, k3)]
    k4 = deriv(t + dt, s)
    if not all(map(math.isfinite, k4)):
        _check_finite(k4, t + dt)
    w = dt / 6.0
    return [
        x + w * (a + 2.0 * (b + c) + d)
        for x, a, b, c, d in zip(state, k1, k2, k3, k4)
    ]


def integrate(
    deriv: Deriv,
    grid: TimeGrid,
    initial: Sequence[float],
    channel_names: Sequence[str] | None = None,
    guard: float = DIVERGENCE_GUARD,
) -> SimTrace:
    """March ``deriv`` across ``grid`` from ``initial`` and record every point.

    Returns a trace with one row per grid point (t0 and tf included).
    Channels default to "x1".."xn".  If any state magnitude exceeds
    ``guard`` the run aborts with :class:`DivergenceError` carrying the
    truncated trace and the last valid time.
    """
    n = len(initial)
    if channel_names is None:
        channel_names = [f"x{i + 1}" for i in range(n)]
    elif len(channel_names) != n:
        raise ValueError("channel_names length must match state dimension")

    times = grid.times()
    data = np.empty((len(times), n))
    data[0] = initial
    state = [float(x) for x in initial]
    t0, dt = grid.t0, grid.dt
    for i in range(grid.n_steps):
        t = t0 + i * dt
        state = rk4_step(deriv, state, t, dt)
        if any((x > guard or x < -guard) for x in state):
            partial = SimTrace(
                times=times[: i + 1],
                channels={
                    name: data[: i + 1, j].copy()
                    for j, name in enumerate(channel_names)
                },
            )
            raise DivergenceError(t_last=t, trace=partial)
        data[i + 1] = state

    return SimTrace(
        times=times,
        channels={name: data[:, j].copy() for j, name in enumerate(channel_names)},
    )
