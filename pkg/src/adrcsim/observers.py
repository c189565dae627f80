"""Linear and nonlinear extended state observers for relative degree rho.

An extended state observer (ESO) augments a chain-of-integrators model of
the plant with one extra state that absorbs everything the model does not
know -- internal dynamics and external disturbance lumped together -- and
estimates all rho+1 states from the measured output alone.

Two gain schedules are provided, both derived from binomial coefficients of
(s+1)**(rho+1) and a single bandwidth knob omega0:

* linear ESO:       beta_i = a_i * omega0**i, linear innovation
* nonlinear ESO:    beta_i = a_i * omega0**(i-1), innovation shaped by a
  saturating odd function with per-channel attenuation factors c_1 > c_2 >
  ... > c_{rho+1}

The nonlinear shaping keeps the large-initial-error transient ("peaking")
orders of magnitude smaller than the linear schedule at equal bandwidth;
``peaking_term`` quantifies the effect channel by channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .simcore import SimTrace

__all__ = [
    "ObserverGains",
    "EstimationErrors",
    "binomial_coeffs",
    "nleso_gains",
    "leso_gains",
    "fal",
    "nonlinear_gain",
    "nleso_deriv",
    "leso_deriv",
    "fal_eso_deriv",
    "observer_update_fn",
    "peaking_term",
    "estimation_errors",
]

#: innovation magnitudes are clamped here before the power functions so a
#: diverging run produces finite, sign-correct diagnostics instead of inf
INNOVATION_CLAMP = 1e6

#: exponents of the classic saturating-gain ESO variant (first channel linear)
FAL_EXPONENTS = (1.0, 0.5, 0.25)


def binomial_coeffs(rho: int) -> list[float]:
    """Coefficients a_1..a_{rho+1} making s**(rho+1) + a_1 s**rho + ... +
    a_{rho+1} equal (s+1)**(rho+1), i.e. the binomial row without the leading 1."""
    if rho < 1:
        raise ValueError("relative degree must be at least 1")
    if rho > 12:
        raise ValueError("relative degree beyond 12 rejected (factorial overflow)")
    n = rho + 1
    return [float(math.comb(n, i)) for i in range(1, n + 1)]


def nleso_gains(omega0: float, rho: int) -> list[float]:
    """Nonlinear-ESO schedule beta_i = a_i * omega0**(i-1)."""
    if omega0 <= 0.0:
        raise ValueError("omega0 must be positive")
    a = binomial_coeffs(rho)
    return [a_i * omega0 ** (i - 1) for i, a_i in enumerate(a, start=1)]


def leso_gains(omega0: float, rho: int) -> list[float]:
    """Linear-ESO schedule beta_i = a_i * omega0**i."""
    if omega0 <= 0.0:
        raise ValueError("omega0 must be positive")
    a = binomial_coeffs(rho)
    return [a_i * omega0 ** i for i, a_i in enumerate(a, start=1)]


@dataclass(frozen=True)
class ObserverGains:
    """Full parameter bundle of the nonlinear ESO.

    a and beta follow the schedules above; the attenuation factors c must be
    strictly decreasing; K_alpha/alpha shape the fractional-power branch of
    the innovation function and K_beta/beta_exp its superlinear branch.
    """

    omega0: float
    rho: int
    a: tuple[float, ...]
    beta: tuple[float, ...]
    c: tuple[float, ...]
    K_alpha: float
    alpha: float
    K_beta: float
    beta_exp: float

    def __post_init__(self):
        if self.omega0 <= 0.0:
            raise ValueError("omega0 must be positive")
        expected_a = tuple(binomial_coeffs(self.rho))
        if tuple(self.a) != expected_a:
            raise ValueError(f"a must equal the binomial row {expected_a}")
        if len(self.beta) != self.rho + 1 or len(self.c) != self.rho + 1:
            raise ValueError("beta and c must have rho + 1 entries")
        if any(ci <= cj for ci, cj in zip(self.c, self.c[1:])):
            raise ValueError("attenuation factors must be strictly decreasing")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if min(self.K_alpha, self.K_beta, self.beta_exp) <= 0.0:
            raise ValueError("K_alpha, K_beta and beta_exp must be positive")
        if min(self.c) <= 0.0:
            raise ValueError("attenuation factors must be positive")

    @classmethod
    def tuned(
        cls,
        omega0: float = 35.0,
        rho: int = 2,
        c: Sequence[float] = (0.5, 0.125, 0.0625),
        K_alpha: float = 0.99927,
        alpha: float = 0.301361,
        K_beta: float = 0.38,
        beta_exp: float = 0.305151,
    ) -> "ObserverGains":
        """Benchmark tuning used by the built-in scenarios."""
        return cls(
            omega0=float(omega0),
            rho=rho,
            a=tuple(binomial_coeffs(rho)),
            beta=tuple(nleso_gains(omega0, rho)),
            c=tuple(float(ci) for ci in c),
            K_alpha=K_alpha,
            alpha=alpha,
            K_beta=K_beta,
            beta_exp=beta_exp,
        )


def fal(e: float, alpha: float, delta: float) -> float:
    """Piecewise error shaping: linear inside |e| <= delta, fractional power
    |e|**alpha * sgn(e) outside.  Continuous at the breakpoint.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if abs(e) <= delta:
        return e / delta ** (1.0 - alpha)
    return abs(e) ** alpha * (1.0 if e > 0.0 else -1.0)


def nonlinear_gain(e: float, g: ObserverGains, i: int) -> float:
    """Saturating innovation function of channel i (1-based).

    c_i * (K_alpha*|s|**alpha * sgn(s) + K_beta*|s|**beta_exp * s) evaluated
    at s = omega0 * e.  Odd in e and zero at zero; |s| is clamped at 1e6.
    """
    if not 1 <= i <= g.rho + 1:
        raise ValueError(f"channel index {i} outside 1..{g.rho + 1}")
    s = g.omega0 * e
    if s > INNOVATION_CLAMP:
        s = INNOVATION_CLAMP
    elif s < -INNOVATION_CLAMP:
        s = -INNOVATION_CLAMP
    mag = abs(s)
    if mag == 0.0:
        return 0.0
    core = g.K_alpha * mag ** g.alpha * (1.0 if s > 0.0 else -1.0)
    core += g.K_beta * mag ** g.beta_exp * s
    return g.c[i - 1] * core


def nleso_deriv(
    xhat: Sequence[float], y: float, u: float, b: float, g: ObserverGains
) -> list[float]:
    """Nonlinear-ESO state derivative for measurement y and plant input u.

    xhat has rho+1 entries; the control feedthrough b*u enters the rho-th
    equation and the last state integrates pure innovation.
    """
    if b == 0.0:
        raise ValueError("input gain b must be non-zero")
    rho = g.rho
    if len(xhat) != rho + 1:
        raise ValueError(f"xhat must have {rho + 1} entries")
    e = y - xhat[0]
    out = []
    for i in range(rho):
        out.append(xhat[i + 1] + g.beta[i] * nonlinear_gain(e, g, i + 1))
    out[rho - 1] += b * u
    out.append(g.beta[rho] * nonlinear_gain(e, g, rho + 1))
    return out


def leso_deriv(
    xhat: Sequence[float], y: float, u: float, b: float, gains: Sequence[float]
) -> list[float]:
    """Linear-ESO state derivative: innovation beta_i * (y - xhat_1)."""
    if b == 0.0:
        raise ValueError("input gain b must be non-zero")
    rho = len(gains) - 1
    if len(xhat) != rho + 1:
        raise ValueError(f"xhat must have {rho + 1} entries")
    e = y - xhat[0]
    out = [xhat[i + 1] + gains[i] * e for i in range(rho)]
    out[rho - 1] += b * u
    out.append(gains[rho] * e)
    return out


def fal_eso_deriv(
    xhat: Sequence[float],
    y: float,
    u: float,
    b: float,
    gains: Sequence[float],
    delta: float,
    alphas: Sequence[float] = FAL_EXPONENTS,
) -> list[float]:
    """Classic saturating-gain ESO: channel i uses fal(e, alphas[i], delta).

    With the default exponents the first channel stays linear and the later
    channels respond sublinearly to large innovations.
    """
    if b == 0.0:
        raise ValueError("input gain b must be non-zero")
    rho = len(gains) - 1
    if len(xhat) != rho + 1 or len(alphas) != rho + 1:
        raise ValueError(f"xhat and alphas must have {rho + 1} entries")
    e = y - xhat[0]
    out = [xhat[i + 1] + gains[i] * fal(e, alphas[i], delta) for i in range(rho)]
    out[rho - 1] += b * u
    out.append(gains[rho] * fal(e, alphas[rho], delta))
    return out


def observer_update_fn(
    kind: str,
    *,
    gains: ObserverGains | None = None,
    betas: Sequence[float] | None = None,
    delta: float = 0.01,
) -> Callable[[float, float, float, float], tuple[float, float, float]]:
    """Specialized rho = 2 observer update for the simulation hot loop.

    Returns f(e, xhat2, xhat3, bu) -> (dxhat1, dxhat2, dxhat3) where e is
    the output innovation and bu the precomputed control feedthrough.  The
    returned closure agrees exactly with the corresponding *_deriv function.
    """
    if kind == "nleso":
        if gains is None or gains.rho != 2:
            raise ValueError("nleso update needs ObserverGains with rho = 2")
        w0 = gains.omega0
        Ka, al = gains.K_alpha, gains.alpha
        Kb, be = gains.K_beta, gains.beta_exp
        bc1 = gains.beta[0] * gains.c[0]
        bc2 = gains.beta[1] * gains.c[1]
        bc3 = gains.beta[2] * gains.c[2]

        def update(e, xh2, xh3, bu):
            s = w0 * e
            if s > INNOVATION_CLAMP:
                s = INNOVATION_CLAMP
            elif s < -INNOVATION_CLAMP:
                s = -INNOVATION_CLAMP
            if s == 0.0:
                m = 0.0
            elif s > 0.0:
                m = Ka * s ** al + Kb * s ** be * s
            else:
                m = -(Ka * (-s) ** al + Kb * (-s) ** be * (-s))
            return (xh2 + bc1 * m, xh3 + bu + bc2 * m, bc3 * m)

        return update

    if kind == "leso":
        if betas is None or len(betas) != 3:
            raise ValueError("leso update needs three gains")
        b1, b2, b3 = (float(x) for x in betas)

        def update(e, xh2, xh3, bu):
            return (xh2 + b1 * e, xh3 + bu + b2 * e, b3 * e)

        return update

    if kind == "fal":
        if betas is None or len(betas) != 3:
            raise ValueError("fal update needs three gains")
        b1, b2, b3 = (float(x) for x in betas)
        a2, a3 = FAL_EXPONENTS[1], FAL_EXPONENTS[2]

        def update(e, xh2, xh3, bu):
            return (
                xh2 + b1 * e,
                xh3 + bu + b2 * fal(e, a2, delta),
                b3 * fal(e, a3, delta),
            )

        return update

    raise ValueError(f"unknown observer kind {kind!r} (expected leso/nleso/fal)")


def peaking_term(
    omega0: float,
    i: int,
    g: ObserverGains,
    e0: float,
    linear: bool = False,
) -> float:
    """Bandwidth-driven magnification of an initial output error in channel i.

    Nonlinear variant: a_i * c_i * K_alpha * omega0**(alpha + i - 1) * |e0|**alpha
    (the dominant fractional-power contribution; the superlinear branch is
    neglected since K_beta is small).  With ``linear=True`` the linear-ESO
    counterpart a_i * omega0**i is returned instead.
    """
    if not 1 <= i <= g.rho + 1:
        raise ValueError(f"channel index {i} outside 1..{g.rho + 1}")
    a_i = g.a[i - 1]
    if linear:
        return a_i * omega0 ** i
    return a_i * g.c[i - 1] * g.K_alpha * omega0 ** (g.alpha + i - 1) * abs(e0) ** g.alpha


@dataclass
class EstimationErrors:
    """Per-channel observer error series e_i = x_i - xhat_i with summaries."""

    errors: dict[str, np.ndarray]
    max_abs: dict[str, float]
    final_abs: dict[str, float]
    settled_time: dict[str, float]  # first time |e| stays below the band; nan if never

    def __getitem__(self, name: str) -> np.ndarray:
        return self.errors[name]


def estimation_errors(trace: SimTrace, band_frac: float = 0.02) -> EstimationErrors:
    """Observer error channels from a trace holding x1..x3 and xhat1..xhat3.

    Ground-truth channels are logged by the scenario runner in the same
    measurement frame as the observer states, so the errors converge to
    zero for a well-tuned observer.  The per-channel band is ``band_frac``
    times the channel's own peak error.
    """
    errors: dict[str, np.ndarray] = {}
    max_abs: dict[str, float] = {}
    final_abs: dict[str, float] = {}
    settled: dict[str, float] = {}
    t = trace.times
    for i in (1, 2, 3):
        truth, est = f"x{i}", f"xhat{i}"
        for name in (truth, est):
            if name not in trace:
                raise KeyError(f"trace is missing channel {name!r}")
        e = trace[truth] - trace[est]
        key = f"e{i}"
        errors[key] = e
        peak = float(np.max(np.abs(e)))
        max_abs[key] = peak
        final_abs[key] = float(abs(e[-1]))
        band = band_frac * peak
        outside = np.nonzero(np.abs(e) > band)[0]
        if len(outside) == 0:
            settled[key] = float(t[0])
        elif outside[-1] == len(t) - 1:
            settled[key] = math.nan
        else:
            settled[key] = float(t[outside[-1] + 1])
    return EstimationErrors(
        errors=errors, max_abs=max_abs, final_abs=final_abs, settled_time=settled
    )
