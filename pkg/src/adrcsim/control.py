"""Reference shaping, nonlinear error feedback and the assembled control loop.

The loop follows the standard active-disturbance-rejection layout: a
second-order tracking differentiator smooths the reference and supplies its
derivative, a nonlinear state-error feedback law turns the tracking errors
into a virtual control, and the observer's disturbance estimate is
subtracted from the input channel so the plant behaves like a bare chain of
integrators.

The differentiator and the feedback law are smooth saturating forms chosen
to consume exactly the benchmark parameter rosters (a, b, c, sigma) and
(k11, k12, k21, k22, mu1, mu2, alpha1, alpha2); see the README for their
defining equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .observers import ObserverGains, observer_update_fn
from .plant import PlantParams, sgn
from .simcore import saturate

__all__ = [
    "InlsefParams",
    "SondParams",
    "sond_deriv",
    "inlsef",
    "adrc_control",
    "ClosedLoop",
    "ObserverRig",
]

# state of the tracking differentiator: (tracked reference, tracked derivative)
TdState = tuple[float, float]


@dataclass(frozen=True)
class SondParams:
    """Second-order saturating differentiator parameters (a, b, c, sigma)."""

    a: float
    b: float
    c: float
    sigma: float

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.sigma) <= 0.0:
            raise ValueError("all differentiator parameters must be positive")

    @classmethod
    def tuned(cls) -> "SondParams":
        return cls(a=0.97893, b=5.58718, c=8.38639, sigma=26.5)


def sond_deriv(td: TdState, r: float, p: SondParams) -> TdState:
    """Tracking-differentiator dynamics.

    z1' = z2
    z2' = -sigma^2 * (a*tanh(b*(z1 - r)) + c*tanh(z2/sigma))

    Globally bounded restoring force; tracks steps without peaking and
    settles to (r, 0) for constant r.
    """
    z1, z2 = td
    dz2 = -p.sigma * p.sigma * (
        p.a * math.tanh(p.b * (z1 - r)) + p.c * math.tanh(z2 / p.sigma)
    )
    return (z2, dz2)


@dataclass(frozen=True)
class InlsefParams:
    """Gains of the two-channel nonlinear state-error feedback law."""

    k11: float
    k12: float
    k21: float
    k22: float
    mu1: float
    mu2: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        for name in ("k11", "k12", "k21", "k22", "mu1", "mu2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("alpha1", "alpha2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")

    @classmethod
    def nleso_tuning(cls) -> "InlsefParams":
        """Roster used alongside the nonlinear observer."""
        return cls(
            k11=1.95599, k12=1.22208, k21=0.50231, k22=3.2652,
            mu1=4.92537, mu2=3.74434, alpha1=0.693947, alpha2=0.770208,
        )

    @classmethod
    def leso_tuning(cls) -> "InlsefParams":
        """Roster used alongside the linear observer."""
        return cls(
            k11=1.76353, k12=0.719549, k21=0.762186, k22=3.04664,
            mu1=8.69763, mu2=2.35869, alpha1=0.688673, alpha2=0.644945,
        )


def inlsef(e1: float, e2: float, p: InlsefParams) -> float:
    """Nonlinear error feedback u0 = sum_i k_i(e_i) * |e_i|**alpha_i * sgn(e_i)
    with error-dependent gain k_i(e) = k_i1 + k_i2 / (1 + exp(mu_i * e^2)).

    Odd in (e1, e2) and zero at zero.
    """
    u = 0.0
    if e1 != 0.0:
        gain = p.k11 + p.k12 / (1.0 + math.exp(min(p.mu1 * e1 * e1, 700.0)))
        u += gain * abs(e1) ** p.alpha1 * sgn(e1)
    if e2 != 0.0:
        gain = p.k21 + p.k22 / (1.0 + math.exp(min(p.mu2 * e2 * e2, 700.0)))
        u += gain * abs(e2) ** p.alpha2 * sgn(e2)
    return u


def adrc_control(u0: float, xhat3: float, b: float) -> float:
    """Disturbance-cancelling control v = u0 - xhat3 / b (before saturation)."""
    if b == 0.0:
        raise ValueError("input gain b must be non-zero")
    return u0 - xhat3 / b


class ClosedLoop:
    """Full output-feedback loop around the physical motor.

    State vector: (omega, current, xhat1, xhat2, xhat3, z1, z2).

    The observer runs on the measured (gearbox-side, possibly noisy) output
    y_n = omega/N + n(t) using the nominal input gain b, and receives the
    same saturated voltage that drives the plant.  The feedback errors are
    formed from the differentiator outputs and the observer estimates, never
    from the raw measurement.  ``signals`` evaluates every named loop signal
    at a given state for logging, including exact ground-truth channels for
    the observer states (output-frame velocity, acceleration and
    generalized disturbance).
    """

    STATE_SIZE = 7

    def __init__(
        self,
        plant: PlantParams,
        b: float,
        observer_kind: str,
        inlsef_params: InlsefParams,
        sond_params: SondParams,
        reference: Callable[[float], float],
        external_torque: Callable[[float], float],
        *,
        observer_gains: ObserverGains | None = None,
        observer_betas: tuple[float, float, float] | None = None,
        fal_delta: float = 0.01,
        noise: Callable[[float], float] | None = None,
        limiter: tuple[float, float] = (-12.0, 12.0),
        td_bypass: bool = False,
    ):
        if limiter[0] >= limiter[1]:
            raise ValueError("limiter bounds must satisfy lo < hi")
        if b == 0.0:
            raise ValueError("input gain b must be non-zero")
        self.plant = plant
        self.b = float(b)
        self.kind = observer_kind
        self.inlsef_params = inlsef_params
        self.sond_params = sond_params
        self.reference = reference
        self.external_torque = external_torque
        self.noise = noise
        self.limiter = limiter
        self.td_bypass = td_bypass
        self._observer = observer_update_fn(
            observer_kind, gains=observer_gains, betas=observer_betas, delta=fal_delta
        )

    def initial_state(self, xhat0: tuple[float, float, float]) -> list[float]:
        """Plant at rest, observer at the given estimate, differentiator at zero."""
        return [0.0, 0.0, xhat0[0], xhat0[1], xhat0[2], 0.0, 0.0]

    def deriv(self, t: float, s) -> tuple:
        p = self.plant
        omega, cur, xh1, xh2, xh3, z1, z2 = s
        r = self.reference(t)

        if self.td_bypass:
            rh, rdh = r, 0.0
            dz1 = dz2 = 0.0
        else:
            rh, rdh = z1, z2
            dz1, dz2 = sond_deriv((z1, z2), r, self.sond_params)

        u0 = inlsef(rh - xh1, rdh - xh2, self.inlsef_params)
        v = saturate(adrc_control(u0, xh3, self.b), *self.limiter)

        TL = (self.external_torque(t) + p.Fc * sgn(omega)) / p.N
        domega = (p.Kt * cur - TL - p.beq * omega) / p.Jeq
        dcur = (-p.R * cur + v - p.Kb * omega) / p.L

        yn = omega / p.N
        if self.noise is not None:
            yn += self.noise(t)
        dxh1, dxh2, dxh3 = self._observer(yn - xh1, xh2, xh3, self.b * v)
        return (domega, dcur, dxh1, dxh2, dxh3, dz1, dz2)

    def signals(self, t: float, s) -> dict[str, float]:
        """All named loop signals at (t, state), for logging one trace row.

        Ground-truth channels are expressed in the measurement frame
        (gearbox side): x1 = omega/N, x2 = its derivative, and x3 is the
        generalized disturbance the observer's extended state should track,
        i.e. x2' - b*v reconstructed from the plant model (load-torque rate
        taken as zero, exact away from the isolated step/sign instants).
        """
        p = self.plant
        omega, cur, xh1, xh2, xh3, z1, z2 = s
        r = self.reference(t)
        rh, rdh = (r, 0.0) if self.td_bypass else (z1, z2)
        u0 = inlsef(rh - xh1, rdh - xh2, self.inlsef_params)
        v = saturate(adrc_control(u0, xh3, self.b), *self.limiter)

        Text = self.external_torque(t)
        TL = (Text + p.Fc * sgn(omega)) / p.N
        domega = (p.Kt * cur - TL - p.beq * omega) / p.Jeq
        dcur = (-p.R * cur + v - p.Kb * omega) / p.L
        ddomega = (p.Kt * dcur - p.beq * domega) / p.Jeq  # TL' = 0 a.e.

        y = omega / p.N
        yn = y + (self.noise(t) if self.noise is not None else 0.0)
        d = -(p.R / p.Kt) * TL  # TL' = 0 a.e.
        return {
            "x1": y,
            "x2": domega / p.N,
            "x3": ddomega / p.N - self.b * v,
            "xhat1": xh1,
            "xhat2": xh2,
            "xhat3": xh3,
            "u0": u0,
            "v": v,
            "y": y,
            "yn": yn,
            "r": r,
            "TL": TL,
            "d": d,
        }


class ObserverRig:
    """Observer-only wiring: the motor driven by a prescribed voltage, with an
    ESO watching the output.  No differentiator or feedback in the loop.

    State vector: (omega, current, xhat1, xhat2, xhat3).
    """

    STATE_SIZE = 5

    def __init__(
        self,
        plant: PlantParams,
        b: float,
        observer_kind: str,
        voltage: Callable[[float], float],
        external_torque: Callable[[float], float] = lambda t: 0.0,
        *,
        observer_gains: ObserverGains | None = None,
        observer_betas: tuple[float, float, float] | None = None,
        fal_delta: float = 0.01,
        noise: Callable[[float], float] | None = None,
    ):
        self.plant = plant
        self.b = float(b)
        self.voltage = voltage
        self.external_torque = external_torque
        self.noise = noise
        self._observer = observer_update_fn(
            observer_kind, gains=observer_gains, betas=observer_betas, delta=fal_delta
        )

    def initial_state(
        self, xhat0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ) -> list[float]:
        return [0.0, 0.0, xhat0[0], xhat0[1], xhat0[2]]

    def deriv(self, t: float, s) -> tuple:
        p = self.plant
        omega, cur, xh1, xh2, xh3 = s
        v = self.voltage(t)
        TL = (self.external_torque(t) + p.Fc * sgn(omega)) / p.N
        domega = (p.Kt * cur - TL - p.beq * omega) / p.Jeq
        dcur = (-p.R * cur + v - p.Kb * omega) / p.L
        yn = omega / p.N
        if self.noise is not None:
            yn += self.noise(t)
        dxh1, dxh2, dxh3 = self._observer(yn - xh1, xh2, xh3, self.b * v)
        return (domega, dcur, dxh1, dxh2, dxh3)

    def signals(self, t: float, s) -> dict[str, float]:
        p = self.plant
        omega, cur, xh1, xh2, xh3 = s
        v = self.voltage(t)
        Text = self.external_torque(t)
        TL = (Text + p.Fc * sgn(omega)) / p.N
        domega = (p.Kt * cur - TL - p.beq * omega) / p.Jeq
        dcur = (-p.R * cur + v - p.Kb * omega) / p.L
        ddomega = (p.Kt * dcur - p.beq * domega) / p.Jeq
        y = omega / p.N
        yn = y + (self.noise(t) if self.noise is not None else 0.0)
        return {
            "x1": y,
            "x2": domega / p.N,
            "x3": ddomega / p.N - self.b * v,
            "xhat1": xh1,
            "xhat2": xh2,
            "xhat3": xh3,
            "v": v,
            "y": y,
            "yn": yn,
            "TL": TL,
            "d": -(p.R / p.Kt) * TL,
        }
