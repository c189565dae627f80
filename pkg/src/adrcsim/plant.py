"""Permanent-magnet DC motor models and the matched-coordinates transformation.

The motor is modelled twice:

* in physical coordinates (angular velocity, armature current), where the
  load torque -- external torque plus Coulomb friction -- enters the
  mechanical equation and is therefore *mismatched* with the voltage input;
* in matched (integral-chain) coordinates (velocity, acceleration), where
  the same load appears as an equivalent disturbance on the input channel.

The physical model is the ground truth for every benchmark run; the matched
form is what the observers and controller are designed against.  A worked
second-order nonlinear system is included to exercise the general
mismatched-to-matched change of coordinates numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .simcore import SimTrace, TimeGrid, integrate

__all__ = [
    "PlantParams",
    "UncertaintySpec",
    "TransformResiduals",
    "sgn",
    "pmdc_physical_deriv",
    "pmdc_brunovsky_deriv",
    "load_torque",
    "equivalent_input_disturbance",
    "apply_uncertainty",
    "mismatched_example_deriv",
    "matched_example_deriv",
    "simulate_mismatched_example",
    "verify_brunovsky_transform",
    "pmdc_cross_model_residual",
]

# state pairs; kept as plain tuples for speed inside integration loops
PhysicalState = tuple[float, float]  # (omega [rad/s], current [A])
BrunovskyState = tuple[float, float]  # (velocity [rad/s], acceleration [rad/s^2])


def sgn(x: float) -> float:
    """Sign with sgn(0) = 0 (Filippov-consistent convention)."""
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the geared PMDC motor.

    R    armature resistance [ohm]
    L    armature inductance [H]
    Kt   torque constant [N*m/A]
    Kb   back-EMF constant [V/(rad/s)]
    N    gearbox ratio [-]
    Jeq  equivalent inertia at the motor shaft [kg*m^2]
    beq  equivalent viscous damping [N*m/(rad/s)]
    Fc   Coulomb friction torque [N*m]
    """

    R: float
    L: float
    Kt: float
    Kb: float
    N: float
    Jeq: float
    beq: float
    Fc: float

    def __post_init__(self):
        for name in ("R", "L", "Kt", "Kb", "N", "Jeq", "beq"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"plant parameter {name} must be positive")
        # Fc = 0 is allowed: the frictionless variant is needed whenever the
        # load torque must be differentiable (matched-model comparisons).
        if self.Fc < 0.0:
            raise ValueError("plant parameter Fc must be non-negative")

    @classmethod
    def nominal(cls) -> "PlantParams":
        """Benchmark motor constants used throughout the built-in scenarios."""
        return cls(
            R=0.1557, L=0.82, Kt=1.1882, Kb=1.185,
            N=3.0, Jeq=0.2752, beq=0.3922, Fc=1.0,
        )

    @property
    def input_gain(self) -> float:
        """Voltage-to-acceleration gain Kt / (Jeq * L) of the matched model."""
        return self.Kt / (self.Jeq * self.L)

    @property
    def matched_coeffs(self) -> tuple[float, float]:
        """(a0, a1) of accel' = -a1*accel - a0*velocity + gain*(v + d)."""
        a0 = (self.beq * self.R + self.Kt * self.Kb) / (self.Jeq * self.L)
        a1 = self.R / self.L + self.beq / self.Jeq
        return a0, a1


@dataclass(frozen=True)
class UncertaintySpec:
    """Relative perturbations of Jeq, beq and R.

    Each parameter is scaled by (1 + delta * sign) with delta in [0, 1) and
    sign in [-1, 1], so delta is the magnitude of the allowed relative
    change and sign selects where in that range the true value sits.
    """

    delta_J: float = 0.0
    delta_b: float = 0.0
    delta_R: float = 0.0
    sign_J: float = -1.0
    sign_b: float = -1.0
    sign_R: float = -1.0

    def __post_init__(self):
        for name in ("delta_J", "delta_b", "delta_R"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {v}")
        for name in ("sign_J", "sign_b", "sign_R"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1], got {v}")

    @property
    def is_identity(self) -> bool:
        return self.delta_J == self.delta_b == self.delta_R == 0.0


def apply_uncertainty(p: PlantParams, u: UncertaintySpec) -> PlantParams:
    """Perturb Jeq, beq, R multiplicatively; all other constants unchanged."""
    return replace(
        p,
        Jeq=p.Jeq * (1.0 + u.delta_J * u.sign_J),
        beq=p.beq * (1.0 + u.delta_b * u.sign_b),
        R=p.R * (1.0 + u.delta_R * u.sign_R),
    )


def load_torque(omega: float, Text: float, p: PlantParams) -> float:
    """Load torque at the motor shaft: gearbox-referred external torque plus
    Coulomb friction opposing the rotation."""
    return (Text + p.Fc * sgn(omega)) / p.N


def pmdc_physical_deriv(
    state: PhysicalState, v: float, TL: float, p: PlantParams
) -> PhysicalState:
    """Right-hand side of the physical motor model.

    omega' = (Kt*i - TL - beq*omega) / Jeq      (torque balance)
    i'     = (-R*i + v - Kb*omega) / L          (armature circuit)
    """
    omega, cur = state
    domega = (p.Kt * cur - TL - p.beq * omega) / p.Jeq
    dcur = (-p.R * cur + v - p.Kb * omega) / p.L
    return (domega, dcur)


def pmdc_brunovsky_deriv(
    state: BrunovskyState, v: float, d: float, p: PlantParams
) -> BrunovskyState:
    """Right-hand side of the matched (velocity, acceleration) model, with the
    load already folded into the equivalent input disturbance d."""
    x1, x2 = state
    a0, a1 = p.matched_coeffs
    return (x2, -a1 * x2 - a0 * x1 + p.input_gain * (v + d))


def equivalent_input_disturbance(TL: float, TL_dot: float, p: PlantParams) -> float:
    """Voltage on the input channel equivalent to the load torque TL.

    Logging / ground-truth use only; never fed to the observers.
    """
    return -(p.L / p.Kt) * TL_dot - (p.R / p.Kt) * TL


# ---------------------------------------------------------------------------
# Worked second-order system with a mismatched disturbance.  The disturbance
# d enters the first state equation; defining the new second coordinate as
# the first state's derivative moves everything onto the input channel.
# ---------------------------------------------------------------------------

_EXP_GUARD = 20.0  # |x1| bound keeping exp(x1) comfortably representable


def mismatched_example_deriv(
    state: tuple[float, float], u: float, d: float
) -> tuple[float, float]:
    """x1' = x2 + exp(x1) + d;  x2' = -2*x1 - x2 + u."""
    x1, x2 = state
    if abs(x1) > _EXP_GUARD:
        raise OverflowError(f"|x1| = {abs(x1):.3g} exceeds exp-guard {_EXP_GUARD}")
    return (x2 + math.exp(x1) + d, -2.0 * x1 - x2 + u)


def matched_example_deriv(
    state: tuple[float, float], u: float, d: float, d_dot: float
) -> tuple[float, float]:
    """Same system after the change of coordinates z1 = x1, z2 = x1'.

    Differentiating z2 = x2 + exp(x1) + d and eliminating x2 gives
    z2' = f(z) + u + dn with f(z) = -2*z1 - z2 + exp(z1) + z2*exp(z1) and
    the matched disturbance dn = d + d'.  (The -x2 term contributes +d on
    elimination, which cancels the exp(z1)*d produced by the chain rule.)
    """
    z1, z2 = state
    if abs(z1) > _EXP_GUARD:
        raise OverflowError(f"|z1| = {abs(z1):.3g} exceeds exp-guard {_EXP_GUARD}")
    e = math.exp(z1)
    f_new = -2.0 * z1 - z2 + e + z2 * e
    d_new = d + d_dot
    return (z2, f_new + (u + d_new))


def simulate_mismatched_example(
    grid: TimeGrid,
    x0: tuple[float, float] = (0.0, 0.0),
    u_fn: Callable[[float], float] = lambda t: 0.0,
    d_fn: Callable[[float], float] = lambda t: 0.0,
    d_dot_fn: Callable[[float], float] = lambda t: 0.0,
) -> SimTrace:
    """Integrate the mismatched example and log the inputs next to the states.

    The resulting trace carries channels x1, x2, u, d, d_dot and is the
    expected input of :func:`verify_brunovsky_transform`.
    """

    def deriv(t, s):
        return mismatched_example_deriv((s[0], s[1]), u_fn(t), d_fn(t))

    trace = integrate(deriv, grid, x0, channel_names=["x1", "x2"])
    t = trace.times
    trace.channels["u"] = np.array([u_fn(ti) for ti in t])
    trace.channels["d"] = np.array([d_fn(ti) for ti in t])
    trace.channels["d_dot"] = np.array([d_dot_fn(ti) for ti in t])
    return trace


@dataclass(frozen=True)
class TransformResiduals:
    """Grid-max residuals of the matched-coordinates consistency check."""

    velocity: float  # |central-diff(x1) - (x2 + exp(x1) + d)|
    dynamics: float  # second-equation residual in the new coordinates
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.velocity < self.tolerance and self.dynamics < self.tolerance


def verify_brunovsky_transform(trace: SimTrace, tolerance: float) -> TransformResiduals:
    """Check numerically that the mismatched example satisfies the matched form.

    The trace must come from :func:`simulate_mismatched_example` (channels
    x1, x2, u, d, d_dot).  Two residuals are evaluated on interior grid
    points via central differences: the transformed second coordinate must
    equal x1's derivative, and its own derivative must equal the matched
    dynamics.  Both must stay below ``tolerance``.
    """
    if len(trace) < 5:
        raise ValueError("trace too short for central differences (need >= 5 points)")
    for name in ("x1", "x2", "u", "d", "d_dot"):
        if name not in trace:
            raise KeyError(f"trace is missing required channel {name!r}")

    t = trace.times
    dt = trace.dt
    x1 = trace["x1"]
    x2 = trace["x2"]
    u = trace["u"]
    d = trace["d"]
    d_dot = trace["d_dot"]

    z2 = x2 + np.exp(x1) + d  # transform definition of the new coordinate

    x1_rate = (x1[2:] - x1[:-2]) / (2.0 * dt)
    res_velocity = np.max(np.abs(x1_rate - z2[1:-1]))

    z2_rate = (z2[2:] - z2[:-2]) / (2.0 * dt)
    ez = np.exp(x1[1:-1])
    f_new = -2.0 * x1[1:-1] - z2[1:-1] + ez + z2[1:-1] * ez
    d_new = d[1:-1] + d_dot[1:-1]
    res_dynamics = np.max(np.abs(z2_rate - (f_new + u[1:-1] + d_new)))

    return TransformResiduals(
        velocity=float(res_velocity),
        dynamics=float(res_dynamics),
        tolerance=tolerance,
    )


def pmdc_cross_model_residual(
    p: PlantParams,
    grid: TimeGrid,
    v_fn: Callable[[float], float],
    Text_fn: Callable[[float], float],
    Text_dot_fn: Callable[[float], float],
    omega0: float = 0.0,
    current0: float = 0.0,
) -> float:
    """Max |omega| mismatch between the physical and matched motor models.

    Requires a frictionless motor (Fc would make the load torque's
    derivative impulsive) and a smooth external torque with known
    derivative.  Both models are integrated from consistent initial
    conditions; the returned value is the grid-max of the velocity
    difference.
    """
    if p.Fc > 1e-12:
        # Coulomb friction is discontinuous in omega; the matched model's
        # equivalent disturbance needs a differentiable load torque.
        raise ValueError("cross-model check requires Fc = 0 (smooth load torque)")

    def phys_deriv(t, s):
        TL = Text_fn(t) / p.N
        return pmdc_physical_deriv((s[0], s[1]), v_fn(t), TL, p)

    def brun_deriv(t, s):
        TL = Text_fn(t) / p.N
        TL_dot = Text_dot_fn(t) / p.N
        d = equivalent_input_disturbance(TL, TL_dot, p)
        return pmdc_brunovsky_deriv((s[0], s[1]), v_fn(t), d, p)

    phys = integrate(phys_deriv, grid, [omega0, current0], ["omega", "current"])

    TL0 = Text_fn(grid.t0) / p.N
    accel0 = (p.Kt * current0 - TL0 - p.beq * omega0) / p.Jeq
    brun = integrate(brun_deriv, grid, [omega0, accel0], ["x1", "x2"])

    return float(np.max(np.abs(phys["omega"] - brun["x1"])))
