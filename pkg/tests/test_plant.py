import math
from dataclasses import replace

import numpy as np
import pytest

from adrcsim.plant import (
    PlantParams,
    UncertaintySpec,
    apply_uncertainty,
    equivalent_input_disturbance,
    load_torque,
    matched_example_deriv,
    mismatched_example_deriv,
    pmdc_brunovsky_deriv,
    pmdc_cross_model_residual,
    pmdc_physical_deriv,
    simulate_mismatched_example,
    verify_brunovsky_transform,
)
from adrcsim.simcore import SimTrace, TimeGrid, integrate

NOMINAL = PlantParams.nominal()


def test_params_validation():
    with pytest.raises(ValueError):
        replace(NOMINAL, Jeq=0.0)
    with pytest.raises(ValueError):
        replace(NOMINAL, Fc=-0.1)
    replace(NOMINAL, Fc=0.0)  # frictionless variant is allowed


# --- physical model ------------------------------------------------------------

def test_physical_deriv_equilibrium():
    assert pmdc_physical_deriv((0.0, 0.0), 0.0, 0.0, NOMINAL) == (0.0, 0.0)


def test_physical_deriv_unit_current():
    dw, di = pmdc_physical_deriv((0.0, 1.0), 0.0, 0.0, NOMINAL)
    assert dw == pytest.approx(4.317587209302325, rel=1e-12)   # Kt/Jeq
    assert di == pytest.approx(-0.18987804878048783, rel=1e-12)  # -R/L


def test_physical_deriv_unit_speed():
    dw, di = pmdc_physical_deriv((1.0, 0.0), 0.0, 0.0, NOMINAL)
    assert dw == pytest.approx(-1.4251453488372092, rel=1e-12)  # -beq/Jeq
    assert di == pytest.approx(-1.4451219512195124, rel=1e-12)  # -Kb/L


# --- matched model --------------------------------------------------------------

def test_brunovsky_deriv_values():
    assert pmdc_brunovsky_deriv((0.0, 0.0), 0.0, 0.0, NOMINAL) == (0.0, 0.0)
    d1 = pmdc_brunovsky_deriv((1.0, 0.0), 0.0, 0.0, NOMINAL)
    assert d1[0] == 0.0
    assert d1[1] == pytest.approx(-6.510043870533183, rel=1e-12)
    d2 = pmdc_brunovsky_deriv((0.0, 1.0), 0.0, 0.0, NOMINAL)
    assert d2[0] == 1.0
    assert d2[1] == pytest.approx(-1.615023397617697, rel=1e-12)


def test_input_gain():
    assert NOMINAL.input_gain == pytest.approx(5.265350255246739, rel=1e-12)


# --- load torque -----------------------------------------------------------------

def test_load_torque_values():
    assert load_torque(0.0, 0.0, NOMINAL) == 0.0  # sgn(0) = 0
    assert load_torque(1.0, 2.0, NOMINAL) == pytest.approx(1.0)
    frictionless = replace(NOMINAL, Fc=0.0)
    assert load_torque(1.0, 2.0, frictionless) == pytest.approx(2.0 / 3.0)


def test_load_torque_odd_in_speed():
    rng = np.random.default_rng(5)
    for w in rng.uniform(-10, 10, 25):
        assert load_torque(-w, 0.0, NOMINAL) == -load_torque(w, 0.0, NOMINAL)


# --- equivalent input disturbance ------------------------------------------------

def test_equivalent_input_disturbance():
    assert equivalent_input_disturbance(0.0, 0.0, NOMINAL) == 0.0
    assert equivalent_input_disturbance(1.0, 0.0, NOMINAL) == pytest.approx(
        -0.13103854569937723, rel=1e-12
    )
    assert equivalent_input_disturbance(0.0, 1.0, NOMINAL) == pytest.approx(
        -0.6901195085002525, rel=1e-12
    )


# --- parameter uncertainty --------------------------------------------------------

def test_uncertainty_identity():
    assert apply_uncertainty(NOMINAL, UncertaintySpec()) == NOMINAL


def test_uncertainty_values():
    u = UncertaintySpec(delta_J=0.2, delta_b=0.4, delta_R=0.5)
    p = apply_uncertainty(NOMINAL, u)
    assert p.Jeq == pytest.approx(0.22016)
    assert p.beq == pytest.approx(0.3922 * 0.6)
    assert p.R == pytest.approx(0.07785)
    assert (p.L, p.Kt, p.Kb, p.N, p.Fc) == (
        NOMINAL.L, NOMINAL.Kt, NOMINAL.Kb, NOMINAL.N, NOMINAL.Fc)


def test_uncertainty_validation():
    with pytest.raises(ValueError):
        UncertaintySpec(delta_J=1.0)  # would allow a zero inertia
    with pytest.raises(ValueError):
        UncertaintySpec(sign_R=2.0)


# --- worked mismatched example -----------------------------------------------------

def test_mismatched_example_values():
    assert mismatched_example_deriv((0.0, -1.0), 0.0, 0.0) == (0.0, 1.0)
    assert mismatched_example_deriv((0.0, 0.0), 0.0, 0.0) == (1.0, 0.0)
    assert mismatched_example_deriv((0.0, 0.0), 0.0, 1.0) == (2.0, 0.0)
    with pytest.raises(OverflowError):
        mismatched_example_deriv((25.0, 0.0), 0.0, 0.0)


def test_matched_example_values():
    assert matched_example_deriv((0.0, 0.0), 0.0, 0.0, 0.0) == (0.0, 1.0)
    assert matched_example_deriv((0.0, 1.0), 0.0, 0.0, 0.0) == (1.0, 1.0)
    assert matched_example_deriv((0.0, 0.0), -1.0, 0.0, 0.0) == (0.0, 0.0)


def test_transform_consistency_under_smooth_disturbance():
    # both coordinate systems, same input, consistent starts -> same output.
    # the open-loop example escapes in finite time, so start below the origin
    # to keep a full second inside the guard.
    grid = TimeGrid(0.0, 1.0, 1e-4)
    x0 = (-1.0, 0.0)

    def mismatched(t, s):
        return mismatched_example_deriv((s[0], s[1]), 0.0, math.sin(t))

    def matched(t, s):
        return matched_example_deriv((s[0], s[1]), 0.0, math.sin(t), math.cos(t))

    tr1 = integrate(mismatched, grid, list(x0))
    z2_0 = x0[1] + math.exp(x0[0]) + math.sin(0.0)
    tr2 = integrate(matched, grid, [x0[0], z2_0])
    assert np.max(np.abs(tr1["x1"] - tr2["x1"])) < 1e-4


# --- residual verification ----------------------------------------------------------

def test_verify_transform_zero_disturbance():
    trace = simulate_mismatched_example(TimeGrid(0.0, 1.0, 1e-4))
    res = verify_brunovsky_transform(trace, tolerance=1e-3)
    assert res.passed
    assert res.velocity < 1e-3 and res.dynamics < 1e-3


def test_verify_transform_sine_disturbance():
    trace = simulate_mismatched_example(
        TimeGrid(0.0, 1.0, 1e-4), x0=(-1.0, 0.0), d_fn=math.sin, d_dot_fn=math.cos
    )
    res = verify_brunovsky_transform(trace, tolerance=1e-3)
    assert res.passed


def test_verify_transform_equilibrium_is_exact():
    # x1 = 0, x2 = -1, u = -1, d = 0 is a rest point of the example system
    n = 11
    times = 1e-2 * np.arange(n)
    trace = SimTrace(times=times, channels={
        "x1": np.zeros(n), "x2": np.full(n, -1.0),
        "u": np.full(n, -1.0), "d": np.zeros(n), "d_dot": np.zeros(n),
    })
    res = verify_brunovsky_transform(trace, tolerance=1e-12)
    assert res.velocity == 0.0 and res.dynamics == 0.0


def test_verify_transform_input_checks():
    short = simulate_mismatched_example(TimeGrid(0.0, 3e-4, 1e-4))
    with pytest.raises(ValueError):
        verify_brunovsky_transform(short, 1e-3)
    trace = simulate_mismatched_example(TimeGrid(0.0, 0.01, 1e-3))
    del trace.channels["d_dot"]
    with pytest.raises(KeyError):
        verify_brunovsky_transform(trace, 1e-3)


# --- motor cross-model check ----------------------------------------------------------

def test_pmdc_cross_model_consistency():
    frictionless = replace(NOMINAL, Fc=0.0)
    mismatch = pmdc_cross_model_residual(
        frictionless,
        TimeGrid(0.0, 1.0, 1e-4),
        v_fn=lambda t: 1.0,
        Text_fn=math.sin,
        Text_dot_fn=math.cos,
    )
    assert mismatch < 1e-4


def test_pmdc_cross_model_requires_frictionless():
    with pytest.raises(ValueError):
        pmdc_cross_model_residual(
            NOMINAL, TimeGrid(0.0, 0.1, 1e-3),
            v_fn=lambda t: 0.0, Text_fn=lambda t: 0.0, Text_dot_fn=lambda t: 0.0,
        )
