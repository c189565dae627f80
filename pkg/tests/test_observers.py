import math

import numpy as np
import pytest

from adrcsim.observers import (
    ObserverGains,
    binomial_coeffs,
    estimation_errors,
    fal,
    fal_eso_deriv,
    leso_deriv,
    leso_gains,
    nleso_deriv,
    nleso_gains,
    nonlinear_gain,
    observer_update_fn,
    peaking_term,
)
from adrcsim.simcore import SimTrace

B_NOMINAL = 5.265350255246739  # Kt / (Jeq * L) of the benchmark motor


# --- gain schedules -----------------------------------------------------------

def test_binomial_coeffs():
    assert binomial_coeffs(2) == [3.0, 3.0, 1.0]
    assert binomial_coeffs(1) == [2.0, 1.0]
    assert binomial_coeffs(3) == [4.0, 6.0, 4.0, 1.0]
    with pytest.raises(ValueError):
        binomial_coeffs(0)
    with pytest.raises(ValueError):
        binomial_coeffs(13)


def test_nleso_gains():
    assert nleso_gains(35.0, 2) == [3.0, 105.0, 1225.0]
    assert nleso_gains(1.0, 2) == [3.0, 3.0, 1.0]
    assert nleso_gains(10.0, 2) == [3.0, 30.0, 100.0]


def test_leso_gains():
    assert leso_gains(35.0, 2) == [105.0, 3675.0, 42875.0]
    assert leso_gains(1.0, 2) == [3.0, 3.0, 1.0]
    assert leso_gains(2.0, 2) == [6.0, 12.0, 8.0]


def test_gain_schedule_identity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        w0 = rng.uniform(0.5, 80.0)
        rho = int(rng.integers(1, 5))
        nl = nleso_gains(w0, rho)
        li = leso_gains(w0, rho)
        assert all(a * w0 == pytest.approx(b, rel=1e-12) for a, b in zip(nl, li))


def test_gains_bundle_validation():
    g = ObserverGains.tuned()
    assert g.beta == (3.0, 105.0, 1225.0)
    with pytest.raises(ValueError):
        ObserverGains.tuned(c=(0.5, 0.5, 0.25))  # not strictly decreasing
    with pytest.raises(ValueError):
        ObserverGains.tuned(alpha=1.5)
    with pytest.raises(ValueError):
        ObserverGains.tuned(omega0=-1.0)


# --- fal ------------------------------------------------------------------------

def test_fal_values():
    assert fal(0.0, 0.5, 0.1) == 0.0
    # continuous at the breakpoint: both branches give the same value
    inner = fal(0.1, 0.5, 0.1)
    assert inner == pytest.approx(0.31622776601683794, rel=1e-12)
    assert inner == pytest.approx(abs(0.1) ** 0.5, rel=1e-12)
    assert fal(1.0, 0.5, 0.1) == 1.0


def test_fal_continuity_at_breakpoint():
    h = 1e-8
    assert abs(fal(0.1 + h, 0.5, 0.1) - fal(0.1 - h, 0.5, 0.1)) < 1e-6


def test_fal_monotone():
    xs = np.linspace(-2.0, 2.0, 1000)
    ys = [fal(x, 0.5, 0.1) for x in xs]
    assert all(b > a for a, b in zip(ys, ys[1:]))


def test_fal_validation():
    with pytest.raises(ValueError):
        fal(0.1, 0.5, 0.0)
    with pytest.raises(ValueError):
        fal(0.1, 1.5, 0.1)


# --- saturating innovation function ------------------------------------------------

def test_nonlinear_gain_zero():
    g = ObserverGains.tuned()
    for i in (1, 2, 3):
        assert nonlinear_gain(0.0, g, i) == 0.0


def test_nonlinear_gain_value():
    # direct substitution of the benchmark roster at e = 1, channel 1
    g = ObserverGains.tuned()
    expected = 0.5 * (0.99927 * 35.0**0.301361 + 0.38 * 35.0**0.305151 * 35.0)
    assert expected == pytest.approx(21.137390824297455, rel=1e-12)
    assert nonlinear_gain(1.0, g, 1) == pytest.approx(expected, rel=1e-12)


def test_nonlinear_gain_odd():
    rng = np.random.default_rng(11)
    for _ in range(30):
        g = ObserverGains.tuned(
            omega0=rng.uniform(1.0, 60.0),
            K_alpha=rng.uniform(0.1, 2.0),
            alpha=rng.uniform(0.05, 0.95),
            K_beta=rng.uniform(0.1, 2.0),
            beta_exp=rng.uniform(0.05, 0.95),
        )
        e = rng.uniform(-3.0, 3.0)
        i = int(rng.integers(1, 4))
        assert nonlinear_gain(-e, g, i) == pytest.approx(
            -nonlinear_gain(e, g, i), rel=1e-12, abs=1e-15
        )
    assert nonlinear_gain(-0.37, ObserverGains.tuned(), 2) == pytest.approx(
        -nonlinear_gain(0.37, ObserverGains.tuned(), 2), rel=1e-12
    )


def test_nonlinear_gain_clamps_huge_innovation():
    g = ObserverGains.tuned()
    v = nonlinear_gain(1e12, g, 3)
    assert math.isfinite(v)
    assert v == nonlinear_gain(1e9, g, 3)  # both beyond the clamp


def test_nonlinear_gain_channel_bounds():
    with pytest.raises(ValueError):
        nonlinear_gain(0.1, ObserverGains.tuned(), 4)


# --- observer derivatives -----------------------------------------------------------

def test_nleso_coasts_on_zero_innovation():
    g = ObserverGains.tuned()
    out = nleso_deriv([0.4, -0.7, 2.0], 0.4, 0.0, B_NOMINAL, g)
    assert out == [-0.7, 2.0, 0.0]


def test_nleso_control_feedthrough():
    g = ObserverGains.tuned()
    out = nleso_deriv([0.0, 0.0, 0.0], 0.0, 1.0, B_NOMINAL, g)
    assert out == [0.0, B_NOMINAL, 0.0]


def test_nleso_innovation_composition():
    g = ObserverGains.tuned()
    out = nleso_deriv([0.5, 0.0, 0.0], 0.0, 0.0, B_NOMINAL, g)
    assert out[0] == pytest.approx(g.beta[0] * nonlinear_gain(-0.5, g, 1), rel=1e-12)
    assert out[1] == pytest.approx(g.beta[1] * nonlinear_gain(-0.5, g, 2), rel=1e-12)
    assert out[2] == pytest.approx(g.beta[2] * nonlinear_gain(-0.5, g, 3), rel=1e-12)


def test_leso_unit_innovation_returns_gains():
    assert leso_deriv([0.0, 0.0, 0.0], 1.0, 0.0, B_NOMINAL, leso_gains(35.0, 2)) == [
        105.0, 3675.0, 42875.0]
    assert leso_deriv([0.0, 0.0, 0.0], 1.0, 0.0, B_NOMINAL, leso_gains(1.0, 2)) == [
        3.0, 3.0, 1.0]


def test_leso_coasts_on_zero_innovation():
    out = leso_deriv([0.4, -0.7, 2.0], 0.4, 0.0, B_NOMINAL, leso_gains(35.0, 2))
    assert out == [-0.7, 2.0, 0.0]


def test_coasting_equivalence():
    # with zero innovation the two observers are identical, control included
    g = ObserverGains.tuned()
    betas = leso_gains(35.0, 2)
    xhat = [1.3, -0.2, 0.9]
    a = nleso_deriv(xhat, 1.3, 0.7, B_NOMINAL, g)
    b = leso_deriv(xhat, 1.3, 0.7, B_NOMINAL, betas)
    assert a == b


def test_higher_relative_degree():
    g = ObserverGains.tuned(rho=3, c=(0.5, 0.25, 0.125, 0.0625))
    assert g.beta == (4.0, 6.0 * 35.0, 4.0 * 35.0**2, 35.0**3)
    out = nleso_deriv([0.4, 1.0, -2.0, 0.3], 0.4, 0.0, 1.0, g)
    assert out == [1.0, -2.0, 0.3, 0.0]
    out = leso_deriv([0.0, 0.0, 0.0, 0.0], 1.0, 0.0, 1.0, leso_gains(2.0, 3))
    assert out == [8.0, 24.0, 32.0, 16.0]


def test_fal_eso_deriv():
    betas = leso_gains(35.0, 2)
    out = fal_eso_deriv([0.4, -0.7, 2.0], 0.4, 0.0, B_NOMINAL, betas, delta=0.01)
    assert out == [-0.7, 2.0, 0.0]
    # first channel stays linear in the innovation
    out = fal_eso_deriv([0.0, 0.0, 0.0], 0.5, 0.0, B_NOMINAL, betas, delta=0.01)
    assert out[0] == pytest.approx(betas[0] * 0.5, rel=1e-12)


def test_deriv_validation():
    with pytest.raises(ValueError):
        nleso_deriv([0.0, 0.0, 0.0], 0.0, 0.0, 0.0, ObserverGains.tuned())
    with pytest.raises(ValueError):
        leso_deriv([0.0, 0.0], 0.0, 0.0, 1.0, leso_gains(35.0, 2))


def test_update_closures_match_reference_derivs():
    g = ObserverGains.tuned()
    betas = tuple(leso_gains(35.0, 2))
    rng = np.random.default_rng(21)
    un = observer_update_fn("nleso", gains=g)
    ul = observer_update_fn("leso", betas=betas)
    uf = observer_update_fn("fal", betas=betas, delta=0.01)
    for _ in range(50):
        xhat = list(rng.uniform(-2.0, 2.0, 3))
        y = rng.uniform(-2.0, 2.0)
        u = rng.uniform(-12.0, 12.0)
        e = y - xhat[0]
        bu = B_NOMINAL * u
        assert list(un(e, xhat[1], xhat[2], bu)) == pytest.approx(
            nleso_deriv(xhat, y, u, B_NOMINAL, g), rel=1e-12)
        assert list(ul(e, xhat[1], xhat[2], bu)) == pytest.approx(
            leso_deriv(xhat, y, u, B_NOMINAL, betas), rel=1e-12)
        assert list(uf(e, xhat[1], xhat[2], bu)) == pytest.approx(
            fal_eso_deriv(xhat, y, u, B_NOMINAL, betas, delta=0.01), rel=1e-12)
    with pytest.raises(ValueError):
        observer_update_fn("kalman")


# --- peaking arithmetic ----------------------------------------------------------------

def test_peaking_term_formula():
    # a3 * c3 * K_alpha * w0**(alpha+2) * |e0|**alpha at the roster values
    g = ObserverGains.tuned(alpha=0.3)
    got = peaking_term(35.0, 3, g, 1.0)
    assert got == pytest.approx(1.0 * (1 / 16) * 0.99927 * 35.0**2.3, rel=1e-12)
    assert got == pytest.approx(222.28971478061928, rel=1e-12)


def test_peaking_term_linear_variant():
    g = ObserverGains.tuned()
    assert peaking_term(35.0, 3, g, 1.0, linear=True) == 42875.0


def test_peaking_term_unit_bandwidth():
    g = ObserverGains.tuned(omega0=1.0, c=(1.0, 0.5, 0.25), K_alpha=1.0)
    assert peaking_term(1.0, 1, g, 1.0) == pytest.approx(3.0, rel=1e-12)  # a1


def test_peaking_dominance():
    # the nonlinear schedule magnifies an initial error orders of magnitude less
    g = ObserverGains.tuned()
    nl = peaking_term(35.0, 3, g, 0.5)
    li = peaking_term(35.0, 3, g, 0.5, linear=True)
    assert li / nl > 100.0


# --- error bookkeeping -------------------------------------------------------------------

def _toy_trace():
    n = 101
    t = 0.01 * np.arange(n)
    x = np.sin(t)
    return SimTrace(times=t, channels={
        "x1": x, "x2": np.cos(t), "x3": np.zeros(n),
        "xhat1": x, "xhat2": np.cos(t), "xhat3": np.zeros(n),
    })


def test_estimation_errors_perfect_observer():
    ee = estimation_errors(_toy_trace())
    for key in ("e1", "e2", "e3"):
        assert ee.max_abs[key] == 0.0
        assert ee.final_abs[key] == 0.0
        assert ee.settled_time[key] == 0.0


def test_estimation_errors_initial_offset():
    tr = _toy_trace()
    tr.channels["xhat1"] = tr["xhat1"] + np.exp(-10.0 * tr.times) * 0.5
    ee = estimation_errors(tr)
    assert ee["e1"][0] == pytest.approx(-0.5)
    assert ee.max_abs["e1"] == pytest.approx(0.5)


def test_estimation_errors_missing_channel():
    tr = _toy_trace()
    del tr.channels["xhat3"]
    with pytest.raises(KeyError):
        estimation_errors(tr)
