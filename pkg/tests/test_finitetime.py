import math

import numpy as np
import pytest

from adrcsim.finitetime import (
    FiniteTimeSpec,
    capture_band,
    lyapunov_settling_bound,
    settling_time,
    simulate_reaching_law,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        FiniteTimeSpec(k=0.0, alpha=0.5, e0=1.0)
    with pytest.raises(ValueError):
        FiniteTimeSpec(k=1.0, alpha=1.0, e0=1.0)
    with pytest.raises(ValueError):
        FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0, c=1.0)  # bound needs c > 1
    with pytest.raises(ValueError):
        FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0, V0=-0.1)


def test_settling_time_closed_form():
    assert settling_time(FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0)) == pytest.approx(2.0)
    assert settling_time(FiniteTimeSpec(k=1.0, alpha=0.5, e0=0.0)) == 0.0
    assert settling_time(FiniteTimeSpec(k=2.0, alpha=0.5, e0=4.0)) == pytest.approx(2.0)


def test_settling_time_monotone():
    rng = np.random.default_rng(4)
    for _ in range(30):
        k = rng.uniform(0.5, 5.0)
        alpha = rng.uniform(0.2, 0.8)
        e_small, e_big = sorted(rng.uniform(0.1, 10.0, 2))
        t_small = settling_time(FiniteTimeSpec(k=k, alpha=alpha, e0=e_small))
        t_big = settling_time(FiniteTimeSpec(k=k, alpha=alpha, e0=e_big))
        assert t_big >= t_small
        t_fast = settling_time(FiniteTimeSpec(k=k * 2.0, alpha=alpha, e0=e_big))
        assert t_fast < t_big


def test_lyapunov_bound_values():
    assert lyapunov_settling_bound(
        FiniteTimeSpec(k=1.0, alpha=0.5, e0=0.0, c=2.0, V0=0.0)) == 0.0
    # explicit effective exponent
    assert lyapunov_settling_bound(
        FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0, c=2.0, V0=1.0), alpha_eff=0.75
    ) == pytest.approx(2.0)
    # default exponent (1 + alpha) / 2 with V0 = e0**2 / 2
    assert lyapunov_settling_bound(
        FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0, c=2.0, V0=0.5)
    ) == pytest.approx(1.681792830507429, rel=1e-12)


def test_reaching_law_hits_closed_form():
    spec = FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0)
    run = simulate_reaching_law(spec, dt=1e-5)
    assert math.isfinite(run.settled)
    assert run.settled == pytest.approx(2.0, rel=0.03)
    assert run.settled <= 2.0 * 1.03
    # pinned exactly to zero afterwards
    assert run.values[-1] == 0.0


def test_reaching_law_mirror_symmetry():
    a = simulate_reaching_law(FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0), dt=1e-4)
    b = simulate_reaching_law(FiniteTimeSpec(k=1.0, alpha=0.5, e0=-1.0), dt=1e-4)
    assert a.settled == b.settled
    assert np.array_equal(a.values, -b.values)


def test_reaching_law_near_linear_exponent():
    spec = FiniteTimeSpec(k=1.0, alpha=0.99, e0=1.0)
    t_pred = settling_time(spec)
    run = simulate_reaching_law(spec, dt=1e-4 * t_pred)
    assert run.settled == pytest.approx(t_pred, rel=0.05)


def test_reaching_law_randomized_grid_never_late():
    # empirical settling never exceeds the closed form by more than 3%
    rng = np.random.default_rng(7)
    for _ in range(12):
        spec = FiniteTimeSpec(
            k=rng.uniform(0.5, 5.0),
            alpha=rng.uniform(0.2, 0.8),
            e0=float(rng.uniform(0.1, 10.0) * rng.choice([-1.0, 1.0])),
        )
        t_pred = settling_time(spec)
        run = simulate_reaching_law(spec, dt=1e-4 * t_pred)
        assert math.isfinite(run.settled)
        assert run.settled <= 1.03 * t_pred


def test_reaching_law_zero_start():
    run = simulate_reaching_law(FiniteTimeSpec(k=1.0, alpha=0.5, e0=0.0), dt=1e-4)
    assert run.settled == 0.0
    assert np.all(run.values == 0.0)


def test_capture_band_is_one_step_radius():
    spec = FiniteTimeSpec(k=1.0, alpha=0.5, e0=1.0)
    band = capture_band(spec, 1e-5)
    assert band == pytest.approx((1e-5) ** 2, rel=1e-12)
    # a single explicit Euler step from the band edge reaches the origin
    assert band - 1e-5 * spec.k * band**spec.alpha <= 0.0


def test_peaking_run_settles_under_lyapunov_style_bound_report(bench):
    # closed-loop peaking run: the first time |e1| drops below 1e-3 is
    # finite; the decay bound from V0 = e1(0)**2 / 2 is an upper estimate
    # only (c is illustrative), so both are reported without asserting
    # their ordering
    import adrcsim as a

    trace, _ = bench("peaking-nleso")
    e1 = trace["x1"] - trace["xhat1"]
    below = np.nonzero(np.abs(e1) < 1e-3)[0]
    assert len(below) > 0
    t_first = float(trace.times[below[0]])
    spec = FiniteTimeSpec(k=1.0, alpha=0.301361, e0=e1[0], c=2.0, V0=e1[0] ** 2 / 2.0)
    bound = lyapunov_settling_bound(spec)
    print(f"peaking |e1|<1e-3 at t={t_first:.4f}s; decay bound (c=2): {bound:.4f}s")
    assert math.isfinite(t_first)
