"""adrcsim: disturbance-rejection control benchmarks on a PMDC motor.

A numpy-based toolkit that puts a linear and a nonlinear extended state
observer side by side inside the same output-feedback control loop around a
geared permanent-magnet DC motor with Coulomb friction, and measures
peaking, disturbance rejection, noise sensitivity and robustness to
parameter changes with ITAE/ISU-style metrics.
"""

from .control import (
    ClosedLoop,
    InlsefParams,
    ObserverRig,
    SondParams,
    adrc_control,
    inlsef,
    sond_deriv,
)
from .finitetime import (
    FiniteTimeSpec,
    ReachingRun,
    lyapunov_settling_bound,
    settling_time,
    simulate_reaching_law,
)
from .metrics import (
    ChannelPeaks,
    Comparison,
    MetricsReport,
    compare,
    isu,
    itae,
    peak_metrics,
    settling_into_band,
)
from .observers import (
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
    peaking_term,
)
from .plant import (
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
from .scenarios import (
    ObserverSpec,
    ReferenceSpec,
    ScenarioConfig,
    ScenarioError,
    TorqueStepSpec,
    builtin_scenarios,
    get_scenario,
    parse_scenario_file,
    read_trace_csv,
    run_observer_rig,
    run_scenario,
    write_report,
    write_trace_csv,
)
from .simcore import (
    DerivativeError,
    DivergenceError,
    GaussianHold,
    NoiseSpec,
    SimTrace,
    TimeGrid,
    gaussian_noise,
    integrate,
    rk4_step,
    saturate,
    step_signal,
)

__version__ = "0.1.0"
