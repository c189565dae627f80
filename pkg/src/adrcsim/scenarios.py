"""Declarative scenario configs, the built-in benchmark suite, and run plumbing.

A scenario bundles everything one experiment needs: motor constants and
their perturbation, observer kind and tuning, controller rosters, reference
and disturbance steps, measurement noise, grid and initial estimates.  Runs
are deterministic for a fixed config (including seed).

Built-in families (each available with the linear and the nonlinear
observer, e.g. "peaking-nleso"):

  peaking      step reference, observer started 0.5 off the true output
  disturbance  2 N*m external torque step at t = 5 s
  noise        measurement noise, variance 36e-6, held at 1 kHz
  uncertainty  inertia -20%, damping -40%, resistance -50%
  nominal      clean baseline, exact initial estimates

The first four keep the 0.5 initial estimate offset, matching a benchmark
sequence in which every experiment starts from the same mismatched
observer; "nominal" zeroes it.  They also run with the reference shaping
bypassed (the error feedback sees the raw step) so that the measured
orderings isolate the observers: with the smooth differentiator in the
loop, both observers look alike and the linear one's characteristic
low-frequency wandering never gets excited.  "nominal" runs the full
assembly including the differentiator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .control import ClosedLoop, InlsefParams, ObserverRig, SondParams
from .metrics import MetricsReport, itae, isu, peak_metrics, settling_into_band
from .observers import ObserverGains, leso_gains
from .plant import PlantParams, UncertaintySpec, apply_uncertainty
from .simcore import (
    DerivativeError,
    DIVERGENCE_GUARD,
    GaussianHold,
    NoiseSpec,
    SimTrace,
    TimeGrid,
    rk4_step,
    step_signal,
)

__all__ = [
    "ReferenceSpec",
    "TorqueStepSpec",
    "ObserverSpec",
    "ControllerSpec",
    "InitialSpec",
    "LimiterSpec",
    "ScenarioConfig",
    "ScenarioError",
    "builtin_scenarios",
    "get_scenario",
    "run_scenario",
    "run_observer_rig",
    "parse_scenario_file",
    "write_trace_csv",
    "read_trace_csv",
    "report_to_text",
    "report_to_flat_dict",
    "write_report",
    "load_report",
    "TRACE_COLUMNS",
]

#: CSV column order; "t" plus the thirteen logged loop channels
TRACE_COLUMNS = (
    "t", "x1", "x2", "x3", "xhat1", "xhat2", "xhat3",
    "u0", "v", "y", "yn", "r", "TL", "d",
)

OBSERVER_KINDS = ("leso", "nleso", "fal")

DEFAULT_SEED = 1234


class ScenarioError(ValueError):
    """Invalid scenario description (bad key, bad value, broken invariant)."""


@dataclass(frozen=True)
class ReferenceSpec:
    amplitude: float = 1.0  # rad/s at the gearbox output
    t_on: float = 0.0


@dataclass(frozen=True)
class TorqueStepSpec:
    amplitude: float = 0.0  # N*m, applied after the gearbox
    t_on: float = 5.0


@dataclass(frozen=True)
class ObserverSpec:
    kind: str = "nleso"
    omega0: float = 35.0
    c: tuple[float, float, float] = (0.5, 0.125, 0.0625)
    K_alpha: float = 0.99927
    alpha: float = 0.301361
    K_beta: float = 0.38
    beta_exp: float = 0.305151
    fal_delta: float = 0.01

    def __post_init__(self):
        if self.kind not in OBSERVER_KINDS:
            raise ScenarioError(
                f"observer kind must be one of {OBSERVER_KINDS}, got {self.kind!r}"
            )
        if self.omega0 <= 0.0:
            raise ScenarioError("observer omega0 must be positive")

    def gains(self) -> ObserverGains | None:
        if self.kind != "nleso":
            return None
        return ObserverGains.tuned(
            omega0=self.omega0, c=self.c, K_alpha=self.K_alpha,
            alpha=self.alpha, K_beta=self.K_beta, beta_exp=self.beta_exp,
        )

    def betas(self) -> tuple[float, float, float] | None:
        if self.kind == "nleso":
            return None
        return tuple(leso_gains(self.omega0, 2))


@dataclass(frozen=True)
class ControllerSpec:
    inlsef: InlsefParams
    sond: SondParams
    td_bypass: bool = False

    @classmethod
    def tuned_for(cls, observer_kind: str, td_bypass: bool = False) -> "ControllerSpec":
        """Controller roster matched to the observer it runs beside."""
        if observer_kind == "nleso":
            gains = InlsefParams.nleso_tuning()
        else:
            gains = InlsefParams.leso_tuning()
        return cls(inlsef=gains, sond=SondParams.tuned(), td_bypass=td_bypass)


@dataclass(frozen=True)
class InitialSpec:
    """Initial observer estimates; the plant always starts at rest."""

    xhat1: float = 0.0
    xhat2: float = 0.0
    xhat3: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.xhat1, self.xhat2, self.xhat3)


@dataclass(frozen=True)
class LimiterSpec:
    lo: float = -12.0
    hi: float = 12.0

    def __post_init__(self):
        if self.lo >= self.hi:
            raise ScenarioError("limiter must satisfy lo < hi")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    plant: PlantParams = field(default_factory=PlantParams.nominal)
    uncertainty: UncertaintySpec = field(default_factory=UncertaintySpec)
    observer: ObserverSpec = field(default_factory=ObserverSpec)
    controller: ControllerSpec = field(
        default_factory=lambda: ControllerSpec.tuned_for("nleso")
    )
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    disturbance: TorqueStepSpec = field(default_factory=TorqueStepSpec)
    noise: NoiseSpec | None = None
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(0.0, 10.0, 1e-4))
    initial: InitialSpec = field(default_factory=InitialSpec)
    limiter: LimiterSpec = field(default_factory=LimiterSpec)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.name:
            raise ScenarioError("scenario name must be non-empty")
        if self.noise is not None:
            ratio = self.noise.sample_period / self.grid.dt
            if self.noise.sample_period < self.grid.dt or abs(
                ratio - round(ratio)
            ) > 1e-6 * max(1.0, ratio):
                raise ScenarioError(
                    "noise sample_period must be an integer multiple of grid.dt"
                )

    @property
    def true_plant(self) -> PlantParams:
        """Plant actually simulated (nominal constants with perturbation applied)."""
        return apply_uncertainty(self.plant, self.uncertainty)

    @property
    def b_nominal(self) -> float:
        """Input gain the observer and controller assume (always nominal)."""
        return self.plant.input_gain


# ---------------------------------------------------------------------------
# built-in registry
# ---------------------------------------------------------------------------

_FAMILY_BLURBS = {
    "peaking": "step reference with a 0.5 rad/s initial estimate offset",
    "disturbance": "2 N*m torque step at t = 5 s",
    "noise": "Gaussian measurement noise, variance 36e-6, held at 1 kHz",
    "uncertainty": "Jeq -20%, beq -40%, R -50% on the true plant",
    "nominal": "clean baseline: no offset, no disturbance, no noise",
}

#: observer-estimate offset shared by the four benchmark experiments
_BENCH_XHAT1_OFFSET = 0.5


def make_scenario(
    family: str,
    kind: str,
    dt: float = 1e-4,
    seed: int = DEFAULT_SEED,
    omega0: float = 35.0,
) -> ScenarioConfig:
    if family not in _FAMILY_BLURBS:
        raise ScenarioError(
            f"unknown scenario family {family!r}; expected one of {sorted(_FAMILY_BLURBS)}"
        )
    if kind not in OBSERVER_KINDS:
        raise ScenarioError(f"unknown observer kind {kind!r}")
    noise = None
    disturbance = TorqueStepSpec(amplitude=0.0)
    uncertainty = UncertaintySpec()
    initial = InitialSpec(xhat1=_BENCH_XHAT1_OFFSET)
    td_bypass = True  # isolate the observers from the reference-shaping form
    if family == "disturbance":
        disturbance = TorqueStepSpec(amplitude=2.0, t_on=5.0)
    elif family == "noise":
        noise = NoiseSpec(seed=seed, variance=36e-6, sample_period=1e-3)
    elif family == "uncertainty":
        uncertainty = UncertaintySpec(
            delta_J=0.2, delta_b=0.4, delta_R=0.5,
            sign_J=-1.0, sign_b=-1.0, sign_R=-1.0,
        )
    elif family == "nominal":
        initial = InitialSpec()
        td_bypass = False
    return ScenarioConfig(
        name=f"{family}-{kind}",
        observer=ObserverSpec(kind=kind, omega0=omega0),
        controller=ControllerSpec.tuned_for(kind, td_bypass=td_bypass),
        disturbance=disturbance,
        uncertainty=uncertainty,
        noise=noise,
        grid=TimeGrid(0.0, 10.0, dt),
        initial=initial,
        seed=seed,
    )


def builtin_scenarios() -> dict[str, str]:
    """Names and one-line descriptions of the built-in suite."""
    out = {}
    for family, blurb in _FAMILY_BLURBS.items():
        for kind in ("leso", "nleso"):
            out[f"{family}-{kind}"] = f"{blurb} [{kind}]"
    return out


def get_scenario(name: str, dt: float = 1e-4, seed: int = DEFAULT_SEED) -> ScenarioConfig:
    """Look up a built-in scenario by its registry name (family-kind)."""
    family, sep, kind = name.rpartition("-")
    if not sep or family not in _FAMILY_BLURBS or kind not in OBSERVER_KINDS:
        raise ScenarioError(
            f"unknown scenario {name!r}; available: {', '.join(builtin_scenarios())}"
        )
    return make_scenario(family, kind, dt=dt, seed=seed)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def _march(
    deriv: Callable,
    signals: Callable,
    grid: TimeGrid,
    initial: list[float],
    channels: tuple[str, ...],
) -> tuple[SimTrace, bool]:
    """Fixed-step march with per-grid-point signal logging.

    Returns the trace and a diverged flag; on divergence the trace is
    truncated at the last valid point.
    """
    n = grid.n_steps
    t0, dt = grid.t0, grid.dt
    data = {name: np.empty(n + 1) for name in channels}
    state = initial
    diverged = False
    rows = 0
    for i in range(n + 1):
        t = t0 + i * dt
        sig = signals(t, state)
        for name in channels:
            data[name][i] = sig[name]
        rows = i + 1
        if i == n:
            break
        try:
            state = rk4_step(deriv, state, t, dt)
        except DerivativeError:
            diverged = True
            break
        if any((x > DIVERGENCE_GUARD or x < -DIVERGENCE_GUARD) for x in state):
            diverged = True
            break
    times = grid.times()[:rows]
    trace = SimTrace(
        times=times, channels={name: data[name][:rows].copy() for name in channels}
    )
    return trace, diverged


_LOOP_CHANNELS = tuple(c for c in TRACE_COLUMNS if c != "t")


def run_scenario(config: ScenarioConfig) -> tuple[SimTrace, MetricsReport]:
    """Simulate one scenario and summarize it.

    The trace carries the thirteen loop channels of :data:`TRACE_COLUMNS`
    plus an in-memory "v_raw" channel, the control signal before the
    limiter (equal to u0 - xhat3/b, so it is reconstructible from a saved
    CSV).  The report holds ITAE (reference vs. clean output), ISU (energy
    of the pre-limiter control signal, the quantity the loop actually
    commands), per-channel peaks and the output's entry into the 2% band
    around the reference.  Divergence truncates the trace and flags the
    report.
    """
    noise_fn = GaussianHold(config.noise, t0=config.grid.t0) if config.noise else None
    ref = config.reference
    dist = config.disturbance
    loop = ClosedLoop(
        plant=config.true_plant,
        b=config.b_nominal,
        observer_kind=config.observer.kind,
        inlsef_params=config.controller.inlsef,
        sond_params=config.controller.sond,
        reference=lambda t: step_signal(ref.amplitude, ref.t_on, t),
        external_torque=lambda t: step_signal(dist.amplitude, dist.t_on, t),
        observer_gains=config.observer.gains(),
        observer_betas=config.observer.betas(),
        fal_delta=config.observer.fal_delta,
        noise=noise_fn,
        limiter=(config.limiter.lo, config.limiter.hi),
        td_bypass=config.controller.td_bypass,
    )
    trace, diverged = _march(
        loop.deriv,
        loop.signals,
        config.grid,
        loop.initial_state(config.initial.as_tuple()),
        _LOOP_CHANNELS,
    )
    trace.channels["v_raw"] = trace["u0"] - trace["xhat3"] / config.b_nominal
    peaks = peak_metrics(
        trace, ["y", "v", "u0", "xhat1", "xhat2", "xhat3", "x1", "x2", "x3"]
    )
    band = 0.02 * abs(ref.amplitude) if ref.amplitude != 0.0 else 0.02
    settling = {
        "y": settling_into_band(trace.times, trace["y"], ref.amplitude, band)
    }
    report = MetricsReport(
        scenario=config.name,
        observer=config.observer.kind,
        omega0=config.observer.omega0,
        itae=itae(trace),
        isu=isu(trace, "v_raw"),
        peaks=peaks,
        settling=settling,
        diverged=diverged,
        reference_amplitude=ref.amplitude,
        reference_t_on=ref.t_on,
        disturbance_amplitude=dist.amplitude,
        disturbance_t_on=dist.t_on,
        noise_variance=config.noise.variance if config.noise else 0.0,
        seed=config.seed,
    )
    return trace, report


_RIG_CHANNELS = (
    "x1", "x2", "x3", "xhat1", "xhat2", "xhat3", "v", "y", "yn", "TL", "d",
)


def run_observer_rig(
    plant: PlantParams,
    observer: ObserverSpec,
    voltage: Callable[[float], float],
    grid: TimeGrid,
    *,
    b: float | None = None,
    noise: NoiseSpec | None = None,
    xhat0: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> tuple[SimTrace, bool]:
    """Observer-only run: motor under a prescribed voltage, ESO watching.

    Used to validate estimation independently of any controller.
    """
    rig = ObserverRig(
        plant=plant,
        b=plant.input_gain if b is None else b,
        observer_kind=observer.kind,
        voltage=voltage,
        observer_gains=observer.gains(),
        observer_betas=observer.betas(),
        fal_delta=observer.fal_delta,
        noise=GaussianHold(noise, t0=grid.t0) if noise else None,
    )
    return _march(rig.deriv, rig.signals, grid, rig.initial_state(xhat0), _RIG_CHANNELS)


# ---------------------------------------------------------------------------
# scenario files: flat "key = value" text with dotted keys
# ---------------------------------------------------------------------------


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ScenarioError(f"expected a boolean, got {s!r}")


def _parse_kind(s: str) -> str:
    if s not in OBSERVER_KINDS:
        raise ScenarioError(f"observer.kind must be one of {OBSERVER_KINDS}, got {s!r}")
    return s


# key -> (section, field, converter); sections are assembled after parsing
_SCENARIO_KEYS: dict[str, tuple[str, str, Callable[[str], object]]] = {
    "name": ("top", "name", str),
    "seed": ("top", "seed", int),
    "grid.t0": ("grid", "t0", float),
    "grid.tf": ("grid", "tf", float),
    "grid.dt": ("grid", "dt", float),
    "plant.R": ("plant", "R", float),
    "plant.L": ("plant", "L", float),
    "plant.Kt": ("plant", "Kt", float),
    "plant.Kb": ("plant", "Kb", float),
    "plant.N": ("plant", "N", float),
    "plant.Jeq": ("plant", "Jeq", float),
    "plant.beq": ("plant", "beq", float),
    "plant.Fc": ("plant", "Fc", float),
    "uncertainty.delta_J": ("uncertainty", "delta_J", float),
    "uncertainty.delta_b": ("uncertainty", "delta_b", float),
    "uncertainty.delta_R": ("uncertainty", "delta_R", float),
    "uncertainty.sign_J": ("uncertainty", "sign_J", float),
    "uncertainty.sign_b": ("uncertainty", "sign_b", float),
    "uncertainty.sign_R": ("uncertainty", "sign_R", float),
    "observer.kind": ("observer", "kind", _parse_kind),
    "observer.omega0": ("observer", "omega0", float),
    "observer.c1": ("observer", "c1", float),
    "observer.c2": ("observer", "c2", float),
    "observer.c3": ("observer", "c3", float),
    "observer.K_alpha": ("observer", "K_alpha", float),
    "observer.alpha": ("observer", "alpha", float),
    "observer.K_beta": ("observer", "K_beta", float),
    "observer.beta_exp": ("observer", "beta_exp", float),
    "observer.fal_delta": ("observer", "fal_delta", float),
    "controller.k11": ("inlsef", "k11", float),
    "controller.k12": ("inlsef", "k12", float),
    "controller.k21": ("inlsef", "k21", float),
    "controller.k22": ("inlsef", "k22", float),
    "controller.mu1": ("inlsef", "mu1", float),
    "controller.mu2": ("inlsef", "mu2", float),
    "controller.alpha1": ("inlsef", "alpha1", float),
    "controller.alpha2": ("inlsef", "alpha2", float),
    "controller.td_bypass": ("controller", "td_bypass", _parse_bool),
    "sond.a": ("sond", "a", float),
    "sond.b": ("sond", "b", float),
    "sond.c": ("sond", "c", float),
    "sond.sigma": ("sond", "sigma", float),
    "reference.amplitude": ("reference", "amplitude", float),
    "reference.t_on": ("reference", "t_on", float),
    "disturbance.amplitude": ("disturbance", "amplitude", float),
    "disturbance.t_on": ("disturbance", "t_on", float),
    "noise.variance": ("noise", "variance", float),
    "noise.sample_period": ("noise", "sample_period", float),
    "noise.seed": ("noise", "seed", int),
    "initial.xhat1": ("initial", "xhat1", float),
    "initial.xhat2": ("initial", "xhat2", float),
    "initial.xhat3": ("initial", "xhat3", float),
    "limiter.lo": ("limiter", "lo", float),
    "limiter.hi": ("limiter", "hi", float),
}


def parse_scenario_file(path: str | Path) -> ScenarioConfig:
    """Build a scenario from a UTF-8 "key = value" file.

    '#' starts a comment, blank lines are skipped, dotted keys address the
    nested sections (e.g. ``observer.omega0 = 35``).  Unknown keys are an
    error.  Omitted keys fall back to the nominal benchmark defaults; noise
    is only enabled when a ``noise.*`` key appears with positive variance.
    """
    path = Path(path)
    sections: dict[str, dict[str, object]] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCENARIO_KEYS:
            raise ScenarioError(f"{path}:{lineno}: unknown key {key!r}")
        section, fieldname, conv = _SCENARIO_KEYS[key]
        try:
            parsed = conv(value)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
        sections.setdefault(section, {})[fieldname] = parsed

    try:
        return _assemble_scenario(sections, default_name=path.stem)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def _assemble_scenario(
    sections: dict[str, dict[str, object]], default_name: str
) -> ScenarioConfig:
    top = sections.get("top", {})
    seed = int(top.get("seed", DEFAULT_SEED))

    plant = PlantParams(
        **{**_dataclass_defaults(PlantParams.nominal()), **sections.get("plant", {})}
    )
    uncertainty = UncertaintySpec(**sections.get("uncertainty", {}))

    obs_kv = dict(sections.get("observer", {}))
    c_default = ObserverSpec().c
    c = (
        float(obs_kv.pop("c1", c_default[0])),
        float(obs_kv.pop("c2", c_default[1])),
        float(obs_kv.pop("c3", c_default[2])),
    )
    observer = ObserverSpec(c=c, **obs_kv)

    kind = observer.kind
    inlsef_defaults = _dataclass_defaults(
        InlsefParams.nleso_tuning() if kind == "nleso" else InlsefParams.leso_tuning()
    )
    inlsef_params = InlsefParams(**{**inlsef_defaults, **sections.get("inlsef", {})})
    sond = SondParams(**{**_dataclass_defaults(SondParams.tuned()), **sections.get("sond", {})})
    controller = ControllerSpec(
        inlsef=inlsef_params,
        sond=sond,
        td_bypass=bool(sections.get("controller", {}).get("td_bypass", False)),
    )

    noise = None
    if "noise" in sections:
        noise_kv = sections["noise"]
        variance = float(noise_kv.get("variance", 36e-6))
        if variance > 0.0:
            noise = NoiseSpec(
                seed=int(noise_kv.get("seed", seed)),
                variance=variance,
                sample_period=float(noise_kv.get("sample_period", 1e-3)),
            )

    grid_kv = sections.get("grid", {})
    grid = TimeGrid(
        t0=float(grid_kv.get("t0", 0.0)),
        tf=float(grid_kv.get("tf", 10.0)),
        dt=float(grid_kv.get("dt", 1e-4)),
    )

    return ScenarioConfig(
        name=str(top.get("name", default_name)),
        plant=plant,
        uncertainty=uncertainty,
        observer=observer,
        controller=controller,
        reference=ReferenceSpec(**sections.get("reference", {})),
        disturbance=TorqueStepSpec(**sections.get("disturbance", {})),
        noise=noise,
        grid=grid,
        initial=InitialSpec(**sections.get("initial", {})),
        limiter=LimiterSpec(**sections.get("limiter", {})),
        seed=seed,
    )


def _dataclass_defaults(instance) -> dict[str, object]:
    return {k: getattr(instance, k) for k in instance.__dataclass_fields__}


# ---------------------------------------------------------------------------
# trace and report files
# ---------------------------------------------------------------------------


def write_trace_csv(trace: SimTrace, path: str | Path) -> None:
    """Write a run trace as CSV with the fixed column order, >= 9 significant
    digits and LF line endings."""
    path = Path(path)
    cols = [trace.times] + [trace[name] for name in TRACE_COLUMNS[1:]]
    data = np.column_stack(cols)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        np.savetxt(fh, data, fmt="%.12g", delimiter=",", newline="\n")


def read_trace_csv(path: str | Path) -> SimTrace:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    if names is None or names[0] != "t":
        raise ScenarioError(f"{path}: not a trace CSV (missing 't' header)")
    return SimTrace(
        times=data["t"], channels={name: data[name] for name in names[1:]}
    )


def report_to_flat_dict(report: MetricsReport) -> dict[str, object]:
    """Flatten a report to dotted keys; shared by the text and JSON outputs."""
    out: dict[str, object] = {
        "scenario": report.scenario,
        "observer": report.observer,
        "omega0": report.omega0,
        "itae": report.itae,
        "isu": report.isu,
        "diverged": report.diverged,
        "reference.amplitude": report.reference_amplitude,
        "reference.t_on": report.reference_t_on,
        "disturbance.amplitude": report.disturbance_amplitude,
        "disturbance.t_on": report.disturbance_t_on,
        "noise.variance": report.noise_variance,
        "seed": report.seed,
    }
    for name, p in report.peaks.items():
        out[f"peak.{name}.min"] = p.min
        out[f"peak.{name}.max"] = p.max
        out[f"peak.{name}.t_min"] = p.t_min
        out[f"peak.{name}.t_max"] = p.t_max
    for name, value in report.settling.items():
        out[f"settling.{name}"] = value
    return out


def report_to_text(report: MetricsReport) -> str:
    lines = []
    for key, value in report_to_flat_dict(report).items():
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = f"{value:.9g}"
        else:
            rendered = str(value)
        lines.append(f"{key}: {rendered}")
    return "\n".join(lines) + "\n"


def write_report(report: MetricsReport, stem: str | Path) -> tuple[Path, Path]:
    """Write both the text report and its JSON twin; returns the two paths."""
    stem = Path(stem)
    txt = stem.parent / (stem.name + ".txt")
    js = stem.parent / (stem.name + ".json")
    txt.write_text(report_to_text(report), encoding="utf-8")
    js.write_text(
        json.dumps(report_to_flat_dict(report), indent=2) + "\n", encoding="utf-8"
    )
    return txt, js


def _flat_dict_to_report(flat: dict[str, object]) -> MetricsReport:
    from .metrics import ChannelPeaks

    peaks: dict[str, dict[str, float]] = {}
    settling: dict[str, float] = {}
    for key, value in flat.items():
        parts = key.split(".")
        if parts[0] == "peak" and len(parts) == 3:
            peaks.setdefault(parts[1], {})[parts[2]] = float(value)
        elif parts[0] == "settling" and len(parts) == 2:
            settling[parts[1]] = float(value)
    return MetricsReport(
        scenario=str(flat["scenario"]),
        observer=str(flat["observer"]),
        omega0=float(flat["omega0"]),
        itae=float(flat["itae"]),
        isu=float(flat["isu"]),
        peaks={name: ChannelPeaks(**kv) for name, kv in peaks.items()},
        settling=settling,
        diverged=flat["diverged"] in (True, "true", "True"),
        reference_amplitude=float(flat.get("reference.amplitude", 1.0)),
        reference_t_on=float(flat.get("reference.t_on", 0.0)),
        disturbance_amplitude=float(flat.get("disturbance.amplitude", 0.0)),
        disturbance_t_on=float(flat.get("disturbance.t_on", 0.0)),
        noise_variance=float(flat.get("noise.variance", 0.0)),
        seed=int(float(flat.get("seed", 0))),
    )


def load_report(path: str | Path) -> MetricsReport:
    """Read a report back from its text or JSON form."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        flat = json.loads(text)
    else:
        flat = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if ":" not in line:
                raise ScenarioError(f"{path}:{lineno}: expected 'metric: value'")
            key, _, value = line.partition(":")
            flat[key.strip()] = value.strip()
    try:
        return _flat_dict_to_report(flat)
    except (KeyError, ValueError) as exc:
        raise ScenarioError(f"{path}: malformed report ({exc})") from None
