"""Tracking and control-effort metrics over simulation traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .simcore import SimTrace

__all__ = [
    "ChannelPeaks",
    "MetricsReport",
    "Comparison",
    "itae",
    "isu",
    "peak_metrics",
    "settling_into_band",
    "compare",
]


def itae(trace: SimTrace, r_channel: str = "r", y_channel: str = "y") -> float:
    """Time-weighted absolute tracking error, integral of t*|r - y| dt over
    the full horizon (trapezoidal)."""
    t = trace.times
    err = np.abs(trace[r_channel] - trace[y_channel])
    return float(np.trapezoid(t * err, t))


def isu(trace: SimTrace, u_channel: str = "v") -> float:
    """Control energy, integral of u**2 dt (trapezoidal)."""
    u = trace[u_channel]
    return float(np.trapezoid(u * u, trace.times))


@dataclass(frozen=True)
class ChannelPeaks:
    min: float
    max: float
    t_min: float
    t_max: float

    @property
    def extremum(self) -> float:
        """Largest magnitude reached."""
        return max(abs(self.min), abs(self.max))


def peak_metrics(trace: SimTrace, channels: list[str]) -> dict[str, ChannelPeaks]:
    """Global min/max and their times for each requested channel."""
    out = {}
    t = trace.times
    for name in channels:
        values = trace[name]
        i_min = int(np.argmin(values))
        i_max = int(np.argmax(values))
        out[name] = ChannelPeaks(
            min=float(values[i_min]),
            max=float(values[i_max]),
            t_min=float(t[i_min]),
            t_max=float(t[i_max]),
        )
    return out


def settling_into_band(
    times: np.ndarray, values: np.ndarray, target: float, band: float
) -> float:
    """First time after which |values - target| <= band holds for good.

    Returns nan when the series is still outside the band at the end.
    """
    outside = np.nonzero(np.abs(np.asarray(values) - target) > band)[0]
    if len(outside) == 0:
        return float(times[0])
    if outside[-1] == len(times) - 1:
        return math.nan
    return float(times[outside[-1] + 1])


@dataclass
class MetricsReport:
    """Quantitative summary of one scenario run."""

    scenario: str
    observer: str
    omega0: float
    itae: float
    isu: float
    peaks: dict[str, ChannelPeaks]
    settling: dict[str, float]
    diverged: bool
    # signal description, used to decide whether two reports are comparable
    reference_amplitude: float = 1.0
    reference_t_on: float = 0.0
    disturbance_amplitude: float = 0.0
    disturbance_t_on: float = 0.0
    noise_variance: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.itae < 0.0 or self.isu < 0.0:
            raise ValueError("itae and isu must be non-negative")

    def same_family(self, other: "MetricsReport") -> bool:
        """Same reference and disturbance signals (comparable experiments)."""
        return (
            self.reference_amplitude == other.reference_amplitude
            and self.reference_t_on == other.reference_t_on
            and self.disturbance_amplitude == other.disturbance_amplitude
            and self.disturbance_t_on == other.disturbance_t_on
        )


def _ratio(a: float, b: float) -> float:
    if a == b:
        return 1.0
    if b == 0.0:
        return math.inf if a > 0 else -math.inf
    return a / b


def _verdict(a: float, b: float) -> str:
    if a < b:
        return "a<b"
    if a > b:
        return "a>b"
    return "a=b"


@dataclass
class Comparison:
    """Metric ratios a/b and ordering verdicts between two comparable runs."""

    a: str
    b: str
    itae_ratio: float
    isu_ratio: float
    peak_ratios: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, str] = field(default_factory=dict)


def compare(a: MetricsReport, b: MetricsReport) -> Comparison:
    """Head-to-head comparison of two runs of the same scenario family.

    Peak ratios compare extremum magnitudes channel by channel (channels
    present in both reports only).
    """
    if not a.same_family(b):
        raise ValueError(
            f"reports {a.scenario!r} and {b.scenario!r} use different "
            "reference/disturbance signals and cannot be compared"
        )
    peak_ratios = {}
    verdicts = {
        "itae": _verdict(a.itae, b.itae),
        "isu": _verdict(a.isu, b.isu),
    }
    for name in sorted(set(a.peaks) & set(b.peaks)):
        pa, pb = a.peaks[name].extremum, b.peaks[name].extremum
        peak_ratios[name] = _ratio(pa, pb)
        verdicts[f"peak.{name}"] = _verdict(pa, pb)
    return Comparison(
        a=a.scenario,
        b=b.scenario,
        itae_ratio=_ratio(a.itae, b.itae),
        isu_ratio=_ratio(a.isu, b.isu),
        peak_ratios=peak_ratios,
        verdicts=verdicts,
    )
