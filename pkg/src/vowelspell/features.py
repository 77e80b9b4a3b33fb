"""Two-dimensional SVM features over candidate time windows.

Three feature sets pair an oscillation count with another statistic:

  set 1: (HR oscillations, BV oscillations)
  set 2: (BV oscillations, max BV amplitude)
  set 3: (HR oscillations, max HR amplitude)

Oscillations are the unwrapped analytic-phase increment over the window
divided by 2*pi; amplitude is the peak analytic envelope. Windows start
after the first rest period, are at least 15 s wide, and move on a 1 s
grid. The blood-volume series is always read 3 s later than the heart
rate (its response lags), clipped to the recording.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import WindowError
from .hemodynamics import HemoSeries, analytic
from .trial import SAMPLE_RATE_HZ, TRIAL_SECONDS

WINDOW_MIN_START_S = 12
WINDOW_MAX_END_S = TRIAL_SECONDS
WINDOW_MIN_WIDTH_S = 15
BV_LAG_S = 3
MIN_WINDOW_SAMPLES = 32


class FeatureSet(IntEnum):
    SET1 = 1
    SET2 = 2
    SET3 = 3


# (series, statistic) per component; "osc" = phase cycles, "amp" = peak envelope.
FEATURE_COMPONENTS = {
    FeatureSet.SET1: (("hr", "osc"), ("bv", "osc")),
    FeatureSet.SET2: (("bv", "osc"), ("bv", "amp")),
    FeatureSet.SET3: (("hr", "osc"), ("hr", "amp")),
}


@dataclass(frozen=True)
class WindowSpec:
    start_s: int
    end_s: int

    def __post_init__(self):
        if self.start_s != int(self.start_s) or self.end_s != int(self.end_s):
            raise WindowError("window bounds sit on the integer-second grid")
        if self.start_s < WINDOW_MIN_START_S:
            raise WindowError(
                f"window starts before the first rest period ends ({self.start_s} < "
                f"{WINDOW_MIN_START_S})"
            )
        if self.end_s > WINDOW_MAX_END_S:
            raise WindowError(f"window ends past the recording ({self.end_s})")
        if self.width_s < WINDOW_MIN_WIDTH_S:
            raise WindowError(
                f"window narrower than {WINDOW_MIN_WIDTH_S} s ({self.width_s})"
            )

    @property
    def width_s(self) -> int:
        return self.end_s - self.start_s

    def as_tuple(self) -> tuple[int, int]:
        return (self.start_s, self.end_s)


def enumerate_windows() -> list[WindowSpec]:
    """All feasible windows on the 1 s grid (55 for a 36 s trial)."""
    out = []
    for start in range(WINDOW_MIN_START_S, WINDOW_MAX_END_S - WINDOW_MIN_WIDTH_S + 1):
        for end in range(start + WINDOW_MIN_WIDTH_S, WINDOW_MAX_END_S + 1):
            out.append(WindowSpec(start, end))
    return out


def bv_window(window: WindowSpec) -> WindowSpec:
    """The blood-volume read window: 3 s later, clipped to the recording."""
    start = window.start_s + BV_LAG_S
    end = min(window.end_s + BV_LAG_S, WINDOW_MAX_END_S)
    if end - start < WINDOW_MIN_WIDTH_S:
        raise WindowError(
            f"window {window.as_tuple()} infeasible for blood volume "
            f"(lagged window narrows to {end - start} s)"
        )
    return WindowSpec(start, end)


def _segment(series: np.ndarray, window: WindowSpec) -> np.ndarray:
    seg = np.asarray(series, dtype=float)[
        window.start_s * SAMPLE_RATE_HZ : window.end_s * SAMPLE_RATE_HZ
    ]
    if len(seg) < MIN_WINDOW_SAMPLES:
        raise WindowError(
            f"window {window.as_tuple()} covers {len(seg)} samples, "
            f"need >= {MIN_WINDOW_SAMPLES}"
        )
    return seg


def _windowed_analytic(series: np.ndarray, window: WindowSpec):
    seg = _segment(series, window)
    return analytic(seg - seg.mean())


def oscillation_number(series: np.ndarray, window: WindowSpec) -> float:
    """Cycles in the window: unwrapped phase increment over 2*pi."""
    phase = _windowed_analytic(series, window).unwrapped_phase
    return float((phase[-1] - phase[0]) / (2 * np.pi))


def max_amplitude(series: np.ndarray, window: WindowSpec) -> float:
    """Peak instantaneous amplitude of the analytic signal in the window."""
    return float(np.max(_windowed_analytic(series, window).instantaneous_amplitude))


def rescale_factor(osc_values, amp_values) -> float:
    """Scale that lines the amplitude magnitudes up with the counts.

    Frozen at training time from the training set and reused at inference;
    degenerate all-zero amplitudes scale by 1.
    """
    osc_max = float(np.max(np.abs(np.asarray(osc_values, dtype=float))))
    amp_max = float(np.max(np.abs(np.asarray(amp_values, dtype=float))))
    if amp_max == 0.0:
        return 1.0
    return osc_max / amp_max


@dataclass(frozen=True)
class FeatureVector:
    x: tuple[float, float]
    feature_set: FeatureSet
    window: WindowSpec
    channel: str
    trial_id: str

    def to_dict(self) -> dict:
        return {
            "x": list(self.x),
            "feature_set": int(self.feature_set),
            "window": list(self.window.as_tuple()),
            "channel": self.channel,
            "trial_id": self.trial_id,
        }


def raw_components(
    hemo: HemoSeries, feature_set: FeatureSet, window: WindowSpec, channel: str
) -> tuple[float, float]:
    """Unscaled component pair; reads BV through the lagged window."""
    values = []
    for series_name, stat in FEATURE_COMPONENTS[FeatureSet(feature_set)]:
        if series_name == "hr":
            series, win = hemo.hr(channel), window
        else:
            series, win = hemo.bv(channel), bv_window(window)
        fn = oscillation_number if stat == "osc" else max_amplitude
        values.append(fn(series, win))
    return (values[0], values[1])


def amplitude_scaled(feature_set: FeatureSet, raw: tuple[float, float], amp_scale: float):
    """Apply the frozen rescale factor to the amplitude component, if any."""
    if FeatureSet(feature_set) == FeatureSet.SET1:
        return raw
    return (raw[0], raw[1] * amp_scale)


def extract(
    hemo: HemoSeries,
    feature_set: FeatureSet,
    window: WindowSpec,
    channel: str,
    amp_scale: float = 1.0,
    trial_id: str = "",
) -> FeatureVector:
    raw = raw_components(hemo, feature_set, window, channel)
    x = amplitude_scaled(feature_set, raw, amp_scale)
    if not all(np.isfinite(x)):
        raise WindowError(f"non-finite feature for trial {trial_id}")
    return FeatureVector(x, FeatureSet(feature_set), window, channel, trial_id)
