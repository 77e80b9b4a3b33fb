"""Raw optical trial -> blood-volume and instantaneous-heart-rate series.

Per channel: the log-intensity change is low-passed at 0.1 Hz to give the
blood-volume series; the pulse wave is isolated by a band-pass around the
spectral pulse peak (searched above 0.5 Hz), and the heart rate is the
smoothed derivative of its unwrapped analytic phase, in beats/minute.

All filters are 4th-order Butterworth run forward-then-backward (zero
phase) over reflect-padded input, so filtered features keep their timing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import FilterError, PulseDetectionError, TrialIntegrityError
from .trial import CHANNELS, SAMPLE_RATE_HZ, Trial

LOWPASS_CUTOFF_HZ = 0.1
PULSE_SEARCH_MIN_HZ = 0.5
PULSE_BAND_HALF_WIDTH_HZ = 0.3
FILTER_ORDER = 4
EDGE_PAD_SECONDS = 3
MIN_ANALYTIC_SAMPLES = 32

# Welch settings for the pulse-peak search at 10 Hz / 360 samples.
_WELCH_SEGMENT = 128
_PEAK_OVER_MEDIAN = 3.0
_PEAK_OVER_GLOBAL = 0.01


@dataclass(frozen=True)
class AnalyticSeries:
    instantaneous_amplitude: np.ndarray
    unwrapped_phase: np.ndarray


@dataclass(frozen=True)
class HemoSeries:
    blood_volume: np.ndarray  # (2, n)
    heart_rate: np.ndarray  # (2, n), beats/minute
    pulse_peak_hz: tuple
    sample_rate_hz: int = SAMPLE_RATE_HZ

    def bv(self, channel: str) -> np.ndarray:
        return self.blood_volume[CHANNELS.index(channel)]

    def hr(self, channel: str) -> np.ndarray:
        return self.heart_rate[CHANNELS.index(channel)]


def log_transform(trial: Trial) -> np.ndarray:
    """Per-channel -ln(I/I[0]): absorbance-style, so more blood reads positive."""
    data = trial.channels
    if np.any(data <= 0):
        raise TrialIntegrityError(f"trial {trial.trial_id}: non-positive intensity")
    return -np.log(data / data[:, :1])


def _sos_filtfilt(sos, series: np.ndarray) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise FilterError("filters take one channel at a time")
    if len(x) < 3 * FILTER_ORDER:
        raise FilterError(
            f"series of {len(x)} samples is shorter than 3x filter order"
        )
    padlen = min(EDGE_PAD_SECONDS * SAMPLE_RATE_HZ, len(x) - 1)
    return sps.sosfiltfilt(sos, x, padtype="even", padlen=padlen)


def lowpass_0p1(series: np.ndarray, sample_rate_hz: int = SAMPLE_RATE_HZ) -> np.ndarray:
    sos = sps.butter(
        FILTER_ORDER, LOWPASS_CUTOFF_HZ, btype="lowpass", fs=sample_rate_hz, output="sos"
    )
    return _sos_filtfilt(sos, series)


def bandpass_pulse(
    series: np.ndarray, pulse_peak_hz: float, sample_rate_hz: int = SAMPLE_RATE_HZ
) -> np.ndarray:
    lo = pulse_peak_hz - PULSE_BAND_HALF_WIDTH_HZ
    hi = pulse_peak_hz + PULSE_BAND_HALF_WIDTH_HZ
    if lo <= 0:
        raise FilterError(f"pulse peak {pulse_peak_hz} Hz leaves no positive band")
    nyquist = sample_rate_hz / 2
    hi = min(hi, 0.999 * nyquist)
    sos = sps.butter(
        FILTER_ORDER, [lo, hi], btype="bandpass", fs=sample_rate_hz, output="sos"
    )
    return _sos_filtfilt(sos, series)


def find_pulse_peak(series: np.ndarray, sample_rate_hz: int = SAMPLE_RATE_HZ) -> float:
    """Spectral peak above 0.5 Hz; lowest frequency wins ties.

    The peak must stand out: at least 3x the median in-band power and at
    least 1% of the strongest non-DC component anywhere, else there is no
    credible pulse in the record.
    """
    x = np.asarray(series, dtype=float)
    freqs, psd = sps.welch(
        x,
        fs=sample_rate_hz,
        window="hann",
        nperseg=min(_WELCH_SEGMENT, len(x)),
        noverlap=min(_WELCH_SEGMENT, len(x)) // 2,
        detrend="linear",
    )
    in_band = (freqs > PULSE_SEARCH_MIN_HZ) & (freqs <= sample_rate_hz / 2)
    if not np.any(in_band) or not np.any(psd[in_band] > 0):
        raise PulseDetectionError("no pulse detected: empty spectrum above 0.5 Hz")
    band_freqs = freqs[in_band]
    band_psd = psd[in_band]
    peak_idx = int(np.argmax(band_psd))
    peak = band_psd[peak_idx]
    median = float(np.median(band_psd))
    global_peak = float(np.max(psd[freqs > 0]))
    if (median > 0 and peak <= _PEAK_OVER_MEDIAN * median) or (
        peak < _PEAK_OVER_GLOBAL * global_peak
    ):
        raise PulseDetectionError(
            "no pulse detected: nothing above 0.5 Hz clears the noise floor"
        )
    return float(band_freqs[peak_idx])


def analytic(series: np.ndarray) -> AnalyticSeries:
    """Discrete analytic signal (positive-spectrum doubling)."""
    x = np.asarray(series, dtype=float)
    if len(x) < MIN_ANALYTIC_SAMPLES:
        raise FilterError(
            f"analytic signal needs >= {MIN_ANALYTIC_SAMPLES} samples, got {len(x)}"
        )
    z = sps.hilbert(x)
    return AnalyticSeries(np.abs(z), np.unwrap(np.angle(z)))


def heart_rate(
    pulse_phase: np.ndarray, sample_rate_hz: int = SAMPLE_RATE_HZ
) -> np.ndarray:
    """Phase derivative scaled to beats/minute, then smoothed at 0.1 Hz."""
    dt = 1.0 / sample_rate_hz
    hr = np.gradient(np.asarray(pulse_phase, dtype=float), dt) / (2 * np.pi) * 60.0
    return lowpass_0p1(hr, sample_rate_hz)


def derive(trial: Trial) -> HemoSeries:
    """Full per-channel pipeline; errors carry the channel that failed."""
    log_i = log_transform(trial)
    bv = np.empty_like(log_i)
    hr = np.empty_like(log_i)
    peaks = []
    for ch, name in enumerate(CHANNELS):
        try:
            bv[ch] = lowpass_0p1(log_i[ch])
            f_p = find_pulse_peak(log_i[ch])
            pulse = bandpass_pulse(log_i[ch], f_p)
            hr[ch] = heart_rate(analytic(pulse).unwrapped_phase)
            peaks.append(f_p)
        except (FilterError, PulseDetectionError) as exc:
            exc.args = (f"channel {name}: {exc.args[0]}",) + exc.args[1:]
            exc.context["channel"] = name
            raise
    return HemoSeries(bv, hr, tuple(peaks))
