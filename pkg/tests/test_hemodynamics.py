import numpy as np
import pytest

from conftest import lag_xcorr, times, tone_trial

from vowelspell import hemodynamics as hd
from vowelspell import simulator as sim
from vowelspell.errors import FilterError, PulseDetectionError, TrialIntegrityError
from vowelspell.trial import (
    TRIAL_SAMPLES,
    Trial,
    from_csv,
    load_bundle,
    save_trial,
    to_csv,
)


class TestTrialContainer:
    def test_shape_enforced(self):
        with pytest.raises(TrialIntegrityError):
            Trial("bad", np.ones((2, 100)))

    def test_positivity_enforced(self):
        data = np.ones((2, TRIAL_SAMPLES))
        data[1, 77] = 0.0
        with pytest.raises(TrialIntegrityError):
            Trial("bad", data)

    def test_csv_round_trip(self, tmp_path):
        trial = sim.generate_trial(sim.PatientProfile(rng_seed=4), "yes", 0)
        path = tmp_path / "t.csv"
        save_trial(trial, path)
        again = from_csv(path.read_text(), trial_id="t")
        assert np.allclose(again.channels, trial.channels, rtol=1e-6)

    def test_csv_rejects_bad_grid(self):
        trial = tone_trial(1.0)
        text = to_csv(trial).replace("\n0.1,", "\n0.15,")
        with pytest.raises(TrialIntegrityError):
            from_csv(text)

    def test_csv_rejects_wrong_row_count(self):
        text = "\n".join(to_csv(tone_trial(1.0)).splitlines()[:-5])
        with pytest.raises(TrialIntegrityError):
            from_csv(text)

    def test_bundle_with_manifest(self, tmp_path):
        prof = sim.PatientProfile(rng_seed=5)
        manifest = {}
        for i, answer in enumerate(["yes", "no"]):
            trial = sim.generate_trial(prof, answer, i)
            save_trial(trial, tmp_path / f"trial{i}.csv")
            manifest[f"trial{i}"] = answer
        (tmp_path / "manifest.json").write_text(__import__("json").dumps(manifest))
        trials = load_bundle(tmp_path)
        assert [t.task_label for t in trials] == ["yes", "no"]


class TestLogTransform:
    def test_constant_channel_is_all_zero(self):
        trial = Trial("c", np.full((2, TRIAL_SAMPLES), 3.7))
        out = hd.log_transform(trial)
        assert np.allclose(out, 0.0)

    def test_halving_jumps_by_ln2(self):
        data = np.ones((2, TRIAL_SAMPLES))
        data[:, 200:] = 0.5
        out = hd.log_transform(Trial("h", data))
        assert out[0, 199] == pytest.approx(0.0)
        assert out[0, 200] == pytest.approx(np.log(2), abs=1e-12)

    def test_recovers_simulator_absorbance(self):
        prof = sim.PatientProfile(rng_seed=6, noise_sigma=0.0)
        trial, truth = sim.generate_trial_with_truth(prof, "yes", 0)
        out = hd.log_transform(trial)
        assert np.max(np.abs(out - truth.absorbance)) < 1e-9


class TestLowpass:
    def test_dc_passes_unchanged(self):
        out = hd.lowpass_0p1(np.full(TRIAL_SAMPLES, 2.5))
        assert np.max(np.abs(out - 2.5)) < 1e-3

    def test_1p2hz_attenuated(self):
        t = times()
        out = hd.lowpass_0p1(np.sin(2 * np.pi * 1.2 * t))
        steady = out[120:240]  # middle third, clear of edge transients
        assert np.max(np.abs(steady)) <= 0.01

    def test_slow_component_survives_mix(self):
        t = times()
        slow = np.sin(2 * np.pi * 0.03 * t)
        out = hd.lowpass_0p1(slow + np.sin(2 * np.pi * 1.2 * t))
        r = np.corrcoef(out, slow)[0, 1]
        assert r >= 0.99

    def test_length_preserved(self):
        assert len(hd.lowpass_0p1(np.random.default_rng(0).normal(size=200))) == 200

    def test_too_short_errors(self):
        with pytest.raises(FilterError):
            hd.lowpass_0p1(np.ones(11))


class TestPulsePeak:
    def test_synthetic_pulse_with_noise(self):
        rng = np.random.default_rng(7)
        t = times()
        amp = 1.0
        noise = rng.normal(0, amp / np.sqrt(2) / np.sqrt(10), TRIAL_SAMPLES)
        f = hd.find_pulse_peak(amp * np.sin(2 * np.pi * 1.1 * t) + noise)
        assert 1.05 <= f <= 1.15

    def test_pure_tone_within_one_bin(self):
        f = hd.find_pulse_peak(np.sin(2 * np.pi * 0.9 * times()))
        assert abs(f - 0.9) <= 10 / 128 + 1e-9

    def test_out_of_band_tone_errors(self):
        with pytest.raises(PulseDetectionError):
            hd.find_pulse_peak(np.sin(2 * np.pi * 0.3 * times()))

    def test_all_zero_errors(self):
        with pytest.raises(PulseDetectionError):
            hd.find_pulse_peak(np.zeros(TRIAL_SAMPLES))


class TestBandpass:
    def test_pulse_kept_drift_killed(self):
        t = times()
        pulse = np.sin(2 * np.pi * 1.1 * t)
        drift = np.sin(2 * np.pi * 0.02 * t)
        out = hd.bandpass_pulse(pulse + drift, 1.1)
        interior = slice(40, -40)
        kept = np.max(np.abs(hd.bandpass_pulse(pulse, 1.1)[interior]))
        assert kept >= 0.9
        drift_left = np.max(np.abs(hd.bandpass_pulse(drift, 1.1)[interior]))
        assert drift_left <= 0.05

    def test_in_band_amplitude_within_1db(self):
        t = times()
        out = hd.bandpass_pulse(np.sin(2 * np.pi * 1.0 * t), 1.0)
        peak = np.max(np.abs(out[60:-60]))
        assert 10 ** (-1 / 20) <= peak <= 10 ** (1 / 20)

    def test_white_noise_band_limited(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=TRIAL_SAMPLES)
        f_p = 1.2
        out = hd.bandpass_pulse(x, f_p)
        spectrum = np.abs(np.fft.rfft(out)) ** 2
        freqs = np.fft.rfftfreq(TRIAL_SAMPLES, 0.1)
        inside = (freqs >= f_p - 0.35) & (freqs <= f_p + 0.35)
        assert spectrum[inside].sum() / spectrum.sum() >= 0.9

    def test_low_peak_rejected(self):
        with pytest.raises(FilterError):
            hd.bandpass_pulse(np.ones(TRIAL_SAMPLES), 0.25)


class TestAnalytic:
    def test_unit_amplitude(self):
        z = hd.analytic(np.cos(2 * np.pi * 1.0 * times()))
        interior = z.instantaneous_amplitude[36:-36]
        assert np.all(np.abs(interior - 1.0) < 0.02)

    def test_phase_rate_of_1hz_tone(self):
        z = hd.analytic(np.cos(2 * np.pi * 1.0 * times()))
        per_second = z.unwrapped_phase[180] - z.unwrapped_phase[170]
        assert per_second == pytest.approx(2 * np.pi, rel=0.02)

    def test_phase_continuity(self):
        z = hd.analytic(np.cos(2 * np.pi * 1.3 * times()))
        assert np.all(np.abs(np.diff(z.unwrapped_phase)) < np.pi)

    def test_chirp_tracking(self):
        t = times()
        f0, f1 = 0.8, 1.4
        finst = f0 + (f1 - f0) * t / 36.0
        phase = 2 * np.pi * np.cumsum(finst) / 10
        z = hd.analytic(np.sin(phase))
        measured = np.gradient(z.unwrapped_phase, 0.1) / (2 * np.pi)
        mid = slice(60, 300)
        assert np.max(np.abs(measured[mid] - finst[mid])) < 0.05

    def test_min_length(self):
        with pytest.raises(FilterError):
            hd.analytic(np.ones(16))


class TestHeartRate:
    @pytest.mark.parametrize("freq,bpm", [(1.0, 60.0), (1.25, 75.0)])
    def test_steady_tones(self, freq, bpm):
        trial = tone_trial(freq)
        hr = hd.derive(trial).hr("left")
        interior = hr[50:-50]
        assert np.all(np.abs(interior - bpm) <= 1.0)

    def test_step_crossing_time(self):
        # 60 -> 70 bpm step at the answer period; the smoothed estimate
        # must cross the midpoint somewhere in 10-18 s.
        prof = sim.PatientProfile(
            rng_seed=8, noise_sigma=0.0, hr_boost=10.0, hrv_bpm=0.0, drift_amp=0.0
        )
        trial, truth = sim.generate_trial_with_truth(prof, "yes", 0)
        hr = hd.derive(trial).hr("left")
        crossing = np.argwhere(hr >= 65.0)
        assert len(crossing)
        t_cross = crossing[0][0] / 10.0
        assert 10.0 <= t_cross <= 18.0
        smoothed_truth = hd.lowpass_0p1(truth.hr_bpm)
        t_oracle = np.argwhere(smoothed_truth >= 65.0)[0][0] / 10.0
        assert abs(t_cross - t_oracle) <= 1.0


class TestDerive:
    def test_shapes_and_finiteness(self):
        trial = sim.generate_trial(sim.PatientProfile(rng_seed=9), "yes", 0)
        h = hd.derive(trial)
        assert h.blood_volume.shape == (2, TRIAL_SAMPLES)
        assert h.heart_rate.shape == (2, TRIAL_SAMPLES)
        assert np.all(np.isfinite(h.blood_volume))
        assert np.all(np.isfinite(h.heart_rate))
        assert all(f > 0.5 for f in h.pulse_peak_hz)

    def test_bit_identical_across_runs(self):
        trial = sim.generate_trial(sim.PatientProfile(rng_seed=10), "no", 3)
        a = hd.derive(trial)
        b = hd.derive(trial)
        assert np.array_equal(a.blood_volume, b.blood_volume)
        assert np.array_equal(a.heart_rate, b.heart_rate)
        assert a.pulse_peak_hz == b.pulse_peak_hz

    def test_zero_phase_peak_preserved(self):
        t = times()
        bump = np.exp(-0.5 * ((t - 18.0) / 2.0) ** 2)
        out = hd.lowpass_0p1(bump)
        assert abs(int(np.argmax(out)) - int(np.argmax(bump))) <= 1

    def test_hr_positive_when_pulse_dominates(self):
        # pulse amplitude >= 5x noise sigma keeps the phase monotone
        for seed in range(5):
            prof = sim.PatientProfile(
                rng_seed=seed, pulse_amp=0.01, noise_sigma=0.002
            )
            h = hd.derive(sim.generate_trial(prof, "yes", seed))
            assert np.all(h.heart_rate > 0)

    def test_channel_tagged_errors(self):
        data = np.ones((2, TRIAL_SAMPLES))
        trial = Trial("flat", data)
        with pytest.raises(PulseDetectionError) as err:
            hd.derive(trial)
        assert "channel left" in str(err.value)

    def test_simulator_lag_recovered(self):
        prof = sim.PatientProfile(
            rng_seed=12, noise_sigma=0.0, hrv_bpm=0.0, drift_amp=0.0
        )
        trial, _ = sim.generate_trial_with_truth(prof, "yes", 0)
        h = hd.derive(trial)
        lag = lag_xcorr(h.hr("left"), h.bv("left"))
        assert abs(lag - prof.bv_lag_s) <= 0.5
