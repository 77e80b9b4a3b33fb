import numpy as np
import pytest

from vowelspell.codec import load_scheme
from vowelspell.lexicon import load_lexicon
from vowelspell.trial import SAMPLE_RATE_HZ, TRIAL_SAMPLES, Trial


@pytest.fixture(scope="session")
def ja_scheme():
    return load_scheme("japanese-vowel")


@pytest.fixture(scope="session")
def en_scheme():
    return load_scheme("english-6col")


@pytest.fixture(scope="session")
def ja_lexicon(ja_scheme):
    return load_lexicon("japanese-sample", ja_scheme)


@pytest.fixture(scope="session")
def en_lexicon(en_scheme):
    return load_lexicon("english-sample", en_scheme)


def times():
    return np.arange(TRIAL_SAMPLES) / SAMPLE_RATE_HZ


def tone_trial(freq_hz, amp=0.01, trial_id="tone", bias=0.0):
    """Trial whose log-intensity is a pure sinusoid (both channels)."""
    t = times()
    x = amp * np.sin(2 * np.pi * freq_hz * t) + bias
    intensity = np.exp(-x)
    return Trial(trial_id, np.stack([intensity, intensity]))


def lag_xcorr(reference, delayed, lo=50, hi=335, max_lag=80, rate=SAMPLE_RATE_HZ):
    """Lag (s) of `delayed` behind `reference` by unbiased cross-correlation.

    Edge samples are trimmed (filter/Hilbert transients), each overlap is
    normalized by its length, and the peak is refined parabolically.
    """
    a = np.asarray(reference, dtype=float)[lo:hi].copy()
    b = np.asarray(delayed, dtype=float)[lo:hi].copy()
    a -= a.mean()
    b -= b.mean()
    lags = np.arange(0, max_lag + 1)
    cc = np.array([np.dot(a[: len(a) - k], b[k:]) / (len(a) - k) for k in lags])
    k = int(np.argmax(cc))
    refined = float(k)
    if 0 < k < max_lag:
        denom = cc[k - 1] - 2 * cc[k] + cc[k + 1]
        if denom != 0:
            refined = k + 0.5 * (cc[k - 1] - cc[k + 1]) / denom
    return refined / rate


def zero_crossing_cycles(segment):
    """Independent oscillation-count oracle: sign changes / 2."""
    x = np.asarray(segment, dtype=float)
    x = x - x.mean()
    signs = np.sign(x)
    signs[signs == 0] = 1
    return float(np.sum(signs[1:] != signs[:-1])) / 2.0
