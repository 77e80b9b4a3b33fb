"""Model selection over feature sets and time windows.

Calibration data is four yes/no trial pairs. Every (feature set, window)
candidate is scored by leave-one-pair-out cross-validation: four folds,
each training on three pairs and testing on the held-out pair. The score
is the mean of training and test accuracy; ties go to the refit model
with the largest geometric margin, then to the earlier/shorter window and
lower feature-set id so selection is reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import TrainingError, WindowError
from .features import (
    FEATURE_COMPONENTS,
    FeatureSet,
    FeatureVector,
    WindowSpec,
    amplitude_scaled,
    bv_window,
    enumerate_windows,
    max_amplitude,
    oscillation_number,
    rescale_factor,
)
from .hemodynamics import HemoSeries, derive
from .svm import NO, YES, SvmModel, classify, decision_values, train_svm
from .trial import CHANNELS, Trial

N_PAIRS = 4


@dataclass(frozen=True)
class CandidateScore:
    feature_set: FeatureSet
    window: WindowSpec
    feasible: bool
    train_acc: float | None
    test_acc: float | None
    performance: float | None

    def to_dict(self) -> dict:
        return {
            "feature_set": int(self.feature_set),
            "window": list(self.window.as_tuple()),
            "feasible": self.feasible,
            "train_acc": self.train_acc,
            "test_acc": self.test_acc,
            "performance": self.performance,
        }


@dataclass(frozen=True)
class ModelSelection:
    feature_set: FeatureSet
    window: WindowSpec
    channel: str
    rescale_factor: float
    model: SvmModel
    table: tuple[CandidateScore, ...]

    @property
    def chosen(self) -> CandidateScore:
        for row in self.table:
            if row.feature_set == self.feature_set and row.window == self.window:
                return row
        raise LookupError("chosen candidate missing from its own table")

    def to_dict(self) -> dict:
        return {
            "feature_set": int(self.feature_set),
            "window": list(self.window.as_tuple()),
            "channel": self.channel,
            "rescale_factor": self.rescale_factor,
            "model": self.model.to_dict(),
            "table": [row.to_dict() for row in self.table],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSelection":
        table = tuple(
            CandidateScore(
                FeatureSet(row["feature_set"]),
                WindowSpec(*row["window"]),
                row["feasible"],
                row["train_acc"],
                row["test_acc"],
                row["performance"],
            )
            for row in d["table"]
        )
        return cls(
            FeatureSet(d["feature_set"]),
            WindowSpec(*d["window"]),
            d["channel"],
            float(d["rescale_factor"]),
            SvmModel.from_dict(d["model"]),
            table,
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelSelection":
        return cls.from_dict(json.loads(text))


def pair_trials(trials) -> list[tuple[Trial, Trial]]:
    """Group 8 labeled trials into (yes, no) pairs in arrival order."""
    yes = [t for t in trials if t.task_label == YES]
    no = [t for t in trials if t.task_label == NO]
    if len(yes) != N_PAIRS or len(no) != N_PAIRS:
        raise TrainingError(
            f"calibration needs {N_PAIRS} yes and {N_PAIRS} no trials, "
            f"got {len(yes)}/{len(no)}"
        )
    return list(zip(yes, no))


def _window_stats(hr, bv, window):
    """(hr_osc, hr_amp, bv_osc, bv_amp) or None when BV is infeasible."""
    hr_osc = oscillation_number(hr, window)
    hr_amp = max_amplitude(hr, window)
    try:
        bw = bv_window(window)
    except WindowError:
        return (hr_osc, hr_amp, None, None)
    return (hr_osc, hr_amp, oscillation_number(bv, bw), max_amplitude(bv, bw))


def _components(stats, feature_set):
    picks = {"hr": {"osc": 0, "amp": 1}, "bv": {"osc": 2, "amp": 3}}
    c = []
    for series_name, stat in FEATURE_COMPONENTS[feature_set]:
        v = stats[picks[series_name][stat]]
        if v is None:
            return None
        c.append(v)
    return (c[0], c[1])


def _fit_eval(raw_train, y_train, raw_eval, feature_set, backend=None):
    """Train on raw components with a fold-frozen amplitude scale."""
    if feature_set == FeatureSet.SET1:
        scale = 1.0
    else:
        scale = rescale_factor(
            [r[0] for r in raw_train], [r[1] for r in raw_train]
        )
    X_train = np.array([amplitude_scaled(feature_set, r, scale) for r in raw_train])
    model = train_svm(X_train, y_train, backend=backend)
    X_eval = np.array([amplitude_scaled(feature_set, r, scale) for r in raw_eval])
    values = decision_values(model, X_eval)
    preds = np.where(values > 0, 1.0, -1.0)
    return model, scale, preds, decision_values(model, X_train)


def select_model(
    pairs, channel: str, backend: str | None = None, hemos=None
) -> ModelSelection:
    """Score all candidates and return the winner refit on all 8 trials.

    ``pairs`` is a sequence of exactly four (yes_trial, no_trial) tuples;
    ``hemos`` may carry pre-derived HemoSeries in matching flat order to
    skip re-deriving.
    """
    pairs = list(pairs)
    if len(pairs) != N_PAIRS or any(len(p) != 2 for p in pairs):
        raise TrainingError(f"calibration needs exactly {N_PAIRS} yes/no pairs")
    if channel not in CHANNELS:
        raise TrainingError(f"unknown channel {channel!r}")
    flat = [t for pair in pairs for t in pair]
    labels = np.array([1.0, -1.0] * N_PAIRS)
    for t, lab in zip(flat, labels):
        if t.task_label is not None and t.task_label != (YES if lab > 0 else NO):
            raise TrainingError(f"trial {t.trial_id} label disagrees with pair slot")
    if hemos is None:
        hemos = [derive(t) for t in flat]
    hr = [h.hr(channel) for h in hemos]
    bv = [h.bv(channel) for h in hemos]

    windows = enumerate_windows()
    stats = [[_window_stats(hr[i], bv[i], w) for w in windows] for i in range(8)]

    folds = []
    for k in range(N_PAIRS):
        test_idx = [2 * k, 2 * k + 1]
        train_idx = [i for i in range(2 * N_PAIRS) if i not in test_idx]
        folds.append((train_idx, test_idx))

    rows = []
    candidates_raw = {}
    for fs in (FeatureSet.SET1, FeatureSet.SET2, FeatureSet.SET3):
        for wi, w in enumerate(windows):
            raw = [_components(stats[i][wi], fs) for i in range(8)]
            if any(r is None for r in raw):
                rows.append(CandidateScore(fs, w, False, None, None, None))
                continue
            train_accs = []
            test_accs = []
            for train_idx, test_idx in folds:
                raw_train = [raw[i] for i in train_idx]
                y_train = labels[train_idx]
                _, _, preds, train_vals = _fit_eval(
                    raw_train, y_train, [raw[i] for i in test_idx], fs, backend
                )
                train_preds = np.where(train_vals > 0, 1.0, -1.0)
                train_accs.append(float(np.mean(train_preds == y_train)))
                test_accs.append(float(np.mean(preds == labels[test_idx])))
            train_acc = float(np.mean(train_accs))
            test_acc = float(np.mean(test_accs))
            perf = (train_acc + test_acc) / 2
            rows.append(CandidateScore(fs, w, True, train_acc, test_acc, perf))
            candidates_raw[(fs, w)] = raw

    feasible = [r for r in rows if r.feasible]
    if not feasible:
        raise TrainingError("no feasible candidate windows")
    top = max(r.performance for r in feasible)
    tied = [r for r in feasible if r.performance == top]

    def refit(row):
        raw = candidates_raw[(row.feature_set, row.window)]
        model, scale, _, _ = _fit_eval(raw, labels, raw, row.feature_set, backend)
        return model, scale

    ranked = []
    for row in tied:
        model, scale = refit(row)
        ranked.append(
            (
                -model.geometric_margin,
                row.window.start_s,
                row.window.width_s,
                int(row.feature_set),
                row,
                model,
                scale,
            )
        )
    ranked.sort(key=lambda item: item[:4])
    _, _, _, _, chosen, model, scale = ranked[0]

    return ModelSelection(
        feature_set=chosen.feature_set,
        window=chosen.window,
        channel=channel,
        rescale_factor=scale,
        model=model,
        table=tuple(rows),
    )


def select_best_channel(pairs, backend: str | None = None) -> ModelSelection:
    """Run selection per channel and keep the stronger one (left on ties)."""
    flat = [t for pair in pairs for t in pair]
    hemos = [derive(t) for t in flat]
    picks = [
        select_model(pairs, ch, backend=backend, hemos=hemos) for ch in CHANNELS
    ]
    best = max(
        range(len(picks)),
        key=lambda i: (picks[i].chosen.performance, -i),
    )
    return picks[best]


def classify_trial(
    selection: ModelSelection, trial: Trial, hemo: HemoSeries | None = None
) -> tuple[str, float, FeatureVector]:
    """Decode one trial with a selected model; yes only above zero."""
    if hemo is None:
        hemo = derive(trial)
    fv = FeatureVector(
        amplitude_scaled(
            selection.feature_set,
            _components(
                _window_stats(
                    hemo.hr(selection.channel),
                    hemo.bv(selection.channel),
                    selection.window,
                ),
                selection.feature_set,
            ),
            selection.rescale_factor,
        ),
        selection.feature_set,
        selection.window,
        selection.channel,
        trial.trial_id,
    )
    answer, value = classify(selection.model, fv.x)
    return answer, value, fv
