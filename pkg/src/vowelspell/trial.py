"""Trial container and file ingestion.

One trial is a 36 s, two-channel, 10 Hz optical recording laid out as
rest (0-12 s), answer (12-24 s), rest (24-36 s). Intensities are strictly
positive so the log transform is defined everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import TrialIntegrityError

SAMPLE_RATE_HZ = 10
TRIAL_SECONDS = 36
TRIAL_SAMPLES = SAMPLE_RATE_HZ * TRIAL_SECONDS
ANSWER_START_S = 12
ANSWER_END_S = 24
CHANNELS = ("left", "right")

CSV_HEADER = "t,left,right"


@dataclass(frozen=True)
class Trial:
    trial_id: str
    channels: np.ndarray  # shape (2, 360): left, right
    task_label: str | None = None  # "yes" | "no" ground truth, if known
    timestamp: str | None = None
    sample_rate_hz: int = field(default=SAMPLE_RATE_HZ)

    def __post_init__(self):
        data = np.asarray(self.channels, dtype=float)
        if data.shape != (len(CHANNELS), TRIAL_SAMPLES):
            raise TrialIntegrityError(
                f"trial {self.trial_id}: expected shape "
                f"{(len(CHANNELS), TRIAL_SAMPLES)}, got {data.shape}",
            )
        if self.sample_rate_hz != SAMPLE_RATE_HZ:
            raise TrialIntegrityError(
                f"trial {self.trial_id}: sample rate must be {SAMPLE_RATE_HZ} Hz"
            )
        if not np.all(np.isfinite(data)):
            raise TrialIntegrityError(f"trial {self.trial_id}: non-finite sample")
        if np.any(data <= 0):
            bad = int(np.argwhere(data <= 0)[0][1])
            raise TrialIntegrityError(
                f"trial {self.trial_id}: non-positive intensity at sample {bad}"
            )
        if self.task_label not in (None, "yes", "no"):
            raise TrialIntegrityError(
                f"trial {self.trial_id}: task label must be yes/no"
            )
        object.__setattr__(self, "channels", data)

    def channel(self, name: str) -> np.ndarray:
        return self.channels[CHANNELS.index(name)]

    @property
    def times(self) -> np.ndarray:
        return np.arange(TRIAL_SAMPLES) / self.sample_rate_hz


def to_csv(trial: Trial) -> str:
    rows = [CSV_HEADER]
    for i in range(TRIAL_SAMPLES):
        rows.append(
            f"{i / SAMPLE_RATE_HZ:.1f},{trial.channels[0, i]:.9g},{trial.channels[1, i]:.9g}"
        )
    return "\n".join(rows) + "\n"


def from_csv(text: str, trial_id: str = "trial", task_label: str | None = None) -> Trial:
    """Parse the `t,left,right` CSV form, validating the 0.1 s grid."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != CSV_HEADER:
        raise TrialIntegrityError(f"trial {trial_id}: header must be '{CSV_HEADER}'")
    body = lines[1:]
    if len(body) != TRIAL_SAMPLES:
        raise TrialIntegrityError(
            f"trial {trial_id}: expected {TRIAL_SAMPLES} data rows, got {len(body)}"
        )
    left = np.empty(TRIAL_SAMPLES)
    right = np.empty(TRIAL_SAMPLES)
    for i, row in enumerate(body):
        parts = row.split(",")
        if len(parts) != 3:
            raise TrialIntegrityError(f"trial {trial_id}: bad row {i + 2}")
        try:
            t, lv, rv = (float(p) for p in parts)
        except ValueError as exc:
            raise TrialIntegrityError(f"trial {trial_id}: bad number, row {i + 2}") from exc
        if abs(t - i / SAMPLE_RATE_HZ) > 1e-6:
            raise TrialIntegrityError(
                f"trial {trial_id}: time grid broken at row {i + 2} (t={t})"
            )
        left[i], right[i] = lv, rv
    return Trial(trial_id, np.stack([left, right]), task_label=task_label)


def load_trial(path, task_label: str | None = None) -> Trial:
    p = Path(path)
    return from_csv(p.read_text(encoding="utf-8"), trial_id=p.stem, task_label=task_label)


def save_trial(trial: Trial, path) -> None:
    Path(path).write_text(to_csv(trial), encoding="utf-8")


def load_bundle(directory) -> list[Trial]:
    """Load a session bundle: trial CSVs plus a manifest of task labels.

    The manifest (`manifest.json`, or `manifest`) maps trial_id to
    "yes"/"no". Trials without a manifest entry load unlabeled.
    """
    root = Path(directory)
    manifest = {}
    for name in ("manifest.json", "manifest"):
        mpath = root / name
        if mpath.exists():
            manifest = json.loads(mpath.read_text(encoding="utf-8"))
            break
    trials = []
    for csv_path in sorted(root.glob("*.csv")):
        label = manifest.get(csv_path.stem)
        if label is not None and label not in ("yes", "no"):
            raise TrialIntegrityError(
                f"manifest label for {csv_path.stem} must be yes/no, got {label!r}"
            )
        trials.append(load_trial(csv_path, task_label=label))
    if not trials:
        raise TrialIntegrityError(f"no trial CSVs found in {root}")
    return trials
