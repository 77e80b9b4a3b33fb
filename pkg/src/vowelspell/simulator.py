"""Synthetic patient: physiologically-shaped trials and scripted answers.

A trial is built in log-intensity space as drift + pulse + task response
+ noise, then exponentiated. A "yes" answer raises the heart rate during
the answering period and adds a slow (~0.05 Hz) blood-volume response
that starts 3 s after the heart-rate change; a "no" answer leaves the
resting physiology untouched. Everything is a pure function of (profile,
trial index), so identical seeds give byte-identical trial streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import session as orch
from .codec import GroupingScheme
from .confirmation import QuestionForm, Verdict, assess
from .errors import TrainingError
from .lexicon import LexiconIndex, skeletonize
from .selection import ModelSelection, select_best_channel
from .trial import SAMPLE_RATE_HZ, TRIAL_SAMPLES, Trial

# Noise ladder for the accuracy-vs-noise property; "hard" is the preset
# where decoding is meant to be clearly imperfect but better than chance.
NOISE_PRESETS = {
    "clean": 0.001,
    "easy": 0.004,
    "medium": 0.009,
    "hard": 0.016,
    "extreme": 0.030,
}


@dataclass(frozen=True)
class PatientProfile:
    intended_word: str = "medaka"
    answer_accuracy: float = 1.0  # probability the patient conveys the true answer
    hr_base: float = 60.0  # bpm at rest
    hr_boost: float = 12.0  # bpm added while answering "yes"
    hrv_bpm: float = 1.0  # slow natural heart-rate wiggle
    pulse_amp: float = 0.008  # pulse wave, log-intensity units
    bv_response_amp: float = 0.02  # task blood-volume response
    bv_lag_s: float = 3.0  # BV response lag behind the HR change
    drift_amp: float = 0.004  # slow baseline wander
    noise_sigma: float = 0.002  # white noise per sample
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.answer_accuracy <= 1.0:
            raise ValueError("answer accuracy must be in [0, 1]")
        if self.hr_base <= 30:
            raise ValueError("resting heart rate must exceed 30 bpm")
        if self.bv_lag_s < 0:
            raise ValueError("blood-volume lag cannot be negative")

    def with_noise(self, sigma: float) -> "PatientProfile":
        return replace(self, noise_sigma=sigma)


@dataclass(frozen=True)
class TrialTruth:
    """Generator-side ground truth, used as test oracles."""

    absorbance: np.ndarray  # (2, n), relative to the first sample
    hr_bpm: np.ndarray  # instantaneous heart-rate profile
    response: np.ndarray  # normalized task-response envelope
    bv_wave: np.ndarray  # blood-volume component


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _response_profile(t: np.ndarray) -> np.ndarray:
    # Rise over 12-14 s, hold through the answer period, decay 24-26 s.
    return _smoothstep((t - 12.0) / 2.0) - _smoothstep((t - 24.0) / 2.0)


def generate_trial_with_truth(
    profile: PatientProfile, intended_answer: str, index: int = 0
) -> tuple[Trial, TrialTruth]:
    if intended_answer not in ("yes", "no"):
        raise ValueError(f"intended answer must be yes/no, got {intended_answer!r}")
    rng = np.random.default_rng([profile.rng_seed, 0x7261, index])
    t = np.arange(TRIAL_SAMPLES) / SAMPLE_RATE_HZ
    is_yes = intended_answer == "yes"

    r = _response_profile(t)
    hr = profile.hr_base + profile.hrv_bpm * np.sin(
        2 * np.pi * 0.04 * t + rng.uniform(0, 2 * np.pi)
    )
    if is_yes:
        hr = hr + profile.hr_boost * r
    pulse_phase = (
        2 * np.pi * np.cumsum(hr / 60.0) / SAMPLE_RATE_HZ + rng.uniform(0, 2 * np.pi)
    )
    pulse = profile.pulse_amp * np.sin(pulse_phase)

    if is_yes:
        lagged = _response_profile(t - profile.bv_lag_s)
        center = 19.0 + profile.bv_lag_s  # middle of the lagged plateau
        modulation = (1.0 + 0.5 * np.cos(2 * np.pi * 0.05 * (t - center))) / 1.5
        bv = profile.bv_response_amp * lagged * modulation
    else:
        bv = np.zeros_like(t)

    channels = np.empty((2, TRIAL_SAMPLES))
    absorbance = np.empty((2, TRIAL_SAMPLES))
    for ch in range(2):
        drift = profile.drift_amp * np.sin(
            2 * np.pi * rng.uniform(0.008, 0.02) * t + rng.uniform(0, 2 * np.pi)
        )
        noise = rng.normal(0.0, profile.noise_sigma, TRIAL_SAMPLES)
        x = drift + pulse + bv + noise
        absorbance[ch] = x - x[0]
        channels[ch] = np.exp(-x)

    trial = Trial(
        trial_id=f"sim-{profile.rng_seed}-{index}-{intended_answer}",
        channels=channels,
        task_label=intended_answer,
    )
    return trial, TrialTruth(absorbance, hr, r, bv)


def generate_trial(profile: PatientProfile, intended_answer: str, index: int = 0) -> Trial:
    return generate_trial_with_truth(profile, intended_answer, index)[0]


def scripted_answer(profile: PatientProfile, true_answer: str, index: int = 0) -> str:
    """The answer the patient tries to convey: flipped with prob 1 - p."""
    if true_answer not in ("yes", "no"):
        raise ValueError("true answer must be yes/no")
    rng = np.random.default_rng([profile.rng_seed, 0x616e, index])
    if rng.random() < profile.answer_accuracy:
        return true_answer
    return "no" if true_answer == "yes" else "yes"


def run_calibration(
    profile: PatientProfile, start_index: int = 0
) -> list[tuple[Trial, Trial]]:
    """Four labeled yes/no pairs for model selection."""
    pairs = []
    idx = start_index
    for _ in range(4):
        yes = generate_trial(profile, "yes", idx)
        no = generate_trial(profile, "no", idx + 1)
        pairs.append((yes, no))
        idx += 2
    return pairs


def calibrate(profile: PatientProfile, backend: str | None = None) -> ModelSelection:
    return select_best_channel(run_calibration(profile), backend=backend)


# -- scripted full-system play ---------------------------------------------


@dataclass
class AutoplayConfig:
    max_sessions: int = 5
    planned_rounds: int = 8
    question_budget: int = orch.QUESTION_BUDGET
    seconds_per_trial: float = 40.0
    max_discretion_retries: int = 1
    max_variant_tries: int = 2  # substitutions tried before restarting
    screen_after_rounds: int = 4  # early-reject checkpoint
    screen_min_affirm: int = 2
    min_budget_for_candidate: int = 5  # don't open a ledger we can't use
    log_dir: str | None = None


@dataclass
class AutoplayResult:
    accepted_word: str | None
    sessions: int
    questions_asked: int
    session_logs: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.accepted_word is not None


class _ScriptedClock:
    """Deterministic clock: one tick per orchestrator operation."""

    def __init__(self, start: float, step: float):
        self.t = start
        self.step = step

    def __call__(self) -> float:
        self.t += self.step
        return self.t


class _CaregiverArc:
    """Word-arc memory the caregiver stand-in carries across sessions."""

    def __init__(self):
        self.skeleton: tuple | None = None
        self.rejected: set[str] = set()
        self.tried_variants: set[tuple] = set()
        self.discretion_retries: dict[str, int] = {}


def _patient_acquisition_answer(
    scheme: GroupingScheme, word_skeleton: tuple, position: int, partial: list
) -> str:
    """The truthful next answer while acquiring the intended symbol."""
    target = word_skeleton[position - 1]
    path = scheme.encode(position, target)
    if len(partial) < len(path) and tuple(partial) == tuple(path[: len(partial)]):
        return path[len(partial)]
    # The symbol is already unreachable: the patient rests (reads as no).
    return "no"


def autoplay(
    profile: PatientProfile,
    scheme: GroupingScheme,
    lexicon: LexiconIndex,
    config: AutoplayConfig | None = None,
    model: ModelSelection | None = None,
) -> AutoplayResult:
    """Play whole sessions with a rule-based caregiver until acceptance.

    The stand-in asks the top-ranked untried candidate, retries a word
    once when the verdict lands in the discretion band, rejects below it,
    walks one-substitution variants when candidates run out, and restarts
    acquisition as a last resort.
    """
    config = config or AutoplayConfig()
    if model is None:
        model = calibrate(profile)
    word_skeleton = skeletonize(scheme, profile.intended_word)
    arc = _CaregiverArc()
    result = AutoplayResult(None, 0, 0)
    answer_index = 0
    trial_index = 10_000  # distinct stream from the calibration trials

    for session_no in range(config.max_sessions):
        result.sessions += 1
        clock = _ScriptedClock(start=session_no * 10_000.0, step=config.seconds_per_trial)
        log_path = (
            f"{config.log_dir}/session-{session_no + 1}.jsonl" if config.log_dir else None
        )
        sess = orch.start_session(
            {
                "subject": f"sim-{profile.rng_seed}",
                "scheme": scheme.name,
                "lexicon": "custom",
                "model_id": "autoplay",
                "planned_rounds": config.planned_rounds,
                "question_budget": config.question_budget,
                "session_id": f"auto-{profile.rng_seed}-{session_no + 1}",
                "start_time": clock.t,
                "resume_skeleton": arc.skeleton,
            },
            model,
            scheme=scheme,
            lexicon=lexicon,
            log_path=log_path,
            clock=clock,
        )
        if log_path:
            result.session_logs.append(log_path)

        def patient_trial(true_answer: str) -> Trial:
            nonlocal answer_index, trial_index
            conveyed = scripted_answer(profile, true_answer, answer_index)
            answer_index += 1
            trial = generate_trial(profile, conveyed, trial_index)
            trial_index += 1
            return trial

        def budget_left() -> int:
            return sess.header.question_budget - sess.state.question_budget_used

        def restart_arc():
            arc.skeleton = None
            arc.tried_variants.clear()
            sess.restart()

        while not sess.state.phase.terminal:
            phase = sess.state.phase
            if phase == orch.Phase.ACQUIRING:
                true = _patient_acquisition_answer(
                    scheme, word_skeleton, sess.state.position, sess.state.partial
                )
                outcome = sess.submit_trial(trial=patient_trial(true))
                if outcome.refused:
                    sess.abandon("session limit")
                    break
                result.questions_asked += 1
                if sess.state.phase == orch.Phase.QUERYING:
                    arc.skeleton = tuple(sess.state.skeleton)

            elif phase == orch.Phase.QUERYING:
                hits = sess.consult()
                if sess.state.phase == orch.Phase.SUBSTITUTION:
                    continue  # empty query: substitution options are up
                fresh = [e.reading for e in hits if e.reading not in arc.rejected]
                if not fresh:
                    # The acquired skeleton led nowhere; re-acquiring is
                    # cheaper than walking every one-symbol variant.
                    restart_arc()
                    continue
                if budget_left() < config.min_budget_for_candidate:
                    sess.abandon("not enough budget for another candidate")
                    break
                sess.ask_candidate(fresh[0])

            elif phase == orch.Phase.SUBSTITUTION:
                options = [
                    o
                    for o in (sess.state.substitutions or [])
                    if tuple(o["skeleton"]) not in arc.tried_variants
                ]
                if not options or len(arc.tried_variants) >= config.max_variant_tries:
                    restart_arc()
                    continue
                target = tuple(options[0]["skeleton"])
                arc.tried_variants.add(target)
                pos = next(
                    i + 1
                    for i in range(orch.SKELETON_LEN)
                    if sess.state.skeleton[i] != target[i]
                )
                sess.substitute(pos, target[pos - 1])

            elif phase == orch.Phase.CONFIRMING:
                ledger = sess.state.ledger
                if not ledger.complete:
                    if (
                        len(ledger.rounds) == config.screen_after_rounds
                        and ledger.affirm_count < config.screen_min_affirm
                    ):
                        # Early screen: the patient is denying this word.
                        sess.resolve("reject", note="stand-in: screened out")
                        arc.rejected.add(ledger.word)
                        continue
                    word = ledger.word
                    form = ledger.next_form()
                    matches = word == profile.intended_word
                    if form == QuestionForm.AFFIRMATIVE:
                        true = "yes" if matches else "no"
                    else:
                        true = "no" if matches else "yes"
                    outcome = sess.submit_trial(trial=patient_trial(true))
                    if outcome.refused:
                        sess.abandon("session limit")
                        break
                    result.questions_asked += 1
                    continue
                verdict = assess(ledger)
                if verdict.verdict == Verdict.ACCEPT:
                    sess.resolve("accept", note="stand-in: verdict accept")
                elif verdict.verdict == Verdict.CAREGIVER_DISCRETION and not verdict.weak:
                    retries = arc.discretion_retries.get(ledger.word, 0)
                    if retries < config.max_discretion_retries:
                        # Re-confirm with a fresh ledger next session, the
                        # way the weekly arcs in practice do.
                        arc.discretion_retries[ledger.word] = retries + 1
                        sess.abandon("re-confirm next session")
                        break
                    sess.resolve("reject", note="stand-in: repeated discretion")
                    arc.rejected.add(ledger.word)
                else:
                    sess.resolve("reject", note="stand-in: verdict below discretion")
                    arc.rejected.add(ledger.word)

            elif phase == orch.Phase.PRESENTING:
                # A candidate was rejected mid-arc: try the next one.
                remaining = [
                    w for w in (sess.state.candidates or []) if w not in arc.rejected
                ]
                if remaining and budget_left() >= config.min_budget_for_candidate:
                    sess.ask_candidate(remaining[0])
                elif remaining:
                    sess.abandon("not enough budget for another candidate")
                    break
                else:
                    restart_arc()

        if sess.state.phase == orch.Phase.ACCEPTED:
            result.accepted_word = sess.state.accepted_word
            break
    return result
