"""Caregiver session orchestration as an event-sourced state machine.

A session walks: symbol acquisition (yes/no trials decode group symbols)
-> dictionary consultation -> candidate presentation -> confirmation
rounds -> acceptance, with substitution browsing and restart as caregiver
escapes. Every state change is an appended event; folding the event log
reproduces the state exactly, which is how multi-day arcs are replayed
and how crash recovery works.

Budgets: at most 16 patient-answered questions and 30 minutes per
session. Every submitted trial counts against the budget, whether it
answers a vowel question or a confirmation question.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field, asdict
from enum import Enum
from pathlib import Path

from . import confirmation as cf
from .codec import GroupingScheme, load_scheme
from .errors import (
    IncompleteSequenceError,
    PhaseError,
    ProtocolError,
    ReplayError,
    TrainingError,
)
from .lexicon import (
    LexiconIndex,
    load_lexicon,
    neighbors,
    query,
    validate_skeleton,
)
from .selection import ModelSelection, classify_trial
from .trial import Trial

QUESTION_BUDGET = 16
TIME_LIMIT_S = 1800
SKELETON_LEN = 3

AFFIRMATIVE_TEMPLATE = "Is it right that your word is '{word}'?"
NEGATIVE_TEMPLATE = "Is it right that your word is not '{word}'?"


class Phase(str, Enum):
    CALIBRATING = "Calibrating"
    ACQUIRING = "AcquiringSymbol"
    QUERYING = "Querying"
    PRESENTING = "PresentingCandidate"
    CONFIRMING = "Confirming"
    SUBSTITUTION = "SubstitutionBrowsing"
    ACCEPTED = "Accepted"
    ABANDONED = "Abandoned"

    @property
    def terminal(self) -> bool:
        return self in (Phase.ACCEPTED, Phase.ABANDONED)


class EventKind(str, Enum):
    TRIAL_RUN = "TrialRun"
    ANSWER_DECODED = "AnswerDecoded"
    SYMBOL_DECODED = "SymbolDecoded"
    QUERY_ISSUED = "QueryIssued"
    CANDIDATE_ASKED = "CandidateAsked"
    CONFIRM_ROUND = "ConfirmRound"
    SUBSTITUTE = "Substitute"
    RESTART = "Restart"
    ACCEPT = "Accept"
    ABANDON = "Abandon"
    CAREGIVER_NOTE = "CaregiverNote"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    timestamp: float
    kind: EventKind
    payload: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "kind": self.kind.value,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionEvent":
        return cls(d["seq"], d["timestamp"], EventKind(d["kind"]), d["payload"])


@dataclass(frozen=True)
class SessionHeader:
    session_id: str
    subject: str
    scheme: str
    lexicon: str
    model_id: str
    date: str
    start_time: float
    planned_rounds: int = cf.DEFAULT_PLANNED_ROUNDS
    question_budget: int = QUESTION_BUDGET
    time_limit_s: int = TIME_LIMIT_S
    resume_skeleton: tuple | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["header"] = True
        d["resume_skeleton"] = (
            list(self.resume_skeleton) if self.resume_skeleton else None
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SessionHeader":
        resume = d.get("resume_skeleton")
        return cls(
            session_id=d["session_id"],
            subject=d["subject"],
            scheme=d["scheme"],
            lexicon=d["lexicon"],
            model_id=d.get("model_id", ""),
            date=d.get("date", ""),
            start_time=d["start_time"],
            planned_rounds=d.get("planned_rounds", cf.DEFAULT_PLANNED_ROUNDS),
            question_budget=d.get("question_budget", QUESTION_BUDGET),
            time_limit_s=d.get("time_limit_s", TIME_LIMIT_S),
            resume_skeleton=tuple(resume) if resume else None,
        )


@dataclass
class SessionState:
    """Mutable fold target; every field is reproduced by replay."""

    phase: Phase
    position: int = 1
    partial: list = field(default_factory=list)
    skeleton: list = field(default_factory=list)
    candidates: list | None = None
    substitutions: list | None = None
    presented_word: str | None = None
    ledger: cf.ConfirmationLedger | None = None
    accepted_word: str | None = None
    rejected_words: list = field(default_factory=list)
    question_budget_used: int = 0
    elapsed_s: int = 0
    low_trust: bool = False
    last_answer: dict | None = None
    event_count: int = 0
    trial_count: int = 0

    def to_dict(self) -> dict:
        return {
            "phase": self.phase.value,
            "position": self.position,
            "partial": list(self.partial),
            "skeleton": list(self.skeleton),
            "candidates": list(self.candidates) if self.candidates is not None else None,
            "substitutions": (
                [dict(s) for s in self.substitutions]
                if self.substitutions is not None
                else None
            ),
            "presented_word": self.presented_word,
            "ledger": self.ledger.to_dict() if self.ledger else None,
            "accepted_word": self.accepted_word,
            "rejected_words": list(self.rejected_words),
            "question_budget_used": self.question_budget_used,
            "elapsed_s": self.elapsed_s,
            "low_trust": self.low_trust,
            "last_answer": self.last_answer,
            "event_count": self.event_count,
            "trial_count": self.trial_count,
        }


def initial_state(header: SessionHeader, scheme: GroupingScheme) -> SessionState:
    if header.resume_skeleton:
        skel = list(validate_skeleton(scheme, header.resume_skeleton))
        return SessionState(phase=Phase.QUERYING, position=SKELETON_LEN + 1, skeleton=skel)
    return SessionState(phase=Phase.ACQUIRING)


def apply_event(
    state: SessionState,
    scheme: GroupingScheme,
    header: SessionHeader,
    event: SessionEvent,
) -> SessionState:
    """Fold one event into the state, validating phase legality."""
    kind = event.kind
    p = event.payload
    if state.phase.terminal and kind != EventKind.CAREGIVER_NOTE:
        raise ReplayError(f"event {kind.value} after terminal phase {state.phase.value}")

    if kind == EventKind.TRIAL_RUN:
        if state.phase not in (Phase.ACQUIRING, Phase.CONFIRMING):
            raise ReplayError(f"trial run in phase {state.phase.value}")
        state.question_budget_used += 1
        state.trial_count += 1

    elif kind == EventKind.ANSWER_DECODED:
        answer = p["answer"]
        if answer not in ("yes", "no"):
            raise ReplayError(f"bad answer {answer!r}")
        if state.phase == Phase.ACQUIRING:
            state.partial.append(answer)
        elif state.phase != Phase.CONFIRMING:
            raise ReplayError(f"answer decoded in phase {state.phase.value}")
        state.last_answer = dict(p)

    elif kind == EventKind.SYMBOL_DECODED:
        if state.phase != Phase.ACQUIRING:
            raise ReplayError("symbol decoded outside acquisition")
        expected = scheme.decode(state.position, state.partial)
        if p["symbol"] != expected:
            raise ReplayError(
                f"log says symbol {p['symbol']} but answers decode to {expected}"
            )
        state.skeleton.append(p["symbol"])
        state.partial = []
        state.position += 1
        state.low_trust = False
        if len(state.skeleton) >= SKELETON_LEN:
            state.phase = Phase.QUERYING

    elif kind == EventKind.QUERY_ISSUED:
        if state.phase not in (Phase.QUERYING, Phase.SUBSTITUTION):
            raise ReplayError(f"query issued in phase {state.phase.value}")
        if list(p["skeleton"]) != list(state.skeleton):
            raise ReplayError("query skeleton disagrees with state")
        state.candidates = list(p["candidates"])
        if state.candidates:
            state.phase = Phase.QUERYING
            state.substitutions = None
        else:
            state.phase = Phase.SUBSTITUTION
            state.substitutions = [dict(s) for s in p.get("substitutions", [])]

    elif kind == EventKind.CANDIDATE_ASKED:
        if state.phase not in (Phase.QUERYING, Phase.SUBSTITUTION, Phase.PRESENTING):
            raise ReplayError(f"candidate asked in phase {state.phase.value}")
        word = p["word"]
        if p.get("continued") and state.ledger and state.ledger.word == word:
            state.ledger = state.ledger.extended(p.get("extra_rounds", 2))
        else:
            state.ledger = cf.ConfirmationLedger(word, p.get("planned_rounds", header.planned_rounds))
        state.presented_word = word
        state.phase = Phase.CONFIRMING

    elif kind == EventKind.CONFIRM_ROUND:
        if state.phase != Phase.CONFIRMING or state.ledger is None:
            raise ReplayError("confirm round without an open ledger")
        state.ledger = cf.record(
            state.ledger, cf.QuestionForm(p["question_form"]), p["raw_answer"]
        )
        if p.get("effective") and p["effective"] != state.ledger.rounds[-1].effective:
            raise ReplayError("logged effective answer disagrees with form logic")

    elif kind == EventKind.SUBSTITUTE:
        if state.phase not in (Phase.SUBSTITUTION, Phase.PRESENTING):
            raise ReplayError(f"substitute in phase {state.phase.value}")
        pos = int(p["position"])
        if not 1 <= pos <= SKELETON_LEN or len(state.skeleton) != SKELETON_LEN:
            raise ReplayError("substitution needs a complete skeleton")
        if state.skeleton[pos - 1] != p["old"]:
            raise ReplayError("substitution old symbol disagrees with state")
        new_skel = list(state.skeleton)
        new_skel[pos - 1] = p["new"]
        validate_skeleton(scheme, new_skel)
        state.skeleton = new_skel
        state.candidates = None
        state.substitutions = None
        state.presented_word = None
        state.ledger = None
        state.phase = Phase.QUERYING

    elif kind == EventKind.RESTART:
        if state.phase.terminal:
            raise ReplayError("restart after terminal phase")
        state.position = 1
        state.partial = []
        state.skeleton = []
        state.candidates = None
        state.substitutions = None
        state.presented_word = None
        state.ledger = None
        state.low_trust = False
        state.phase = Phase.ACQUIRING

    elif kind == EventKind.ACCEPT:
        if state.phase != Phase.CONFIRMING or state.ledger is None:
            raise ReplayError("accept without confirmation")
        a = cf.assess(state.ledger)
        if not state.ledger.complete or a.confidence < cf.REJECT_CEILING:
            raise ReplayError(
                "accept requires a complete ledger out of the reject band"
            )
        state.accepted_word = state.ledger.word
        state.phase = Phase.ACCEPTED

    elif kind == EventKind.ABANDON:
        state.phase = Phase.ABANDONED

    elif kind == EventKind.CAREGIVER_NOTE:
        action = p.get("action")
        if action == "flag_low_trust":
            if state.phase == Phase.ACQUIRING:
                state.low_trust = True
        elif action == "pick":
            if state.phase not in (Phase.QUERYING, Phase.SUBSTITUTION, Phase.PRESENTING):
                raise ReplayError(f"pick in phase {state.phase.value}")
            state.presented_word = p["word"]
            state.phase = Phase.PRESENTING
        elif action == "browse_substitutions":
            if state.phase not in (Phase.QUERYING, Phase.SUBSTITUTION, Phase.PRESENTING):
                raise ReplayError(f"browse in phase {state.phase.value}")
            state.substitutions = [dict(s) for s in p.get("options", [])]
            state.phase = Phase.SUBSTITUTION
        elif action == "resolve":
            if state.phase != Phase.CONFIRMING or state.ledger is None:
                raise ReplayError("resolve outside confirmation")
            decision = p["decision"]
            if decision == "reject":
                state.rejected_words.append(state.ledger.word)
                state.ledger = None
                state.presented_word = None
                state.phase = Phase.PRESENTING
            elif decision == "continue":
                state.ledger = state.ledger.extended(p.get("extra_rounds", 2))
            else:
                raise ReplayError(f"unknown resolve decision {decision!r}")
        # plain notes (incl. "session limit reached") change nothing

    else:  # pragma: no cover - enum is exhaustive
        raise ReplayError(f"unknown event kind {kind}")

    state.event_count += 1
    state.elapsed_s = max(state.elapsed_s, int(event.timestamp - header.start_time))
    return state


@dataclass(frozen=True)
class TrialOutcome:
    refused: bool
    answer: str | None = None
    decision_value: float | None = None
    low_trust: bool = False
    symbol: str | None = None
    note: str | None = None


class Session:
    """Live session: validates operations, emits events, folds them.

    ``model`` is required to decode trials; replayed sessions fold
    recorded answers and need no model. ``clock`` returns unix seconds.
    """

    def __init__(
        self,
        header: SessionHeader,
        scheme: GroupingScheme,
        lexicon: LexiconIndex | None = None,
        model: ModelSelection | None = None,
        simulator=None,
        log_path=None,
        clock=None,
    ):
        self.header = header
        self.scheme = scheme
        self.lexicon = lexicon
        self.model = model
        self.simulator = simulator
        self.clock = clock or time.time
        self.log_path = Path(log_path) if log_path else None
        self.events: list[SessionEvent] = []
        self.state = initial_state(header, scheme)
        if self.log_path:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            with self.log_path.open("w", encoding="utf-8") as fh:
                fh.write(json.dumps(self.header.to_dict()) + "\n")

    # -- event plumbing ----------------------------------------------------

    def _emit(self, kind: EventKind, payload: dict, now: float) -> SessionEvent:
        event = SessionEvent(len(self.events), now, kind, payload)
        apply_event(self.state, self.scheme, self.header, event)
        self.events.append(event)
        if self.log_path:
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event.to_dict()) + "\n")
        return event

    def _now(self, now) -> float:
        return self.clock() if now is None else float(now)

    def _require_phase(self, *phases: Phase):
        if self.state.phase not in phases:
            raise PhaseError(
                f"operation needs phase {'/'.join(p.value for p in phases)}, "
                f"session is {self.state.phase.value}",
                phase=self.state.phase.value,
            )

    # -- operations --------------------------------------------------------

    def submit_trial(
        self, trial: Trial | None = None, simulate_intended: str | None = None, now=None
    ) -> TrialOutcome:
        """Run one measurement and route the decoded yes/no.

        In acquisition the answer extends the current symbol's sequence;
        in confirmation it fills the next round of the open ledger.
        """
        self._require_phase(Phase.ACQUIRING, Phase.CONFIRMING)
        if self.model is None:
            raise TrainingError("session has no calibrated model")
        if self.state.phase == Phase.CONFIRMING and self.state.ledger.complete:
            raise PhaseError(
                "confirmation rounds are complete; resolve the candidate",
                phase=self.state.phase.value,
            )
        now = self._now(now)
        elapsed = int(now - self.header.start_time)
        if (
            self.state.question_budget_used >= self.header.question_budget
            or elapsed > self.header.time_limit_s
        ):
            self._emit(
                EventKind.CAREGIVER_NOTE,
                {"action": "limit", "note": "session limit reached"},
                now,
            )
            return TrialOutcome(refused=True, note="session limit reached")

        if trial is None:
            if simulate_intended not in ("yes", "no"):
                raise ProtocolError("need a trial or a simulate directive")
            if self.simulator is None:
                raise ProtocolError("session was not configured with a simulator")
            trial = self.simulator(simulate_intended, self.state.trial_count)

        answer, value, _ = classify_trial(self.model, trial)
        context = (
            "acquisition" if self.state.phase == Phase.ACQUIRING else "confirmation"
        )
        low_trust = self.state.low_trust and context == "acquisition"
        self._emit(
            EventKind.TRIAL_RUN,
            {
                "trial_id": trial.trial_id,
                "source": "simulated" if simulate_intended else "upload",
                "task_label": trial.task_label,
            },
            now,
        )

        if context == "confirmation":
            form = self.state.ledger.next_form()
            self._emit(
                EventKind.ANSWER_DECODED,
                {
                    "answer": answer,
                    "decision_value": value,
                    "low_trust": False,
                    "context": context,
                },
                now,
            )
            effective = cf.effective_answer(form, answer)
            ledger_after = cf.record(self.state.ledger, form, answer)
            self._emit(
                EventKind.CONFIRM_ROUND,
                {
                    "question_form": form.value,
                    "raw_answer": answer,
                    "effective": effective,
                    "affirm": ledger_after.affirm_count,
                    "deny": ledger_after.deny_count,
                    "confidence": cf.confidence(
                        ledger_after.affirm_count, ledger_after.deny_count
                    ),
                },
                now,
            )
            return TrialOutcome(False, answer, value, False)

        self._emit(
            EventKind.ANSWER_DECODED,
            {
                "answer": answer,
                "decision_value": value,
                "low_trust": low_trust,
                "context": context,
            },
            now,
        )
        symbol = None
        try:
            symbol = self.scheme.decode(self.state.position, self.state.partial)
        except IncompleteSequenceError:
            pass
        if symbol is not None:
            self._emit(
                EventKind.SYMBOL_DECODED,
                {
                    "position": self.state.position,
                    "symbol": symbol,
                    "answers": list(self.state.partial),
                },
                now,
            )
        return TrialOutcome(False, answer, value, low_trust, symbol=symbol)

    def consult(self, now=None) -> list:
        """Query the lexicon with the acquired skeleton; rank candidates."""
        self._require_phase(Phase.QUERYING, Phase.SUBSTITUTION)
        if len(self.state.skeleton) != SKELETON_LEN:
            raise PhaseError("skeleton incomplete; keep acquiring symbols")
        if self.lexicon is None:
            raise ProtocolError("session has no lexicon")
        hits = query(self.lexicon, self.state.skeleton)
        payload = {
            "skeleton": list(self.state.skeleton),
            "count": len(hits),
            "candidates": [e.reading for e in hits],
        }
        if not hits:
            payload["substitutions"] = self._substitution_options()
        self._emit(EventKind.QUERY_ISSUED, payload, self._now(now))
        return hits

    def _substitution_options(self) -> list[dict]:
        options = []
        for variant, hits in neighbors(self.lexicon, self.state.skeleton):
            options.append({"skeleton": list(variant), "count": len(hits)})
        return options

    def browse_substitutions(self, now=None) -> list[dict]:
        self._require_phase(Phase.QUERYING, Phase.SUBSTITUTION, Phase.PRESENTING)
        options = self._substitution_options()
        self._emit(
            EventKind.CAREGIVER_NOTE,
            {"action": "browse_substitutions", "options": options},
            self._now(now),
        )
        return options

    def pick_candidate(self, word: str, now=None) -> None:
        self._require_phase(Phase.QUERYING, Phase.SUBSTITUTION, Phase.PRESENTING)
        self._emit(
            EventKind.CAREGIVER_NOTE, {"action": "pick", "word": word}, self._now(now)
        )

    def ask_candidate(
        self, word: str | None = None, continue_ledger: bool = False, now=None
    ) -> None:
        """Open (or extend) the confirmation ledger for a candidate."""
        self._require_phase(Phase.QUERYING, Phase.SUBSTITUTION, Phase.PRESENTING)
        now = self._now(now)
        if word is None:
            word = self.state.presented_word
        if not word:
            raise ProtocolError("no candidate word given or presented")
        if self.state.phase != Phase.PRESENTING or self.state.presented_word != word:
            self._emit(
                EventKind.CAREGIVER_NOTE, {"action": "pick", "word": word}, now
            )
        self._emit(
            EventKind.CANDIDATE_ASKED,
            {
                "word": word,
                "planned_rounds": self.header.planned_rounds,
                "continued": continue_ledger,
            },
            now,
        )

    def resolve(self, decision: str, note: str = "", now=None) -> None:
        """Caregiver decision on the confirmation verdict.

        Accept ratifies an accept-band verdict or resolves discretion;
        it is refused in the reject band and before rounds complete.
        Reject may interrupt an unfinished ledger. Continue adds a pair
        of rounds to a complete ledger.
        """
        self._require_phase(Phase.CONFIRMING)
        now = self._now(now)
        ledger = self.state.ledger
        a = cf.assess(ledger)
        if decision == "accept":
            if not ledger.complete:
                raise ProtocolError("confirmation rounds are not complete")
            if a.confidence < cf.REJECT_CEILING:
                raise ProtocolError(
                    f"verdict is in the reject band ({a.confidence:.3f}); "
                    "acceptance refused"
                )
            self._emit(
                EventKind.ACCEPT,
                {
                    "word": ledger.word,
                    "confidence": a.confidence,
                    "verdict": a.verdict.value,
                    "weak": a.weak,
                    "note": note,
                },
                now,
            )
        elif decision == "reject":
            self._emit(
                EventKind.CAREGIVER_NOTE,
                {
                    "action": "resolve",
                    "decision": "reject",
                    "word": ledger.word,
                    "note": note,
                },
                now,
            )
        elif decision == "continue":
            if not ledger.complete:
                raise ProtocolError("rounds are still running; nothing to continue")
            self._emit(
                EventKind.CAREGIVER_NOTE,
                {
                    "action": "resolve",
                    "decision": "continue",
                    "extra_rounds": 2,
                    "word": ledger.word,
                    "note": note,
                },
                now,
            )
        else:
            raise ProtocolError(f"unknown decision {decision!r}")

    def substitute(self, position: int, symbol: str, now=None) -> None:
        self._require_phase(Phase.SUBSTITUTION, Phase.PRESENTING)
        if not 1 <= position <= SKELETON_LEN:
            raise ProtocolError(f"position must be 1..{SKELETON_LEN}")
        old = self.state.skeleton[position - 1]
        if old == symbol:
            raise ProtocolError("substitution must change the symbol")
        new_skel = list(self.state.skeleton)
        new_skel[position - 1] = symbol
        validate_skeleton(self.scheme, new_skel)
        self._emit(
            EventKind.SUBSTITUTE,
            {
                "position": position,
                "old": old,
                "new": symbol,
                "skeleton_after": new_skel,
            },
            self._now(now),
        )

    def restart(self, now=None) -> None:
        if self.state.phase.terminal:
            raise PhaseError("session already ended")
        self._emit(EventKind.RESTART, {}, self._now(now))

    def abandon(self, reason: str = "", now=None) -> None:
        if self.state.phase.terminal:
            raise PhaseError("session already ended")
        self._emit(EventKind.ABANDON, {"reason": reason}, self._now(now))

    def flag_low_trust(self, note: str = "", now=None) -> None:
        self._require_phase(Phase.ACQUIRING)
        self._emit(
            EventKind.CAREGIVER_NOTE,
            {"action": "flag_low_trust", "note": note},
            self._now(now),
        )

    def note(self, text: str, now=None) -> None:
        self._emit(EventKind.CAREGIVER_NOTE, {"note": text}, self._now(now))

    # -- derived views -----------------------------------------------------

    def next_question(self) -> dict | None:
        s = self.state
        if s.phase == Phase.ACQUIRING:
            q = self.scheme.next_question(s.position, s.partial)
            return {
                "kind": "vowel",
                "position": s.position,
                "text": q.text,
                "subset": list(q.subset),
            }
        if s.phase == Phase.CONFIRMING and not s.ledger.complete:
            form = s.ledger.next_form()
            template = (
                AFFIRMATIVE_TEMPLATE
                if form == cf.QuestionForm.AFFIRMATIVE
                else NEGATIVE_TEMPLATE
            )
            return {
                "kind": "confirmation",
                "form": form.value,
                "word": s.ledger.word,
                "text": template.format(word=s.ledger.word),
            }
        return None

    def to_dict(self) -> dict:
        return {
            "header": self.header.to_dict(),
            "state": self.state.to_dict(),
            "events": [e.to_dict() for e in self.events],
        }


def start_session(
    config: dict,
    model: ModelSelection | None,
    scheme: GroupingScheme | None = None,
    lexicon: LexiconIndex | None = None,
    simulator=None,
    log_path=None,
    clock=None,
) -> Session:
    """Create a live session; a calibrated model is required."""
    if model is None:
        raise TrainingError("cannot start a session without a calibrated model")
    clock = clock or time.time
    scheme_name = config.get("scheme", "japanese-vowel")
    scheme = scheme or load_scheme(scheme_name)
    lexicon_name = config.get("lexicon", "japanese-sample")
    if lexicon is None:
        lexicon = load_lexicon(lexicon_name, scheme)
    start_time = config.get("start_time")
    if start_time is None:
        start_time = clock()
    header = SessionHeader(
        session_id=config.get("session_id") or uuid.uuid4().hex[:12],
        subject=config.get("subject", "anonymous"),
        scheme=scheme_name,
        lexicon=lexicon_name,
        model_id=config.get("model_id", ""),
        date=config.get("date", ""),
        start_time=float(start_time),
        planned_rounds=int(config.get("planned_rounds", cf.DEFAULT_PLANNED_ROUNDS)),
        question_budget=int(config.get("question_budget", QUESTION_BUDGET)),
        time_limit_s=int(config.get("time_limit_s", TIME_LIMIT_S)),
        resume_skeleton=(
            tuple(config["resume_skeleton"]) if config.get("resume_skeleton") else None
        ),
    )
    return Session(
        header,
        scheme,
        lexicon=lexicon,
        model=model,
        simulator=simulator,
        log_path=log_path,
        clock=clock,
    )


def replay(header: SessionHeader, events, scheme: GroupingScheme | None = None) -> Session:
    """Fold recorded events into a session (no model needed)."""
    scheme = scheme or load_scheme(header.scheme)
    session = Session(header, scheme)
    for i, event in enumerate(events):
        if event.seq != i:
            raise ReplayError(f"event sequence broken at {event.seq} (expected {i})")
        apply_event(session.state, scheme, header, event)
        session.events.append(event)
    return session


def read_log(path) -> tuple[SessionHeader, list[SessionEvent]]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines:
        raise ReplayError(f"empty session log {path}")
    head = json.loads(lines[0])
    if not head.get("header"):
        raise ReplayError("first log line must be the session header")
    header = SessionHeader.from_dict(head)
    events = [SessionEvent.from_dict(json.loads(ln)) for ln in lines[1:]]
    return header, events


def replay_log(path) -> Session:
    header, events = read_log(path)
    return replay(header, events)
