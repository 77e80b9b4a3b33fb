"""Word-confirmation statistics and the accept/discretion policy.

A candidate word is checked with alternating question forms (affirmative,
then negative). An answer counts as an affirmation when it is "yes" to the
affirmative form or "no" to the negative form. Confidence in the word is
the posterior probability, under a uniform prior and binomial likelihood,
that the affirmation rate exceeds one half.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ProtocolError

# Policy bands. 0.91 is reached by 6 affirmations out of 8 (0.91015625),
# 0.746 by 5 out of 8 (0.74609375).
ACCEPT_THRESHOLD = 0.91
DISCRETION_FLOOR = 0.746
REJECT_CEILING = 0.5

DEFAULT_PLANNED_ROUNDS = 8


def confidence(affirm: int, deny: int) -> float:
    """Posterior probability that the affirmation rate exceeds 1/2.

    With ``s`` affirmations and ``f`` denials the posterior is
    Beta(s+1, f+1); the mass above 1/2 reduces to a binomial tail,
    sum_{k=0}^{s} C(s+f+1, k) / 2^(s+f+1), evaluated here in exact
    integer arithmetic.
    """
    if affirm < 0 or deny < 0:
        raise ValueError("counts must be non-negative")
    n1 = affirm + deny + 1
    mass = sum(math.comb(n1, k) for k in range(affirm + 1))
    return mass / (1 << n1)


class QuestionForm(str, Enum):
    AFFIRMATIVE = "affirmative"
    NEGATIVE = "negative"


class Verdict(str, Enum):
    ACCEPT = "accept"
    CAREGIVER_DISCRETION = "caregiver_discretion"
    REJECT = "reject"
    CONTINUE = "continue"


def form_for_slot(slot: int) -> QuestionForm:
    """Question form for the 0-based round index: pairs alternate."""
    return QuestionForm.AFFIRMATIVE if slot % 2 == 0 else QuestionForm.NEGATIVE


def effective_answer(form: QuestionForm, raw_answer: str) -> str:
    """Map a raw yes/no onto affirm/deny given the question form."""
    if raw_answer not in ("yes", "no"):
        raise ValueError(f"raw answer must be yes/no, got {raw_answer!r}")
    affirmed = (form == QuestionForm.AFFIRMATIVE) == (raw_answer == "yes")
    return "affirm" if affirmed else "deny"


@dataclass(frozen=True)
class Round:
    question_form: QuestionForm
    raw_answer: str
    effective: str


@dataclass(frozen=True)
class ConfirmationLedger:
    """Immutable record of confirmation rounds for one candidate word."""

    word: str
    planned_rounds: int = DEFAULT_PLANNED_ROUNDS
    rounds: tuple[Round, ...] = field(default_factory=tuple)

    @property
    def affirm_count(self) -> int:
        return sum(1 for r in self.rounds if r.effective == "affirm")

    @property
    def deny_count(self) -> int:
        return sum(1 for r in self.rounds if r.effective == "deny")

    @property
    def complete(self) -> bool:
        return len(self.rounds) >= self.planned_rounds

    def next_form(self) -> QuestionForm:
        return form_for_slot(len(self.rounds))

    def extended(self, extra_rounds: int) -> "ConfirmationLedger":
        """Continue the same ledger with a larger round budget."""
        if extra_rounds <= 0 or extra_rounds % 2:
            raise ProtocolError("rounds are added in whole pairs")
        return ConfirmationLedger(
            self.word, self.planned_rounds + extra_rounds, self.rounds
        )

    def to_dict(self) -> dict:
        a = assess(self)
        return {
            "word": self.word,
            "planned_rounds": self.planned_rounds,
            "rounds": [
                {
                    "question_form": r.question_form.value,
                    "raw_answer": r.raw_answer,
                    "effective": r.effective,
                }
                for r in self.rounds
            ],
            "affirm": self.affirm_count,
            "deny": self.deny_count,
            "confidence": a.confidence,
            "verdict": a.verdict.value,
            "weak": a.weak,
            "bands": {"accept": ACCEPT_THRESHOLD, "discretion": DISCRETION_FLOOR},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConfirmationLedger":
        rounds = tuple(
            Round(QuestionForm(r["question_form"]), r["raw_answer"], r["effective"])
            for r in d["rounds"]
        )
        return cls(d["word"], d["planned_rounds"], rounds)


def record(ledger: ConfirmationLedger, form: QuestionForm, raw_answer: str) -> ConfirmationLedger:
    """Append one answered round; forms must follow the pair alternation."""
    if ledger.complete:
        raise ProtocolError(
            f"ledger for {ledger.word!r} already has its "
            f"{ledger.planned_rounds} planned rounds"
        )
    expected = ledger.next_form()
    if form != expected:
        raise ProtocolError(
            f"round {len(ledger.rounds) + 1} expects the {expected.value} form",
            expected=expected.value,
            got=form.value,
        )
    new_round = Round(form, raw_answer, effective_answer(form, raw_answer))
    return ConfirmationLedger(
        ledger.word, ledger.planned_rounds, ledger.rounds + (new_round,)
    )


@dataclass(frozen=True)
class Assessment:
    verdict: Verdict
    confidence: float
    weak: bool = False
    early_hint: Verdict | None = None


def _band(c: float) -> Verdict:
    if c >= ACCEPT_THRESHOLD:
        return Verdict.ACCEPT
    if c >= REJECT_CEILING:
        return Verdict.CAREGIVER_DISCRETION
    return Verdict.REJECT


def assess(ledger: ConfirmationLedger) -> Assessment:
    """Verdict for the ledger as it stands.

    Complete ledgers land in one of three bands; [0.5, discretion floor)
    is still caregiver discretion but flagged weak. Incomplete ledgers
    yield ``continue``, with an early hint when every possible completion
    already falls in the same band.
    """
    c = confidence(ledger.affirm_count, ledger.deny_count)
    if ledger.complete:
        band = _band(c)
        weak = band == Verdict.CAREGIVER_DISCRETION and c < DISCRETION_FLOOR
        return Assessment(band, c, weak)
    remaining = ledger.planned_rounds - len(ledger.rounds)
    best = _band(confidence(ledger.affirm_count + remaining, ledger.deny_count))
    worst = _band(confidence(ledger.affirm_count, ledger.deny_count + remaining))
    hint = best if best == worst else None
    return Assessment(Verdict.CONTINUE, c, early_hint=hint)


def verdict(ledger: ConfirmationLedger) -> Verdict:
    return assess(ledger).verdict
