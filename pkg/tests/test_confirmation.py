import math

import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from vowelspell import confirmation as cf
from vowelspell.errors import ProtocolError

# Reference values for (affirm, deny) -> posterior mass above 1/2.
KNOWN = {
    (7, 1): 0.98046875,
    (6, 2): 0.91015625,
    (5, 3): 0.74609375,
    (3, 1): 0.8125,
    (0, 0): 0.5,
}


@pytest.mark.parametrize("counts,expected", sorted(KNOWN.items()))
def test_confidence_known_values(counts, expected):
    assert cf.confidence(*counts) == pytest.approx(expected, abs=1e-12)


def quadrature_confidence(s, f):
    """Independent oracle: integrate the Beta(s+1, f+1) density directly."""
    def density(theta):
        return theta**s * (1 - theta) ** f

    num, _ = integrate.quad(density, 0.5, 1.0, epsabs=1e-13, epsrel=1e-13)
    den, _ = integrate.quad(density, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return num / den


def test_confidence_matches_quadrature_oracle():
    for n in range(13):
        for s in range(n + 1):
            f = n - s
            assert cf.confidence(s, f) == pytest.approx(
                quadrature_confidence(s, f), abs=1e-9
            )


@given(st.integers(0, 40), st.integers(0, 40))
def test_complement_symmetry_exact(s, f):
    assert cf.confidence(s, f) + cf.confidence(f, s) == 1.0


@given(st.integers(0, 40), st.integers(0, 40))
def test_monotonicity(s, f):
    assert cf.confidence(s + 1, f) > cf.confidence(s, f)
    assert cf.confidence(s, f + 1) < cf.confidence(s, f)


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        cf.confidence(-1, 0)


def build_ledger(pattern, planned=8, word="medaka"):
    """Pattern is a string of a/d effectives; forms follow the alternation."""
    ledger = cf.ConfirmationLedger(word, planned)
    for i, ch in enumerate(pattern):
        form = cf.form_for_slot(i)
        if ch == "a":
            raw = "yes" if form == cf.QuestionForm.AFFIRMATIVE else "no"
        else:
            raw = "no" if form == cf.QuestionForm.AFFIRMATIVE else "yes"
        ledger = cf.record(ledger, form, raw)
    return ledger


class TestRecord:
    def test_negative_form_no_is_affirm(self):
        assert cf.effective_answer(cf.QuestionForm.NEGATIVE, "no") == "affirm"

    def test_affirmative_yes_is_affirm(self):
        assert cf.effective_answer(cf.QuestionForm.AFFIRMATIVE, "yes") == "affirm"

    def test_affirmative_no_is_deny(self):
        assert cf.effective_answer(cf.QuestionForm.AFFIRMATIVE, "no") == "deny"

    def test_forms_alternate_in_pairs(self):
        ledger = cf.ConfirmationLedger("w", 8)
        ledger = cf.record(ledger, cf.QuestionForm.AFFIRMATIVE, "yes")
        with pytest.raises(ProtocolError):
            cf.record(ledger, cf.QuestionForm.AFFIRMATIVE, "yes")
        ledger = cf.record(ledger, cf.QuestionForm.NEGATIVE, "no")
        assert ledger.affirm_count == 2

    def test_ledger_round_limit(self):
        ledger = build_ledger("aaaa", planned=4)
        with pytest.raises(ProtocolError):
            cf.record(ledger, cf.QuestionForm.AFFIRMATIVE, "yes")

    def test_extension_requires_pairs(self):
        ledger = build_ledger("aaaa", planned=4)
        with pytest.raises(ProtocolError):
            ledger.extended(3)
        assert ledger.extended(2).planned_rounds == 6


class TestVerdict:
    def test_accept_at_six_of_eight(self):
        a = cf.assess(build_ledger("aaaaadad"))
        assert a.verdict == cf.Verdict.ACCEPT
        assert a.confidence == pytest.approx(0.91015625)

    def test_discretion_at_five_of_eight(self):
        a = cf.assess(build_ledger("aaaaaddd"))
        assert a.verdict == cf.Verdict.CAREGIVER_DISCRETION
        assert not a.weak

    def test_short_ledger_three_of_four(self):
        a = cf.assess(build_ledger("aaad", planned=4))
        assert a.verdict == cf.Verdict.CAREGIVER_DISCRETION
        assert a.confidence == pytest.approx(0.8125)

    def test_weak_band_flagged(self):
        a = cf.assess(build_ledger("aaaadddd"))  # 4/4 -> 0.5
        assert a.verdict == cf.Verdict.CAREGIVER_DISCRETION
        assert a.weak

    def test_reject_below_half(self):
        a = cf.assess(build_ledger("aaddddda"))  # 3/5
        assert a.confidence < 0.5
        assert a.verdict == cf.Verdict.REJECT

    def test_incomplete_continues(self):
        a = cf.assess(build_ledger("aa"))
        assert a.verdict == cf.Verdict.CONTINUE

    def test_early_hint_when_decided(self):
        # 7 affirmations with one round left: every completion accepts.
        a = cf.assess(build_ledger("aaaaaaa"))
        assert a.verdict == cf.Verdict.CONTINUE
        assert a.early_hint == cf.Verdict.ACCEPT

    def test_never_accept_below_threshold(self):
        for n_affirm in range(9):
            pattern = "a" * n_affirm + "d" * (8 - n_affirm)
            a = cf.assess(build_ledger(pattern))
            if a.verdict == cf.Verdict.ACCEPT:
                assert a.confidence >= cf.ACCEPT_THRESHOLD


def test_ledger_serialization_round_trip():
    ledger = build_ledger("aaaaadad")
    again = cf.ConfirmationLedger.from_dict(ledger.to_dict())
    assert again == ledger
    assert again.to_dict() == ledger.to_dict()


def test_confidence_runtime_under_1ms():
    import time

    cf.confidence(7, 1)  # warm
    t0 = time.perf_counter()
    for _ in range(100):
        cf.confidence(7, 1)
    assert (time.perf_counter() - t0) / 100 < 1e-3
