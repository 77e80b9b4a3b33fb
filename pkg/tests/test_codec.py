import itertools
import json
import time

import pytest

from vowelspell.codec import GroupingScheme, load_scheme
from vowelspell.errors import IncompleteSequenceError, ProtocolError, SchemeError

Y, N = "yes", "no"


class TestJapaneseDecode:
    def test_first_position_table(self, ja_scheme):
        table = {
            (Y, Y): "A",
            (Y, N, Y): "I",
            (Y, N, N): "U",
            (N, Y): "E",
            (N, N): "O",
        }
        for answers, symbol in table.items():
            assert ja_scheme.decode(1, answers) == symbol

    @pytest.mark.parametrize("position", [2, 3])
    def test_later_position_table(self, ja_scheme, position):
        table = {
            (Y, Y): "A",
            (Y, N, Y): "I",
            (Y, N, N): "U",
            (N, Y, Y): "E",
            (N, Y, N): "NN",
            (N, N, Y): "O",
            (N, N, N): "END",
        }
        for answers, symbol in table.items():
            assert ja_scheme.decode(position, answers) == symbol

    def test_incomplete_carries_next_question(self, ja_scheme):
        with pytest.raises(IncompleteSequenceError) as err:
            ja_scheme.decode(1, [Y, N])
        assert err.value.next_question.subset == ("I",)

    def test_overlong_is_protocol_error(self, ja_scheme):
        with pytest.raises(ProtocolError):
            ja_scheme.decode(1, [Y, Y, Y])

    def test_first_position_excludes_end_and_nn(self, ja_scheme):
        assert "END" not in ja_scheme.reachable(1)
        assert "NN" not in ja_scheme.reachable(1)
        assert set(ja_scheme.reachable(2)) == {"A", "I", "U", "E", "O", "NN", "END"}


class TestQuestions:
    def test_root_asks_aiu(self, ja_scheme):
        q = ja_scheme.next_question(1, [])
        assert q.subset == ("A", "I", "U")
        assert q.text == "Does your word contain A, I or U?"

    def test_after_no_asks_e(self, ja_scheme):
        assert ja_scheme.next_question(1, [N]).subset == ("E",)

    def test_english_root_is_columns_1_to_3(self, en_scheme):
        assert en_scheme.next_question(1, []).subset == ("1", "2", "3")

    def test_complete_path_has_no_question(self, ja_scheme):
        with pytest.raises(ProtocolError):
            ja_scheme.next_question(1, [Y, Y])


class TestLetterSymbol:
    def test_english_columns(self, en_scheme):
        assert en_scheme.letter_symbol("S") == "4"
        assert en_scheme.letter_symbol("Z") == "1"
        assert en_scheme.letter_symbol(" ") == "6"

    def test_japanese_vowel(self, ja_scheme):
        assert ja_scheme.letter_symbol("a") == "A"
        assert ja_scheme.letter_symbol("nn") == "NN"

    def test_unknown_letter(self, ja_scheme, en_scheme):
        with pytest.raises(SchemeError):
            ja_scheme.letter_symbol("k")
        with pytest.raises(SchemeError):
            en_scheme.letter_symbol("?")


def all_answer_sequences(max_len=3):
    for length in range(1, max_len + 1):
        yield from itertools.product((Y, N), repeat=length)


@pytest.mark.parametrize("scheme_name", ["japanese-vowel", "english-6col"])
def test_exhaustive_sequences_and_round_trip(scheme_name):
    """Every <=3-length sequence decodes, continues, or fails loudly;
    encode is the exact inverse of decode at every position."""
    scheme = load_scheme(scheme_name)
    t0 = time.perf_counter()
    for position in scheme.decode_tables:
        seen = {}
        for answers in all_answer_sequences():
            try:
                symbol = scheme.decode(position, answers)
            except IncompleteSequenceError:
                continue
            except ProtocolError:
                continue
            assert symbol not in seen, f"two paths decode to {symbol}"
            seen[symbol] = answers
            assert scheme.encode(position, symbol) == answers
        assert set(seen) == set(scheme.reachable(position))
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.parametrize("scheme_name", ["japanese-vowel", "english-6col"])
def test_prefix_freeness(scheme_name):
    scheme = load_scheme(scheme_name)
    for position, table in scheme.decode_tables.items():
        paths = list(table)
        for a in paths:
            for b in paths:
                assert a == b or not b.startswith(a), (position, a, b)


def test_prefix_violation_rejected():
    config = {
        "name": "broken",
        "symbols": ["A", "B"],
        "letter_map": {"a": "A", "b": "B"},
        "decode_tables": {"1": {"Y": "A", "YN": "B"}},
    }
    with pytest.raises(SchemeError):
        GroupingScheme(config)


def test_duplicate_symbol_rejected():
    config = {
        "name": "broken",
        "symbols": ["A"],
        "letter_map": {"a": "A"},
        "decode_tables": {"1": {"Y": "A", "N": "A"}},
    }
    with pytest.raises(SchemeError):
        GroupingScheme(config)


def test_scheme_loads_from_path(tmp_path, ja_scheme):
    config = {
        "name": "tiny",
        "symbols": ["A", "B"],
        "letter_map": {"a": "A", "b": "B"},
        "decode_tables": {"1": {"Y": "A", "N": "B"}},
    }
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(config))
    scheme = load_scheme(str(p))
    assert scheme.decode(1, [Y]) == "A"
