"""Grouping schemes: yes/no answer sequences <-> group symbols.

A scheme maps letters to group symbols (Japanese vowels, or the columns of
a 6x6 letter matrix) and holds one decode table per skeleton position.
Tables are data, loaded from JSON, so alternative groupings are testable
without code changes. Each table is a prefix-free map from answer paths
(strings over Y/N) to symbols; the implied dichotomic question at any node
is "is the symbol in the Y-reachable subset?".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import IncompleteSequenceError, ProtocolError, SchemeError

YES = "yes"
NO = "no"

BUNDLED_SCHEMES = ("japanese-vowel", "english-6col")


def _path_of(answers) -> str:
    """Normalize an answer sequence to a Y/N path string."""
    out = []
    for a in answers:
        if a in (YES, "y", "Y", True):
            out.append("Y")
        elif a in (NO, "n", "N", False):
            out.append("N")
        else:
            raise ValueError(f"answers must be yes/no, got {a!r}")
    return "".join(out)


@dataclass(frozen=True)
class Question:
    """A dichotomic question: the subset selected by answering yes."""

    text: str
    subset: tuple[str, ...]
    position: int


class GroupingScheme:
    def __init__(self, config: dict):
        self.name = config["name"]
        self.locale = config.get("locale", "")
        self.symbols = tuple(config["symbols"])
        self.letter_map = dict(config["letter_map"])
        self.normalization = dict(config.get("reading_normalization", {}))
        self.end_symbol = config.get("end_symbol")
        self.pad_symbol = config.get("pad_symbol", self.end_symbol or "END")
        self._template = config.get(
            "question_template", "Is the symbol one of {symbols}?"
        )
        join = config.get("symbol_join", {})
        self._join_sep = join.get("sep", ", ")
        self._join_last = join.get("last", " or ")
        self.decode_tables = {
            int(pos): dict(table) for pos, table in config["decode_tables"].items()
        }
        self._validate()

    def _validate(self):
        if not self.decode_tables:
            raise SchemeError(f"scheme {self.name}: no decode tables")
        for pos, table in self.decode_tables.items():
            paths = sorted(table)
            seen_symbols = {}
            for p in paths:
                if not p or any(ch not in "YN" for ch in p):
                    raise SchemeError(
                        f"scheme {self.name}: bad path {p!r} at position {pos}"
                    )
                if len(p) > 3:
                    raise SchemeError(
                        f"scheme {self.name}: path {p!r} longer than 3 answers"
                    )
                sym = table[p]
                if sym not in self.symbols and sym != self.end_symbol:
                    raise SchemeError(
                        f"scheme {self.name}: unknown symbol {sym!r} at {pos}/{p}"
                    )
                if sym in seen_symbols:
                    raise SchemeError(
                        f"scheme {self.name}: symbol {sym} has two paths at {pos}"
                    )
                seen_symbols[sym] = p
            for a in paths:
                for b in paths:
                    if a != b and b.startswith(a):
                        raise SchemeError(
                            f"scheme {self.name}: position {pos} table is not "
                            f"prefix-free ({a!r} prefixes {b!r})"
                        )

    def table_for(self, position: int) -> dict:
        if position not in self.decode_tables:
            raise SchemeError(
                f"scheme {self.name} has no table for position {position}"
            )
        return self.decode_tables[position]

    def reachable(self, position: int) -> tuple[str, ...]:
        """Symbols selectable at the given position."""
        table = self.table_for(position)
        ordered = list(self.symbols)
        if self.end_symbol and self.end_symbol not in ordered:
            ordered.append(self.end_symbol)
        return tuple(s for s in ordered if s in table.values())

    def decode(self, position: int, answers) -> str:
        """Resolve a complete answer sequence to its symbol."""
        table = self.table_for(position)
        path = _path_of(answers)
        if path in table:
            return table[path]
        if any(p.startswith(path) for p in table):
            nxt = self.next_question(position, answers)
            raise IncompleteSequenceError(
                f"sequence {path or '(empty)'} is incomplete at position {position}",
                next_question=nxt,
            )
        # Either the path ran past a leaf or left the tree entirely.
        for p in table:
            if path.startswith(p):
                raise ProtocolError(
                    f"sequence {path} continues past the complete answer {p}"
                )
        raise ProtocolError(f"sequence {path} is not valid at position {position}")

    def encode(self, position: int, symbol: str):
        """Inverse of decode: the answer sequence that selects ``symbol``."""
        table = self.table_for(position)
        for path, sym in table.items():
            if sym == symbol:
                return tuple(YES if ch == "Y" else NO for ch in path)
        raise SchemeError(
            f"symbol {symbol} is not reachable at position {position}"
        )

    def next_question(self, position: int, partial) -> Question:
        """The subset question to ask after the partial answer sequence."""
        table = self.table_for(position)
        path = _path_of(partial)
        if path in table:
            raise ProtocolError(f"sequence {path} is already complete")
        extensions = [p for p in table if p.startswith(path)]
        if not extensions:
            raise ProtocolError(f"sequence {path} is not valid at position {position}")
        subset = tuple(
            sorted(
                {table[p] for p in extensions if p[len(path)] == "Y"},
                key=self._symbol_order,
            )
        )
        return Question(self._render(subset), subset, position)

    def _symbol_order(self, symbol: str) -> int:
        if symbol == self.end_symbol and symbol not in self.symbols:
            return len(self.symbols)
        return self.symbols.index(symbol)

    def _render(self, subset) -> str:
        names = [str(s) for s in subset]
        if len(names) == 1:
            joined = names[0]
        else:
            joined = self._join_sep.join(names[:-1]) + self._join_last + names[-1]
        return self._template.format(symbols=joined)

    def letter_symbol(self, letter: str) -> str:
        """Group symbol for a single letter (or the NN digraph)."""
        key = letter.lower()
        if key not in self.letter_map:
            raise SchemeError(f"letter {letter!r} has no symbol in {self.name}")
        return self.letter_map[key]

    def normalize_reading(self, reading: str) -> str:
        text = reading.lower()
        for src, dst in self.normalization.items():
            text = text.replace(src, dst)
        return text


def decode(scheme: GroupingScheme, position: int, answers) -> str:
    return scheme.decode(position, answers)


def next_question(scheme: GroupingScheme, position: int, partial) -> Question:
    return scheme.next_question(position, partial)


def letter_symbol(scheme: GroupingScheme, letter: str) -> str:
    return scheme.letter_symbol(letter)


def load_scheme(name_or_path: str) -> GroupingScheme:
    """Load a bundled scheme by name, or any scheme JSON by path."""
    if name_or_path in BUNDLED_SCHEMES:
        ref = resources.files("vowelspell.data.schemes") / f"{name_or_path}.json"
        config = json.loads(ref.read_text(encoding="utf-8"))
    else:
        with open(name_or_path, encoding="utf-8") as fh:
            config = json.load(fh)
    return GroupingScheme(config)
