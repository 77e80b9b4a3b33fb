"""Skeleton-keyed word index.

A word's skeleton is its first three group symbols (vowels for Japanese
romaji, matrix columns for English). The index answers exact skeleton
queries and one-substitution neighborhood queries, both ranked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .codec import GroupingScheme
from .errors import LexiconError

BUNDLED_LEXICONS = {
    "japanese-sample": "japanese-vowel",
    "english-sample": "english-6col",
}

SKELETON_LEN = 3


@dataclass(frozen=True, order=True)
class LexiconEntry:
    surface: str
    reading: str
    gloss: str | None = None
    frequency_rank: int | None = None

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "reading": self.reading,
            "gloss": self.gloss,
            "frequency_rank": self.frequency_rank,
        }


def validate_skeleton(scheme: GroupingScheme, symbols) -> tuple[str, ...]:
    """Check the three-symbol skeleton: END only as a suffix run."""
    skel = tuple(str(s) for s in symbols)
    if len(skel) != SKELETON_LEN:
        raise LexiconError(f"skeleton needs {SKELETON_LEN} symbols, got {skel}")
    end = scheme.end_symbol
    allowed = set(scheme.symbols) | ({end} if end else set())
    seen_end = False
    for s in skel:
        if s not in allowed:
            raise LexiconError(f"symbol {s!r} not in scheme {scheme.name}")
        if s == end:
            seen_end = True
        elif seen_end:
            raise LexiconError(f"symbol after {end} in skeleton {skel}")
    if end and skel[0] == end:
        raise LexiconError("skeleton needs at least one leading symbol")
    return skel


def parse_skeleton(scheme: GroupingScheme, text: str) -> tuple[str, ...]:
    """Parse the CLI/URL form ``E,I,A`` (case-insensitive)."""
    valid = set(scheme.symbols) | ({scheme.end_symbol} if scheme.end_symbol else set())
    parts = []
    for piece in text.split(","):
        piece = piece.strip()
        parts.append(piece.upper() if piece.upper() in valid else piece)
    return validate_skeleton(scheme, parts)


def skeletonize(scheme: GroupingScheme, reading: str) -> tuple[str, ...]:
    """First three symbol emissions of a reading, padded to length 3.

    The reading is scanned left to right after normalization; two-letter
    map entries (the "nn" digraph) take precedence over single letters;
    letters without a mapped symbol (Japanese consonants) emit nothing.
    Japanese pads short words with END, English with the space column.
    """
    if not reading or not reading.strip():
        raise LexiconError("empty reading")
    text = scheme.normalize_reading(reading.strip())
    digraphs = [k for k in scheme.letter_map if len(k) == 2]
    emitted: list[str] = []
    i = 0
    while i < len(text) and len(emitted) < SKELETON_LEN:
        two = text[i : i + 2]
        if two in digraphs:
            emitted.append(scheme.letter_map[two])
            i += 2
            continue
        ch = text[i]
        if ch in scheme.letter_map:
            emitted.append(scheme.letter_map[ch])
        i += 1
    if not emitted:
        raise LexiconError(f"reading {reading!r} emits no symbols in {scheme.name}")
    while len(emitted) < SKELETON_LEN:
        emitted.append(scheme.pad_symbol)
    return tuple(emitted)


def _rank_key(entry: LexiconEntry):
    # Ranked entries first (smaller rank = more frequent), then by reading.
    return (entry.frequency_rank is None, entry.frequency_rank or 0, entry.reading)


@dataclass(frozen=True)
class LexiconIndex:
    scheme: GroupingScheme
    by_skeleton: dict
    warnings: tuple = field(default_factory=tuple)

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.by_skeleton.values())


def build_index(scheme: GroupingScheme, entries) -> LexiconIndex:
    """Index entries by skeleton; bad entries are skipped with a warning."""
    best: dict[str, tuple[tuple[str, ...], LexiconEntry]] = {}
    warnings = []
    for entry in entries:
        try:
            skel = skeletonize(scheme, entry.reading)
        except LexiconError as exc:
            warnings.append((entry.reading, str(exc)))
            continue
        prev = best.get(entry.reading)
        if prev is None or _rank_key(entry) < _rank_key(prev[1]):
            best[entry.reading] = (skel, entry)
    buckets: dict[tuple, list] = {}
    for skel, entry in best.values():
        buckets.setdefault(skel, []).append(entry)
    frozen = {k: tuple(sorted(v, key=_rank_key)) for k, v in buckets.items()}
    return LexiconIndex(scheme, frozen, tuple(warnings))


def query(index: LexiconIndex, skeleton) -> list[LexiconEntry]:
    skel = validate_skeleton(index.scheme, skeleton)
    return list(index.by_skeleton.get(skel, ()))


def neighbors(index: LexiconIndex, skeleton) -> list[tuple[tuple[str, ...], list[LexiconEntry]]]:
    """Hamming-distance-1 variants that have results, ranked by yield."""
    scheme = index.scheme
    skel = validate_skeleton(scheme, skeleton)
    end = scheme.end_symbol
    alphabet = list(scheme.symbols)
    if end and end not in alphabet:
        alphabet.append(end)
    order = {s: i for i, s in enumerate(alphabet)}
    found = []
    for pos in range(SKELETON_LEN):
        for sym in alphabet:
            if sym == skel[pos]:
                continue
            variant = skel[:pos] + (sym,) + skel[pos + 1 :]
            try:
                validate_skeleton(scheme, variant)
            except LexiconError:
                continue
            hits = list(index.by_skeleton.get(variant, ()))
            if hits:
                found.append((variant, hits, pos, order[sym]))
    found.sort(key=lambda item: (-len(item[1]), item[2], item[3]))
    return [(variant, hits) for variant, hits, _, _ in found]


def parse_tsv(lines) -> tuple[list[LexiconEntry], list[tuple[str, str]]]:
    """Parse lexicon TSV rows: surface, reading, gloss, frequency_rank."""
    entries, warnings = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 2 or not cols[0].strip() or not cols[1].strip():
            warnings.append((f"line {lineno}", "needs surface and reading"))
            continue
        gloss = None
        if len(cols) > 2 and cols[2].strip():
            gloss = cols[2].strip()
        rank = None
        if len(cols) > 3 and cols[3].strip():
            try:
                rank = int(cols[3])
            except ValueError:
                warnings.append((f"line {lineno}", f"bad rank {cols[3]!r}"))
        entries.append(LexiconEntry(cols[0].strip(), cols[1].strip().lower(), gloss, rank))
    return entries, warnings


def load_entries(name_or_path: str) -> list[LexiconEntry]:
    if name_or_path in BUNDLED_LEXICONS:
        ref = resources.files("vowelspell.data.lexicons") / f"{name_or_path}.tsv"
        text = ref.read_text(encoding="utf-8")
    else:
        with open(name_or_path, encoding="utf-8") as fh:
            text = fh.read()
    entries, _ = parse_tsv(text.splitlines())
    return entries


def load_lexicon(name_or_path: str, scheme: GroupingScheme) -> LexiconIndex:
    return build_index(scheme, load_entries(name_or_path))
