"""Semantic-unit matching, word segmentation and sentence segmentation.

Dictionary matching runs first, directly on tokens, so that strings such
as ``sigma(K)`` are known units before words are built: each matched unit
then becomes a single word regardless of the punctuation it contains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from alvis.errors import ConfigurationError, ResourceFormatError
from alvis.lineformat import Source, iter_fields, split_list
from alvis.model import (
    KIND_ORIGIN,
    SemanticUnit,
    Sentence,
    Token,
    TokenType,
    UnitKind,
    Word,
    make_id,
)
from alvis.tokenize import tokenize

KIND_PRIORITY = {UnitKind.NAMED_ENTITY: 0, UnitKind.TERM: 1, UnitKind.UNDEFINED: 2}

WORD_TYPES = (TokenType.ALPHA, TokenType.NUM)
JOINING_SYMBOLS = frozenset("-")
SENTENCE_FINAL = frozenset(".!?")


def span_form(tokens: Sequence[Token]) -> str:
    """Token contents joined, with each separator token read as one space."""
    return "".join(" " if t.type is TokenType.SEP else t.content for t in tokens)


# -- dictionaries -----------------------------------------------------------


@dataclass(frozen=True)
class DictionaryEntry:
    surface: str
    kind: UnitKind
    ontology_nodes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Dictionary:
    entries: tuple[DictionaryEntry, ...] = ()
    case_insensitive: bool = False

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if not entry.surface.strip():
                raise ValueError("dictionary surface must be non-empty")
            key = (entry.surface, entry.kind)
            if key in seen:
                raise ValueError(f"duplicate dictionary entry {entry.surface!r} ({entry.kind})")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.entries)


def load_dictionary(source: Source, kind: UnitKind | str, case_insensitive: bool = False) -> Dictionary:
    """Read ``surface<TAB>node;node`` lines into a Dictionary of one kind."""
    kind = UnitKind(kind)
    entries = []
    seen = set()
    for lineno, fields in iter_fields(source):
        if len(fields) > 2:
            raise ResourceFormatError(f"expected at most 2 tab-separated fields, got {len(fields)}", lineno)
        surface = fields[0].strip()
        if not surface:
            raise ResourceFormatError("empty surface", lineno)
        nodes = split_list(fields[1]) if len(fields) == 2 else []
        if any(not n for n in nodes):
            raise ResourceFormatError("empty ontology node name", lineno)
        if surface in seen:
            raise ResourceFormatError(f"duplicate entry {surface!r}", lineno)
        seen.add(surface)
        entries.append(DictionaryEntry(surface, kind, tuple(nodes)))
    return Dictionary(tuple(entries), case_insensitive)


def dump_dictionary(dictionary: Dictionary) -> bytes:
    lines = []
    for entry in dictionary.entries:
        if entry.ontology_nodes:
            lines.append(f"{entry.surface}\t{';'.join(entry.ontology_nodes)}\n")
        else:
            lines.append(f"{entry.surface}\n")
    return "".join(lines).encode("utf-8")


# -- semantic units ---------------------------------------------------------


@dataclass(frozen=True)
class _Pattern:
    keys: tuple[str | None, ...]  # None stands for any separator token
    entry: DictionaryEntry
    fold: bool
    order: int


def _compile(dictionaries: Iterable[Dictionary]) -> dict[tuple[bool, str], list[_Pattern]]:
    index: dict[tuple[bool, str], list[_Pattern]] = {}
    order = 0
    for dictionary in dictionaries:
        fold = dictionary.case_insensitive
        for entry in dictionary.entries:
            toks = tokenize(entry.surface.strip())
            keys = tuple(
                None if t.type is TokenType.SEP else (t.content.casefold() if fold else t.content)
                for t in toks
            )
            index.setdefault((fold, keys[0]), []).append(_Pattern(keys, entry, fold, order))
            order += 1
    return index


def _matches(pattern: _Pattern, tokens: Sequence[Token], i: int) -> bool:
    if i + len(pattern.keys) > len(tokens):
        return False
    for key, tok in zip(pattern.keys, tokens[i:]):
        if key is None:
            if tok.type is not TokenType.SEP:
                return False
        elif tok.type is TokenType.SEP:
            return False
        elif key != (tok.content.casefold() if pattern.fold else tok.content):
            return False
    return True


def number_units(spans: Iterable[tuple[UnitKind, Sequence[Token]]]) -> list[SemanticUnit]:
    """Turn (kind, tokens) spans in textual order into numbered units."""
    counters = dict(KIND_ORIGIN)
    units = []
    for kind, toks in spans:
        units.append(
            SemanticUnit(make_id(kind.value, counters[kind]), kind, tuple(t.id for t in toks), span_form(toks))
        )
        counters[kind] += 1
    return units


def match_semantic_units(tokens: Sequence[Token], dictionaries: Iterable[Dictionary]) -> list[SemanticUnit]:
    """Greedy leftmost-longest dictionary matching over the token stream.

    A surface matches a run of tokens with the same contents, where a blank
    in the surface stands for any single separator token.  Matches never
    overlap.  Among candidates starting at the same token the longest wins,
    then named entities beat terms beat undefined units.  Named entities are
    numbered from 0, other kinds from 1.
    """
    index = _compile(dictionaries)
    spans = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        best = None
        if tok.type is not TokenType.SEP:
            candidates = index.get((False, tok.content), []) + index.get((True, tok.content.casefold()), [])
            for pattern in candidates:
                if not _matches(pattern, tokens, i):
                    continue
                rank = (-len(pattern.keys), KIND_PRIORITY[pattern.entry.kind], pattern.order)
                if best is None or rank < best[0]:
                    best = (rank, pattern)
        if best is None:
            i += 1
            continue
        n = len(best[1].keys)
        spans.append((best[1].entry.kind, tokens[i:i + n]))
        i += n
    return number_units(spans)


# -- contractions -----------------------------------------------------------


def _fold(s: str) -> str:
    return s.casefold().replace("’", "'")


@dataclass(frozen=True)
class ContractionRule:
    """Split a token run into words that need not appear in the text.

    ``pattern`` is written as plain text; a leading ``*`` stands for the
    letters in front of the contraction (``*n't`` matches ``doesn't``).
    ``replacement`` lists ``(form, token_positions)`` pairs, positions
    indexing the tokens of the pattern; ``{}`` in a form is replaced by the
    text matched by ``*``.
    """

    pattern: str
    replacement: tuple[tuple[str, tuple[int, ...]], ...]
    elements: tuple[tuple[str, str | None], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", self._parse_pattern(self.pattern))
        n = len(self.elements)
        covered = set()
        for form, positions in self.replacement:
            if not form:
                raise ConfigurationError(f"contraction {self.pattern!r}: empty word form", "contractions")
            if not positions or list(positions) != sorted(set(positions)):
                raise ConfigurationError(
                    f"contraction {self.pattern!r}: token positions of {form!r} must be strictly increasing",
                    "contractions",
                )
            if positions[0] < 0 or positions[-1] >= n:
                raise ConfigurationError(
                    f"contraction {self.pattern!r}: word {form!r} refers to token {positions[-1]} "
                    f"outside the {n}-token match",
                    "contractions",
                )
            if self.elements[positions[0]][0] == "sep" or self.elements[positions[-1]][0] == "sep":
                raise ConfigurationError(
                    f"contraction {self.pattern!r}: word {form!r} starts or ends with a blank", "contractions"
                )
            covered.update(positions)
        if covered != set(range(n)):
            raise ConfigurationError(
                f"contraction {self.pattern!r}: replacement does not cover every matched token", "contractions"
            )

    @staticmethod
    def _parse_pattern(pattern: str) -> tuple[tuple[str, str | None], ...]:
        wildcard = pattern.startswith("*")
        toks = tokenize(pattern[1:] if wildcard else pattern)
        elements: list[tuple[str, str | None]] = [
            ("sep", None) if t.type is TokenType.SEP else ("exact", t.content) for t in toks
        ]
        if wildcard:
            if elements and toks[0].type is TokenType.ALPHA:
                elements[0] = ("suffix", toks[0].content)
            else:
                elements.insert(0, ("any", None))
        if not elements:
            raise ConfigurationError("empty contraction pattern", "contractions")
        return tuple(elements)

    @property
    def has_wildcard(self) -> bool:
        return self.elements[0][0] in ("suffix", "any")

    def match(self, tokens: Sequence[Token], i: int) -> list[tuple[str, tuple[int, ...]]] | None:
        """Return ``(form, token_positions)`` words when the rule applies at
        ``tokens[i]``; positions are absolute indexes into ``tokens``."""
        n = len(self.elements)
        if i + n > len(tokens):
            return None
        stem = ""
        for (mode, text), tok in zip(self.elements, tokens[i:i + n]):
            content = _fold(tok.content)
            if mode == "sep":
                ok = tok.type is TokenType.SEP
            elif mode == "any":
                ok = tok.type is TokenType.ALPHA
                stem = tok.content
            elif mode == "suffix":
                suffix = _fold(text)
                ok = tok.type is TokenType.ALPHA and content.endswith(suffix) and len(content) > len(suffix)
                stem = tok.content[: len(tok.content) - len(text)]
            else:
                ok = content == _fold(text)
            if not ok:
                return None
        if i + n < len(tokens) and tokens[i + n].type in WORD_TYPES:
            return None
        words = []
        capital = tokens[i].content[:1].isupper()
        for k, (form, positions) in enumerate(self.replacement):
            if "{}" in form:
                form = form.replace("{}", stem)
            elif k == 0 and capital:
                form = form[:1].upper() + form[1:]
            words.append((form, tuple(i + p for p in positions)))
        return words


def _parse_recipe(value: str) -> tuple[tuple[str, tuple[int, ...]], ...]:
    recipe = []
    for item in split_list(value):
        form, sep, positions = item.rpartition("@")
        if not sep or not form:
            raise ValueError(f"expected form@positions, got {item!r}")
        recipe.append((form, tuple(int(p) for p in positions.split(","))))
    if not recipe:
        raise ValueError("empty replacement")
    return tuple(recipe)


def load_contractions(source: Source) -> list[ContractionRule]:
    """Read ``pattern<TAB>form@i,j;form@k`` lines."""
    rules = []
    for lineno, fields in iter_fields(source):
        if len(fields) != 2:
            raise ResourceFormatError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        try:
            recipe = _parse_recipe(fields[1])
        except ValueError as exc:
            raise ResourceFormatError(str(exc), lineno) from None
        try:
            rules.append(ContractionRule(fields[0].strip(), recipe))
        except ConfigurationError as exc:
            raise ConfigurationError(f"line {lineno}: {exc}", "contractions") from None
    return rules


def default_contractions() -> list[ContractionRule]:
    data = resources.files("alvis.resources").joinpath("contractions.tsv").read_bytes()
    return load_contractions(data)


# -- words ------------------------------------------------------------------


def _atomic_spans(tokens: Sequence[Token], units: Iterable[SemanticUnit]) -> dict[int, tuple[int, SemanticUnit]]:
    """First position -> (last position, unit) for non-overlapping unit spans.

    Units from external sources may nest or overlap; the earliest and then
    longest one claims the tokens.
    """
    position = {t.id: i for i, t in enumerate(tokens)}
    spans = []
    for unit in units:
        idx = [position[tid] for tid in unit.token_ids if tid in position]
        while idx and tokens[idx[0]].type is TokenType.SEP:
            idx.pop(0)
        while idx and tokens[idx[-1]].type is TokenType.SEP:
            idx.pop()
        if idx:
            spans.append((idx[0], idx[-1], unit))
    spans.sort(key=lambda s: (s[0], -s[1]))
    claimed: dict[int, tuple[int, SemanticUnit]] = {}
    last_end = -1
    for first, last, unit in spans:
        if first > last_end:
            claimed[first] = (last, unit)
            last_end = last
    return claimed


def segment_words(
    tokens: Sequence[Token],
    semantic_units: Iterable[SemanticUnit] = (),
    contraction_rules: Sequence[ContractionRule] = (),
) -> list[Word]:
    """Build the word layer.

    Semantic units become single words.  Elsewhere a word is a run of
    alphabetic and numeric tokens, possibly joined by single hyphens;
    blanks and other punctuation are never words.  Contraction rules may
    split a run into words whose forms do not occur in the text.
    """
    atomic = _atomic_spans(tokens, semantic_units)
    claimed_positions = set()
    for first, (last, _) in atomic.items():
        claimed_positions.update(range(first, last + 1))
    rules = sorted(contraction_rules, key=lambda r: (r.has_wildcard, -len(r.elements)))

    def free_word_token(j: int) -> bool:
        return j < len(tokens) and j not in claimed_positions and tokens[j].type in WORD_TYPES

    pieces: list[tuple[str, tuple[str, ...]]] = []
    i = 0
    while i < len(tokens):
        if i in atomic:
            last, unit = atomic[i]
            members = set(unit.token_ids)
            ids = tuple(t.id for t in tokens[i:last + 1] if t.id in members)
            pieces.append((unit.form or span_form(tokens[i:last + 1]), ids))
            i = last + 1
            continue
        if not free_word_token(i):
            i += 1
            continue
        contracted = None
        for rule in rules:
            contracted = rule.match(tokens, i)
            if contracted and not any(p in claimed_positions for _, ps in contracted for p in ps):
                break
            contracted = None
        if contracted:
            for form, positions in contracted:
                pieces.append((form, tuple(tokens[p].id for p in positions)))
            i = max(p for _, ps in contracted for p in ps) + 1
            continue
        j = i
        while True:
            if free_word_token(j + 1):
                j += 1
            elif (
                j + 2 < len(tokens)
                and tokens[j + 1].type is TokenType.SYMB
                and tokens[j + 1].content in JOINING_SYMBOLS
                and j + 1 not in claimed_positions
                and free_word_token(j + 2)
            ):
                j += 2
            else:
                break
        run = tokens[i:j + 1]
        pieces.append(("".join(t.content for t in run), tuple(t.id for t in run)))
        i = j + 1
    return [Word(make_id("word", n), ids, form) for n, (form, ids) in enumerate(pieces, start=1)]


# -- sentences --------------------------------------------------------------


def _word_cover(tokens: Sequence[Token], words: Iterable[Word]) -> tuple[dict[int, list[Word]], list[int]]:
    """Index words by their first token position and compute, for each token
    position, the last position of the word(s) covering it (-1 if none)."""
    position = {t.id: i for i, t in enumerate(tokens)}
    starting: dict[int, list[Word]] = {}
    reach = [-1] * len(tokens)
    for word in words:
        idx = [position[tid] for tid in word.token_ids if tid in position]
        if not idx:
            continue
        first, last = min(idx), max(idx)
        starting.setdefault(first, []).append(word)
        for k in range(first, last + 1):
            reach[k] = max(reach[k], last)
    return starting, reach


def _is_abbreviation(tokens: Sequence[Token], i: int) -> bool:
    if tokens[i].content != "." or i == 0:
        return False
    prev = tokens[i - 1]
    return prev.type is TokenType.ALPHA and len(prev.content) == 1 and prev.content.isupper()


def sentence_form(tokens: Sequence[Token], first: int, last: int, starting: dict[int, list[Word]], reach: list[int]) -> str:
    """Word forms and stand-alone punctuation of a span, joined by spaces."""
    parts = []
    i = first
    while i <= last:
        if i in starting:
            for word in starting[i]:
                parts.append(word.form if word.form is not None else tokens[i].content)
            i = max(reach[i], i) + 1
            continue
        tok = tokens[i]
        if tok.type is not TokenType.SEP and reach[i] < 0:
            parts.append(tok.content)
        i += 1
    return " ".join(parts)


def segment_sentences(
    tokens: Sequence[Token],
    words: Iterable[Word] = (),
    boundaries: Iterable[int] = (),
) -> list[Sentence]:
    """Cut the token stream into sentences.

    A sentence ends on ``.``, ``!`` or ``?`` (a run of them counts as one
    end) unless the mark lies inside a word or the period follows a single
    capital letter.  ``boundaries`` are character offsets where a title or
    section body ends; a sentence is closed there even without a final
    mark.  Separators between sentences belong to no sentence.
    """
    starting, reach = _word_cover(tokens, words)
    boundaries = sorted(set(boundaries))
    boundary_tokens = set()
    b = 0
    for i, tok in enumerate(tokens):
        while b < len(boundaries) and boundaries[b] < tok.start:
            b += 1
        if b < len(boundaries) and boundaries[b] <= tok.end and tok.type is TokenType.SEP:
            boundary_tokens.add(i)

    spans: list[tuple[int, int]] = []
    start = None
    last = None

    def inside_word(i: int) -> bool:
        return i > 0 and reach[i - 1] >= i

    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.type is TokenType.SEP:
            if i in boundary_tokens and start is not None and not inside_word(i):
                spans.append((start, last))
                start = None
            i += 1
            continue
        if start is None:
            start = i
        last = i
        if (
            tok.type is TokenType.SYMB
            and tok.content in SENTENCE_FINAL
            and reach[i] < 0
            and not _is_abbreviation(tokens, i)
        ):
            while (
                i + 1 < len(tokens)
                and tokens[i + 1].type is TokenType.SYMB
                and tokens[i + 1].content in SENTENCE_FINAL
                and reach[i + 1] < 0
            ):
                i += 1
            spans.append((start, i))
            start = None
        i += 1
    if start is not None:
        spans.append((start, last))

    return [
        Sentence(
            make_id("sentence", n),
            tokens[first].id,
            tokens[end].id,
            sentence_form(tokens, first, end, starting, reach),
        )
        for n, (first, end) in enumerate(spans, start=1)
    ]
