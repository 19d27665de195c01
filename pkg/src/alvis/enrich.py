"""Property layers: lemmas, stems, part-of-speech, noun-phrase chunks,
semantic tags, and ingestion of relations produced by external tools."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

from alvis.errors import MalformedIdError, ResourceFormatError
from alvis.lineformat import Source, iter_fields, split_list
from alvis.model import (
    LinguisticAnalysis,
    Lemma,
    MorphosyntacticFeatures,
    Phrase,
    RelationKind,
    SemanticFeatures,
    SemanticRelation,
    SemanticUnit,
    Stem,
    SyntacticRelation,
    Token,
    TokenType,
    Word,
    layer_of,
    make_id,
    ordinal_of,
    resolve_ref,
)

UNKNOWN_CATEGORY = "UNK"


# -- lexicon ----------------------------------------------------------------


class LexiconEntry(NamedTuple):
    category: str
    canonical_form: str | None = None
    features: tuple[tuple[str, str], ...] = ()


@dataclass
class PosLexicon:
    """Word form -> (category, canonical form, features).

    Lookups try the exact form first, then the lowercased form.
    """

    entries: dict[str, LexiconEntry] = field(default_factory=dict)

    def __post_init__(self):
        for form, entry in self.entries.items():
            if not entry.category:
                raise ValueError(f"empty category for {form!r}")
        self._lower = {}
        for form, entry in self.entries.items():
            self._lower.setdefault(form.lower(), entry)

    def lookup(self, form: str) -> LexiconEntry | None:
        entry = self.entries.get(form)
        if entry is None:
            entry = self.entries.get(form.lower()) or self._lower.get(form.lower())
        return entry

    def __len__(self) -> int:
        return len(self.entries)


def _parse_features(value: str, lineno: int) -> tuple[tuple[str, str], ...]:
    features = []
    for item in split_list(value):
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ResourceFormatError(f"bad feature {item!r}, expected key=value", lineno)
        features.append((key, val))
    return tuple(features)


def load_pos_lexicon(source: Source) -> PosLexicon:
    """``form<TAB>category[<TAB>canonical_form[<TAB>key=value;...]]`` lines."""
    entries: dict[str, LexiconEntry] = {}
    for lineno, fields in iter_fields(source):
        if not 2 <= len(fields) <= 4:
            raise ResourceFormatError(f"expected 2 to 4 tab-separated fields, got {len(fields)}", lineno)
        form, category = fields[0], fields[1].strip()
        if not form or not category:
            raise ResourceFormatError("empty form or category", lineno)
        canonical = fields[2] if len(fields) > 2 and fields[2] else None
        features = _parse_features(fields[3], lineno) if len(fields) > 3 else ()
        entries[form] = LexiconEntry(category, canonical, features)
    return PosLexicon(entries)


def _word_ordinal(word: Word, position: int) -> int:
    ordinal = ordinal_of(word.id)
    return ordinal if ordinal is not None else position


def _form(word: Word) -> str:
    return word.form if word.form is not None else ""


def tag_morphosyntax(words: Iterable[Word], lexicon: PosLexicon) -> list[MorphosyntacticFeatures]:
    records = []
    for n, word in enumerate(words, start=1):
        entry = lexicon.lookup(_form(word))
        category = entry.category if entry else UNKNOWN_CATEGORY
        features = entry.features if entry else ()
        records.append(
            MorphosyntacticFeatures(
                make_id("morphosyntactic_features", _word_ordinal(word, n)), word.id, category, features
            )
        )
    return records


def lemmatize(words: Iterable[Word], lexicon: PosLexicon) -> list[Lemma]:
    lemmas = []
    for n, word in enumerate(words, start=1):
        entry = lexicon.lookup(_form(word))
        canonical = entry.canonical_form if entry and entry.canonical_form else _form(word).lower()
        lemmas.append(Lemma(make_id("lemma", _word_ordinal(word, n)), canonical, word.id))
    return lemmas


# -- stemming ---------------------------------------------------------------

_VOWELS = frozenset("aeiouy")
_KEEP_DOUBLE = frozenset("lsz")


def _undouble(stem: str) -> str:
    if len(stem) >= 4 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS and stem[-1] not in _KEEP_DOUBLE:
        return stem[:-1]
    return stem


def suffix_stem(form: str, min_length: int = 3) -> str:
    """Strip one English inflectional suffix (-ing, -ed, -es, -s).

    The result keeps at least ``min_length`` characters, otherwise the
    lowercased form is returned unchanged.
    """
    word = form.lower()
    for suffix in ("ing", "ed"):
        if word.endswith(suffix) and len(word) - len(suffix) >= min_length:
            return _undouble(word[: -len(suffix)])
    if word.endswith("es") and re.search(r"(s|x|z|ch|sh)es$", word) and len(word) - 2 >= min_length:
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")) and len(word) - 1 >= min_length:
        return word[:-1]
    return word


def stem(words: Iterable[Word], stemmer: Callable[[str], str] = suffix_stem) -> list[Stem]:
    return [
        Stem(make_id("stem", _word_ordinal(word, n)), stemmer(_form(word)), word.id)
        for n, word in enumerate(words, start=1)
    ]


# -- noun-phrase chunks -----------------------------------------------------

DETERMINERS = frozenset({"DT", "PDT", "PRP$", "WDT", "CD"})
ADJECTIVES = frozenset({"JJ", "JJR", "JJS"})
NOUNS = frozenset({"NN", "NNS", "NNP", "NNPS"})

_CHUNK_RE = re.compile(r"D*A*N+")


def _tag_letter(category: str | None) -> str:
    if category in DETERMINERS:
        return "D"
    if category in ADJECTIVES:
        return "A"
    if category in NOUNS:
        return "N"
    return "O"


def _breaks(words: Sequence[Word], tokens: Sequence[Token] | None) -> set[int]:
    """Word indexes preceded by punctuation (a chunk never crosses it)."""
    if tokens is None:
        return set()
    position = {t.id: i for i, t in enumerate(tokens)}
    result = set()
    prev_last = None
    for k, word in enumerate(words):
        idx = [position[t] for t in word.token_ids if t in position]
        if not idx:
            continue
        if prev_last is not None:
            between = tokens[prev_last + 1:min(idx)]
            if any(t.type is not TokenType.SEP for t in between) or any("\n" in t.content for t in between):
                result.add(k)
        prev_last = max(idx)
    return result


def chunk_phrases(
    words: Sequence[Word],
    morphosyntax: Iterable[MorphosyntacticFeatures],
    tokens: Sequence[Token] | None = None,
) -> list[Phrase]:
    """Noun-phrase chunks ``determiner* adjective* noun+``.

    The last noun is the head and the preceding words are modifiers.  When
    ``tokens`` is given, chunks stop at punctuation and line breaks.
    """
    categories = {m.word_id: m.syntactic_category for m in morphosyntax}
    letters = [_tag_letter(categories.get(w.id)) for w in words]
    for k in _breaks(words, tokens):
        letters[k] = letters[k].lower()  # marks a segment start
    phrases = []
    start = 0
    segments = []
    for k in range(1, len(words) + 1):
        if k == len(words) or letters[k].islower():
            segments.append((start, k))
            start = k
    for seg_start, seg_end in segments:
        tags = "".join(letters[seg_start:seg_end]).upper()
        for m in _CHUNK_RE.finditer(tags):
            members = words[seg_start + m.start():seg_start + m.end()]
            head, modifiers = members[-1], members[:-1]
            form = " ".join(_form(w) for w in members)
            phrases.append(
                Phrase(make_id("phrase", len(phrases) + 1), head.id, tuple(w.id for w in modifiers), form)
            )
    return phrases


# -- semantic features ------------------------------------------------------


class OntologyNodeMap:
    """Maps semantic-unit surfaces to ontology node names.

    Keys may be plain surfaces or ``(kind, surface)`` pairs; lookups try the
    most specific key first and fall back to a case-insensitive match.
    """

    def __init__(self, mapping=None):
        self._map: dict = {}
        self._folded: dict = {}
        for key, nodes in (mapping or {}).items():
            self.add(key, nodes)

    def add(self, key, nodes: Iterable[str]) -> None:
        nodes = [n for n in nodes]
        if any(not n for n in nodes):
            raise ValueError(f"empty ontology node name for {key!r}")
        if not nodes:
            return
        merged = self._map.setdefault(key, [])
        merged.extend(n for n in nodes if n not in merged)
        self._folded.setdefault(self._fold(key), merged)

    @staticmethod
    def _fold(key):
        if isinstance(key, tuple):
            return (key[0], " ".join(key[1].split()).casefold())
        return " ".join(key.split()).casefold()

    @classmethod
    def from_dictionaries(cls, dictionaries) -> "OntologyNodeMap":
        node_map = cls()
        for dictionary in dictionaries:
            for entry in dictionary.entries:
                node_map.add((str(entry.kind), entry.surface), entry.ontology_nodes)
        return node_map

    def update(self, other: "OntologyNodeMap") -> None:
        for key, nodes in other._map.items():
            self.add(key, nodes)

    def lookup(self, unit: SemanticUnit) -> tuple[str, ...]:
        form = unit.form or ""
        for key in ((str(unit.kind), form), form):
            if key in self._map:
                return tuple(self._map[key])
        for key in ((str(unit.kind), form), form):
            nodes = self._folded.get(self._fold(key))
            if nodes:
                return tuple(nodes)
        return ()

    def __len__(self) -> int:
        return len(self._map)


def load_ontology_map(source: Source) -> OntologyNodeMap:
    """``surface<TAB>node;node`` lines, same layout as dictionaries."""
    node_map = OntologyNodeMap()
    for lineno, fields in iter_fields(source):
        if len(fields) != 2:
            raise ResourceFormatError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        nodes = split_list(fields[1])
        if not fields[0].strip() or not nodes or any(not n for n in nodes):
            raise ResourceFormatError("empty surface or node name", lineno)
        node_map.add(fields[0].strip(), nodes)
    return node_map


def attach_semantic_features(units: Iterable[SemanticUnit], node_map: OntologyNodeMap) -> list[SemanticFeatures]:
    records = []
    for unit in units:
        nodes = node_map.lookup(unit)
        if nodes:
            records.append(SemanticFeatures(make_id("sf", len(records) + 1), unit.id, nodes))
    return records


# -- relation ingestion -----------------------------------------------------


class Rejection(NamedTuple):
    index: int
    triple: tuple
    reason: str


class IngestResult(NamedTuple):
    relations: list
    rejected: list[Rejection]

    @property
    def ok(self) -> bool:
        return not self.rejected


def _check_ref(analysis: LinguisticAnalysis, ref: str, layers: tuple[str, ...]) -> str | None:
    try:
        layer = layer_of(ref)
    except MalformedIdError:
        return f"malformed reference {ref!r}"
    if layer not in layers:
        return f"{ref} is not a {' or '.join(layers)}"
    if resolve_ref(analysis, ref) is None:
        return f"dangling reference {ref}"
    return None


def ingest_syntactic_relations(triples: Iterable[tuple[str, str, str]], analysis: LinguisticAnalysis) -> IngestResult:
    """Check (type, head, modifier) triples against the analysis.

    Each triple is accepted or rejected on its own; accepted relations are
    numbered ``syntrel1``, ``syntrel2``... in input order.
    """
    relations, rejected = [], []
    for index, triple in enumerate(triples):
        rel_type, head, modifier = triple
        reason = _check_ref(analysis, head, ("word", "phrase")) or _check_ref(analysis, modifier, ("word", "phrase"))
        if reason is None and head == modifier:
            reason = "head and modifier are the same unit"
        if reason is None and not rel_type:
            reason = "empty relation type"
        if reason:
            rejected.append(Rejection(index, tuple(triple), reason))
        else:
            relations.append(SyntacticRelation(make_id("syntrel", len(relations) + 1), rel_type, head, modifier))
    return IngestResult(relations, rejected)


def ingest_semantic_relations(triples: Iterable[tuple[str, str, str, str]], analysis: LinguisticAnalysis) -> IngestResult:
    """Check (kind, type, source, target) triples between semantic units."""
    relations, rejected = [], []
    for index, triple in enumerate(triples):
        kind, rel_type, source, target = triple
        try:
            kind = RelationKind(kind)
            reason = None
        except ValueError:
            reason = f"unknown relation kind {kind!r}"
        reason = (
            reason
            or _check_ref(analysis, source, ("semantic_unit",))
            or _check_ref(analysis, target, ("semantic_unit",))
        )
        if reason is None and source == target:
            reason = "source and target are the same unit"
        if reason:
            rejected.append(Rejection(index, tuple(triple), reason))
        else:
            relations.append(
                SemanticRelation(make_id("semrel", len(relations) + 1), kind, rel_type, source, target)
            )
    return IngestResult(relations, rejected)


def load_relations(source: Source, arity: int) -> list[tuple[str, ...]]:
    """Read relation triples (arity 3, syntactic) or quadruples (arity 4, semantic)."""
    rows = []
    for lineno, fields in iter_fields(source):
        if len(fields) != arity:
            raise ResourceFormatError(f"expected {arity} tab-separated fields, got {len(fields)}", lineno)
        rows.append(tuple(f.strip() for f in fields))
    return rows
