"""Layered stand-off annotation data model.

Every textual unit is anchored, directly or through other units, on the
token layer.  Tokens carry inclusive character offsets into the canonical
text of the document; all other layers refer to units by identifier.
Identifiers are a layer prefix followed by an ordinal (``token1``,
``word12``, ``named_entity0``), which is what :func:`resolve_ref` relies on.

All classes are frozen dataclasses holding tuples, so a record can be
shared freely between readers.  Pipelines build new layers and attach
them with :meth:`LinguisticAnalysis.with_layer`.
"""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, Union

from alvis.errors import IntegrityError, MalformedIdError


class TokenType(str, enum.Enum):
    ALPHA = "alpha"
    NUM = "num"
    SEP = "sep"
    SYMB = "symb"

    def __str__(self) -> str:
        return self.value


class UnitKind(str, enum.Enum):
    NAMED_ENTITY = "named_entity"
    TERM = "term"
    UNDEFINED = "undefined"

    def __str__(self) -> str:
        return self.value


class RelationKind(str, enum.Enum):
    ANAPHORIC = "anaphoric"
    DOMAIN = "domain"

    def __str__(self) -> str:
        return self.value


# Layer name -> LinguisticAnalysis attribute, in serialization order.
LAYERS: dict[str, str] = {
    "token": "tokens",
    "sentence": "sentences",
    "semantic_unit": "semantic_units",
    "word": "words",
    "lemma": "lemmas",
    "morphosyntactic_features": "morphosyntax",
    "syntactic_relation": "syntactic_relations",
    "semantic_features": "semantic_features",
    "semantic_relation": "semantic_relations",
    "phrase": "phrases",
    "stem": "stems",
}

# ID prefix -> layer name.
ID_PREFIXES: dict[str, str] = {
    "token": "token",
    "word": "word",
    "sentence": "sentence",
    "named_entity": "semantic_unit",
    "term": "semantic_unit",
    "undefined": "semantic_unit",
    "phrase": "phrase",
    "lemma": "lemma",
    "stem": "stem",
    "morphosyntactic_features": "morphosyntactic_features",
    "syntrel": "syntactic_relation",
    "sf": "semantic_features",
    "semrel": "semantic_relation",
}

# First ordinal used by each semantic-unit kind (named entities start at 0).
KIND_ORIGIN = {UnitKind.NAMED_ENTITY: 0, UnitKind.TERM: 1, UnitKind.UNDEFINED: 1}

_ID_RE = re.compile(r"^([A-Za-z_]+?)(\d+)$")


def split_id(unit_id: str) -> tuple[str, int]:
    """Split ``"word12"`` into ``("word", 12)``.

    Raises MalformedIdError when the prefix is not a known layer prefix.
    """
    m = _ID_RE.match(unit_id)
    if m is None or m.group(1) not in ID_PREFIXES:
        raise MalformedIdError(unit_id)
    return m.group(1), int(m.group(2))


def layer_of(unit_id: str) -> str:
    return ID_PREFIXES[split_id(unit_id)[0]]


def ordinal_of(unit_id: str) -> int | None:
    m = _ID_RE.match(unit_id)
    return int(m.group(2)) if m else None


def make_id(prefix: str, ordinal: int) -> str:
    return f"{prefix}{ordinal}"


@dataclass(frozen=True)
class Token:
    """Typed text span; ``start`` and ``end`` are inclusive offsets."""

    id: str
    content: str
    start: int
    end: int
    type: TokenType

    @property
    def ordinal(self) -> int | None:
        return ordinal_of(self.id)

    def __len__(self) -> int:
        return len(self.content)


@dataclass(frozen=True)
class Word:
    id: str
    token_ids: tuple[str, ...]
    form: str | None = None


@dataclass(frozen=True)
class Sentence:
    id: str
    start_token: str
    end_token: str
    form: str | None = None


@dataclass(frozen=True)
class SemanticUnit:
    id: str
    kind: UnitKind
    token_ids: tuple[str, ...]
    form: str | None = None


@dataclass(frozen=True)
class Phrase:
    """A head plus optional modifiers, each a word or phrase ID."""

    id: str
    head: str
    modifiers: tuple[str, ...] = ()
    form: str | None = None

    @property
    def components(self) -> tuple[str, ...]:
        return (self.head,) + self.modifiers


@dataclass(frozen=True)
class Lemma:
    id: str
    canonical_form: str
    word_id: str


@dataclass(frozen=True)
class Stem:
    id: str
    stem_form: str
    word_id: str


@dataclass(frozen=True)
class MorphosyntacticFeatures:
    id: str
    word_id: str
    syntactic_category: str
    features: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SyntacticRelation:
    id: str
    relation_type: str
    head: str
    modifier: str


@dataclass(frozen=True)
class SemanticFeatures:
    id: str
    semantic_unit_id: str
    ontology_node_ids: tuple[str, ...]


@dataclass(frozen=True)
class SemanticRelation:
    id: str
    relation_kind: RelationKind
    relation_type: str
    source: str
    target: str


Unit = Union[
    Token, Word, Sentence, SemanticUnit, Phrase, Lemma, Stem,
    MorphosyntacticFeatures, SyntacticRelation, SemanticFeatures, SemanticRelation,
]


@dataclass(frozen=True)
class LinguisticAnalysis:
    tokens: tuple[Token, ...] = ()
    words: tuple[Word, ...] = ()
    sentences: tuple[Sentence, ...] = ()
    semantic_units: tuple[SemanticUnit, ...] = ()
    phrases: tuple[Phrase, ...] = ()
    lemmas: tuple[Lemma, ...] = ()
    stems: tuple[Stem, ...] = ()
    morphosyntax: tuple[MorphosyntacticFeatures, ...] = ()
    syntactic_relations: tuple[SyntacticRelation, ...] = ()
    semantic_features: tuple[SemanticFeatures, ...] = ()
    semantic_relations: tuple[SemanticRelation, ...] = ()

    def layer(self, name: str) -> tuple:
        return getattr(self, LAYERS[name])

    def with_layer(self, name: str, units) -> "LinguisticAnalysis":
        return replace(self, **{LAYERS[name]: tuple(units)})

    def without_layer(self, name: str) -> "LinguisticAnalysis":
        return self.with_layer(name, ())

    def non_empty_layers(self) -> list[str]:
        return [name for name in LAYERS if self.layer(name)]

    @property
    def is_empty(self) -> bool:
        return not self.non_empty_layers()

    @cached_property
    def _indexes(self) -> dict[str, dict[str, Unit]]:
        indexes: dict[str, dict[str, Unit]] = {}
        for name in LAYERS:
            index: dict[str, Unit] = {}
            for unit in self.layer(name):
                index.setdefault(unit.id, unit)
            indexes[name] = index
        return indexes

    def index(self, layer: str) -> dict[str, Unit]:
        """ID -> unit for one layer (first occurrence wins on duplicates)."""
        return self._indexes[layer]

    @cached_property
    def token_positions(self) -> dict[str, int]:
        """Token ID -> position in the token tuple."""
        positions: dict[str, int] = {}
        for i, tok in enumerate(self.tokens):
            positions.setdefault(tok.id, i)
        return positions


@dataclass(frozen=True)
class Section:
    body: str
    title: str | None = None


def flatten_sections(sections) -> tuple[str, tuple[int, ...]]:
    """Concatenate titles and bodies, each followed by one newline.

    Returns the text and the offsets of the appended newlines (the places
    where a title or a body ends).
    """
    parts: list[str] = []
    boundaries: list[int] = []
    length = 0
    for section in sections:
        pieces = [section.body] if section.title is None else [section.title, section.body]
        for piece in pieces:
            parts.append(piece)
            parts.append("\n")
            length += len(piece)
            boundaries.append(length)
            length += 1
    return "".join(parts), tuple(boundaries)


@dataclass(frozen=True)
class Acquisition:
    """Crawler-side data.  Unknown XML elements are kept verbatim in
    ``data_extra`` (inside acquisitionData) and ``extra`` (inside acquisition)."""

    sections: tuple[Section, ...] = ()
    urls: tuple[str, ...] = ()
    data_extra: tuple[str, ...] = ()
    extra: tuple[str, ...] = ()

    @cached_property
    def _flat(self) -> tuple[str, tuple[int, ...]]:
        return flatten_sections(self.sections)

    @property
    def canonical_text(self) -> str:
        return self._flat[0]

    @property
    def boundaries(self) -> tuple[int, ...]:
        return self._flat[1]


@dataclass(frozen=True)
class DocumentRecord:
    id: str
    acquisition: Acquisition = field(default_factory=Acquisition)
    analysis: LinguisticAnalysis = field(default_factory=LinguisticAnalysis)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document record id must be non-empty")

    @property
    def canonical_text(self) -> str:
        return self.acquisition.canonical_text

    def with_analysis(self, analysis: LinguisticAnalysis) -> "DocumentRecord":
        return replace(self, analysis=analysis)

    @classmethod
    def from_text(cls, text: str, record_id: str | None = None, urls=()) -> "DocumentRecord":
        """Wrap plain text as a single-section record.

        One trailing newline is dropped from the body since flattening adds
        it back, so a newline-terminated file keeps its exact text.
        """
        body = text[:-1] if text.endswith("\n") else text
        if record_id is None:
            record_id = hashlib.md5(text.encode("utf-8")).hexdigest().upper()
        return cls(record_id, Acquisition(sections=(Section(body),), urls=tuple(urls)))


def resolve_ref(analysis: LinguisticAnalysis, unit_id: str) -> Unit | None:
    """Return the unit named by ``unit_id`` or None when it does not exist.

    The layer is chosen from the ID prefix; an unknown prefix raises
    MalformedIdError rather than returning None.
    """
    layer = layer_of(unit_id)
    return analysis.index(layer).get(unit_id)


def _require(analysis: LinguisticAnalysis, unit_id: str) -> Unit:
    unit = resolve_ref(analysis, unit_id)
    if unit is None:
        raise IntegrityError(f"dangling reference {unit_id}", [unit_id])
    return unit


def _token_refs(analysis: LinguisticAnalysis, unit: Unit, seen: set[str]) -> Iterator[Token]:
    if isinstance(unit, Token):
        yield unit
    elif isinstance(unit, (Word, SemanticUnit)):
        for tid in unit.token_ids:
            yield _require(analysis, tid)
    elif isinstance(unit, Sentence):
        yield _require(analysis, unit.start_token)
        yield _require(analysis, unit.end_token)
    elif isinstance(unit, Phrase):
        if unit.id in seen:
            raise IntegrityError(f"phrase cycle through {unit.id}", [unit.id])
        seen = seen | {unit.id}
        for ref in unit.components:
            yield from _token_refs(analysis, _require(analysis, ref), seen)
    elif isinstance(unit, (Lemma, Stem, MorphosyntacticFeatures)):
        yield from _token_refs(analysis, _require(analysis, unit.word_id), seen)
    elif isinstance(unit, SemanticFeatures):
        yield from _token_refs(analysis, _require(analysis, unit.semantic_unit_id), seen)
    elif isinstance(unit, SyntacticRelation):
        for ref in (unit.head, unit.modifier):
            yield from _token_refs(analysis, _require(analysis, ref), seen)
    elif isinstance(unit, SemanticRelation):
        for ref in (unit.source, unit.target):
            yield from _token_refs(analysis, _require(analysis, ref), seen)
    else:
        raise TypeError(f"not an annotation unit: {unit!r}")


def span_of(analysis: LinguisticAnalysis, unit: Unit | str) -> tuple[int, int]:
    """Smallest inclusive (start, end) offset interval covering every token
    the unit refers to, directly or through other units."""
    if isinstance(unit, str):
        unit = _require(analysis, unit)
    tokens = list(_token_refs(analysis, unit, set()))
    if not tokens:
        raise IntegrityError(f"{unit.id} refers to no token")
    return min(t.start for t in tokens), max(t.end for t in tokens)
