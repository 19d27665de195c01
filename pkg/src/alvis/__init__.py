"""Stand-off linguistic annotation: layered data model, annotation
pipeline, XML document-record format and integrity tooling."""

from alvis.model import (
    Acquisition,
    DocumentRecord,
    Lemma,
    LinguisticAnalysis,
    MorphosyntacticFeatures,
    Phrase,
    RelationKind,
    Section,
    SemanticFeatures,
    SemanticRelation,
    SemanticUnit,
    Sentence,
    Stem,
    SyntacticRelation,
    Token,
    TokenType,
    UnitKind,
    Word,
    resolve_ref,
    span_of,
)
from alvis.tokenize import classify_char, reconstruct_text, tokenize
from alvis.xmlio import SerializationProfile, export_layer, import_layer, parse, parse_record, serialize
from alvis.validate import ValidationReport, reconstruct, size_stats, validate

__version__ = "0.1.0"

__all__ = [
    "Acquisition",
    "DocumentRecord",
    "Lemma",
    "LinguisticAnalysis",
    "MorphosyntacticFeatures",
    "Phrase",
    "RelationKind",
    "Section",
    "SemanticFeatures",
    "SemanticRelation",
    "SemanticUnit",
    "Sentence",
    "SerializationProfile",
    "Stem",
    "SyntacticRelation",
    "Token",
    "TokenType",
    "UnitKind",
    "ValidationReport",
    "Word",
    "classify_char",
    "export_layer",
    "import_layer",
    "parse",
    "parse_record",
    "reconstruct",
    "reconstruct_text",
    "resolve_ref",
    "serialize",
    "size_stats",
    "span_of",
    "tokenize",
    "validate",
]
