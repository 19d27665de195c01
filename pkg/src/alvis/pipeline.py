"""Configurable annotation pipeline.

Stages always run in the same order whatever order they are requested in:
tokenize, semantic_units, words, sentences, morphosyntax, lemmas, stems,
phrases.  Dictionary matching therefore always precedes word and sentence
segmentation.  Requested stages pull in the stages they depend on.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from alvis import enrich, segment
from alvis.errors import ConfigurationError
from alvis.model import DocumentRecord, UnitKind
from alvis.tokenize import tokenize

log = logging.getLogger(__name__)

STAGES = ("tokenize", "semantic_units", "words", "sentences", "morphosyntax", "lemmas", "stems", "phrases")

DEPENDENCIES = {
    "tokenize": (),
    "semantic_units": ("tokenize",),
    "words": ("tokenize",),
    "sentences": ("words",),
    "morphosyntax": ("words",),
    "lemmas": ("words",),
    "stems": ("words",),
    "phrases": ("morphosyntax",),
}

RESOURCE_ENV = "ALVIS_RESOURCE_DIR"

# Resource name -> file name looked up in the default resource directory.
RESOURCE_FILES = {
    "ne_dict": "ne_dict.tsv",
    "term_dict": "term_dict.tsv",
    "pos_lexicon": "pos_lexicon.tsv",
    "ontology_map": "ontology_map.tsv",
    "contractions": "contractions.tsv",
    "syntactic_relations_file": "syntactic_relations.tsv",
    "semantic_relations_file": "semantic_relations.tsv",
}


def stage_closure(stages: Iterable[str]) -> tuple[str, ...]:
    """Add missing prerequisites and return the stages in run order."""
    requested = list(stages)
    unknown = [s for s in requested if s not in DEPENDENCIES]
    if unknown:
        raise ConfigurationError(f"unknown stage(s): {', '.join(unknown)}")
    closed = set(requested)
    todo = list(requested)
    while todo:
        for dep in DEPENDENCIES[todo.pop()]:
            if dep not in closed:
                log.info("stage %s added as a prerequisite", dep)
                closed.add(dep)
                todo.append(dep)
    return tuple(s for s in STAGES if s in closed)


@dataclass(frozen=True)
class PipelineConfig:
    stages: tuple[str, ...] | None = None
    ne_dict: Path | None = None
    term_dict: Path | None = None
    pos_lexicon: Path | None = None
    ontology_map: Path | None = None
    contractions: Path | None = None
    syntactic_relations_file: Path | None = None
    semantic_relations_file: Path | None = None
    case_insensitive_match: bool = False

    def with_resource_dir(self, directory: str | os.PathLike | None = None) -> "PipelineConfig":
        """Fill unset resource paths from ``directory`` (default: the
        ``ALVIS_RESOURCE_DIR`` environment variable) when the file exists."""
        directory = directory or os.environ.get(RESOURCE_ENV)
        if not directory:
            return self
        updates = {}
        for name, filename in RESOURCE_FILES.items():
            path = Path(directory) / filename
            if getattr(self, name) is None and path.is_file():
                updates[name] = path
        return replace(self, **updates)

    def resolved_stages(self) -> tuple[str, ...]:
        if self.stages is not None:
            return stage_closure(self.stages)
        # default depth depends on which resources are available
        stages = ["tokenize", "words", "sentences", "lemmas", "stems"]
        if self.ne_dict or self.term_dict:
            stages.append("semantic_units")
        if self.pos_lexicon:
            stages += ["morphosyntax", "phrases"]
        return stage_closure(stages)


@dataclass
class Resources:
    """Loaded, read-only resources shared by every document."""

    dictionaries: list[segment.Dictionary] = field(default_factory=list)
    contractions: list[segment.ContractionRule] = field(default_factory=segment.default_contractions)
    lexicon: enrich.PosLexicon = field(default_factory=enrich.PosLexicon)
    node_map: enrich.OntologyNodeMap = field(default_factory=enrich.OntologyNodeMap)
    syntactic_relations: list[tuple[str, ...]] | None = None
    semantic_relations: list[tuple[str, ...]] | None = None

    @classmethod
    def load(cls, config: PipelineConfig, stages: Iterable[str]) -> "Resources":
        """Read every configured resource.

        Raises ConfigurationError naming the resource when an enabled stage
        lacks one, or a configured file cannot be opened.
        """
        stages = set(stages)
        if "semantic_units" in stages and not (config.ne_dict or config.term_dict):
            raise ConfigurationError("stage semantic_units needs ne_dict or term_dict", "ne_dict")
        if "morphosyntax" in stages and not config.pos_lexicon:
            raise ConfigurationError("stage morphosyntax needs pos_lexicon", "pos_lexicon")

        def read(name: str) -> bytes:
            path = getattr(config, name)
            try:
                return Path(path).read_bytes()
            except OSError as exc:
                raise ConfigurationError(f"cannot read {name} {path}: {exc.strerror}", name) from None

        res = cls()
        for name, kind in (("ne_dict", UnitKind.NAMED_ENTITY), ("term_dict", UnitKind.TERM)):
            if getattr(config, name):
                res.dictionaries.append(segment.load_dictionary(read(name), kind, config.case_insensitive_match))
        res.node_map = enrich.OntologyNodeMap.from_dictionaries(res.dictionaries)
        if config.ontology_map:
            res.node_map.update(enrich.load_ontology_map(read("ontology_map")))
        if config.contractions:
            res.contractions = segment.load_contractions(read("contractions"))
        if config.pos_lexicon:
            res.lexicon = enrich.load_pos_lexicon(read("pos_lexicon"))
        if config.syntactic_relations_file:
            res.syntactic_relations = enrich.load_relations(read("syntactic_relations_file"), 3)
        if config.semantic_relations_file:
            res.semantic_relations = enrich.load_relations(read("semantic_relations_file"), 4)
        return res


def annotate(record: DocumentRecord, resources: Resources, stages: Iterable[str] = STAGES) -> DocumentRecord:
    """Run ``stages`` (closed over their prerequisites) on one record.

    Each stage replaces its layer; layers of stages not run are kept.
    """
    stages = stage_closure(stages)
    analysis = record.analysis
    acq = record.acquisition

    if "tokenize" in stages:
        analysis = analysis.with_layer("token", tokenize(acq.canonical_text))
    tokens = analysis.tokens
    if "semantic_units" in stages:
        units = segment.match_semantic_units(tokens, resources.dictionaries)
        analysis = analysis.with_layer("semantic_unit", units)
        analysis = analysis.with_layer(
            "semantic_features", enrich.attach_semantic_features(units, resources.node_map)
        )
    if "words" in stages:
        analysis = analysis.with_layer(
            "word", segment.segment_words(tokens, analysis.semantic_units, resources.contractions)
        )
    words = analysis.words
    if "sentences" in stages:
        analysis = analysis.with_layer("sentence", segment.segment_sentences(tokens, words, acq.boundaries))
    if "morphosyntax" in stages:
        analysis = analysis.with_layer("morphosyntactic_features", enrich.tag_morphosyntax(words, resources.lexicon))
    if "lemmas" in stages:
        analysis = analysis.with_layer("lemma", enrich.lemmatize(words, resources.lexicon))
    if "stems" in stages:
        analysis = analysis.with_layer("stem", enrich.stem(words))
    if "phrases" in stages:
        analysis = analysis.with_layer("phrase", enrich.chunk_phrases(words, analysis.morphosyntax, tokens))

    if resources.syntactic_relations is not None:
        result = enrich.ingest_syntactic_relations(resources.syntactic_relations, analysis)
        for rej in result.rejected:
            log.warning("%s: syntactic relation %d rejected: %s", record.id, rej.index, rej.reason)
        analysis = analysis.with_layer("syntactic_relation", result.relations)
    if resources.semantic_relations is not None:
        result = enrich.ingest_semantic_relations(resources.semantic_relations, analysis)
        for rej in result.rejected:
            log.warning("%s: semantic relation %d rejected: %s", record.id, rej.index, rej.reason)
        analysis = analysis.with_layer("semantic_relation", result.relations)
    return record.with_analysis(analysis)
