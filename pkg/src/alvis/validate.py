"""Cross-layer integrity checks, text reconstruction and size statistics.

Rule codes are stable and used by tooling:

TOKEN_PARTITION   tokens cover the canonical text from offset 0, without gap
                  or overlap, and each content equals its text slice
TOKEN_TYPE        a token's type agrees with the characters it holds
TOKEN_NUMBERING   token ordinals run 1..n in order
ID_UNIQUE         IDs are unique within a layer
REF_RESOLVES      every reference names an existing unit of a suitable layer
WORD_TOKEN_ORDER  token lists of words and semantic units strictly increase
WORD_NO_EDGE_SEP  no word starts or ends with a separator token
SENT_ORDER        sentences start before they end and do not overlap
PHRASE_ACYCLIC    phrase containment has no cycle; a head is not a modifier
PROP_UNIQUE       at most one lemma, stem and morphosyntactic record per word
REL_NO_SELF       relations link two distinct units
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from alvis.errors import MalformedIdError, ReconstructionError
from alvis.model import (
    LAYERS,
    DocumentRecord,
    LinguisticAnalysis,
    TokenType,
    layer_of,
)
from alvis.tokenize import classify_char, reconstruct_text
from alvis import xmlio

RULES = (
    "TOKEN_PARTITION",
    "TOKEN_TYPE",
    "TOKEN_NUMBERING",
    "ID_UNIQUE",
    "REF_RESOLVES",
    "WORD_TOKEN_ORDER",
    "WORD_NO_EDGE_SEP",
    "SENT_ORDER",
    "PHRASE_ACYCLIC",
    "PROP_UNIQUE",
    "REL_NO_SELF",
)


class Violation(NamedTuple):
    rule: str
    layer: str
    unit_id: str
    message: str

    def to_line(self) -> str:
        return "\t".join((self.rule, self.layer, self.unit_id, self.message.replace("\t", " ").replace("\n", " ")))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    record_id: str | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_lines(self) -> list[str]:
        return [v.to_line() for v in self.violations]

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "ok": self.ok,
            "violations": [v._asdict() for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


class _Checker:
    def __init__(self, record: DocumentRecord):
        self.record = record
        self.analysis: LinguisticAnalysis = record.analysis
        self.violations: list[Violation] = []

    def add(self, rule: str, layer: str, unit_id: str, message: str) -> None:
        self.violations.append(Violation(rule, layer, unit_id, message))

    def resolves(self, layer: str, unit_id: str, ref: str, targets: tuple[str, ...]) -> bool:
        """Record REF_RESOLVES unless ``ref`` names a unit in ``targets``."""
        try:
            target = layer_of(ref)
        except MalformedIdError:
            target = None
        if target in targets and ref in self.analysis.index(target):
            return True
        self.add("REF_RESOLVES", layer, unit_id, f"reference {ref!r} does not resolve to a {'/'.join(targets)}")
        return False

    def run(self) -> list[Violation]:
        self.check_ids()
        self.check_tokens()
        self.check_token_lists()
        self.check_sentences()
        self.check_phrases()
        self.check_properties()
        self.check_relations()
        return self.violations

    def check_ids(self) -> None:
        for layer in LAYERS:
            seen = set()
            for unit in self.analysis.layer(layer):
                if unit.id in seen:
                    self.add("ID_UNIQUE", layer, unit.id, f"duplicate {layer} id")
                seen.add(unit.id)

    def check_tokens(self) -> None:
        tokens = self.analysis.tokens
        if not tokens:
            return
        text = self.record.canonical_text
        expected = 0
        for n, tok in enumerate(tokens, start=1):
            if tok.ordinal != n:
                self.add("TOKEN_NUMBERING", "token", tok.id, f"expected token{n} at position {n}")
            if tok.start != expected:
                self.add("TOKEN_PARTITION", "token", tok.id, f"starts at {tok.start}, expected {expected}")
            if tok.end - tok.start + 1 != len(tok.content) or text[tok.start:tok.end + 1] != tok.content:
                self.add("TOKEN_PARTITION", "token", tok.id,
                         f"content {tok.content!r} does not match text at {tok.start}..{tok.end}")
            if not tok.content or any(classify_char(c) is not tok.type for c in tok.content) or (
                tok.type is TokenType.SYMB and len(tok.content) != 1
            ):
                self.add("TOKEN_TYPE", "token", tok.id, f"content {tok.content!r} is not of type {tok.type}")
            expected = max(expected, tok.end + 1)
        if expected != len(text):
            self.add("TOKEN_PARTITION", "token", tokens[-1].id,
                     f"tokens end at {expected}, text length is {len(text)}")

    def check_token_lists(self) -> None:
        positions = self.analysis.token_positions
        tokens = self.analysis.tokens
        for layer in ("word", "semantic_unit"):
            for unit in self.analysis.layer(layer):
                if not unit.token_ids:
                    self.add("REF_RESOLVES", layer, unit.id, "empty token list")
                    continue
                ok = all([self.resolves(layer, unit.id, tid, ("token",)) for tid in unit.token_ids])
                if not ok:
                    continue
                idx = [positions[tid] for tid in unit.token_ids]
                if any(b <= a for a, b in zip(idx, idx[1:])):
                    self.add("WORD_TOKEN_ORDER", layer, unit.id, "token references are not strictly increasing")
                if layer == "word" and (
                    tokens[idx[0]].type is TokenType.SEP or tokens[idx[-1]].type is TokenType.SEP
                ):
                    self.add("WORD_NO_EDGE_SEP", layer, unit.id, "word starts or ends with a separator token")

    def check_sentences(self) -> None:
        positions = self.analysis.token_positions
        previous_end = -1
        previous_id = None
        for sent in self.analysis.sentences:
            a = self.resolves("sentence", sent.id, sent.start_token, ("token",))
            b = self.resolves("sentence", sent.id, sent.end_token, ("token",))
            if not (a and b):
                continue
            start, end = positions[sent.start_token], positions[sent.end_token]
            if start > end:
                self.add("SENT_ORDER", "sentence", sent.id, "start token comes after end token")
            if start <= previous_end:
                self.add("SENT_ORDER", "sentence", sent.id, f"overlaps or precedes {previous_id}")
            previous_end = max(previous_end, end)
            previous_id = sent.id

    def check_phrases(self) -> None:
        phrases = self.analysis.index("phrase")
        graph: dict[str, list[str]] = {}
        for phrase in self.analysis.phrases:
            children = []
            for ref in phrase.components:
                if self.resolves("phrase", phrase.id, ref, ("word", "phrase")) and ref in phrases:
                    children.append(ref)
            if phrase.head in phrase.modifiers:
                self.add("PHRASE_ACYCLIC", "phrase", phrase.id, f"head {phrase.head} is also a modifier")
            graph.setdefault(phrase.id, children)
        # iterative DFS with colours
        state: dict[str, int] = {}
        reported = set()
        for root in graph:
            if state.get(root):
                continue
            stack = [(root, iter(graph[root]))]
            state[root] = 1
            while stack:
                node, children = stack[-1]
                child = next(children, None)
                if child is None:
                    state[node] = 2
                    stack.pop()
                elif state.get(child) == 1:
                    if child not in reported:
                        self.add("PHRASE_ACYCLIC", "phrase", child, f"phrase cycle through {node}")
                        reported.add(child)
                elif not state.get(child):
                    state[child] = 1
                    stack.append((child, iter(graph.get(child, ()))))

    def check_properties(self) -> None:
        for layer in ("lemma", "stem", "morphosyntactic_features"):
            owners: dict[str, str] = {}
            for unit in self.analysis.layer(layer):
                if not self.resolves(layer, unit.id, unit.word_id, ("word",)):
                    continue
                if unit.word_id in owners:
                    self.add("PROP_UNIQUE", layer, unit.id,
                             f"{unit.word_id} already has {owners[unit.word_id]}")
                else:
                    owners[unit.word_id] = unit.id
        for sf in self.analysis.semantic_features:
            self.resolves("semantic_features", sf.id, sf.semantic_unit_id, ("semantic_unit",))

    def check_relations(self) -> None:
        for rel in self.analysis.syntactic_relations:
            self.resolves("syntactic_relation", rel.id, rel.head, ("word", "phrase"))
            self.resolves("syntactic_relation", rel.id, rel.modifier, ("word", "phrase"))
            if rel.head == rel.modifier:
                self.add("REL_NO_SELF", "syntactic_relation", rel.id, "head and modifier are the same unit")
        for rel in self.analysis.semantic_relations:
            self.resolves("semantic_relation", rel.id, rel.source, ("semantic_unit",))
            self.resolves("semantic_relation", rel.id, rel.target, ("semantic_unit",))
            if rel.source == rel.target:
                self.add("REL_NO_SELF", "semantic_relation", rel.id, "source and target are the same unit")


def validate(record: DocumentRecord) -> ValidationReport:
    """Check every rule; problems are reported, never raised."""
    return ValidationReport(tuple(_Checker(record).run()), record.id)


def reconstruct(record: DocumentRecord) -> str:
    """Rebuild the canonical text from the token layer alone."""
    report = validate(record)
    partition = [v for v in report.violations if v.rule == "TOKEN_PARTITION"]
    if partition:
        raise ReconstructionError(
            f"token layer does not partition the text: {partition[0].unit_id}: {partition[0].message}",
            report=report,
        )
    return reconstruct_text(record.analysis.tokens)


@dataclass(frozen=True)
class SizeStats:
    record_id: str
    canonical_bytes: int
    analysis_bytes: int
    per_layer_bytes: dict[str, int] = field(default_factory=dict)

    @property
    def expansion_factor(self) -> float:
        return self.analysis_bytes / self.canonical_bytes if self.canonical_bytes else 0.0

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "canonical_bytes": self.canonical_bytes,
            "analysis_bytes": self.analysis_bytes,
            "expansion_factor": round(self.expansion_factor, 2),
            "per_layer_bytes": dict(self.per_layer_bytes),
        }


def size_stats(record: DocumentRecord, profile: xmlio.SerializationProfile = xmlio.DEFAULT_PROFILE) -> SizeStats:
    """UTF-8 sizes of the canonical text and of its serialized analysis.

    Layer sizes are measured at the nesting depth the layers have inside a
    record, so they add up to the analysis size minus the enclosing
    ``linguisticAnalysis`` tags.
    """
    analysis = record.analysis
    per_layer = {
        layer: xmlio.layer_bytes(analysis, layer, profile) for layer in profile.layer_order if analysis.layer(layer)
    }
    return SizeStats(
        record.id,
        len(record.canonical_text.encode("utf-8")),
        xmlio.analysis_bytes(analysis, profile),
        per_layer,
    )
