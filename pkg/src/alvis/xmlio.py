"""Reader and writer for ``documentCollection`` XML.

The writer is deterministic: fields inside a unit come in a fixed order
(alphabetical for tokens, as in the published sample) and layers follow
:attr:`SerializationProfile.layer_order`.  Empty layers are not written.
Unknown elements found under ``acquisition`` are kept verbatim and
written back; unknown elements under ``linguisticAnalysis`` are rejected.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, Sequence

from alvis.errors import (
    IntegrityError,
    MalformedIdError,
    SchemaError,
    SerializationError,
    XmlParseError,
)
from alvis.model import (
    LAYERS,
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
    layer_of,
)

LAYER_ORDER = tuple(LAYERS)


@dataclass(frozen=True)
class SerializationProfile:
    """``indent`` is the string used per nesting level; None writes
    everything on one line."""

    indent: str | None = "  "
    layer_order: tuple[str, ...] = LAYER_ORDER
    encoding: str = "utf-8"

    def __post_init__(self):
        if sorted(self.layer_order) != sorted(LAYER_ORDER):
            raise ValueError("layer_order must name every layer exactly once")
        if self.encoding.lower().replace("-", "") != "utf8":
            raise ValueError("only UTF-8 output is supported")


DEFAULT_PROFILE = SerializationProfile()
COMPACT_PROFILE = SerializationProfile(indent=None)


# -- writing ----------------------------------------------------------------

_INVALID_XML_CHAR = re.compile("[^\t\n\r\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")


def _check_chars(value: str) -> str:
    m = _INVALID_XML_CHAR.search(value)
    if m:
        raise SerializationError(f"character U+{ord(m.group()):04X} cannot be represented in XML")
    return value


def escape_text(value: str) -> str:
    _check_chars(value)
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace("\r", "&#13;")


def escape_attr(value: str) -> str:
    return (
        escape_text(value)
        .replace('"', "&quot;")
        .replace("\n", "&#10;")
        .replace("\t", "&#9;")
    )


class Node:
    """Minimal element tree used by the writer."""

    __slots__ = ("tag", "attrs", "text", "children")

    def __init__(self, tag: str, text: str | None = None, children: Sequence = (), attrs: Sequence = ()):
        self.tag = tag
        self.text = text
        self.children = list(children)
        self.attrs = list(attrs)


class Raw:
    """Pre-serialized XML inserted as is (passthrough elements)."""

    __slots__ = ("xml",)

    def __init__(self, xml: str):
        self.xml = xml


def _open_tag(node: Node) -> str:
    attrs = "".join(f' {k}="{escape_attr(v)}"' for k, v in node.attrs)
    return f"<{node.tag}{attrs}"


def render(node, out: list[str], indent: str | None, depth: int = 0) -> None:
    pad = "" if indent is None else indent * depth
    nl = "" if indent is None else "\n"
    if isinstance(node, Raw):
        out.append(f"{pad}{node.xml}{nl}")
        return
    if node.children:
        out.append(f"{pad}{_open_tag(node)}>{nl}")
        for child in node.children:
            render(child, out, indent, depth + 1)
        out.append(f"{pad}</{node.tag}>{nl}")
    elif node.text is not None:
        out.append(f"{pad}{_open_tag(node)}>{escape_text(node.text)}</{node.tag}>{nl}")
    else:
        out.append(f"{pad}{_open_tag(node)}/>{nl}")


def render_string(node, indent: str | None, depth: int = 0) -> str:
    out: list[str] = []
    render(node, out, indent, depth)
    return "".join(out)


def element_to_string(elem: ET.Element) -> str:
    """Serialize an arbitrary parsed element compactly (tail dropped)."""
    parts = [f"<{elem.tag}"]
    for k, v in elem.attrib.items():
        parts.append(f' {k}="{escape_attr(v)}"')
    if elem.text is None and len(elem) == 0:
        parts.append("/>")
        return "".join(parts)
    parts.append(">")
    if elem.text:
        parts.append(escape_text(elem.text))
    for child in elem:
        parts.append(element_to_string(child))
        if child.tail:
            parts.append(escape_text(child.tail))
    parts.append(f"</{elem.tag}>")
    return "".join(parts)


def _unit_ref(unit_id: str) -> Node:
    try:
        layer = layer_of(unit_id)
    except MalformedIdError as exc:
        raise SerializationError(str(exc)) from None
    return Node(f"refid_{layer}", unit_id)


def _form(children: list, form: str | None) -> None:
    if form is not None:
        children.append(Node("form", form))


def _token_list(token_ids) -> Node:
    return Node("list_refid_token", children=[Node("refid_token", t) for t in token_ids])


def unit_node(unit) -> Node:
    if isinstance(unit, Token):
        return Node("token", children=[
            Node("content", unit.content),
            Node("from", str(unit.start)),
            Node("id", unit.id),
            Node("to", str(unit.end)),
            Node("type", str(unit.type)),
        ])
    if isinstance(unit, Sentence):
        children: list = []
        _form(children, unit.form)
        children += [
            Node("id", unit.id),
            Node("refid_end_token", unit.end_token),
            Node("refid_start_token", unit.start_token),
        ]
        return Node("sentence", children=children)
    if isinstance(unit, SemanticUnit):
        children = []
        _form(children, unit.form)
        children += [Node("id", unit.id), _token_list(unit.token_ids)]
        return Node("semantic_unit", children=[Node(str(unit.kind), children=children)])
    if isinstance(unit, Word):
        children = []
        _form(children, unit.form)
        children += [Node("id", unit.id), _token_list(unit.token_ids)]
        return Node("word", children=children)
    if isinstance(unit, Lemma):
        return Node("lemma", children=[
            Node("canonical_form", unit.canonical_form),
            Node("id", unit.id),
            Node("refid_word", unit.word_id),
        ])
    if isinstance(unit, MorphosyntacticFeatures):
        children = [
            Node("id", unit.id),
            Node("refid_word", unit.word_id),
            Node("syntactic_category", unit.syntactic_category),
        ]
        if unit.features:
            children.append(Node("features", children=[
                Node("feature", v, attrs=[("name", k)]) for k, v in unit.features
            ]))
        return Node("morphosyntactic_features", children=children)
    if isinstance(unit, SyntacticRelation):
        return Node("syntactic_relation", children=[
            Node("id", unit.id),
            Node("syntactic_relation_type", unit.relation_type),
            Node("refid_head", children=[_unit_ref(unit.head)]),
            Node("refid_modifier", children=[_unit_ref(unit.modifier)]),
        ])
    if isinstance(unit, SemanticFeatures):
        return Node("semantic_features", children=[
            Node("id", unit.id),
            Node("semantic_category", children=[
                Node("list_refid_ontology_node", children=[
                    Node("refid_ontology_node", n) for n in unit.ontology_node_ids
                ])
            ]),
            Node("refid_semantic_unit", unit.semantic_unit_id),
        ])
    if isinstance(unit, SemanticRelation):
        return Node("semantic_relation", children=[
            Node("id", unit.id),
            Node("relation_kind", str(unit.relation_kind)),
            Node("semantic_relation_type", unit.relation_type),
            Node("refid_source", children=[Node("refid_semantic_unit", unit.source)]),
            Node("refid_target", children=[Node("refid_semantic_unit", unit.target)]),
        ])
    if isinstance(unit, Phrase):
        children = []
        _form(children, unit.form)
        children += [Node("id", unit.id), Node("refid_head", children=[_unit_ref(unit.head)])]
        if unit.modifiers:
            children.append(Node("list_refid_modifier", children=[_unit_ref(m) for m in unit.modifiers]))
        return Node("phrase", children=children)
    if isinstance(unit, Stem):
        return Node("stem", children=[
            Node("id", unit.id),
            Node("refid_word", unit.word_id),
            Node("stem_form", unit.stem_form),
        ])
    raise TypeError(f"cannot serialize {unit!r}")


def layer_node(analysis: LinguisticAnalysis, layer: str, attrs=()) -> Node:
    return Node(f"{layer}_level", children=[unit_node(u) for u in analysis.layer(layer)], attrs=attrs)


def analysis_node(analysis: LinguisticAnalysis, profile: SerializationProfile) -> Node | None:
    layers = [layer_node(analysis, name) for name in profile.layer_order if analysis.layer(name)]
    return Node("linguisticAnalysis", children=layers) if layers else None


def acquisition_node(acq: Acquisition) -> Node:
    data = [Raw(x) for x in acq.data_extra]
    if acq.urls:
        data.append(Node("urls", children=[Node("url", u) for u in acq.urls]))
    children: list = []
    if data:
        children.append(Node("acquisitionData", children=data))
    sections = [
        Node("section", s.body, attrs=[] if s.title is None else [("title", s.title)])
        for s in acq.sections
    ]
    children.append(Node("canonicalDocument", children=sections))
    children.extend(Raw(x) for x in acq.extra)
    return Node("acquisition", children=children)


def record_node(record: DocumentRecord, profile: SerializationProfile) -> Node:
    children = [acquisition_node(record.acquisition)]
    analysis = analysis_node(record.analysis, profile)
    if analysis is not None:
        children.append(analysis)
    return Node("documentRecord", children=children, attrs=[("id", record.id)])


def _check(record: DocumentRecord) -> None:
    from alvis.validate import validate

    report = validate(record)
    if not report.ok:
        first = report.violations[0]
        raise SerializationError(
            f"record {record.id} fails validation: {first.rule} on {first.layer} {first.unit_id}: "
            f"{first.message}",
            tuple(sorted({v.rule for v in report.violations})),
        )


def serialize_record(record: DocumentRecord, profile: SerializationProfile = DEFAULT_PROFILE,
                     check: bool = True, depth: int = 1) -> str:
    """The ``documentRecord`` element alone, as text."""
    if check:
        _check(record)
    return render_string(record_node(record, profile), profile.indent, depth)


def _collection_open(profile: SerializationProfile) -> str:
    return "<documentCollection>" + ("" if profile.indent is None else "\n")


def _collection_close(profile: SerializationProfile) -> str:
    return "</documentCollection>" + ("" if profile.indent is None else "\n")


def serialize_collection(records: Iterable[DocumentRecord], profile: SerializationProfile = DEFAULT_PROFILE,
                         check: bool = True) -> bytes:
    parts = [_collection_open(profile)]
    parts.extend(serialize_record(r, profile, check) for r in records)
    parts.append(_collection_close(profile))
    return "".join(parts).encode("utf-8")


def serialize(record: DocumentRecord, profile: SerializationProfile = DEFAULT_PROFILE, check: bool = True) -> bytes:
    """A ``documentCollection`` holding exactly this record.

    Raises SerializationError (carrying the failed rule codes) when the
    record does not validate and ``check`` is true.
    """
    return serialize_collection([record], profile, check)


class CollectionWriter:
    """Incremental writer for a stream of records."""

    def __init__(self, stream: BinaryIO, profile: SerializationProfile = DEFAULT_PROFILE, check: bool = True):
        self.stream = stream
        self.profile = profile
        self.check = check
        self.stream.write(_collection_open(profile).encode("utf-8"))

    def write(self, record: DocumentRecord) -> None:
        self.stream.write(serialize_record(record, self.profile, self.check).encode("utf-8"))

    def write_raw(self, record_xml: str) -> None:
        self.stream.write(record_xml.encode("utf-8"))

    def close(self) -> None:
        self.stream.write(_collection_close(self.profile).encode("utf-8"))


def analysis_bytes(analysis: LinguisticAnalysis, profile: SerializationProfile = DEFAULT_PROFILE) -> int:
    """Size of the ``linguisticAnalysis`` element as written inside a
    record; 0 when every layer is empty (the element is then omitted)."""
    node = analysis_node(analysis, profile)
    return 0 if node is None else len(render_string(node, profile.indent, 2).encode("utf-8"))


def layer_bytes(analysis: LinguisticAnalysis, layer: str, profile: SerializationProfile = DEFAULT_PROFILE) -> int:
    """Size of one ``X_level`` element at its position inside a record."""
    if not analysis.layer(layer):
        return 0
    return len(render_string(layer_node(analysis, layer), profile.indent, 3).encode("utf-8"))


def export_layer(record: DocumentRecord, layer: str, profile: SerializationProfile = DEFAULT_PROFILE) -> bytes:
    """Standalone ``<X_level record_id="...">`` document for one layer."""
    if layer not in LAYERS:
        raise ValueError(f"unknown layer {layer!r}")
    node = layer_node(record.analysis, layer, attrs=[("record_id", record.id)])
    return render_string(node, profile.indent).encode("utf-8")


# -- reading ----------------------------------------------------------------


def _parse_bytes(data: bytes) -> ET.Element:
    try:
        return ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise XmlParseError(f"malformed XML at line {line}, column {column}: {exc}", line, column) from None


def _text(elem: ET.Element, strip: bool = False) -> str:
    if len(elem):
        raise SchemaError(f"<{elem.tag}> must contain text only, found <{elem[0].tag}>", elem[0].tag)
    text = elem.text or ""
    return text.strip() if strip else text


class _Fields:
    """Children of a unit element, looked up by tag."""

    def __init__(self, elem: ET.Element, allowed: set[str]):
        self.elem = elem
        self.children: dict[str, ET.Element] = {}
        for child in elem:
            if child.tag not in allowed:
                raise SchemaError(f"unexpected <{child.tag}> in <{elem.tag}>", child.tag)
            if child.tag in self.children:
                raise SchemaError(f"repeated <{child.tag}> in <{elem.tag}>", child.tag)
            self.children[child.tag] = child

    def required(self, tag: str) -> ET.Element:
        if tag not in self.children:
            raise SchemaError(f"<{self.elem.tag}> is missing required field <{tag}>", tag)
        return self.children[tag]

    def text(self, tag: str, strip: bool = True) -> str:
        return _text(self.required(tag), strip)

    def optional_text(self, tag: str, strip: bool = False) -> str | None:
        return _text(self.children[tag], strip) if tag in self.children else None


def _int(fields: _Fields, tag: str) -> int:
    value = fields.text(tag)
    try:
        return int(value)
    except ValueError:
        raise SchemaError(f"<{tag}> must be an integer, got {value!r}", tag) from None


def _single_ref(elem: ET.Element, allowed: tuple[str, ...]) -> str:
    refs = list(elem)
    if len(refs) != 1 or refs[0].tag not in allowed:
        raise SchemaError(f"<{elem.tag}> must wrap exactly one of {', '.join('<%s>' % a for a in allowed)}", elem.tag)
    return _text(refs[0], strip=True)


def _token_refs(elem: ET.Element) -> tuple[str, ...]:
    ids = []
    for child in elem:
        if child.tag != "refid_token":
            raise SchemaError(f"unexpected <{child.tag}> in <list_refid_token>", child.tag)
        ids.append(_text(child, strip=True))
    return tuple(ids)


_UNIT_REF_TAGS = ("refid_word", "refid_phrase")


def _parse_token(elem):
    f = _Fields(elem, {"content", "from", "id", "to", "type"})
    type_name = f.text("type")
    try:
        token_type = TokenType(type_name)
    except ValueError:
        raise SchemaError(f"unknown token type {type_name!r}", "type") from None
    return Token(f.text("id"), _text(f.required("content")), _int(f, "from"), _int(f, "to"), token_type)


def _parse_sentence(elem):
    f = _Fields(elem, {"form", "id", "refid_end_token", "refid_start_token"})
    return Sentence(f.text("id"), f.text("refid_start_token"), f.text("refid_end_token"), f.optional_text("form"))


def _parse_semantic_unit(elem):
    kinds = list(elem)
    if len(kinds) != 1:
        raise SchemaError("<semantic_unit> must contain exactly one of <named_entity>, <term>, <undefined>",
                          "semantic_unit")
    inner = kinds[0]
    try:
        kind = UnitKind(inner.tag)
    except ValueError:
        raise SchemaError(f"unknown semantic unit kind <{inner.tag}>", inner.tag) from None
    f = _Fields(inner, {"form", "id", "list_refid_token"})
    return SemanticUnit(f.text("id"), kind, _token_refs(f.required("list_refid_token")), f.optional_text("form"))


def _parse_word(elem):
    f = _Fields(elem, {"form", "id", "list_refid_token"})
    return Word(f.text("id"), _token_refs(f.required("list_refid_token")), f.optional_text("form"))


def _parse_lemma(elem):
    f = _Fields(elem, {"canonical_form", "id", "refid_word"})
    return Lemma(f.text("id"), f.text("canonical_form", strip=False), f.text("refid_word"))


def _parse_morphosyntax(elem):
    f = _Fields(elem, {"id", "refid_word", "syntactic_category", "features"})
    features = []
    if "features" in f.children:
        for feat in f.children["features"]:
            if feat.tag != "feature" or "name" not in feat.attrib:
                raise SchemaError("<features> may only contain <feature name=...>", feat.tag)
            features.append((feat.attrib["name"], _text(feat)))
    return MorphosyntacticFeatures(f.text("id"), f.text("refid_word"), f.text("syntactic_category"), tuple(features))


def _parse_syntactic_relation(elem):
    f = _Fields(elem, {"id", "syntactic_relation_type", "refid_head", "refid_modifier"})
    return SyntacticRelation(
        f.text("id"),
        f.text("syntactic_relation_type"),
        _single_ref(f.required("refid_head"), _UNIT_REF_TAGS),
        _single_ref(f.required("refid_modifier"), _UNIT_REF_TAGS),
    )


def _parse_semantic_features(elem):
    f = _Fields(elem, {"id", "semantic_category", "refid_semantic_unit"})
    category = list(f.required("semantic_category"))
    if len(category) != 1 or category[0].tag != "list_refid_ontology_node":
        raise SchemaError("<semantic_category> must wrap <list_refid_ontology_node>", "semantic_category")
    nodes = []
    for node in category[0]:
        if node.tag != "refid_ontology_node":
            raise SchemaError(f"unexpected <{node.tag}> in <list_refid_ontology_node>", node.tag)
        nodes.append(_text(node, strip=True))
    return SemanticFeatures(f.text("id"), f.text("refid_semantic_unit"), tuple(nodes))


def _parse_semantic_relation(elem):
    f = _Fields(elem, {"id", "relation_kind", "semantic_relation_type", "refid_source", "refid_target"})
    kind_name = f.text("relation_kind")
    try:
        kind = RelationKind(kind_name)
    except ValueError:
        raise SchemaError(f"unknown relation kind {kind_name!r}", "relation_kind") from None
    return SemanticRelation(
        f.text("id"),
        kind,
        f.text("semantic_relation_type"),
        _single_ref(f.required("refid_source"), ("refid_semantic_unit",)),
        _single_ref(f.required("refid_target"), ("refid_semantic_unit",)),
    )


def _parse_stem(elem):
    f = _Fields(elem, {"id", "refid_word", "stem_form"})
    return Stem(f.text("id"), f.text("stem_form", strip=False), f.text("refid_word"))


def _parse_phrase(elem):
    f = _Fields(elem, {"form", "id", "refid_head", "list_refid_modifier"})
    modifiers = []
    if "list_refid_modifier" in f.children:
        for ref in f.children["list_refid_modifier"]:
            if ref.tag not in _UNIT_REF_TAGS:
                raise SchemaError(f"unexpected <{ref.tag}> in <list_refid_modifier>", ref.tag)
            modifiers.append(_text(ref, strip=True))
    return Phrase(f.text("id"), _single_ref(f.required("refid_head"), _UNIT_REF_TAGS), tuple(modifiers),
                  f.optional_text("form"))


_UNIT_PARSERS = {
    "token": _parse_token,
    "sentence": _parse_sentence,
    "semantic_unit": _parse_semantic_unit,
    "word": _parse_word,
    "lemma": _parse_lemma,
    "morphosyntactic_features": _parse_morphosyntax,
    "syntactic_relation": _parse_syntactic_relation,
    "semantic_features": _parse_semantic_features,
    "semantic_relation": _parse_semantic_relation,
    "phrase": _parse_phrase,
    "stem": _parse_stem,
}


def _parse_layer(elem: ET.Element, layer: str, check_ids: bool) -> tuple:
    units = []
    seen = set()
    for child in elem:
        if child.tag != layer:
            raise SchemaError(f"unexpected <{child.tag}> in <{elem.tag}>", child.tag)
        unit = _UNIT_PARSERS[layer](child)
        if check_ids and unit.id in seen:
            raise IntegrityError(f"duplicate {layer} id {unit.id}", [unit.id])
        seen.add(unit.id)
        units.append(unit)
    return tuple(units)


def _layer_name(tag: str) -> str:
    if tag.endswith("_level") and tag[: -len("_level")] in LAYERS:
        return tag[: -len("_level")]
    raise SchemaError(f"unknown element <{tag}> in <linguisticAnalysis>", tag)


def parse_analysis(elem: ET.Element, check_ids: bool = True) -> LinguisticAnalysis:
    layers = {}
    for child in elem:
        name = _layer_name(child.tag)
        if name in layers:
            raise SchemaError(f"repeated <{child.tag}>", child.tag)
        layers[name] = _parse_layer(child, name, check_ids)
    return LinguisticAnalysis(**{LAYERS[name]: units for name, units in layers.items()})


def parse_acquisition(elem: ET.Element | None) -> Acquisition:
    if elem is None:
        return Acquisition()
    urls: list[str] = []
    sections: list[Section] = []
    data_extra: list[str] = []
    extra: list[str] = []
    for child in elem:
        if child.tag == "acquisitionData":
            for item in child:
                if item.tag == "urls":
                    for url in item:
                        if url.tag != "url":
                            raise SchemaError(f"unexpected <{url.tag}> in <urls>", url.tag)
                        urls.append(_text(url, strip=True))
                else:
                    data_extra.append(element_to_string(item))
        elif child.tag == "canonicalDocument":
            for section in child:
                if section.tag != "section":
                    raise SchemaError(f"unexpected <{section.tag}> in <canonicalDocument>", section.tag)
                sections.append(Section(_text(section), section.attrib.get("title")))
        else:
            extra.append(element_to_string(child))
    return Acquisition(tuple(sections), tuple(urls), tuple(data_extra), tuple(extra))


def record_from_element(elem: ET.Element, check_ids: bool = True) -> DocumentRecord:
    """Build a record from a parsed ``documentRecord`` element."""
    if elem.tag != "documentRecord":
        raise SchemaError(f"expected <documentRecord>, found <{elem.tag}>", elem.tag)
    record_id = (elem.attrib.get("id") or "").strip()
    if not record_id:
        raise SchemaError("<documentRecord> needs a non-empty id attribute", "documentRecord")
    acquisition = None
    analysis = LinguisticAnalysis()
    for child in elem:
        if child.tag == "acquisition":
            acquisition = child
        elif child.tag == "linguisticAnalysis":
            analysis = parse_analysis(child, check_ids)
        else:
            raise SchemaError(f"unexpected <{child.tag}> in <documentRecord>", child.tag)
    return DocumentRecord(record_id, parse_acquisition(acquisition), analysis)


def parse(data: bytes, check_ids: bool = True) -> list[DocumentRecord]:
    """Parse a ``documentCollection`` into its records (possibly none).

    Raises XmlParseError for malformed XML, SchemaError for vocabulary
    problems and IntegrityError for duplicate IDs within a layer (unless
    ``check_ids`` is false, leaving them to the validator).
    """
    root = _parse_bytes(data)
    if root.tag != "documentCollection":
        raise SchemaError(f"expected <documentCollection>, found <{root.tag}>", root.tag)
    return [record_from_element(child, check_ids) for child in root]


def parse_record(data: bytes, check_ids: bool = True) -> DocumentRecord:
    records = parse(data, check_ids)
    if len(records) != 1:
        raise SchemaError(f"expected exactly one documentRecord, found {len(records)}", "documentCollection")
    return records[0]


def iter_record_elements(source: BinaryIO | str) -> Iterator[ET.Element]:
    """Stream ``documentRecord`` elements, releasing each after use."""
    depth = 0
    root = None
    try:
        for event, elem in ET.iterparse(source, events=("start", "end")):
            if event == "start":
                if depth == 0:
                    root = elem
                    if elem.tag != "documentCollection":
                        raise SchemaError(f"expected <documentCollection>, found <{elem.tag}>", elem.tag)
                depth += 1
                continue
            depth -= 1
            if depth == 1:
                yield elem
                root.clear()
    except ET.ParseError as exc:
        line, column = exc.position
        raise XmlParseError(f"malformed XML at line {line}, column {column}: {exc}", line, column) from None


def iter_records(source: BinaryIO | str, check_ids: bool = True) -> Iterator[DocumentRecord]:
    for elem in iter_record_elements(source):
        yield record_from_element(elem, check_ids)


def _outgoing_refs(analysis: LinguisticAnalysis, layer: str) -> Iterator[tuple[str, str]]:
    """(target layer, id) for every reference made by units of ``layer``."""
    for unit in analysis.layer(layer):
        if isinstance(unit, (Word, SemanticUnit)):
            for tid in unit.token_ids:
                yield "token", tid
        elif isinstance(unit, Sentence):
            yield "token", unit.start_token
            yield "token", unit.end_token
        elif isinstance(unit, (Lemma, Stem, MorphosyntacticFeatures)):
            yield "word", unit.word_id
        elif isinstance(unit, SemanticFeatures):
            yield "semantic_unit", unit.semantic_unit_id
        elif isinstance(unit, SemanticRelation):
            yield "semantic_unit", unit.source
            yield "semantic_unit", unit.target
        elif isinstance(unit, (Phrase, SyntacticRelation)):
            refs = unit.components if isinstance(unit, Phrase) else (unit.head, unit.modifier)
            for ref in refs:
                try:
                    yield layer_of(ref), ref
                except MalformedIdError:
                    yield "word", ref


def import_layer(record: DocumentRecord, data: bytes, check_ids: bool = True) -> DocumentRecord:
    """Merge an exported layer into ``record``, replacing that layer.

    Raises IntegrityError when the fragment belongs to another record or
    refers to units the record does not have.
    """
    root = _parse_bytes(data)
    layer = _layer_name(root.tag)
    fragment_id = root.attrib.get("record_id")
    if fragment_id != record.id:
        raise IntegrityError(f"layer belongs to record {fragment_id!r}, not {record.id!r}")
    units = _parse_layer(root, layer, check_ids)
    analysis = record.analysis.with_layer(layer, units)
    missing = []
    for target, ref in _outgoing_refs(analysis, layer):
        if ref not in analysis.index(target) and ref not in missing:
            missing.append(ref)
    if missing:
        raise IntegrityError(f"{layer} layer has dangling references: {', '.join(missing)}", missing)
    return record.with_analysis(analysis)


__all__ = [
    "COMPACT_PROFILE",
    "CollectionWriter",
    "DEFAULT_PROFILE",
    "SerializationProfile",
    "analysis_bytes",
    "export_layer",
    "import_layer",
    "iter_record_elements",
    "iter_records",
    "layer_bytes",
    "parse",
    "parse_record",
    "record_from_element",
    "serialize",
    "serialize_collection",
    "serialize_record",
]
