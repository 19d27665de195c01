"""Shared fixtures data, independent oracles and record generators."""

from __future__ import annotations

import random
import xml.etree.ElementTree as ET
from dataclasses import replace

from alvis.enrich import PosLexicon, LexiconEntry
from alvis.model import (
    Acquisition,
    DocumentRecord,
    Lemma,
    MorphosyntacticFeatures,
    Phrase,
    RelationKind,
    Section,
    SemanticFeatures,
    SemanticRelation,
    SyntacticRelation,
    TokenType,
    UnitKind,
)
from alvis.pipeline import Resources, annotate
from alvis.segment import Dictionary, DictionaryEntry
from alvis.xmlio import element_to_string

TITLE = (
    "Combined action of two transcription factors regulates genes encoding "
    "spore coat proteins of Bacillus subtilis."
)

ABSTRACT_SENTENCES = [
    "During sporulation of Bacillus subtilis, spore coat proteins encoded by cot genes are "
    "expressed in the mother cell and deposited on the forespore.",
    "Transcription of the cotB, cotC, and cotX genes by final sigma(K) RNA polymerase is "
    "activated by a small, DNA-binding protein called GerE.",
    "The promoter region of each of these genes has two GerE binding sites.",
]
ABSTRACT = " ".join(ABSTRACT_SENTENCES)

# Token rendering of the second abstract sentence, one slash per boundary.
SLASHED_SENTENCE = (
    "/Transcription/ /of/ /the/ /cotB/,/ "
    "/cotC/,/ /and/ /cotX/ /genes/ /by/ "
    "/final/ /sigma/(/K/)/ /RNA/ "
    "/polymerase/ /is/ /activated/ "
    "/by/ /a/ /small/,/ /DNA/-/binding/ "
    "/protein/ /called/ /GerE/./"
)

# Word rendering of the same sentence, words in brackets.
BRACKETED_WORDS = (
    "[Transcription] [of] [the] [cotB], [cotC], "
    "[and] [cotX] [genes] [by] [final] [sigma(K)] "
    "[RNA] [polymerase] [is] [activated] [by] "
    "[a] [small], [DNA-binding] [protein] "
    "[called] [GerE]."
)

ABSTRACT_SPLIT = [
    "During sporulation of Bacillus subtilis, spore "
    "coat proteins encoded by cot genes are "
    "expressed in the mother cell and deposited "
    "on the forespore.",
    "Transcription of the cotB, cotC, and cotX "
    "genes by final sigma(K) RNA polymerase is "
    "activated by a small, DNA-binding protein "
    "called GerE.",
    "The promoter region of each of these genes "
    "has two GerE binding sites.",
]


def slash_render(tokens) -> str:
    return "/" + "/".join(t.content for t in tokens) + "/"


def bracket_render(tokens, words) -> str:
    """Token contents with ``[`` ``]`` around every word span."""
    position = {t.id: i for i, t in enumerate(tokens)}
    opens, closes = set(), set()
    for w in words:
        idx = [position[t] for t in w.token_ids]
        opens.add(min(idx))
        closes.add(max(idx))
    out = []
    for i, t in enumerate(tokens):
        out.append(("[" if i in opens else "") + t.content + ("]" if i in closes else ""))
    return "".join(out)


# -- matcher oracle ---------------------------------------------------------

PRIORITY = {UnitKind.NAMED_ENTITY: 0, UnitKind.TERM: 1, UnitKind.UNDEFINED: 2}


def squash_blanks(s: str) -> str:
    out = []
    for c in s:
        if c.isspace():
            if not out or out[-1] != " ":
                out.append(" ")
        else:
            out.append(c)
    return "".join(out)


def oracle_match(tokens, dictionaries):
    """Exhaustive candidate enumeration by string comparison, then the
    leftmost-longest / kind-priority selection.  Returns (kind, first,
    last) triples of token positions."""
    entries = []
    order = 0
    for d in dictionaries:
        for e in d.entries:
            entries.append((squash_blanks(e.surface.strip()), e.kind, d.case_insensitive, order))
            order += 1
    candidates = []
    n = len(tokens)
    for i in range(n):
        for j in range(i, n):
            if tokens[i].type is TokenType.SEP or tokens[j].type is TokenType.SEP:
                continue
            text = "".join(" " if t.type is TokenType.SEP else t.content for t in tokens[i:j + 1])
            for surface, kind, fold, o in entries:
                if (text.casefold() == surface.casefold()) if fold else (text == surface):
                    candidates.append((i, -(j - i), PRIORITY[kind], o, j, kind))
    candidates.sort()
    chosen = []
    last_end = -1
    for i, _, _, _, j, kind in candidates:
        if i > last_end:
            chosen.append((kind, i, j))
            last_end = j
    return chosen


# -- random instances -------------------------------------------------------

SMALL_VOCAB = ["a", "b", "ab", "A", "B", "x1", "1", "é", "-", ",", "(", ")", "."]


def random_small_instance(rng: random.Random):
    """A text of at most 20 tokens and at most 5 dictionary entries."""
    from alvis.tokenize import tokenize

    while True:
        pieces = []
        for _ in range(rng.randint(1, 9)):
            pieces.append(rng.choice(SMALL_VOCAB))
            pieces.append(rng.choice([" ", " ", "  ", "\n", ""]))
        text = "".join(pieces)
        tokens = tokenize(text)
        if len(tokens) <= 20:
            break
    dictionaries = []
    budget = rng.randint(0, 5)
    for fold in (False, True):
        entries = {}
        for _ in range(rng.randint(0, budget)):
            if rng.random() < 0.7 and tokens:
                i = rng.randrange(len(tokens))
                j = min(len(tokens), i + rng.randint(1, 4))
                surface = "".join(t.content for t in tokens[i:j]).strip()
                if rng.random() < 0.3:
                    surface = surface.swapcase()
            else:
                surface = rng.choice(SMALL_VOCAB) + rng.choice(["", " ", "-"]) + rng.choice(SMALL_VOCAB)
                surface = surface.strip()
            if not surface:
                continue
            kind = rng.choice(list(UnitKind))
            entries[(surface, kind)] = DictionaryEntry(surface, kind)
        budget -= len(entries)
        dictionaries.append(Dictionary(tuple(entries.values()), fold))
    return tokens, dictionaries


TEXT_ALPHABET = (
    list("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")
    + list("éèçñÄßøλжΩ中字")
    + [" ", " ", " ", "\t", "\n", "\r", " "]
    + list(".,;:!?-()[]'\"<>&/%$#@")
)
WORD_LIST = ["the", "cell", "gene", "GerE", "B.", "doesn't", "it's", "DNA-binding", "sigma(K)", "3.5",
             "mother", "spore", "coat", "protein", "A79", "x&y", "<tag>", "Île", "naïve"]


def random_text(rng: random.Random, max_len: int = 200) -> str:
    parts = []
    while sum(len(p) for p in parts) < rng.randint(0, max_len):
        if rng.random() < 0.5:
            parts.append(rng.choice(WORD_LIST))
        else:
            parts.append("".join(rng.choice(TEXT_ALPHABET) for _ in range(rng.randint(1, 6))))
        parts.append(rng.choice([" ", " ", ". ", ", ", "\n", "  "]))
    return "".join(parts)


def random_acquisition(rng: random.Random) -> Acquisition:
    sections = []
    for _ in range(rng.randint(0, 3)):
        title = random_text(rng, 30).replace("\n", " ") if rng.random() < 0.5 else None
        sections.append(Section(random_text(rng), title))
    urls = tuple(f"http://example.org/doc?id={rng.randint(0, 999)}&x=1" for _ in range(rng.randint(0, 2)))
    extra = ()
    if rng.random() < 0.5:
        elem = ET.Element("modifiedDate", {"tz": "UTC"})
        elem.text = f"2004-11-{rng.randint(10, 28)} 15:59:14"
        extra = (element_to_string(elem),)
    return Acquisition(tuple(sections), urls, extra)


def random_resources(rng: random.Random, text: str) -> Resources:
    from alvis.tokenize import tokenize

    tokens = [t for t in tokenize(text) if t.type is not TokenType.SEP]
    entries = {}
    for _ in range(rng.randint(0, 6)):
        if not tokens:
            break
        i = rng.randrange(len(tokens))
        surface = tokens[i].content
        if i + 1 < len(tokens) and rng.random() < 0.4:
            surface += " " + tokens[i + 1].content
        kind = rng.choice(list(UnitKind))
        nodes = tuple(rng.sample(["species", "gene", "protein", "cell"], rng.randint(0, 2)))
        entries[(surface, kind)] = DictionaryEntry(surface, kind, nodes)
    dictionary = Dictionary(tuple(entries.values()), rng.random() < 0.3)
    lexicon = PosLexicon({
        t.content: LexiconEntry(rng.choice(["DT", "JJ", "NN", "NNS", "VBZ", "IN", "CD"]),
                                t.content.lower() if rng.random() < 0.5 else None)
        for t in tokens if rng.random() < 0.6
    })
    from alvis.enrich import OntologyNodeMap

    return Resources(dictionaries=[dictionary], lexicon=lexicon,
                     node_map=OntologyNodeMap.from_dictionaries([dictionary]))


def random_valid_record(rng: random.Random, n: int = 0) -> DocumentRecord:
    """A record produced by the pipeline, decorated with extra valid units."""
    acq = random_acquisition(rng)
    record = DocumentRecord(f"REC{n:05d}", acq)
    resources = random_resources(rng, acq.canonical_text)
    stages = [s for s in ("tokenize", "semantic_units", "words", "sentences", "morphosyntax",
                          "lemmas", "stems", "phrases") if rng.random() < 0.85]
    record = annotate(record, resources, stages)
    a = record.analysis
    extra = {}
    if a.words and rng.random() < 0.7:
        rels = []
        for k in range(rng.randint(1, 3)):
            h, m = rng.sample([w.id for w in a.words] + [p.id for p in a.phrases], 2) \
                if len(a.words) + len(a.phrases) > 1 else (None, None)
            if h:
                rels.append(SyntacticRelation(f"syntrel{k + 1}", rng.choice(["SUBJ", "OBJ", "NCOMPby"]), h, m))
        extra["syntactic_relation"] = rels
        if rng.random() < 0.3 and a.morphosyntax:
            m0 = a.morphosyntax[0]
            extra["morphosyntactic_features"] = [replace(m0, features=(("number", "sg"), ("case", "nom")))] + \
                list(a.morphosyntax[1:])
    if len(a.semantic_units) > 1 and rng.random() < 0.7:
        s, t = rng.sample([u.id for u in a.semantic_units], 2)
        extra["semantic_relation"] = [SemanticRelation("semrel1", rng.choice(list(RelationKind)), "coref", s, t)]
    if a.words and len(a.words) > 1 and rng.random() < 0.3:
        phrases = list(a.phrases)
        inner = Phrase(f"phrase{len(phrases) + 1}", a.words[1].id, (a.words[0].id,), None)
        outer = Phrase(f"phrase{len(phrases) + 2}", inner.id, (), "nested")
        extra["phrase"] = phrases + [inner, outer]
    for layer, units in extra.items():
        a = a.with_layer(layer, units)
    return record.with_analysis(a)


__all__ = [
    "ABSTRACT", "ABSTRACT_SENTENCES", "SLASHED_SENTENCE", "BRACKETED_WORDS", "ABSTRACT_SPLIT", "TITLE",
    "Lemma", "MorphosyntacticFeatures", "SemanticFeatures", "bracket_render", "oracle_match",
    "random_small_instance", "random_text", "random_valid_record", "slash_render", "squash_blanks",
]
