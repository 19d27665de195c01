"""Acceptance suite: seven end-to-end criteria, one PASS/FAIL line each.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import json
import random
import sys
import time
from contextlib import redirect_stdout
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from alvis.cli import main as cli_main  # noqa: E402
from alvis.model import Acquisition, DocumentRecord, UnitKind  # noqa: E402
from alvis.pipeline import STAGES, PipelineConfig, Resources, annotate  # noqa: E402
from alvis.resources import sample_path  # noqa: E402
from alvis.segment import Dictionary, DictionaryEntry, match_semantic_units, segment_words  # noqa: E402
from alvis.tokenize import reconstruct_text, tokenize  # noqa: E402
from alvis.validate import RULES, validate  # noqa: E402
from alvis.xmlio import parse, parse_record, serialize  # noqa: E402

from helpers import (  # noqa: E402
    ABSTRACT,
    ABSTRACT_SENTENCES,
    ABSTRACT_SPLIT,
    TITLE,
    oracle_match,
    random_small_instance,
    random_valid_record,
    slash_render,
)
from mutations import MUTATIONS  # noqa: E402

RECORD_ID = "A79ACA58DEB7E6114747710B9A85059F"
SEED = 20061


def load_sample_resources() -> Resources:
    config = PipelineConfig(
        ne_dict=sample_path("ne_dict.tsv"),
        term_dict=sample_path("term_dict.tsv"),
        pos_lexicon=sample_path("pos_lexicon.tsv"),
    )
    return Resources.load(config, STAGES)


# -- criteria ---------------------------------------------------------------


def criterion_1():
    """Title sentence golden values, within one second."""
    started = time.perf_counter()
    rec = annotate(DocumentRecord.from_text(TITLE, RECORD_ID), load_sample_resources())
    elapsed = time.perf_counter() - started
    a = rec.analysis
    tok = a.tokens[0]
    sent = a.sentences[0]
    ne = a.index("semantic_unit").get("named_entity0")
    morph = {m.word_id: m for m in a.morphosyntax}
    sf = [s for s in a.semantic_features if s.semantic_unit_id == "named_entity0"]
    checks = {
        "token1": (tok.id, tok.content, tok.start, tok.end, str(tok.type)) == ("token1", "Combined", 0, 7, "alpha"),
        "sentence1": (sent.id, sent.start_token, sent.end_token, sent.form) == (
            "sentence1", "token1", "token30",
            "Combined action of two transcription factors regulates genes encoding spore coat proteins "
            "of Bacillus subtilis .",
        ),
        "named_entity0": ne is not None and ne.token_ids == ("token27", "token28", "token29"),
        "lemma1": (a.lemmas[0].id, a.lemmas[0].canonical_form, a.lemmas[0].word_id) == ("lemma1", "combined", "word1"),
        "morph word1": morph["word1"].id == "morphosyntactic_features1" and morph["word1"].syntactic_category == "JJ",
        "morph word10": morph["word10"].syntactic_category == "NN",
        "species": len(sf) == 1 and sf[0].ontology_node_ids == ("species",),
        "runtime": elapsed < 1.0,
    }
    failed = [k for k, ok in checks.items() if not ok]
    return not failed, f"{len(checks) - len(failed)}/{len(checks)} checks, {elapsed * 1000:.0f} ms" + (
        f", failed: {', '.join(failed)}" if failed else "")


def criterion_2():
    """Slash segmentation and the three-sentence split of the abstract."""
    slashes = slash_render(tokenize(ABSTRACT_SENTENCES[1]))
    pieces = ("/cotB/,/", "/sigma/(/K/)/", "/DNA/-/binding/")
    missing = [p for p in pieces if p not in slashes]
    rec = annotate(DocumentRecord.from_text(ABSTRACT, "ABSTRACT"), load_sample_resources())
    a = rec.analysis
    pos = a.token_positions
    text = rec.canonical_text
    spans = [text[a.tokens[pos[s.start_token]].start:a.tokens[pos[s.end_token]].end + 1] for s in a.sentences]
    expected = [" ".join(s.split()) for s in ABSTRACT_SPLIT]
    ok = not missing and spans == expected
    return ok, f"{len(pieces) - len(missing)}/3 slash patterns, {len(spans)} sentences" + (
        "" if spans == expected else f" (got {spans!r})")


def criterion_3():
    """Serialization and tokenization round trips."""
    rng = random.Random(SEED)
    started = time.perf_counter()
    records = failures = 0
    for n in range(1000):
        rec = random_valid_record(rng, n)
        data = serialize(rec)
        back = parse_record(data)
        if back != rec or serialize(back) != data:
            failures += 1
        records += 1
    strings = 0
    for _ in range(1000):
        length = rng.choice([0, 1, 5, 50, 500, 2500])
        text = "".join(random_char(rng) for _ in range(rng.randint(0, length)))
        assert len(text.encode("utf-8")) <= 10240
        if reconstruct_text(tokenize(text)) != text:
            failures += 1
        strings += 1
    elapsed = time.perf_counter() - started
    ok = failures == 0 and elapsed < 60
    return ok, f"{records} records, {strings} strings, {failures} failures, {elapsed:.1f} s"


def random_char(rng: random.Random) -> str:
    # bias towards the planes real text lives in
    ranges = [(0x20, 0x7E), (0x00, 0x20), (0xA0, 0x2FFF), (0x3000, 0xD7FF), (0xE000, 0xFFFD), (0x10000, 0x10FFFF)]
    lo, hi = rng.choices(ranges, weights=[50, 5, 20, 10, 5, 10])[0]
    return chr(rng.randint(lo, hi))


def criterion_4():
    """Matcher against the brute-force oracle."""
    rng = random.Random(SEED)
    mismatches = nonempty = 0
    for _ in range(500):
        tokens, dictionaries = random_small_instance(rng)
        assert len(tokens) <= 20 and sum(len(d.entries) for d in dictionaries) <= 5
        index = {t.id: i for i, t in enumerate(tokens)}
        got = [(u.kind, index[u.token_ids[0]], index[u.token_ids[-1]])
               for u in match_semantic_units(tokens, dictionaries)]
        expected = oracle_match(tokens, dictionaries)
        nonempty += bool(expected)
        mismatches += got != expected
    return mismatches == 0, f"500 instances ({nonempty} with matches), {mismatches} mismatches"


def criterion_5():
    """Each rule caught by at least 20 targeted corruptions; clean records pass."""
    rng = random.Random(SEED)
    hits = {rule: 0 for rule in RULES}
    misses = {rule: 0 for rule in RULES}
    invalid_clean = 0
    samples = [annotate(DocumentRecord.from_text(ABSTRACT, "ABSTRACT"), load_sample_resources())]
    n = 0
    while (n < 300 or min(hits[r] + misses[r] for r in RULES) < 25) and n < 2000:
        rec = samples[n] if n < len(samples) else random_valid_record(rng, n)
        n += 1
        if not validate(rec).ok:
            invalid_clean += 1
            continue
        for rule in RULES:
            corrupted = MUTATIONS[rule](rec, rng)
            if corrupted is None:
                continue
            if rule in validate(corrupted).rules():
                hits[rule] += 1
            else:
                misses[rule] += 1
    ok = invalid_clean == 0 and all(misses[r] == 0 and hits[r] >= 20 for r in RULES)
    low = min(hits.values())
    return ok, (f"{len(RULES)} rules, >= {low} corruptions each, {sum(misses.values())} misses, "
                f"{n} clean records, {invalid_clean} invalid")


def _stats(path: Path) -> dict:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(["stats", "--format", "json", str(path)])
    assert code == 0
    return json.loads(buf.getvalue())


def criterion_6(tmp: Path):
    """Expansion factor above one, stable under self-concatenation."""
    resources = load_sample_resources()
    [sample] = parse(sample_path("abstract.xml").read_bytes())
    ingest = PipelineConfig(
        ne_dict=sample_path("ne_dict.tsv"),
        syntactic_relations_file=sample_path("syntactic_relations.tsv"),
        semantic_relations_file=sample_path("semantic_relations.tsv"),
    )
    loaded = Resources.load(ingest, ())
    resources.syntactic_relations = loaded.syntactic_relations
    resources.semantic_relations = loaded.semantic_relations
    full = annotate(sample, resources)
    doubled_acq = Acquisition(sample.acquisition.sections * 2, sample.acquisition.urls, sample.acquisition.data_extra)
    doubled = annotate(DocumentRecord(sample.id, doubled_acq), resources)
    (tmp / "single.xml").write_bytes(serialize(full))
    (tmp / "double.xml").write_bytes(serialize(doubled))
    one = _stats(tmp / "single.xml")["records"][0]
    two = _stats(tmp / "double.xml")["records"][0]
    factor1 = one["analysis_bytes"] / one["canonical_bytes"]
    factor2 = two["analysis_bytes"] / two["canonical_bytes"]
    drift = abs(factor2 / factor1 - 1)
    layers_ok = all(sum(r["per_layer_bytes"].values()) <= r["analysis_bytes"] for r in (one, two))
    ok = factor1 > 1 and drift <= 0.10 and layers_ok and bool(full.analysis.syntactic_relations)
    return ok, f"factor {factor1:.2f}, doubled {factor2:.2f} (drift {drift * 100:.1f}%), layer sums within total: {layers_ok}"


SIGMA_WITH_DICT = [
    "Transcription", "of", "the", "cotB", "cotC", "and", "cotX", "genes", "by", "final", "sigma(K)",
    "RNA", "polymerase", "is", "activated", "by", "a", "small", "DNA-binding", "protein", "called", "GerE",
]
SIGMA_WITHOUT_DICT = SIGMA_WITH_DICT[:10] + ["sigma", "K"] + SIGMA_WITH_DICT[11:]


def criterion_7():
    """Dictionary matching before segmentation changes the word layer."""
    text = ABSTRACT_SENTENCES[1]
    tokens = tokenize(text)
    dictionary = Dictionary((DictionaryEntry("sigma(K)", UnitKind.NAMED_ENTITY),))
    with_dict = [w.form for w in segment_words(tokens, match_semantic_units(tokens, [dictionary]))]
    without = [w.form for w in segment_words(tokens, match_semantic_units(tokens, []))]
    no_parens = not any(c in w for w in without for c in "()")
    ok = with_dict == SIGMA_WITH_DICT and without == SIGMA_WITHOUT_DICT and no_parens
    return ok, f"with dictionary {len(with_dict)} words incl. 'sigma(K)', without {len(without)} words incl. 'sigma', 'K'"


# -- reporting --------------------------------------------------------------

TITLES = {
    1: "golden title annotation",
    2: "abstract token and sentence segmentation",
    3: "round-trip properties",
    4: "matcher oracle",
    5: "validator mutation suite",
    6: "expansion factor properties",
    7: "matching before segmentation",
}


def line(number: int, ok: bool, detail: str) -> str:
    return f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {TITLES[number]}: {detail}"


def run(number: int, tmp: Path) -> tuple[bool, str]:
    fn = globals()[f"criterion_{number}"]
    ok, detail = fn(tmp) if number == 6 else fn()
    return ok, line(number, ok, detail)


@pytest.mark.parametrize("number", sorted(TITLES))
def test_acceptance(number, tmp_path, capsys):
    ok, text = run(number, tmp_path)
    with capsys.disabled():
        print("\n" + text)
    assert ok, text


if __name__ == "__main__":
    import tempfile

    results = []
    with tempfile.TemporaryDirectory() as tmp:
        for number in sorted(TITLES):
            ok, text = run(number, Path(tmp))
            print(text)
            results.append(ok)
    sys.exit(0 if all(results) else 1)
