"""Command-line entry point: ``alvis annotate|validate|reconstruct|stats``.

Exit codes: 0 success, 1 I/O or parse error, 2 configuration error,
3 validation failure, 4 reconstruction mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import islice
from pathlib import Path
from typing import Iterator

from alvis import xmlio
from alvis.errors import AlvisError, ConfigurationError, XmlParseError
from alvis.model import DocumentRecord
from alvis.pipeline import STAGES, PipelineConfig, Resources, annotate
from alvis.validate import size_stats, validate

log = logging.getLogger("alvis")

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_INVALID = 3
EXIT_MISMATCH = 4


class InputError(Exception):
    """An input (file or record) could not be read."""


def _expand(paths: list[str]) -> list[Path]:
    files = []
    for name in paths:
        path = Path(name)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith(".")))
        else:
            files.append(path)
    return files


def _looks_like_xml(path: Path, head: bytes) -> bool:
    if path.suffix.lower() == ".xml":
        return True
    head = head.lstrip(b"\xef\xbb\xbf \t\r\n")
    return head.startswith((b"<?xml", b"<documentCollection"))


def iter_inputs(paths: list[str], allow_text: bool = True,
                check_ids: bool = True) -> Iterator[DocumentRecord | InputError]:
    """Yield records from XML collections or plain-text files.

    Problems are yielded as InputError values so that callers decide
    whether one bad record stops the run.
    """
    for path in _expand(paths):
        try:
            fh = open(path, "rb")
        except OSError as exc:
            yield InputError(f"{path}: {exc.strerror}")
            continue
        with fh:
            head = fh.read(256)
            fh.seek(0)
            if not _looks_like_xml(path, head):
                if not allow_text:
                    yield InputError(f"{path}: not an XML document collection")
                    continue
                try:
                    yield DocumentRecord.from_text(fh.read().decode("utf-8"))
                except UnicodeDecodeError as exc:
                    yield InputError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})")
                continue
            try:
                for n, elem in enumerate(xmlio.iter_record_elements(fh), start=1):
                    try:
                        yield xmlio.record_from_element(elem, check_ids)
                    except AlvisError as exc:
                        yield InputError(f"{path}: record {n}: {exc}")
            except XmlParseError as exc:
                yield InputError(f"{path}: {exc}")
            except AlvisError as exc:
                yield InputError(f"{path}: {exc}")


# -- annotate ---------------------------------------------------------------

_worker: dict = {}


def _init_worker(resources: Resources, stages: tuple[str, ...], profile: xmlio.SerializationProfile) -> None:
    _worker.update(resources=resources, stages=stages, profile=profile)


def _annotate_one(record: DocumentRecord) -> tuple[bool, str]:
    try:
        result = annotate(record, _worker["resources"], _worker["stages"])
        return True, xmlio.serialize_record(result, _worker["profile"])
    except AlvisError as exc:
        return False, f"record {record.id}: {exc}"


def _batches(items, size):
    it = iter(items)
    while True:
        batch = list(islice(it, size))
        if not batch:
            return
        yield batch


def cmd_annotate(args) -> int:
    config = PipelineConfig(
        stages=tuple(s.strip() for s in args.stages.split(",") if s.strip()) if args.stages else None,
        ne_dict=args.ne_dict,
        term_dict=args.term_dict,
        pos_lexicon=args.pos_lexicon,
        ontology_map=args.ontology_map,
        contractions=args.contractions,
        syntactic_relations_file=args.syntactic_relations,
        semantic_relations_file=args.semantic_relations,
        case_insensitive_match=args.case_insensitive,
    ).with_resource_dir()
    try:
        stages = config.resolved_stages()
        resources = Resources.load(config, stages)
    except ConfigurationError as exc:
        resource = f" [{exc.resource}]" if exc.resource else ""
        print(f"configuration error{resource}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AlvisError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("stages: %s", ", ".join(stages))

    profile = xmlio.COMPACT_PROFILE if args.compact else xmlio.DEFAULT_PROFILE
    _init_worker(resources, stages, profile)
    status = EXIT_OK
    out = open(args.output, "wb") if args.output else sys.stdout.buffer
    pool = ProcessPoolExecutor(args.jobs, initializer=_init_worker, initargs=(resources, stages, profile)) \
        if args.jobs > 1 else None
    try:
        writer = xmlio.CollectionWriter(out, profile)
        for batch in _batches(iter_inputs(args.inputs), max(1, args.jobs) * 8):
            records = [item for item in batch if isinstance(item, DocumentRecord)]
            for item in batch:
                if isinstance(item, InputError):
                    print(f"error: {item}", file=sys.stderr)
                    status = EXIT_IO
                    if args.strict:
                        return status
            results = pool.map(_annotate_one, records) if pool else map(_annotate_one, records)
            for ok, payload in results:
                if ok:
                    writer.write_raw(payload)
                else:
                    print(f"error: {payload}", file=sys.stderr)
                    status = EXIT_IO
                    if args.strict:
                        return status
        writer.close()
    finally:
        if pool:
            pool.shutdown()
        if args.output:
            out.close()
        else:
            out.flush()
    return status


# -- validate / reconstruct / stats -----------------------------------------


def cmd_validate(args) -> int:
    status = EXIT_OK
    reports = []
    for item in iter_inputs(args.inputs, allow_text=False, check_ids=False):
        if isinstance(item, InputError):
            print(f"error: {item}", file=sys.stderr)
            status = EXIT_IO
            continue
        report = validate(item)
        reports.append(report)
        if not report.ok and status == EXIT_OK:
            status = EXIT_INVALID
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in reports], ensure_ascii=False, indent=2))
    else:
        for report in reports:
            state = "ok" if report.ok else f"{len(report.violations)} violation(s)"
            print(f"# {report.record_id}: {state}")
            for line in report.to_lines():
                print(line)
    return status


def cmd_reconstruct(args) -> int:
    status = EXIT_OK
    out = sys.stdout
    for item in iter_inputs(args.inputs, allow_text=False, check_ids=False):
        if isinstance(item, InputError):
            print(f"error: {item}", file=sys.stderr)
            status = EXIT_IO
            continue
        text = "".join(t.content for t in item.analysis.tokens)
        out.write(text)
        canonical = item.canonical_text
        if text != canonical:
            offset = next(
                (i for i, (a, b) in enumerate(zip(text, canonical)) if a != b), min(len(text), len(canonical))
            )
            print(f"record {item.id}: reconstructed text differs from canonical text at offset {offset}",
                  file=sys.stderr)
            if status == EXIT_OK:
                status = EXIT_MISMATCH
    out.flush()
    return status


def cmd_stats(args) -> int:
    status = EXIT_OK
    profile = xmlio.COMPACT_PROFILE if args.compact else xmlio.DEFAULT_PROFILE
    rows = []
    for item in iter_inputs(args.inputs, allow_text=False, check_ids=False):
        if isinstance(item, InputError):
            print(f"error: {item}", file=sys.stderr)
            status = EXIT_IO
            continue
        rows.append(size_stats(item, profile))
    canonical = sum(r.canonical_bytes for r in rows)
    analysis = sum(r.analysis_bytes for r in rows)
    factor = analysis / canonical if canonical else 0.0
    if args.format == "json":
        print(json.dumps({
            "records": [r.to_dict() for r in rows],
            "total": {"records": len(rows), "canonical_bytes": canonical, "analysis_bytes": analysis,
                      "expansion_factor": round(factor, 2)},
        }, indent=2))
        return status
    print("record\tcanonical_bytes\tanalysis_bytes\texpansion_factor")
    for r in rows:
        print(f"{r.record_id}\t{r.canonical_bytes}\t{r.analysis_bytes}\t{r.expansion_factor:.2f}")
        if args.layers:
            for layer, size in r.per_layer_bytes.items():
                print(f"  {layer}\t{size}")
    print(f"TOTAL({len(rows)})\t{canonical}\t{analysis}\t{factor:.2f}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alvis", description="Stand-off linguistic annotation toolkit")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="run the annotation pipeline")
    p.add_argument("inputs", nargs="+", help="XML collections, plain-text files or directories")
    p.add_argument("--stages", help=f"comma-separated subset of: {','.join(STAGES)}")
    p.add_argument("--ne-dict", type=Path, help="named entity dictionary")
    p.add_argument("--term-dict", type=Path, help="term dictionary")
    p.add_argument("--pos-lexicon", type=Path, help="form/category/lemma lexicon")
    p.add_argument("--ontology-map", type=Path, help="surface to ontology node map")
    p.add_argument("--contractions", type=Path, help="contraction table (default: shipped English table)")
    p.add_argument("--syntactic-relations", type=Path, help="type/head/modifier triples to ingest")
    p.add_argument("--semantic-relations", type=Path, help="kind/type/source/target relations to ingest")
    p.add_argument("--case-insensitive", action="store_true", help="case-insensitive dictionary matching")
    p.add_argument("--strict", action="store_true", help="stop at the first bad input record")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--compact", action="store_true", help="write XML without indentation")
    p.add_argument("--output", "-o", help="output file (default: standard output)")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("validate", help="check referential integrity")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reconstruct", help="rebuild text from the token layer")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("stats", help="annotation size statistics")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--layers", action="store_true", help="print per-layer sizes")
    p.add_argument("--compact", action="store_true", help="measure the unindented serialization")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
