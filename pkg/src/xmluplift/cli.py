"""Command-line front end: ``xmluplift {map,generate,bench,query,validate}``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .bench import BenchConfig, EquivalenceError, run_benchmark, write_report
from .engine import EngineConfig, InvalidMapping, MappingExecutionError, Plan, execute_mapping
from .legal import (bundled_taxonomy, documents_for_concept, generate_corpus,
                    serialize_document, taxonomy_to_ntriples)
from .mapping import MappingDocument, MappingError, parse_mapping, validate_mapping
from .rdf import Graph, InvalidIri, NTriplesSyntaxError, make_iri, parse_ntriples, serialize_ntriples
from .turtle import TurtleSyntaxError
from .xml import MalformedXml, parse_xml

log = logging.getLogger("xmluplift")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_EXECUTION = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; input errors are 1 here
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_mapping(path: str) -> MappingDocument:
    text = Path(path).read_text(encoding="utf-8")
    return parse_mapping(text)


def _input_files(inputs: list[str]) -> list[Path]:
    files: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(sorted(p.glob("*.xml")))
        elif p.is_file():
            files.append(p)
        else:
            raise FileNotFoundError(f"no such input: {item}")
    return files


def cmd_map(mapping: str, inputs: list[str], out: str, strict: bool = False,
            workers: int | None = None) -> int:
    try:
        plan = Plan(_load_mapping(mapping))
        files = _input_files(inputs)
    except InvalidMapping as exc:
        for d in exc.diagnostics:
            log.error("%s", d)
        return EXIT_INPUT
    except (OSError, MappingError, TurtleSyntaxError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    config = EngineConfig(strict=strict)
    try:
        documents = (parse_xml(f.read_bytes()) for f in files)
        graph, warnings = execute_mapping(plan, documents, config=config,
                                          workers=workers or os.cpu_count() or 1)
    except MalformedXml as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except MappingExecutionError as exc:
        doc = files[exc.document] if isinstance(exc.document, int) else exc.document
        log.error("%s: map %s: %s", doc, exc.map_id, exc.reason)
        return EXIT_EXECUTION
    for w in warnings:
        doc = files[w.document] if isinstance(w.document, int) else w.document
        log.warning("%s: map %s: %s", doc, w.map_id, w.reason)
    try:
        Path(out).write_text(serialize_ntriples(graph), encoding="utf-8")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    log.info("wrote %d triples from %d documents to %s", len(graph), len(files), out)
    return EXIT_OK


def cmd_generate(seed: int, count: int, out: str) -> int:
    if count < 0:
        log.error("count must be >= 0")
        return EXIT_INPUT
    target = Path(out)
    taxonomy = bundled_taxonomy()
    try:
        target.mkdir(parents=True, exist_ok=True)
        (target / "taxonomy.nt").write_text(taxonomy_to_ntriples(taxonomy), encoding="utf-8")
        for doc in generate_corpus(seed, count, taxonomy):
            (target / f"doc-{doc.id}.xml").write_text(serialize_document(doc), encoding="utf-8")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    return EXIT_OK


def cmd_bench(sizes: list[int], runs: int, seed: int, out: str) -> int:
    try:
        cfg = BenchConfig(corpus_sizes=sizes, runs=runs, seed=seed)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    try:
        report = run_benchmark(cfg)
    except EquivalenceError as exc:
        log.error("%s", exc)
        return EXIT_EXECUTION
    try:
        write_report(report, out)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    sys.stdout.write(report.to_table())
    return EXIT_OK


def cmd_query(graphs: list[str], concept: str, narrower: bool = False,
              transitive: bool = False) -> int:
    try:
        term = make_iri(concept)
    except InvalidIri as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    g = Graph()
    try:
        for path in graphs:
            g.update(parse_ntriples(Path(path).read_text(encoding="utf-8")))
    except (OSError, NTriplesSyntaxError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    docs = documents_for_concept(g, term, include_narrower=narrower or transitive,
                                 transitive=transitive)
    for iri in sorted(d.value for d in docs):
        sys.stdout.write(iri + "\n")
    return EXIT_OK


def cmd_validate(mapping: str) -> int:
    try:
        doc = _load_mapping(mapping)
    except (OSError, MappingError, TurtleSyntaxError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    diagnostics = validate_mapping(doc)
    for d in diagnostics:
        print(d)
    return EXIT_INPUT if diagnostics else EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xmluplift", description="Declarative XML to RDF uplift.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("map", help="run a mapping over XML documents")
    p.add_argument("--mapping", required=True)
    p.add_argument("--input", required=True, nargs="+", help="XML files or directories")
    p.add_argument("--out", required=True, help="N-Triples output file")
    p.add_argument("--strict", action="store_true", help="abort on the first term failure")
    p.add_argument("--workers", type=int, default=None, help="default: available cores")

    p = sub.add_parser("generate", help="write a synthetic legal corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("bench", help="time the engine against the ad hoc parser")
    p.add_argument("--sizes", type=_sizes, default=[1000, 10000, 50000])
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="JSON report path")

    p = sub.add_parser("query", help="documents related to a taxonomy concept")
    p.add_argument("--graph", required=True, nargs="+", help="N-Triples files")
    p.add_argument("--concept", required=True)
    p.add_argument("--narrower", action="store_true", help="include direct narrower concepts")
    p.add_argument("--transitive", action="store_true", help="include all narrower concepts")

    p = sub.add_parser("validate", help="check a mapping file")
    p.add_argument("--mapping", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.command == "map":
        return cmd_map(args.mapping, args.input, args.out, args.strict, args.workers)
    if args.command == "generate":
        return cmd_generate(args.seed, args.count, args.out)
    if args.command == "bench":
        return cmd_bench(args.sizes, args.runs, args.seed, args.out)
    if args.command == "query":
        return cmd_query(args.graph, args.concept, args.narrower, args.transitive)
    return cmd_validate(args.mapping)


if __name__ == "__main__":
    sys.exit(main())
