"""Timed comparison of the mapping engine against the hand-written converter."""
from __future__ import annotations

import json
import logging
import os
import platform
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import legal
from .engine import Plan, execute_mapping
from .legal import TaxonomyFixture, generate_corpus, reference_mapping, serialize_document
from .rdf import Graph, graph_equal, serialize_ntriples
from .stats import WelchResult, summary_stats, welch_from_samples
from .xml import XmlNode, parse_xml

log = logging.getLogger(__name__)

ENGINE = "engine"
ADHOC = "adhoc"
SUBJECT_LABELS = {ADHOC: "Ad hoc custom parser", ENGINE: "RML mapping engine"}


class EquivalenceError(RuntimeError):
    """The benchmarked subjects do not produce the same graph."""


@dataclass
class BenchConfig:
    corpus_sizes: list[int] = field(default_factory=lambda: [1000, 10000, 50000])
    runs: int = 10
    seed: int = 1
    subjects: tuple[str, ...] = (ENGINE, ADHOC)

    def __post_init__(self) -> None:
        if self.runs < 2:
            raise ValueError("runs must be >= 2")
        if not self.corpus_sizes or any(s < 1 for s in self.corpus_sizes):
            raise ValueError("corpus sizes must be >= 1")
        unknown = set(self.subjects) - {ENGINE, ADHOC}
        if unknown or not self.subjects:
            raise ValueError(f"unknown subjects {sorted(unknown)}")


@dataclass
class SubjectTimes:
    subject: str
    size: int
    times: list[float]
    mean: float
    std: float


@dataclass
class BenchReport:
    config: BenchConfig
    results: list[SubjectTimes]
    comparisons: dict[int, WelchResult]
    triples: dict[int, int]
    environment: str
    workers: int = 1

    def get(self, subject: str, size: int) -> SubjectTimes:
        for r in self.results:
            if r.subject == subject and r.size == size:
                return r
        raise KeyError((subject, size))

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "environment": self.environment,
            "workers": self.workers,
            "results": [asdict(r) for r in self.results],
            "triples": {str(k): v for k, v in self.triples.items()},
            "welch": {str(k): asdict(v) for k, v in self.comparisons.items()},
        }

    def runs_jsonl(self) -> str:
        lines = [json.dumps({"subject": r.subject, "size": r.size, "run": i + 1, "seconds": t})
                 for r in self.results for i, t in enumerate(r.times)]
        return "".join(line + "\n" for line in lines)

    def to_table(self) -> str:
        sizes = self.config.corpus_sizes
        head = f"{'Performance comparison':<24}" + "".join(
            f"| {_size_label(s):^19} " for s in sizes)
        sub = f"{'':<24}" + "".join(f"| {'AVG':>8} {'STD':>9} " for _ in sizes)
        rows = [head, sub, "-" * len(sub)]
        for subject in (ADHOC, ENGINE):
            if subject not in self.config.subjects:
                continue
            cells = []
            for s in sizes:
                r = self.get(subject, s)
                cells.append(f"| {r.mean:>8.3f} {r.std:>9.4f} ")
            rows.append(f"{SUBJECT_LABELS[subject]:<24}" + "".join(cells))
        if self.comparisons:
            cells = []
            for s in sizes:
                w = self.comparisons[s]
                cells.append(f"| t={w.t:>6.2f} p={w.p:<8.4f}")
            rows.append(f"{'Welch two-sided':<24}" + "".join(cells))
        rows.append(f"runs={self.config.runs} seed={self.config.seed} workers={self.workers}")
        rows.append(self.environment)
        return "\n".join(rows) + "\n"


def _size_label(size: int) -> str:
    return f"{size // 1000}k" if size % 1000 == 0 else str(size)


def environment_note() -> str:
    return (f"{platform.platform()}; python {platform.python_version()}; "
            f"{os.cpu_count()} cpu(s); {platform.processor() or platform.machine()}")


def engine_graph(plan: Plan, payloads: list[bytes]) -> Graph:
    graph, _ = execute_mapping(plan, (parse_xml(p) for p in payloads))
    return graph


def adhoc_graph(payloads: list[bytes],
                convert: Callable[[XmlNode], Graph] | None = None) -> Graph:
    convert = convert or legal.adhoc_parse
    graph = Graph()
    for p in payloads:
        graph.update(convert(parse_xml(p)))
    return graph


def run_benchmark(cfg: BenchConfig, taxonomy: TaxonomyFixture | None = None,
                  adhoc: Callable[[XmlNode], Graph] | None = None) -> BenchReport:
    """Time each subject ``cfg.runs`` times per corpus size.

    A run covers parsing the XML bytes, building the graph and writing
    canonical N-Triples. Before timing, both subjects transform the corpus
    once untimed; their graphs must be equal, and that pass also serves as
    the warm-up.
    """
    plan = Plan(reference_mapping())
    adhoc = adhoc or legal.adhoc_parse
    transforms = {
        ENGINE: lambda payloads: serialize_ntriples(engine_graph(plan, payloads)),
        ADHOC: lambda payloads: serialize_ntriples(adhoc_graph(payloads, adhoc)),
    }
    results: list[SubjectTimes] = []
    comparisons: dict[int, WelchResult] = {}
    triples: dict[int, int] = {}

    for size in cfg.corpus_sizes:
        payloads = [serialize_document(d).encode("utf-8")
                    for d in generate_corpus(cfg.seed, size, taxonomy)]
        graphs = {}
        if ENGINE in cfg.subjects:
            graphs[ENGINE] = engine_graph(plan, payloads)
        if ADHOC in cfg.subjects:
            graphs[ADHOC] = adhoc_graph(payloads, adhoc)
        if len(graphs) == 2 and not graph_equal(graphs[ENGINE], graphs[ADHOC]):
            raise EquivalenceError(f"engine and ad hoc graphs differ at size {size}")
        triples[size] = len(next(iter(graphs.values())))
        del graphs

        by_subject = {}
        for subject in cfg.subjects:
            times = []
            for run in range(cfg.runs):
                start = time.perf_counter()
                transforms[subject](payloads)
                times.append(time.perf_counter() - start)
                log.info("%s size=%d run=%d %.3fs", subject, size, run + 1, times[-1])
            mean, std = summary_stats(times)
            results.append(SubjectTimes(subject, size, times, mean, std))
            by_subject[subject] = times
        if len(by_subject) == 2:
            comparisons[size] = welch_from_samples(by_subject[ENGINE], by_subject[ADHOC])

    return BenchReport(cfg, results, comparisons, triples, environment_note())


def write_report(report: BenchReport, path: str | os.PathLike) -> list[str]:
    """Write JSON, a text table and raw per-run JSON lines next to ``path``."""
    path = os.fspath(path)
    stem = path[:-5] if path.endswith(".json") else path
    outputs = [path, stem + ".txt", stem + ".runs.jsonl"]
    with open(outputs[0], "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(outputs[1], "w", encoding="utf-8") as fh:
        fh.write(report.to_table())
    with open(outputs[2], "w", encoding="utf-8") as fh:
        fh.write(report.runs_jsonl())
    return outputs
