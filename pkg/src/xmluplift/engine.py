"""Execution of RML mappings over parsed XML documents."""
from __future__ import annotations

import itertools
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .functions import ArityMismatch, FunctionRegistry, UnknownFunction
from .mapping import (CONSTANT, FUNCTION, REFERENCE, TEMPLATE, MappingDocument, RefObjectMap,
                      TermMap, TriplesMap, validate_mapping)
from .rdf import (BNODE, IRI, LITERAL, RDF_TYPE, Graph, InvalidIri, RdfTerm, Triple,
                  make_iri)
from .xml import PathExpr, XmlNode, compile_path, eval_xpath, select_values

_RDF_TYPE = RdfTerm(IRI, RDF_TYPE)
_UNRESERVED = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")


class MappingExecutionError(RuntimeError):
    def __init__(self, map_id: str, document: object, reason: str):
        super().__init__(f"triples map {map_id}, document {document}: {reason}")
        self.map_id = map_id
        self.document = document
        self.reason = reason

    def __reduce__(self):
        return type(self), (self.map_id, self.document, self.reason)


class InvalidMapping(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class EngineConfig:
    strict: bool = False
    emit_warnings: bool = True


@dataclass(frozen=True)
class ExecutionWarning:
    map_id: str
    document: object
    reason: str

    def __str__(self) -> str:
        return f"warning: triples map {self.map_id}, document {self.document}: {self.reason}"


@dataclass
class BindingContext:
    document: XmlNode
    iterator_node: XmlNode


# -- templates ---------------------------------------------------------------

def iri_safe(value: str) -> str:
    """Percent-encode every UTF-8 byte outside the unreserved set."""
    out = []
    for byte in value.encode("utf-8"):
        if byte in _UNRESERVED:
            out.append(chr(byte))
        else:
            out.append(f"%{byte:02X}")
    return "".join(out)


_TEMPLATE_TOKEN = re.compile(r"\\(.)|\{([^{}]*)\}|([{}])", re.S)


def split_template(template: str) -> list[tuple[bool, str]]:
    """Split into ``(is_placeholder, text)`` parts, honouring ``\\{`` escapes."""
    parts: list[tuple[bool, str]] = []
    buf: list[str] = []
    pos = 0
    for m in _TEMPLATE_TOKEN.finditer(template):
        buf.append(template[pos:m.start()])
        pos = m.end()
        if m.group(1) is not None:
            buf.append(m.group(1))
        elif m.group(2) is not None:
            if buf:
                parts.append((False, "".join(buf)))
                buf = []
            parts.append((True, m.group(2)))
        else:
            raise ValueError(f"unbalanced brace at position {m.start() + 1} in {template!r}")
    buf.append(template[pos:])
    if any(buf):
        parts.append((False, "".join(buf)))
    return parts


def expand_template(template: str, values: Mapping[str, str | None],
                    encode: bool = True) -> str | None:
    """Fill each ``{ref}`` from ``values``; None when any placeholder has no value."""
    out = []
    for is_ref, text in split_template(template):
        if not is_ref:
            out.append(text)
            continue
        value = values.get(text)
        if value is None:
            return None
        out.append(iri_safe(value) if encode else value)
    return "".join(out)


# -- term generation ---------------------------------------------------------

class _CompiledTermMap:
    __slots__ = ("tm", "kind", "term_type", "datatype", "language", "constant", "path",
                 "parts", "function_iri", "params")

    def __init__(self, tm: TermMap):
        self.tm = tm
        self.kind = tm.kind
        self.term_type = tm.term_type
        self.datatype = tm.datatype
        self.language = tm.language
        self.constant = tm.constant
        self.path = compile_path(tm.reference) if tm.kind == REFERENCE else None
        self.parts = None
        if tm.kind == TEMPLATE:
            self.parts = [(True, compile_path(text)) if is_ref else (False, text)
                          for is_ref, text in split_template(tm.template)]
        self.function_iri = tm.function_call.function_iri if tm.kind == FUNCTION else None
        self.params = ([_CompiledTermMap(p) for p in tm.function_call.parameters]
                       if tm.kind == FUNCTION else None)

    def lexical_values(self, node: XmlNode, registry: FunctionRegistry) -> list[str]:
        kind = self.kind
        if kind == REFERENCE:
            return select_values(node, self.path)
        if kind == TEMPLATE:
            encode = self.term_type == IRI
            slots: list[list[str]] = []
            for is_ref, part in self.parts:
                if is_ref:
                    vals = select_values(node, part)
                    if not vals:
                        return []
                    slots.append([iri_safe(v) for v in vals] if encode else vals)
                else:
                    slots.append([part])
            if all(len(s) == 1 for s in slots):
                return ["".join(s[0] for s in slots)]
            return ["".join(combo) for combo in itertools.product(*slots)]
        if kind == FUNCTION:
            arg_lists = [p.lexical_values(node, registry) for p in self.params]
            return [registry.apply(self.function_iri, list(args))
                    for args in itertools.product(*arg_lists)]
        return [self.constant.value]

    def terms(self, node: XmlNode, registry: FunctionRegistry, bnodes: dict[str, RdfTerm],
              on_error: Callable[[Exception], None]) -> list[RdfTerm]:
        if self.kind == CONSTANT:
            return [self.constant]
        try:
            values = self.lexical_values(node, registry)
        except (UnknownFunction, ArityMismatch) as exc:
            on_error(exc)
            return []
        tt = self.term_type
        if tt == LITERAL:
            dt, lang = self.datatype, self.language
            return [RdfTerm(LITERAL, v, dt, lang) for v in values]
        if tt == IRI:
            out = []
            for v in values:
                try:
                    out.append(make_iri(v))
                except InvalidIri as exc:
                    on_error(exc)
            return out
        out = []
        for v in values:
            term = bnodes.get(v)
            if term is None:
                term = bnodes[v] = RdfTerm(BNODE, f"b{len(bnodes)}")
            out.append(term)
        return out


def generate_terms(tm: TermMap, ctx: BindingContext,
                   registry: FunctionRegistry | None = None) -> list[RdfTerm]:
    """Terms produced by one term map in one iteration context.

    Raises InvalidIri for unusable IRI values and UnknownFunction or
    ArityMismatch for bad function calls.
    """
    def fail(exc: Exception) -> None:
        raise exc

    return _CompiledTermMap(tm).terms(ctx.iterator_node, registry or FunctionRegistry(), {}, fail)


# -- execution ---------------------------------------------------------------

class _CompiledMap:
    def __init__(self, tm: TriplesMap):
        self.id = tm.id
        it = compile_path(tm.logical_source.iterator)
        self.iterator = it if it.absolute else PathExpr(True, it.steps)
        self.subject = _CompiledTermMap(tm.subject_map)
        self.classes = [make_iri(c) for c in tm.subject_classes]
        self.poms = []
        for pom in tm.predicate_object_maps:
            preds = [_CompiledTermMap(p) for p in pom.predicate_maps]
            objs = []
            for om in pom.object_maps:
                if isinstance(om, RefObjectMap):
                    objs.append(_CompiledRef(om))
                else:
                    objs.append(_CompiledTermMap(om))
            self.poms.append((preds, objs))


class _CompiledRef:
    def __init__(self, rom: RefObjectMap):
        self.parent_id = rom.parent_triples_map
        self.child_paths = [compile_path(j.child) for j in rom.join_conditions]
        self.parent_paths = [compile_path(j.parent) for j in rom.join_conditions]


class Plan:
    """A validated mapping compiled for repeated execution."""

    def __init__(self, mapping: MappingDocument):
        problems = validate_mapping(mapping)
        if problems:
            raise InvalidMapping(problems)
        self.mapping = mapping
        self.maps = [_CompiledMap(tm) for tm in mapping.triples_maps]
        self.by_id = {m.id: m for m in self.maps}


class _DocumentRun:
    def __init__(self, plan: Plan, doc: XmlNode, label: object, registry: FunctionRegistry,
                 config: EngineConfig):
        self.plan = plan
        self.doc = doc
        self.label = label
        self.registry = registry
        self.config = config
        self.bnodes: dict[str, RdfTerm] = {}
        self.warnings: list[ExecutionWarning] = []
        self.join_indexes: dict[int, dict[tuple[str, ...], list[RdfTerm]]] = {}
        self.current_map = ""

    def on_error(self, exc: Exception) -> None:
        reason = str(exc)
        if self.config.strict:
            raise MappingExecutionError(self.current_map, self.label, reason)
        if self.config.emit_warnings:
            self.warnings.append(ExecutionWarning(self.current_map, self.label, reason))

    def terms(self, ctm: _CompiledTermMap, node: XmlNode) -> list[RdfTerm]:
        return ctm.terms(node, self.registry, self.bnodes, self.on_error)

    def parent_objects(self, ref: _CompiledRef, node: XmlNode) -> list[RdfTerm]:
        parent = self.plan.by_id[ref.parent_id]
        if not ref.child_paths:
            return self.terms(parent.subject, node)
        index = self.join_indexes.get(id(ref))
        if index is None:
            index = {}
            saved, self.current_map = self.current_map, parent.id
            for pctx in eval_xpath(self.doc, parent.iterator):
                keys = itertools.product(*(select_values(pctx, p) for p in ref.parent_paths))
                subjects = None
                for key in keys:
                    if subjects is None:
                        subjects = self.terms(parent.subject, pctx)
                    index.setdefault(key, []).extend(subjects)
            self.current_map = saved
            self.join_indexes[id(ref)] = index
        out: list[RdfTerm] = []
        for key in itertools.product(*(select_values(node, p) for p in ref.child_paths)):
            out.extend(index.get(key, ()))
        return list(dict.fromkeys(out))

    def run(self) -> Graph:
        triples: set[Triple] = set()
        add = triples.add
        for cmap in self.plan.maps:
            self.current_map = cmap.id
            for node in eval_xpath(self.doc, cmap.iterator):
                subjects = self.terms(cmap.subject, node)
                if not subjects:
                    continue
                for s in subjects:
                    for cls in cmap.classes:
                        add(Triple(s, _RDF_TYPE, cls))
                for preds, objs in cmap.poms:
                    p_terms = [p for pm in preds for p in self.terms(pm, node)]
                    if not p_terms:
                        continue
                    o_terms: list[RdfTerm] = []
                    for om in objs:
                        if isinstance(om, _CompiledRef):
                            o_terms.extend(self.parent_objects(om, node))
                        else:
                            o_terms.extend(self.terms(om, node))
                    for s in subjects:
                        for p in p_terms:
                            for o in o_terms:
                                add(Triple(s, p, o))
        return Graph(triples)


def map_document(plan: Plan, doc: XmlNode, label: object = 0,
                 registry: FunctionRegistry | None = None,
                 config: EngineConfig | None = None) -> tuple[Graph, list[ExecutionWarning]]:
    """Map one document. Blank nodes are labelled ``b0, b1, ...`` locally."""
    run = _DocumentRun(plan, doc, label, registry or FunctionRegistry(),
                       config or EngineConfig())
    return run.run(), run.warnings


def merge_graphs(graphs: Iterable[Graph]) -> Graph:
    """Union per-document graphs, renumbering blank nodes in document order."""
    merged = Graph()
    offset = 0
    for g in graphs:
        if not g.has_bnodes():
            merged.update(g)
            continue
        local = sorted({t.subject.value for t in g if t.subject.kind == BNODE}
                       | {t.object.value for t in g if t.object.kind == BNODE},
                       key=lambda label: int(label[1:]))
        rename = {label: RdfTerm(BNODE, f"b{offset + int(label[1:])}") for label in local}
        offset += int(local[-1][1:]) + 1

        def r(term: RdfTerm) -> RdfTerm:
            return rename[term.value] if term.kind == BNODE else term

        merged.update(Triple(r(t.subject), t.predicate, r(t.object)) for t in g)
    return merged


def execute_mapping(mapping: MappingDocument | Plan, documents: Iterable[XmlNode],
                    registry: FunctionRegistry | None = None,
                    config: EngineConfig | None = None,
                    workers: int = 1) -> tuple[Graph, list[ExecutionWarning]]:
    """Run ``mapping`` over ``documents`` and return the union graph and warnings.

    Documents may be any iterable, so callers can stream parsed files. With
    ``workers > 1`` documents are mapped on a thread pool; the merge is done
    in document order, so the output does not depend on the worker count.
    """
    plan = mapping if isinstance(mapping, Plan) else Plan(mapping)
    registry = registry or FunctionRegistry()
    config = config or EngineConfig()
    warnings: list[ExecutionWarning] = []

    def one(item: tuple[int, XmlNode]) -> tuple[Graph, list[ExecutionWarning]]:
        return map_document(plan, item[1], item[0], registry, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results: Iterable = pool.map(one, enumerate(documents))
            graphs = _collect(results, warnings)
    else:
        graphs = _collect(map(one, enumerate(documents)), warnings)
    return merge_graphs(graphs), warnings


def _collect(results: Iterable[tuple[Graph, list[ExecutionWarning]]],
             warnings: list[ExecutionWarning]) -> Iterable[Graph]:
    for g, w in results:
        warnings.extend(w)
        yield g
