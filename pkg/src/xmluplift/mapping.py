"""RML mapping documents: data model, reader, validator and writer."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field

from .rdf import BNODE, IRI, LITERAL, RDF_TYPE, RdfTerm, iri_error, is_language_tag
from .turtle import parse_turtle, quote_string, term_to_turtle
from .xml import PathSyntaxError, compile_path

RML = "http://semweb.mmlab.be/ns/rml#"
RR = "http://www.w3.org/ns/r2rml#"
QL = "http://semweb.mmlab.be/ns/ql#"
FNML = "http://semweb.mmlab.be/ns/fnml#"
FNO = "https://w3id.org/function/ontology#"

CONSTANT = "constant"
REFERENCE = "reference"
TEMPLATE = "template"
FUNCTION = "function"

_TERM_TYPES = {RR + "IRI": IRI, RR + "BlankNode": BNODE, RR + "Literal": LITERAL}
_TERM_TYPE_IRIS = {v: k for k, v in _TERM_TYPES.items()}

KNOWN_TERMS = frozenset([
    RML + "logicalSource", RML + "source", RML + "iterator", RML + "referenceFormulation",
    RML + "reference",
    RR + "subjectMap", RR + "subject", RR + "predicateObjectMap", RR + "predicate",
    RR + "predicateMap", RR + "objectMap", RR + "object", RR + "template", RR + "constant",
    RR + "termType", RR + "datatype", RR + "language", RR + "parentTriplesMap",
    RR + "joinCondition", RR + "child", RR + "parent", RR + "class",
    FNML + "functionValue", FNML + "parameter", FNO + "executes",
])
_VOCAB_NAMESPACES = (RML, RR, FNML, FNO)


class MappingError(ValueError):
    pass


class UnknownVocabularyTerm(MappingError):
    def __init__(self, term: str):
        super().__init__(f"unknown mapping vocabulary term <{term}>")
        self.term = term


class StructuralError(MappingError):
    def __init__(self, description: str):
        super().__init__(description)
        self.description = description


@dataclass(frozen=True)
class FunctionCall:
    function_iri: str
    parameters: tuple[TermMap, ...] = ()


@dataclass(frozen=True)
class TermMap:
    kind: str
    term_type: str
    constant: RdfTerm | None = None
    reference: str | None = None
    template: str | None = None
    function_call: FunctionCall | None = None
    datatype: str | None = None
    language: str | None = None

    @classmethod
    def of_constant(cls, term: RdfTerm) -> TermMap:
        return cls(CONSTANT, term.kind, constant=term)

    @property
    def value_forms(self) -> int:
        return sum(x is not None for x in
                   (self.constant, self.reference, self.template, self.function_call))


@dataclass(frozen=True)
class JoinCondition:
    child: str
    parent: str


@dataclass(frozen=True)
class RefObjectMap:
    parent_triples_map: str
    join_conditions: tuple[JoinCondition, ...] = ()


@dataclass(frozen=True)
class PredicateObjectMap:
    predicate_maps: tuple[TermMap, ...]
    object_maps: tuple[TermMap | RefObjectMap, ...]


@dataclass(frozen=True)
class LogicalSource:
    iterator: str
    source: str | None = None
    reference_formulation: str = "XPath"


@dataclass(frozen=True)
class TriplesMap:
    id: str
    logical_source: LogicalSource
    subject_map: TermMap
    predicate_object_maps: tuple[PredicateObjectMap, ...] = ()
    subject_classes: tuple[str, ...] = ()


@dataclass(frozen=True)
class MappingDocument:
    triples_maps: tuple[TriplesMap, ...]
    prefixes: dict[str, str] = field(default_factory=dict)

    def get(self, map_id: str) -> TriplesMap | None:
        for tm in self.triples_maps:
            if tm.id == map_id:
                return tm
        return None


# -- reading -----------------------------------------------------------------

def _node_id(term: RdfTerm) -> str:
    return "_:" + term.value if term.kind == BNODE else term.value


class _Reader:
    def __init__(self, triples):
        self.props: dict[RdfTerm, list[tuple[str, RdfTerm]]] = defaultdict(list)
        for s, p, o in triples:
            if p.value.startswith(_VOCAB_NAMESPACES) and p.value not in KNOWN_TERMS:
                raise UnknownVocabularyTerm(p.value)
            self.props[s].append((p.value, o))

    def values(self, node: RdfTerm, prop: str) -> list[RdfTerm]:
        return [o for p, o in self.props.get(node, ()) if p == prop]

    def one(self, node: RdfTerm, prop: str, what: str) -> RdfTerm | None:
        vals = self.values(node, prop)
        if len(vals) > 1:
            raise StructuralError(f"{what}: more than one {prop.rsplit('#', 1)[-1]}")
        return vals[0] if vals else None

    def string(self, node: RdfTerm, prop: str, what: str) -> str | None:
        val = self.one(node, prop, what)
        if val is None:
            return None
        if val.kind != LITERAL:
            raise StructuralError(f"{what}: {prop.rsplit('#', 1)[-1]} must be a string")
        return val.value

    def triples_map(self, node: RdfTerm) -> TriplesMap:
        what = f"triples map {_node_id(node)}"
        ls_node = self.one(node, RML + "logicalSource", what)
        if ls_node is None:
            raise StructuralError(f"{what}: missing logical source")
        logical_source = self.logical_source(ls_node, what)

        sm_nodes = self.values(node, RR + "subjectMap")
        sm_consts = self.values(node, RR + "subject")
        if len(sm_nodes) + len(sm_consts) == 0:
            raise StructuralError(f"{what}: missing subject map")
        if len(sm_nodes) + len(sm_consts) > 1:
            raise StructuralError(f"{what}: more than one subject map")
        if sm_consts:
            subject_map, classes = TermMap.of_constant(sm_consts[0]), []
        else:
            subject_map = self.term_map(sm_nodes[0], "subject", what)
            classes = [c.value for c in self.values(sm_nodes[0], RR + "class")]

        poms = tuple(self.predicate_object_map(p, what)
                     for p in self.values(node, RR + "predicateObjectMap"))
        return TriplesMap(_node_id(node), logical_source, subject_map, poms, tuple(classes))

    def logical_source(self, node: RdfTerm, what: str) -> LogicalSource:
        iterator = self.string(node, RML + "iterator", what)
        if iterator is None:
            raise StructuralError(f"{what}: logical source has no iterator")
        formulation = self.one(node, RML + "referenceFormulation", what)
        if formulation is not None and formulation.value != QL + "XPath":
            raise StructuralError(f"{what}: unsupported reference formulation <{formulation.value}>")
        source = self.one(node, RML + "source", what)
        return LogicalSource(iterator, source.value if source is not None else None)

    def predicate_object_map(self, node: RdfTerm, what: str) -> PredicateObjectMap:
        preds = [TermMap.of_constant(p) for p in self.values(node, RR + "predicate")]
        preds += [self.term_map(p, "predicate", what) for p in self.values(node, RR + "predicateMap")]
        objs: list[TermMap | RefObjectMap] = [
            TermMap.of_constant(o) for o in self.values(node, RR + "object")]
        for o in self.values(node, RR + "objectMap"):
            if self.values(o, RR + "parentTriplesMap"):
                objs.append(self.ref_object_map(o, what))
            else:
                objs.append(self.term_map(o, "object", what))
        if not preds:
            raise StructuralError(f"{what}: predicate-object map without a predicate map")
        if not objs:
            raise StructuralError(f"{what}: predicate-object map without an object map")
        return PredicateObjectMap(tuple(preds), tuple(objs))

    def ref_object_map(self, node: RdfTerm, what: str) -> RefObjectMap:
        parent = self.one(node, RR + "parentTriplesMap", what)
        joins = []
        for jc in self.values(node, RR + "joinCondition"):
            child = self.string(jc, RR + "child", what)
            parent_ref = self.string(jc, RR + "parent", what)
            if child is None or parent_ref is None:
                raise StructuralError(f"{what}: join condition needs both child and parent")
            joins.append(JoinCondition(child, parent_ref))
        return RefObjectMap(_node_id(parent), tuple(joins))

    def term_map(self, node: RdfTerm, position: str, what: str) -> TermMap:
        constant = self.one(node, RR + "constant", what)
        reference = self.string(node, RML + "reference", what)
        template = self.string(node, RR + "template", what)
        fn_node = self.one(node, FNML + "functionValue", what)
        function_call = self.function_call(fn_node, what) if fn_node is not None else None
        forms = [(CONSTANT, constant), (REFERENCE, reference), (TEMPLATE, template),
                 (FUNCTION, function_call)]
        present = [k for k, v in forms if v is not None]
        if len(present) != 1:
            raise StructuralError(
                f"{what}: {position} map must have exactly one of constant, reference, "
                f"template or functionValue (found {len(present)})")
        kind = present[0]

        datatype = self.one(node, RR + "datatype", what)
        language = self.string(node, RR + "language", what)
        tt = self.one(node, RR + "termType", what)
        if tt is not None:
            if tt.value not in _TERM_TYPES:
                raise StructuralError(f"{what}: unknown term type <{tt.value}>")
            term_type = _TERM_TYPES[tt.value]
        elif kind == CONSTANT:
            term_type = constant.kind
        elif position not in ("object", "parameter"):
            term_type = IRI
        elif kind == TEMPLATE and datatype is None and language is None:
            term_type = IRI
        else:
            term_type = LITERAL
        return TermMap(kind, term_type, constant, reference, template, function_call,
                       datatype.value if datatype is not None else None, language)

    def function_call(self, node: RdfTerm, what: str) -> FunctionCall:
        fn = self.one(node, FNO + "executes", what)
        if fn is None:
            raise StructuralError(f"{what}: function value without fno:executes")
        params = tuple(self.term_map(p, "parameter", what)
                       for p in self.values(node, FNML + "parameter"))
        return FunctionCall(fn.value, params)


def parse_mapping(text: str) -> MappingDocument:
    """Read a mapping document from the supported Turtle subset."""
    prefixes, triples = parse_turtle(text)
    reader = _Reader(triples)
    maps: list[RdfTerm] = []
    for s, p, o in triples:
        is_map = p.value in (RML + "logicalSource", RR + "subjectMap", RR + "subject") or (
            p.value == RDF_TYPE and o.value == RR + "TriplesMap")
        if is_map and s not in maps:
            maps.append(s)
    return MappingDocument(tuple(reader.triples_map(m) for m in maps), dict(prefixes))


# -- validation --------------------------------------------------------------

_PLACEHOLDER = re.compile(r"\\.|\{([^{}]*)\}|[{}]")


def template_references(template: str) -> list[str]:
    """Placeholder references of a template; raises ValueError if unbalanced."""
    refs = []
    for m in _PLACEHOLDER.finditer(template):
        tok = m.group()
        if tok.startswith("\\"):
            continue
        if m.group(1) is None:
            raise ValueError(f"unbalanced brace at position {m.start() + 1} in {template!r}")
        refs.append(m.group(1))
    return refs


def _check_path(expr: str, what: str, out: list[str], allow_selector: bool = True) -> None:
    try:
        path = compile_path(expr)
    except PathSyntaxError as exc:
        out.append(f"{what}: {exc}")
        return
    if not allow_selector and path.selector not in ("element",):
        out.append(f"{what}: iterator {expr!r} must select elements")


def _check_term_map(tm: TermMap, position: str, what: str, out: list[str]) -> None:
    if tm.value_forms != 1:
        out.append(f"{what}: {position} map has {tm.value_forms} value forms")
    if tm.term_type not in (IRI, BNODE, LITERAL):
        out.append(f"{what}: {position} map has unknown term type {tm.term_type!r}")
    if (tm.datatype is not None or tm.language is not None) and tm.term_type != LITERAL:
        out.append(f"{what}: {position} map sets datatype/language on a non-literal term type")
    if tm.datatype is not None and tm.language is not None:
        out.append(f"{what}: {position} map sets both datatype and language")
    if tm.language is not None and not is_language_tag(tm.language):
        out.append(f"{what}: {position} map has malformed language tag {tm.language!r}")
    if tm.datatype is not None and iri_error(tm.datatype) is not None:
        out.append(f"{what}: {position} map datatype is not an IRI")
    if position in ("subject", "predicate") and tm.term_type == LITERAL:
        out.append(f"{what}: {position} map cannot produce literals")
    if position == "predicate" and tm.term_type == BNODE:
        out.append(f"{what}: predicate map cannot produce blank nodes")
    if tm.kind == CONSTANT and tm.constant is not None and tm.constant.kind == BNODE:
        out.append(f"{what}: {position} constant cannot be a blank node")
    elif tm.kind == CONSTANT and tm.constant is not None and tm.constant.kind != tm.term_type:
        out.append(f"{what}: {position} constant does not match its term type")
    if tm.kind == REFERENCE and tm.reference is not None:
        _check_path(tm.reference, f"{what}: {position} reference", out)
    elif tm.kind == TEMPLATE and tm.template is not None:
        try:
            refs = template_references(tm.template)
        except ValueError as exc:
            out.append(f"{what}: {position} template: {exc}")
        else:
            for ref in refs:
                _check_path(ref, f"{what}: {position} template placeholder", out)
    elif tm.kind == FUNCTION and tm.function_call is not None:
        fc = tm.function_call
        if iri_error(fc.function_iri) is not None:
            out.append(f"{what}: function {fc.function_iri!r} is not a valid IRI")
        for i, param in enumerate(fc.parameters):
            _check_term_map(param, f"parameter {i + 1}", what, out)


def validate_mapping(doc: MappingDocument) -> list[str]:
    """Return human-readable diagnostics; an empty list means the mapping is usable."""
    out: list[str] = []
    seen: set[str] = set()
    for tm in doc.triples_maps:
        if tm.id in seen:
            out.append(f"duplicate triples map id {tm.id}")
        seen.add(tm.id)
    for tm in doc.triples_maps:
        what = f"triples map {tm.id}"
        ls = tm.logical_source
        if ls.reference_formulation != "XPath":
            out.append(f"{what}: unsupported reference formulation {ls.reference_formulation}")
        _check_path(ls.iterator, f"{what}: iterator", out, allow_selector=False)
        _check_term_map(tm.subject_map, "subject", what, out)
        for cls in tm.subject_classes:
            if iri_error(cls) is not None:
                out.append(f"{what}: class {cls!r} is not a valid IRI")
        for pom in tm.predicate_object_maps:
            if not pom.predicate_maps or not pom.object_maps:
                out.append(f"{what}: predicate-object map needs predicate and object maps")
            for pm in pom.predicate_maps:
                _check_term_map(pm, "predicate", what, out)
            for om in pom.object_maps:
                if isinstance(om, RefObjectMap):
                    parent = doc.get(om.parent_triples_map)
                    if parent is None:
                        out.append(f"{what}: parent triples map {om.parent_triples_map} "
                                   "does not exist")
                    elif not om.join_conditions and parent.logical_source != ls:
                        out.append(f"{what}: referencing object map without join condition "
                                   "needs an identical logical source")
                    for jc in om.join_conditions:
                        _check_path(jc.child, f"{what}: join child", out)
                        _check_path(jc.parent, f"{what}: join parent", out)
                else:
                    _check_term_map(om, "object", what, out)
    return out


# -- writing -----------------------------------------------------------------

def _write_term_map(tm: TermMap, prefixes: dict[str, str], indent: str) -> str:
    parts = []
    if tm.kind == CONSTANT:
        parts.append(f"rr:constant {term_to_turtle(tm.constant, prefixes)}")
    elif tm.kind == REFERENCE:
        parts.append(f"rml:reference {quote_string(tm.reference)}")
    elif tm.kind == TEMPLATE:
        parts.append(f"rr:template {quote_string(tm.template)}")
    else:
        fc = tm.function_call
        inner = [f"fno:executes {term_to_turtle(RdfTerm(IRI, fc.function_iri), prefixes)}"]
        if fc.parameters:
            params = ", ".join(_write_term_map(p, prefixes, indent + "    ")
                               for p in fc.parameters)
            inner.append(f"fnml:parameter {params}")
        parts.append("fnml:functionValue [ " + " ; ".join(inner) + " ]")
    parts.append(f"rr:termType {_qn(_TERM_TYPE_IRIS[tm.term_type], prefixes)}")
    if tm.datatype is not None:
        parts.append(f"rr:datatype {_qn(tm.datatype, prefixes)}")
    if tm.language is not None:
        parts.append(f"rr:language {quote_string(tm.language)}")
    return "[ " + " ; ".join(parts) + " ]"


def _qn(iri: str, prefixes: dict[str, str]) -> str:
    return term_to_turtle(RdfTerm(IRI, iri), prefixes)


def _write_id(map_id: str, prefixes: dict[str, str]) -> str:
    return map_id if map_id.startswith("_:") else _qn(map_id, prefixes)


_WRITER_PREFIXES = {"rr": RR, "rml": RML, "ql": QL, "fnml": FNML, "fno": FNO}


def to_turtle(doc: MappingDocument) -> str:
    """Write ``doc`` in the Turtle subset accepted by :func:`parse_mapping`."""
    prefixes = dict(doc.prefixes)
    for label, ns in _WRITER_PREFIXES.items():
        if prefixes.get(label, ns) != ns:
            raise ValueError(f"prefix {label}: is bound to a foreign namespace")
        prefixes.setdefault(label, ns)
    lines = [f"@prefix {label}: <{ns}> ." for label, ns in doc.prefixes.items()]
    lines += [f"@prefix {label}: <{ns}> ." for label, ns in _WRITER_PREFIXES.items()
              if label not in doc.prefixes]
    lines.append("")
    for tm in doc.triples_maps:
        ls = tm.logical_source
        ls_parts = [f"rml:iterator {quote_string(ls.iterator)}",
                    "rml:referenceFormulation ql:XPath"]
        if ls.source is not None:
            ls_parts.insert(0, f"rml:source {quote_string(ls.source)}")
        body = [f"rml:logicalSource [ {' ; '.join(ls_parts)} ]"]
        sm = _write_term_map(tm.subject_map, prefixes, "    ")
        if tm.subject_classes:
            classes = ", ".join(_qn(c, prefixes) for c in tm.subject_classes)
            sm = sm[:-2] + f" ; rr:class {classes} ]"
        body.append(f"rr:subjectMap {sm}")
        for pom in tm.predicate_object_maps:
            pm = ", ".join(_write_term_map(p, prefixes, "        ") for p in pom.predicate_maps)
            oms = []
            for om in pom.object_maps:
                if isinstance(om, RefObjectMap):
                    parts = [f"rr:parentTriplesMap {_write_id(om.parent_triples_map, prefixes)}"]
                    for jc in om.join_conditions:
                        parts.append(f"rr:joinCondition [ rr:child {quote_string(jc.child)} ; "
                                     f"rr:parent {quote_string(jc.parent)} ]")
                    oms.append("[ " + " ; ".join(parts) + " ]")
                else:
                    oms.append(_write_term_map(om, prefixes, "        "))
            body.append(f"rr:predicateObjectMap [\n        rr:predicateMap {pm} ;\n"
                        f"        rr:objectMap {', '.join(oms)}\n    ]")
        lines.append(f"{_write_id(tm.id, prefixes)} a rr:TriplesMap ;\n    "
                     + " ;\n    ".join(body) + " .\n")
    return "\n".join(lines)
