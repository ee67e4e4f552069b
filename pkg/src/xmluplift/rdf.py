"""RDF terms, triples and graphs with canonical N-Triples input/output."""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Iterator, NamedTuple

IRI = "iri"
BNODE = "bnode"
LITERAL = "literal"

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDF_TYPE = RDF + "type"

_FORBIDDEN = frozenset(' <>"{}|\\^`')
_VALID_IRI = re.compile(r'[A-Za-z][A-Za-z0-9+.\-]*:[^\x00-\x20<>"{}|\\^`]*\Z')
_BNODE_LABEL = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_LANG_TAG = re.compile(r"[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*\Z")


class InvalidIri(ValueError):
    def __init__(self, text: str, position: int, reason: str):
        super().__init__(f"invalid IRI {text!r} at position {position}: {reason}")
        self.text = text
        self.position = position
        self.reason = reason


class ConflictingQualifiers(ValueError):
    pass


class NTriplesSyntaxError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True, slots=True)
class RdfTerm:
    kind: str
    value: str
    datatype: str | None = None
    language: str | None = None

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_bnode(self) -> bool:
        return self.kind == BNODE

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    def n3(self) -> str:
        if self.kind == IRI:
            return f"<{_escape_iri(self.value)}>"
        if self.kind == BNODE:
            return f"_:{self.value}"
        text = f'"{_escape_literal(self.value)}"'
        if self.language is not None:
            return f"{text}@{self.language}"
        if self.datatype is not None:
            return f"{text}^^<{_escape_iri(self.datatype)}>"
        return text

    def __str__(self) -> str:
        return self.n3()


class Triple(NamedTuple):
    subject: RdfTerm
    predicate: RdfTerm
    object: RdfTerm

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def iri_error(text: str) -> InvalidIri | None:
    """Return the reason ``text`` is not an acceptable absolute IRI, or None."""
    if _VALID_IRI.match(text):
        return None
    if not text:
        return InvalidIri(text, 0, "empty string has no scheme")
    for i, ch in enumerate(text, start=1):
        if ch in _FORBIDDEN or ord(ch) <= 0x20:
            return InvalidIri(text, i, f"forbidden character {ch!r}")
    return InvalidIri(text, 1, "missing scheme")


def make_iri(text: str) -> RdfTerm:
    if _VALID_IRI.match(text):
        return RdfTerm(IRI, text)
    raise iri_error(text)


def make_bnode(label: str) -> RdfTerm:
    if not _BNODE_LABEL.match(label):
        raise ValueError(f"invalid blank node label {label!r}")
    return RdfTerm(BNODE, label)


def make_literal(lexical: str, datatype: str | RdfTerm | None = None,
                 language: str | None = None) -> RdfTerm:
    if datatype is not None and language is not None:
        raise ConflictingQualifiers(
            f"literal {lexical!r} has both datatype and language tag")
    if isinstance(datatype, RdfTerm):
        datatype = datatype.value
    if datatype is not None:
        make_iri(datatype)
    if language is not None and not _LANG_TAG.match(language):
        raise ValueError(f"malformed language tag {language!r}")
    return RdfTerm(LITERAL, lexical, datatype, language)


def is_language_tag(tag: str) -> bool:
    return bool(_LANG_TAG.match(tag))


class Graph:
    """A duplicate-free, unordered set of triples."""

    __slots__ = ("_triples",)

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set(triples)

    def add(self, triple: Triple) -> Graph:
        self._triples.add(triple)
        return self

    def update(self, triples: Iterable[Triple]) -> Graph:
        self._triples.update(triples)
        return self

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __or__(self, other: Graph) -> Graph:
        return Graph(self._triples | other._triples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __repr__(self) -> str:
        return f"<Graph with {len(self)} triples>"

    def triples(self, subject: RdfTerm | None = None, predicate: RdfTerm | None = None,
                obj: RdfTerm | None = None) -> Iterator[Triple]:
        for t in self._triples:
            if subject is not None and t.subject != subject:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            if obj is not None and t.object != obj:
                continue
            yield t

    def has_bnodes(self) -> bool:
        return any(t.subject.kind == BNODE or t.object.kind == BNODE for t in self._triples)


def graph_insert(g: Graph, t: Triple) -> Graph:
    if t.subject.kind == LITERAL:
        raise ValueError("a literal cannot be the subject of a triple")
    if t.predicate.kind != IRI:
        raise ValueError("the predicate of a triple must be an IRI")
    return g.add(t)


# -- N-Triples ---------------------------------------------------------------

_LITERAL_ESCAPES = {c: f"\\u{c:04X}" for c in [*range(0x20), 0x7F]}
_LITERAL_ESCAPES.update({ord("\\"): "\\\\", ord('"'): '\\"', ord("\n"): "\\n", ord("\r"): "\\r"})


def _escape_literal(text: str) -> str:
    return text.translate(_LITERAL_ESCAPES)


def _escape_iri(text: str) -> str:
    return text  # validated IRIs carry no characters that need escaping


def serialize_ntriples(g: Iterable[Triple]) -> str:
    lines = sorted(t.n3() for t in g)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


_NT_TOKEN = re.compile(r"""
      <(?P<iri>[^>]*)>
    | _:(?P<bnode>[A-Za-z0-9_][A-Za-z0-9_.\-]*)
    | "(?P<lit>(?:[^"\\]|\\.)*)"(?:@(?P<lang>[A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^<(?P<dt>[^>]*)>)?
""", re.VERBOSE)
_NT_ECHAR = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_ECHARS = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str, lineno: int) -> str:
    if "\\" not in text:
        return text

    def repl(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        ch = m.group(3)
        if ch not in _ECHARS:
            raise NTriplesSyntaxError(lineno, f"bad escape \\{ch}")
        return _ECHARS[ch]

    return _NT_ECHAR.sub(repl, text)


def _nt_term(line: str, pos: int, lineno: int) -> tuple[RdfTerm, int]:
    while pos < len(line) and line[pos] in " \t":
        pos += 1
    m = _NT_TOKEN.match(line, pos)
    if m is None:
        raise NTriplesSyntaxError(lineno, f"expected a term at column {pos + 1}")
    try:
        if m.group("iri") is not None:
            term = make_iri(_unescape(m.group("iri"), lineno))
        elif m.group("bnode") is not None:
            term = RdfTerm(BNODE, m.group("bnode"))
        else:
            dt = m.group("dt")
            term = make_literal(_unescape(m.group("lit"), lineno),
                                _unescape(dt, lineno) if dt is not None else None,
                                m.group("lang"))
    except (InvalidIri, ValueError) as exc:
        if isinstance(exc, NTriplesSyntaxError):
            raise
        raise NTriplesSyntaxError(lineno, str(exc)) from exc
    return term, m.end()


def parse_ntriples(text: str) -> Graph:
    g = Graph()
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        s, pos = _nt_term(line, 0, lineno)
        p, pos = _nt_term(line, pos, lineno)
        o, pos = _nt_term(line, pos, lineno)
        rest = line[pos:].strip()
        if not (rest == "." or (rest.startswith(".") and rest[1:].lstrip().startswith("#"))):
            raise NTriplesSyntaxError(lineno, "expected '.' at end of statement")
        if s.kind == LITERAL or p.kind != IRI:
            raise NTriplesSyntaxError(lineno, "illegal term position")
        g.add(Triple(s, p, o))
    return g


# -- isomorphism -------------------------------------------------------------

def _bnodes_of(triples: Iterable[Triple]) -> set[RdfTerm]:
    out = set()
    for t in triples:
        if t.subject.kind == BNODE:
            out.add(t.subject)
        if t.object.kind == BNODE:
            out.add(t.object)
    return out


def _signature(node: RdfTerm, triples: list[Triple]) -> tuple:
    sig = []
    for t in triples:
        if t.subject == node:
            sig.append(("s", t.predicate, t.object if t.object.kind != BNODE else None))
        if t.object == node:
            sig.append(("o", t.predicate, t.subject if t.subject.kind != BNODE else None))
    return tuple(sorted(sig, key=repr))


def graph_equal(g1: Iterable[Triple], g2: Iterable[Triple]) -> bool:
    """Set equality, up to a renaming of blank-node labels."""
    a, b = set(g1), set(g2)
    if len(a) != len(b):
        return False
    a_b = [t for t in a if t.subject.kind == BNODE or t.object.kind == BNODE]
    b_b = [t for t in b if t.subject.kind == BNODE or t.object.kind == BNODE]
    if not a_b and not b_b:
        return a == b
    if a.difference(a_b) != b.difference(b_b) or len(a_b) != len(b_b):
        return False
    nodes_a, nodes_b = _bnodes_of(a_b), _bnodes_of(b_b)
    if len(nodes_a) != len(nodes_b):
        return False

    # group candidates by local signature, then search bijections per group
    groups: dict[tuple, tuple[list[RdfTerm], list[RdfTerm]]] = {}
    for n in nodes_a:
        groups.setdefault(_signature(n, a_b), ([], []))[0].append(n)
    for n in nodes_b:
        key = _signature(n, b_b)
        if key not in groups:
            return False
        groups[key][1].append(n)
    if any(len(x) != len(y) for x, y in groups.values()):
        return False

    target = set(b_b)
    group_list = list(groups.values())

    def search(i: int, mapping: dict[RdfTerm, RdfTerm]) -> bool:
        if i == len(group_list):
            def m(term: RdfTerm) -> RdfTerm:
                return mapping.get(term, term)
            return {Triple(m(t.subject), t.predicate, m(t.object)) for t in a_b} == target
        left, right = group_list[i]
        for perm in permutations(right):
            mapping.update(zip(left, perm))
            if search(i + 1, mapping):
                return True
        for n in left:
            mapping.pop(n, None)
        return False

    return search(0, {})
