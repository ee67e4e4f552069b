"""Reader and writer for the Turtle subset used by mapping files.

Accepted: ``@prefix``, prefixed names, ``<IRI>``, ``a``, short and long
string literals with ``@lang`` or ``^^datatype``, ``_:label`` blank nodes,
``[ ... ]`` property lists, and ``;`` / ``,`` lists. Collections, numeric
and boolean shorthand and ``@base`` are rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .rdf import BNODE, IRI, RDF_TYPE, InvalidIri, RdfTerm, Triple, make_iri, make_literal


class TurtleSyntaxError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


_TOKEN = re.compile(r"""
      (?P<ws>[ \t\r\n]+|\#[^\n]*)
    | (?P<long>\"\"\"(?:[^"\\]|\\.|"(?!""))*\"\"\"|'''(?:[^'\\]|\\.|'(?!''))*''')
    | (?P<str>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
    | (?P<iri><[^<>"{}|^`\\\x00-\x20]*>)
    | (?P<directive>@prefix|@base)\b
    | (?P<lang>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
    | (?P<dtmark>\^\^)
    | (?P<bnode>_:[A-Za-z0-9_][A-Za-z0-9_.\-]*)
    | (?P<pname>(?:[A-Za-z][\w.\-]*)?:(?:[\w\-:%]|\.(?=[\w\-:%]))*)
    | (?P<a>a)(?=[\s\[<"'])
    | (?P<punct>[\[\];,.])
    | (?P<other>\S+)
""", re.VERBOSE)

_STR_ESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))", re.S)
_ECHARS = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass(slots=True)
class _Tok:
    kind: str
    text: str
    line: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line = 1
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        tok = m.group()
        if kind == "other":
            raise TurtleSyntaxError(line, f"unsupported token {tok[:20]!r}")
        if kind != "ws":
            toks.append(_Tok(kind, tok, line))
        line += tok.count("\n")
    return toks


def _unescape_string(body: str, line: int) -> str:
    def repl(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        ch = m.group(3)
        if ch not in _ECHARS:
            raise TurtleSyntaxError(line, f"bad escape \\{ch}")
        return _ECHARS[ch]
    return _STR_ESCAPE.sub(repl, body)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []
        self.bnode_count = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def line(self) -> int:
        tok = self.peek()
        if tok is None:
            return self.toks[-1].line if self.toks else 1
        return tok.line

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise TurtleSyntaxError(self.line(), "unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.next()
        if tok.text != text:
            raise TurtleSyntaxError(tok.line, f"expected {text!r}, found {tok.text!r}")

    def fresh_bnode(self) -> RdfTerm:
        term = RdfTerm(BNODE, f"anon{self.bnode_count}")
        self.bnode_count += 1
        return term

    def parse(self) -> tuple[dict[str, str], list[Triple]]:
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "directive":
                self.directive()
            else:
                self.statement()
        return self.prefixes, self.triples

    def directive(self) -> None:
        tok = self.next()
        if tok.text == "@base":
            raise TurtleSyntaxError(tok.line, "@base is not supported")
        name = self.next()
        if name.kind != "pname" or not name.text.endswith(":"):
            raise TurtleSyntaxError(name.line, f"bad prefix label {name.text!r}")
        iri = self.next()
        if iri.kind != "iri":
            raise TurtleSyntaxError(iri.line, "expected namespace IRI")
        self.prefixes[name.text[:-1]] = iri.text[1:-1]
        self.expect(".")

    def statement(self) -> None:
        tok = self.peek()
        if tok.text == "[":
            subject = self.property_list()
            if self.peek() is not None and self.peek().text != ".":
                self.predicate_object_list(subject)
        else:
            subject = self.resource(self.next())
            self.predicate_object_list(subject)
        self.expect(".")

    def property_list(self) -> RdfTerm:
        self.expect("[")
        node = self.fresh_bnode()
        if self.peek() is not None and self.peek().text == "]":
            self.next()
            return node
        self.predicate_object_list(node)
        self.expect("]")
        return node

    def predicate_object_list(self, subject: RdfTerm) -> None:
        while True:
            tok = self.next()
            if tok.kind == "a":
                predicate = RdfTerm(IRI, RDF_TYPE)
            else:
                predicate = self.resource(tok)
                if predicate.kind != IRI:
                    raise TurtleSyntaxError(tok.line, "predicate must be an IRI")
            while True:
                obj = self.object()
                self.triples.append(Triple(subject, predicate, obj))
                if self.peek() is not None and self.peek().text == ",":
                    self.next()
                    continue
                break
            if self.peek() is not None and self.peek().text == ";":
                while self.peek() is not None and self.peek().text == ";":
                    self.next()
                if self.peek() is not None and self.peek().text in (".", "]"):
                    return
                continue
            return

    def object(self) -> RdfTerm:
        tok = self.peek()
        if tok is None:
            raise TurtleSyntaxError(self.line(), "expected an object")
        if tok.text == "[":
            return self.property_list()
        tok = self.next()
        if tok.kind in ("str", "long"):
            q = 3 if tok.kind == "long" else 1
            lexical = _unescape_string(tok.text[q:-q], tok.line)
            language = datatype = None
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lang":
                language = self.next().text[1:]
            elif nxt is not None and nxt.kind == "dtmark":
                self.next()
                datatype = self.resource(self.next()).value
            try:
                return make_literal(lexical, datatype, language)
            except ValueError as exc:
                raise TurtleSyntaxError(tok.line, str(exc)) from exc
        return self.resource(tok)

    def resource(self, tok: _Tok) -> RdfTerm:
        try:
            if tok.kind == "iri":
                return make_iri(_unescape_string(tok.text[1:-1], tok.line))
            if tok.kind == "pname":
                prefix, _, local = tok.text.partition(":")
                if prefix not in self.prefixes:
                    raise TurtleSyntaxError(tok.line, f"undeclared prefix {prefix!r}")
                return make_iri(self.prefixes[prefix] + local)
        except InvalidIri as exc:
            raise TurtleSyntaxError(tok.line, str(exc)) from exc
        if tok.kind == "bnode":
            return RdfTerm(BNODE, tok.text[2:])
        raise TurtleSyntaxError(tok.line, f"unexpected {tok.text!r}")


def parse_turtle(text: str) -> tuple[dict[str, str], list[Triple]]:
    """Return the declared prefixes and the triples in source order."""
    return _Parser(text).parse()


# -- writing -----------------------------------------------------------------

def _qname(iri: str, prefixes: dict[str, str]) -> str:
    best = None
    for label, ns in prefixes.items():
        if iri.startswith(ns) and (best is None or len(ns) > len(prefixes[best])):
            local = iri[len(ns):]
            if re.fullmatch(r"(?:[\w\-:%]|\.(?=[\w\-:%]))*", local):
                best = label
    if best is None:
        return f"<{iri}>"
    return f"{best}:{iri[len(prefixes[best]):]}"


def quote_string(value: str) -> str:
    esc = value.replace("\\", "\\\\").replace('"', '\\"')
    esc = esc.replace("\n", "\\n").replace("\r", "\\r")
    return f'"{esc}"'


def term_to_turtle(term: RdfTerm, prefixes: dict[str, str]) -> str:
    if term.kind == IRI:
        if term.value == RDF_TYPE:
            return "a"
        return _qname(term.value, prefixes)
    if term.kind == BNODE:
        return f"_:{term.value}"
    text = quote_string(term.value)
    if term.language:
        return f"{text}@{term.language}"
    if term.datatype:
        return f"{text}^^{_qname(term.datatype, prefixes)}"
    return text

