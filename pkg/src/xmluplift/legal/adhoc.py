"""Hand-written XML-to-RDF conversion for the legal schema.

It produces the same triples as the reference mapping without going through
the mapping engine or the XPath evaluator, and serves as the oracle the
engine is checked and benchmarked against.
"""
from __future__ import annotations

import re
from urllib.parse import quote

from ..rdf import LITERAL, Graph, InvalidIri, RdfTerm, Triple, make_iri
from ..xml import ELEMENT, TEXT, XmlNode
from . import vocab

_SPACE = re.compile(r"[ \t\r\n]+")


class SchemaViolation(ValueError):
    pass


def _norm(s: str) -> str:
    return _SPACE.sub(" ", s).strip(" ")


def _attr(node: XmlNode, name: str, required: bool = True) -> str | None:
    for a in node.attributes:
        if a.name == name:
            return a.value
    if required:
        raise SchemaViolation(f"<{node.name}> lacks required attribute {name!r}")
    return None


def _iri(text: str) -> RdfTerm:
    try:
        return make_iri(text)
    except InvalidIri as exc:
        raise SchemaViolation(str(exc)) from exc


def _string_value(node: XmlNode) -> str:
    if node.kind == TEXT:
        return node.value
    return "".join(_string_value(c) for c in node.children)


def _keywords_and_concepts(owner: RdfTerm, el: XmlNode, out: set[Triple]) -> None:
    if el.name == "keyword":
        for c in el.children:
            if c.kind == TEXT:
                out.add(Triple(owner, vocab.HAS_KEYWORD, RdfTerm(LITERAL, _norm(c.value))))
    elif el.name == "concept":
        uri = _attr(el, "uri", required=False)
        if uri is not None:
            out.add(Triple(owner, vocab.SUBJECT, _iri(uri)))


def adhoc_parse(doc: XmlNode) -> Graph:
    if doc.kind != ELEMENT or doc.name != "document":
        raise SchemaViolation("root element must be <document>")
    doc_id = quote(_attr(doc, "id"), safe="")
    doc_base = vocab.DOC_BASE + doc_id
    d = _iri(doc_base)
    out: set[Triple] = {Triple(d, vocab.TYPE, vocab.MANIFESTATION)}

    for child in doc.children:
        if child.kind != ELEMENT:
            continue
        if child.name == "metadata":
            for el in child.children:
                if el.kind == ELEMENT:
                    _keywords_and_concepts(d, el, out)
        elif child.name == "fragment":
            frag_id = quote(_attr(child, "id"), safe="")
            type_code = _attr(child, "type")
            f = _iri(f"{doc_base}/fragment/{frag_id}")
            ftype = _iri(vocab.FRAGMENT_TYPE_BASE + quote(type_code, safe=""))
            out.add(Triple(d, vocab.HAS_FRAGMENT, f))
            out.add(Triple(f, vocab.TYPE, vocab.FRAGMENT))
            out.add(Triple(f, vocab.IS_FRAGMENT_OF, d))
            out.add(Triple(f, vocab.DC_TYPE, ftype))
            out.add(Triple(ftype, vocab.TYPE, vocab.FRAGMENT_TYPE))
            contents = 0
            for el in child.children:
                if el.kind != ELEMENT:
                    continue
                if el.name == "content":
                    contents += 1
                    text = _norm(_string_value(el))
                    out.add(Triple(f, vocab.HAS_CONTENT, RdfTerm(LITERAL, text)))
                else:
                    _keywords_and_concepts(f, el, out)
            if contents != 1:
                raise SchemaViolation(f"fragment {frag_id} must have exactly one <content>")
        else:
            raise SchemaViolation(f"unexpected element <{child.name}> in <document>")
    return Graph(out)
