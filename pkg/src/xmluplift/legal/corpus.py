"""Synthetic legal documents and taxonomy fixtures.

The XML layout produced here::

    <document id="...">
      <metadata>
        <keyword>...</keyword>*
        <concept uri="..."/>*
      </metadata>
      <fragment id="..." type="...">*
        <keyword>...</keyword>*
        <concept uri="..."/>*
        <content>mixed text with <em/> and <ref/> markup</content>
      </fragment>
    </document>
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from urllib.parse import quote
from xml.sax.saxutils import escape, quoteattr

from ..rdf import Graph, RdfTerm, Triple, make_iri, parse_ntriples, serialize_ntriples
from . import vocab

FRAGMENT_TYPES = ("tenor", "tatbestand", "gruende", "leitsatz")
TAXONOMY_SEED = 2019

KEYWORDS = (
    "Kündigung", "fristlose Kündigung", "ordentliche Kündigung", "Mietvertrag",
    "Mietminderung", "Eigenbedarf", "Räumungsklage", "Schadensersatz", "Arbeitsvertrag",
    "Abmahnung", "Betriebsrat", "Urlaubsanspruch", "Sozialauswahl", "Kündigungsschutz",
    "Gewährleistung", "Kaufvertrag", "Verjährung", "Widerruf", "Insolvenz",
    "Unterhalt", "Sorgerecht", "Erbschaft", "Pflichtteil", "Testament", "Bürgschaft",
    "Darlehen", "Verzugszinsen", "Mangel", "Nacherfüllung", "Rücktritt", "Minderung",
    "Werkvertrag", "Abnahme", "Vergütung", "Betriebskosten", "Kaution", "Modernisierung",
    "Schönheitsreparaturen", "Untervermietung", "Zahlungsverzug", "Lohnfortzahlung",
    "Mutterschutz", "Elternzeit", "Befristung", "Aufhebungsvertrag", "Abfindung",
    "Wettbewerbsverbot", "Datenschutz", "Haftung", "Müller & Söhne",
)

WORDS = (
    "der", "die", "das", "Kläger", "Beklagte", "Gericht", "Urteil", "Berufung", "Revision",
    "Anspruch", "gemäß", "Vertrag", "Partei", "Frist", "Kündigung", "Miete", "Zahlung",
    "wurde", "ist", "nicht", "auch", "wegen", "Sachverhalt", "Landgericht", "Amtsgericht",
    "hat", "zurückgewiesen", "stattgegeben", "Kosten", "Verfahren", "trägt", "Beweis",
    "Zeuge", "Schriftsatz", "vom", "bis", "im", "Übrigen", "abgewiesen", "vorläufig",
    "vollstreckbar", "Sicherheitsleistung", "Höhe", "Euro", "zulässig", "begründet",
)

STATUTES = ("BGB", "ZPO", "KSchG", "HGB", "StGB", "BetrVG", "GG", "InsO")

_WS_RUNS = (" ", " ", " ", " ", "  ", "\n    ", "\t", " \n ", "\n\n  ")


@dataclass
class Fragment:
    id: str
    type_code: str
    content: str
    keywords: list[str] = field(default_factory=list)
    concepts: list[str] = field(default_factory=list)


@dataclass
class LegalDocument:
    id: str
    keywords: list[str] = field(default_factory=list)
    concepts: list[str] = field(default_factory=list)
    fragments: list[Fragment] = field(default_factory=list)


class CycleError(ValueError):
    pass


@dataclass
class TaxonomyFixture:
    concepts: list[str] = field(default_factory=list)
    narrower_edges: list[tuple[str, str]] = field(default_factory=list)

    def narrower(self, concept: str) -> list[str]:
        return [n for b, n in self.narrower_edges if b == concept]


# -- taxonomy ----------------------------------------------------------------

def generate_taxonomy(seed: int = TAXONOMY_SEED, levels: tuple[int, ...] = (5, 15, 30),
                      extra_edges: int = 15) -> TaxonomyFixture:
    """Layered concept DAG under the wkd-law namespace.

    Every non-root concept gets one parent in the level above, then
    ``extra_edges`` more cross links between adjacent levels are added.
    The defaults give 50 concepts and 60 narrower edges; concept 10046 is
    always a root.
    """
    rng = random.Random(seed)
    total = sum(levels)
    numbers = rng.sample([n for n in range(10000, 10100) if n != 10046], total - 1)
    numbers.insert(0, 10046)
    iris = [vocab.WKD_LAW + str(n) for n in numbers]
    layers, start = [], 0
    for size in levels:
        layers.append(iris[start:start + size])
        start += size

    edges: set[tuple[str, str]] = set()
    for upper, lower in zip(layers, layers[1:]):
        for child in lower:
            edges.add((rng.choice(upper), child))
    candidates = sorted({(b, n) for upper, lower in zip(layers, layers[1:])
                         for b in upper for n in lower} - edges)
    edges.update(rng.sample(candidates, min(extra_edges, len(candidates))))
    return TaxonomyFixture(sorted(iris), sorted(edges))


def bundled_taxonomy() -> TaxonomyFixture:
    return generate_taxonomy(TAXONOMY_SEED)


def taxonomy_to_ntriples(taxonomy: TaxonomyFixture) -> str:
    g = Graph()
    for c in taxonomy.concepts:
        g.add(Triple(make_iri(c), vocab.TYPE, vocab.CONCEPT))
    for broader, narrower in taxonomy.narrower_edges:
        g.add(Triple(make_iri(broader), vocab.NARROWER, make_iri(narrower)))
    return serialize_ntriples(g)


def load_taxonomy(ntriples: str) -> TaxonomyFixture:
    g = parse_ntriples(ntriples)
    concepts = sorted(t.subject.value for t in g.triples(None, vocab.TYPE, vocab.CONCEPT))
    edges = {(t.subject.value, t.object.value) for t in g.triples(None, vocab.NARROWER, None)}
    edges |= {(t.object.value, t.subject.value) for t in g.triples(None, vocab.BROADER, None)}
    fixture = TaxonomyFixture(concepts, sorted(edges))
    _check_acyclic(fixture.narrower_edges)
    return fixture


def _check_acyclic(edges: list[tuple[str, str]]) -> None:
    children: dict[str, list[str]] = {}
    for b, n in edges:
        children.setdefault(b, []).append(n)
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    for start in children:
        if state.get(start):
            continue
        stack = [(start, iter(children.get(start, ())))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise CycleError(f"narrower cycle through {nxt}")
            elif not state.get(nxt):
                state[nxt] = 1
                stack.append((nxt, iter(children.get(nxt, ()))))


# -- documents ---------------------------------------------------------------

def _messy(rng: random.Random, text: str) -> str:
    """Re-join ``text`` with irregular whitespace runs and padding."""
    words = text.split(" ")
    out = rng.choice(("", "", " ", "  ", "\n  "))
    out += rng.choice(_WS_RUNS).join(words) if len(words) > 1 else words[0]
    out += rng.choice(("", "", " ", "\n", " \t"))
    return out


def _sentence(rng: random.Random, lo: int, hi: int) -> str:
    words = [rng.choice(WORDS) for _ in range(rng.randint(lo, hi))]
    text = words[0]
    for w in words[1:]:
        text += rng.choice(_WS_RUNS) + w
    return text


def _statute(rng: random.Random) -> str:
    return f"§ {rng.randint(1, 999)} {rng.choice(STATUTES)}"


def _content(rng: random.Random) -> str:
    target = rng.randint(50, 2000)
    pieces: list[str] = []
    length = 0
    while True:
        roll = rng.random()
        if roll < 0.55:
            text = _sentence(rng, 2, 12) + rng.choice((" ", ". ", ", ", "\n   "))
            markup = escape(text)
        elif roll < 0.75:
            text = _sentence(rng, 1, 4)
            markup = f"<em>{escape(text)}</em>"
        elif roll < 0.9:
            text = _statute(rng)
            markup = f"<ref target={quoteattr(text)}>{escape(text)}</ref>"
        elif roll < 0.97:
            head, ref, tail = _sentence(rng, 1, 3), _statute(rng), _sentence(rng, 1, 3)
            text = f"{head} {ref} {tail}"
            markup = (f"<em>{escape(head)} <ref target={quoteattr(ref)}>{escape(ref)}</ref> "
                      f"{escape(tail)}</em>")
        else:
            text = " Müller & Söhne GmbH "
            markup = escape(text)
        if roll >= 0.55 and roll < 0.97:
            gap = rng.choice(_WS_RUNS)
            text, markup = gap + text, gap + markup
        if length >= 50 and length + len(text) > target:
            break
        pieces.append(markup)
        length += len(text)
    return "".join(pieces)


def _document(seed: int, index: int, concepts: list[str]) -> LegalDocument:
    rng = random.Random(f"{seed}:{index}")
    doc = LegalDocument(id=f"{index + 1:06d}")
    doc.keywords = [_messy(rng, k) for k in rng.sample(KEYWORDS, rng.randint(1, 8))]
    doc.concepts = rng.sample(concepts, min(len(concepts), rng.randint(0, 5)))
    for j in range(rng.randint(1, 12)):
        frag = Fragment(id=f"f{j + 1}", type_code=rng.choice(FRAGMENT_TYPES),
                        content=_content(rng))
        frag.keywords = [_messy(rng, k) for k in rng.sample(KEYWORDS, rng.randint(0, 3))]
        frag.concepts = rng.sample(concepts, min(len(concepts), rng.randint(0, 2)))
        doc.fragments.append(frag)
    return doc


def generate_corpus(seed: int, n_docs: int,
                    taxonomy: TaxonomyFixture | None = None) -> list[LegalDocument]:
    """Deterministic corpus; document ``i`` depends only on ``seed`` and ``i``."""
    if n_docs < 0:
        raise ValueError("n_docs must be >= 0")
    concepts = list((taxonomy or bundled_taxonomy()).concepts)
    return [_document(seed, i, concepts) for i in range(n_docs)]


def serialize_document(d: LegalDocument) -> str:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', f"<document id={quoteattr(d.id)}>",
             "  <metadata>"]
    lines += [f"    <keyword>{escape(k)}</keyword>" for k in d.keywords]
    lines += [f"    <concept uri={quoteattr(c)}/>" for c in d.concepts]
    lines.append("  </metadata>")
    for f in d.fragments:
        lines.append(f"  <fragment id={quoteattr(f.id)} type={quoteattr(f.type_code)}>")
        lines += [f"    <keyword>{escape(k)}</keyword>" for k in f.keywords]
        lines += [f"    <concept uri={quoteattr(c)}/>" for c in f.concepts]
        lines.append(f"    <content>{f.content}</content>")
        lines.append("  </fragment>")
    lines.append("</document>")
    return "\n".join(lines) + "\n"


def document_iri(doc_id: str) -> RdfTerm:
    return make_iri(vocab.DOC_BASE + quote(doc_id, safe=""))
