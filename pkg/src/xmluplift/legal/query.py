"""Concept search over graphs built with the legal document model."""
from __future__ import annotations

from ..rdf import Graph, RdfTerm, Triple, make_iri
from . import vocab


def match_pattern(g: Graph, s: RdfTerm | None = None, p: RdfTerm | None = None,
                  o: RdfTerm | None = None) -> list[Triple]:
    """All triples matching the bound positions; None is a wildcard."""
    return list(g.triples(s, p, o))


def _narrower(g: Graph, concepts: set[RdfTerm], transitive: bool) -> set[RdfTerm]:
    found: set[RdfTerm] = set()
    frontier = set(concepts)
    while frontier:
        step = {t.object for c in frontier for t in g.triples(c, vocab.NARROWER, None)}
        step -= found
        found |= step
        frontier = step if transitive else set()
    return found


def documents_for_concept(g: Graph, concept: RdfTerm | str, include_narrower: bool = False,
                          transitive: bool = False) -> set[RdfTerm]:
    """Documents related to ``concept`` directly or through one of their fragments.

    Only documents that have at least one typed fragment pointing at them
    are candidates, as in the published concept query. ``include_narrower``
    adds concepts one ``skos:narrower`` hop below ``concept``; ``transitive``
    follows narrower links all the way down instead.
    """
    if isinstance(concept, str):
        concept = make_iri(concept)
    wanted = {concept}
    if include_narrower:
        wanted |= _narrower(g, {concept}, transitive)

    fragments = {t.subject for t in g.triples(None, vocab.TYPE, vocab.FRAGMENT)}
    pairs = [(t.subject, t.object) for t in g.triples(None, vocab.IS_FRAGMENT_OF, None)
             if t.subject in fragments]
    annotated = {t.subject for t in g.triples(None, vocab.SUBJECT, None) if t.object in wanted}
    return {d for f, d in pairs if f in annotated or d in annotated}
