"""IRIs of the vocabularies used by the legal document model."""
from __future__ import annotations

from ..rdf import RDF_TYPE, make_iri

PCICORE = "http://onto.wolterskluwer.com/pci/core/"
DCTERMS = "http://purl.org/dc/terms/"
SKOS = "http://www.w3.org/2004/02/skos/core#"
FRBR = "http://purl.org/vocab/frbr/core#"
WKD_LAW = "http://taxonomy.wolterskluwer.de/law/"

DATA = "http://data.example/"
DOC_BASE = DATA + "doc/"
FRAGMENT_TYPE_BASE = DATA + "fragment-type/"

TYPE = make_iri(RDF_TYPE)

FRAGMENT = make_iri(PCICORE + "Fragment")
FRAGMENT_TYPE = make_iri(PCICORE + "FragmentType")
HAS_CONTENT = make_iri(PCICORE + "hasContent")
IS_FRAGMENT_OF = make_iri(PCICORE + "isFragmentOf")
HAS_FRAGMENT = make_iri(PCICORE + "hasFragment")
HAS_KEYWORD = make_iri(PCICORE + "hasKeyword")

SUBJECT = make_iri(DCTERMS + "subject")
# links a fragment to its pcicore:FragmentType resource
DC_TYPE = make_iri(DCTERMS + "type")

CONCEPT = make_iri(SKOS + "Concept")
NARROWER = make_iri(SKOS + "narrower")
BROADER = make_iri(SKOS + "broader")

MANIFESTATION = make_iri(FRBR + "Manifestation")

PREFIXES = {
    "pcicore": PCICORE,
    "dcterms": DCTERMS,
    "skos": SKOS,
    "frbr": FRBR,
    "wkd-law": WKD_LAW,
}
