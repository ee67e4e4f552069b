"""Legal document model: vocabulary, reference mapping, corpus and queries."""
from __future__ import annotations

from importlib import resources

from ..mapping import MappingDocument, parse_mapping
from .adhoc import SchemaViolation, adhoc_parse
from .corpus import (FRAGMENT_TYPES, CycleError, Fragment, LegalDocument, TaxonomyFixture,
                     bundled_taxonomy, generate_corpus, generate_taxonomy, load_taxonomy,
                     serialize_document, taxonomy_to_ntriples)
from .query import documents_for_concept, match_pattern

__all__ = [
    "FRAGMENT_TYPES", "CycleError", "Fragment", "LegalDocument", "MappingDocument",
    "SchemaViolation", "TaxonomyFixture", "adhoc_parse", "bundled_taxonomy",
    "documents_for_concept", "generate_corpus", "generate_taxonomy", "load_taxonomy",
    "match_pattern", "reference_mapping", "reference_mapping_text", "serialize_document",
    "taxonomy_to_ntriples",
]


def reference_mapping_text() -> str:
    return resources.files(__name__).joinpath("reference.rml.ttl").read_text(encoding="utf-8")


def reference_mapping() -> MappingDocument:
    return parse_mapping(reference_mapping_text())
