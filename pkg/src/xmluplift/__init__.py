"""Declarative uplift of XML documents to RDF with an RML-style mapping engine."""
from .engine import (EngineConfig, ExecutionWarning, InvalidMapping, MappingExecutionError, Plan,
                     execute_mapping, generate_terms, map_document)
from .functions import FunctionRegistry
from .mapping import MappingDocument, parse_mapping, to_turtle, validate_mapping
from .rdf import (Graph, RdfTerm, Triple, graph_equal, make_bnode, make_iri, make_literal,
                  parse_ntriples, serialize_ntriples)
from .xml import XmlNode, compile_path, eval_xpath, parse_xml

__version__ = "0.1.0"

__all__ = [
    "EngineConfig", "ExecutionWarning", "FunctionRegistry", "Graph", "InvalidMapping",
    "MappingDocument", "MappingExecutionError", "Plan", "RdfTerm", "Triple", "XmlNode",
    "compile_path", "eval_xpath", "execute_mapping", "generate_terms", "graph_equal",
    "make_bnode", "make_iri", "make_literal", "map_document", "parse_mapping",
    "parse_ntriples", "parse_xml", "serialize_ntriples", "to_turtle", "validate_mapping",
]
