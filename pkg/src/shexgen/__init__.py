"""Supply-chain modeling with ShEx templates: parse templates, skolemize
their existential variables, wire instances together and export the
resulting RDF graph as Turtle.
"""

from .engine import (
    GenerationOptions,
    InstanceMaterialization,
    SkolemGenerator,
    assemble_chain,
    generate_skolem_iri,
    materialize_instance,
    process_template,
)
from .rdf import Iri, Literal, RdfGraph, Triple, graph_equal, serialize_turtle
from .shexc import ShexSchema, collect_exvars, parse_schema, resolve_term
from .store import MemoryStore, SqliteStore, Store

__all__ = [
    "GenerationOptions",
    "InstanceMaterialization",
    "Iri",
    "Literal",
    "MemoryStore",
    "RdfGraph",
    "ShexSchema",
    "SkolemGenerator",
    "SqliteStore",
    "Store",
    "Triple",
    "assemble_chain",
    "collect_exvars",
    "generate_skolem_iri",
    "graph_equal",
    "materialize_instance",
    "parse_schema",
    "process_template",
    "resolve_term",
    "serialize_turtle",
]
