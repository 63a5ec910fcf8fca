"""Turns parsed templates into RDF graphs.

Each existential variable and each anonymous nested shape receives a
fresh skolem IRI (``<base>.well-known/genid/<uuid4>``); generation then
substitutes those IRIs wherever the variable or shape occurs, and whole
chains are assembled by linking wired skolems with owl:sameAs.
"""

from __future__ import annotations

import random
import re
import uuid
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .rdf import Iri, OWL_NS, OWL_SAME_AS, RdfGraph, Triple
from .shexc import (
    Anonymous,
    Direction,
    EXVAR_NS,
    ExVarRef,
    Named,
    NestedShape,
    ShapeDecl,
    ShapeRef,
    ShexSchema,
    ValueSet,
    anonymous_shapes,
    collect_exvars,
    flatten_constraints,
    is_exvar,
)

DEFAULT_BASE = Iri("http://fokus.fraunhofer.de/")

# Synthetic map keys for anonymous shapes; never appears in any output graph.
ANON_KEY_NS = "http://internal/anon/"

_UUID4 = r"[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}"


class EngineError(Exception):
    pass


class EmptySchemaError(EngineError):
    pass


class MissingSkolemError(EngineError):
    pass


class UnknownEndpointError(EngineError):
    pass


@dataclass(frozen=True)
class GenerationOptions:
    base: Iri = DEFAULT_BASE
    merge_mode: bool = False

    def __post_init__(self) -> None:
        if not self.base.value.endswith("/"):
            raise ValueError(f"generation base must end with '/': {self.base}")


def skolem_iri_pattern(base: Iri) -> re.Pattern[str]:
    """Regex every skolem IRI minted for the given base must match."""
    return re.compile("^" + re.escape(base.value) + r"\.well-known/genid/" + _UUID4 + "$")


class SkolemGenerator:
    """Mints skolem IRIs; pass a seeded ``random.Random`` for reproducible runs."""

    def __init__(self, rng: Optional[random.Random] = None):
        self._rng = rng

    def new_iri(self, base: Iri) -> Iri:
        if self._rng is not None:
            fresh = uuid.UUID(bytes=self._rng.randbytes(16), version=4)
        else:
            fresh = uuid.uuid4()
        return Iri(f"{base.value}.well-known/genid/{fresh}")


def generate_skolem_iri(base: Iri) -> Iri:
    """A fresh, globally unique skolem IRI under the given base."""
    return SkolemGenerator().new_iri(base)


def anon_key(ordinal: int) -> Iri:
    return Iri(f"{ANON_KEY_NS}{ordinal}")


@dataclass(frozen=True)
class IoBinding:
    direction: Direction
    iri: Iri
    skolem: Iri


@dataclass
class InstanceMaterialization:
    label: str
    raw_shex: str
    io_vars: tuple[IoBinding, ...]
    skolem_map: dict[Iri, Iri] = field(default_factory=dict)


def materialize_instance(
    schema: ShexSchema,
    opts: GenerationOptions,
    label: str,
    generator: Optional[SkolemGenerator] = None,
) -> InstanceMaterialization:
    """Assign skolem IRIs for one template instance.

    Every distinct exVar gets exactly one skolem IRI, so a variable listed
    as both input and output exposes the same IRI on both sides. Anonymous
    shapes get one skolem each, keyed by their ordinal.
    """
    if not schema.shapes:
        raise EmptySchemaError("template defines no shapes")
    gen = generator or SkolemGenerator()
    skolem_map: dict[Iri, Iri] = {}
    for exvar in collect_exvars(schema):
        skolem_map[exvar] = gen.new_iri(opts.base)
    for shape in anonymous_shapes(schema):
        assert isinstance(shape.label, Anonymous)
        skolem_map[anon_key(shape.label.ordinal)] = gen.new_iri(opts.base)
    first = schema.shapes[0]
    io_vars = tuple(
        IoBinding(direction, iri, skolem_map[iri])
        for direction, entries in (
            (Direction.IN, first.inputs),
            (Direction.OUT, first.outputs),
        )
        for iri in entries
    )
    return InstanceMaterialization(
        label=label, raw_shex=schema.source, io_vars=io_vars, skolem_map=skolem_map
    )


def process_template(
    schema: ShexSchema, skolem_map: Mapping[Iri, Iri], opts: GenerationOptions
) -> RdfGraph:
    """Generate the RDF graph described by one template.

    Shape labels become subjects (skolemized when they are exVars or
    anonymous), value-set members become objects, nested shapes link to
    their skolem and recurse. Inverse constraints, node kinds, datatypes,
    facets and {0} cardinalities contribute nothing.
    """
    graph = RdfGraph(base=opts.base)
    for label, ns in schema.prefixes.items():
        if not ns.value.startswith(EXVAR_NS):
            graph.bind(label, ns)

    def lookup(key: Iri) -> Iri:
        try:
            return skolem_map[key]
        except KeyError:
            raise MissingSkolemError(f"no skolem IRI assigned for <{key}>") from None

    def emit(shape: ShapeDecl, subject: Iri) -> None:
        for constraint in flatten_constraints(schema, shape.body):
            if constraint.inverse:
                continue
            card = constraint.cardinality
            if card.min == 0 and card.max == 0:
                continue
            value = constraint.value
            if isinstance(value, ValueSet):
                for member in value.members:
                    obj = lookup(member.iri) if isinstance(member, ExVarRef) else member
                    graph.add(Triple(subject, constraint.predicate, obj))
            elif isinstance(value, NestedShape):
                nested = value.shape
                assert isinstance(nested.label, Anonymous)
                nested_subject = lookup(anon_key(nested.label.ordinal))
                graph.add(Triple(subject, constraint.predicate, nested_subject))
                emit(nested, nested_subject)
            elif isinstance(value, ShapeRef):
                target = value.target
                obj = lookup(target) if is_exvar(target) else target
                graph.add(Triple(subject, constraint.predicate, obj))
            # NodeKind / Datatype / Facets: too abstract to generate from.

    for shape in schema.shapes:
        assert isinstance(shape.label, Named)
        label_iri = shape.label.iri
        subject = lookup(label_iri) if is_exvar(label_iri) else label_iri
        emit(shape, subject)
    return graph


def assemble_chain(
    instances: Sequence[tuple[ShexSchema, Mapping[Iri, Iri]]],
    edges: Sequence[tuple[Iri, Iri]],
    opts: GenerationOptions,
) -> RdfGraph:
    """Union the instance graphs and wire edges.

    With merge_mode off, each edge contributes one
    ``(source, owl:sameAs, target)`` triple. With merge_mode on, no sameAs
    triples are emitted; instead every occurrence of a target skolem is
    rewritten to its (transitively resolved) source skolem.
    """
    graph = RdfGraph(base=opts.base)
    triples: set[Triple] = set()
    known_skolems: set[Iri] = set()
    for schema, skolem_map in instances:
        piece = process_template(schema, skolem_map, opts)
        for label, ns in piece.prefixes.items():
            graph.bind(label, ns)
        triples.update(piece.triples)
        known_skolems.update(skolem_map.values())

    for source, target in edges:
        for endpoint in (source, target):
            if endpoint not in known_skolems:
                raise UnknownEndpointError(
                    f"edge endpoint <{endpoint}> belongs to none of the instances"
                )

    if opts.merge_mode:
        # Union-find with the source side as representative; applied
        # transitively so chains of edges collapse onto the first source.
        parent: dict[Iri, Iri] = {}

        def find(iri: Iri) -> Iri:
            root = iri
            while root in parent:
                root = parent[root]
            while iri != root:
                step = parent[iri]
                parent[iri] = root
                iri = step
            return root

        for source, target in edges:
            root_source, root_target = find(source), find(target)
            if root_source != root_target:
                parent[root_target] = root_source

        def rewrite(term):
            return find(term) if isinstance(term, Iri) else term

        for t in triples:
            graph.add(Triple(rewrite(t.subject), t.predicate, rewrite(t.object)))
    else:
        graph.update(triples)
        if edges:
            graph.bind("owl", Iri(OWL_NS))
            for source, target in edges:
                graph.add(Triple(source, OWL_SAME_AS, target))
    return graph
