"""RDF term, triple and graph model with deterministic Turtle output.

The model is deliberately blank-node free: subjects and predicates are
always IRIs, objects are IRIs or literals. Anything that would normally
become a blank node is expected to arrive here already skolemized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"


@dataclass(frozen=True)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self) -> None:
        v = self.value
        if not v:
            raise ValueError("IRI must be non-empty")
        if any(c.isspace() for c in v) or "<" in v or ">" in v:
            raise ValueError(f"IRI contains forbidden characters: {v!r}")
        colon = v.find(":")
        slash = v.find("/")
        if colon < 1 or (slash != -1 and slash < colon):
            raise ValueError(f"IRI is not absolute (missing scheme): {v!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """A literal value; carries at most one of language tag or datatype.

    A language-tagged literal implicitly has datatype rdf:langString, so
    the datatype field stays empty in that case.
    """

    lexical: str
    language: Optional[str] = None
    datatype: Optional[Iri] = None

    def __post_init__(self) -> None:
        if self.language is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both language tag and datatype")


Term = Union[Iri, Literal]

RDF_TYPE = Iri(RDF_NS + "type")
OWL_SAME_AS = Iri(OWL_NS + "sameAs")
XSD_INTEGER = Iri(XSD_NS + "integer")
XSD_DECIMAL = Iri(XSD_NS + "decimal")


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term


class RdfGraph:
    """A set of triples plus a base IRI and ordered prefix bindings.

    Triples have set semantics; prefixes are an insertion-ordered map in
    which rebinding a label replaces its namespace.
    """

    def __init__(self, base: Optional[Iri] = None):
        self.base = base
        self._prefixes: dict[str, Iri] = {}
        self._triples: set[Triple] = set()

    @property
    def prefixes(self) -> dict[str, Iri]:
        return dict(self._prefixes)

    @property
    def triples(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def bind(self, label: str, namespace: Iri) -> None:
        self._prefixes[label] = namespace

    def add(self, triple: Triple) -> "RdfGraph":
        self._triples.add(triple)
        return self

    def update(self, triples: Iterable[Triple]) -> "RdfGraph":
        self._triples.update(triples)
        return self

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __repr__(self) -> str:
        return f"RdfGraph(base={self.base!r}, triples={len(self._triples)})"


def graph_equal(a: RdfGraph, b: RdfGraph) -> bool:
    """Triple-set equality; base and prefixes do not participate."""
    return a.triples == b.triples


# Characters that always need escaping inside a quoted Turtle string.
_STRING_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}

# Anything line-break-ish or otherwise invisible gets a \uXXXX escape so a
# statement always occupies exactly one physical line.
_CONTROLS = {c for c in map(chr, range(0x20)) if c not in _STRING_ESCAPES}
_CONTROLS |= {"\x7f", "\x85", " ", " "}

_LOCAL_HEAD = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_")
_LOCAL_TAIL = _LOCAL_HEAD | {"-", "."}


def _escape_string(text: str) -> str:
    out = []
    for c in text:
        if c in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[c])
        elif c in _CONTROLS:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def _is_safe_local(local: str) -> bool:
    # Conservative subset of Turtle's PN_LOCAL: enough for the prefixes this
    # system compacts, anything fancier falls back to the absolute form.
    if local == "":
        return True
    if local[0] not in _LOCAL_HEAD or local[-1] == ".":
        return False
    return all(c in _LOCAL_TAIL for c in local)


class _TurtleWriter:
    def __init__(self, graph: RdfGraph):
        self.base = graph.base
        # Binding order decides tie-breaks, so keep it.
        self.prefixes = list(graph.prefixes.items())

    def render_iri(self, iri: Iri) -> str:
        value = iri.value
        # Relativize only when the base is a strict prefix and the remainder
        # has no fragment; that keeps relative references unambiguous.
        if self.base is not None:
            base = self.base.value
            if value.startswith(base) and value != base:
                rest = value[len(base):]
                if "#" not in rest:
                    return f"<{rest}>"
        # Longest matching namespace wins; ties go to the earliest binding.
        best_label, best_local, best_len = None, "", -1
        for label, ns in self.prefixes:
            if value.startswith(ns.value) and len(ns.value) > best_len:
                local = value[len(ns.value):]
                if _is_safe_local(local):
                    best_label, best_local, best_len = label, local, len(ns.value)
        if best_label is not None:
            return f"{best_label}:{best_local}"
        return f"<{value}>"

    def render_predicate(self, iri: Iri) -> str:
        if iri == RDF_TYPE:
            return "a"
        return self.render_iri(iri)

    def render_object(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.render_iri(term)
        rendered = f'"{_escape_string(term.lexical)}"'
        if term.language is not None:
            return f"{rendered}@{term.language}"
        if term.datatype is not None:
            return f"{rendered}^^{self.render_iri(term.datatype)}"
        return rendered


def serialize_turtle(graph: RdfGraph) -> str:
    """Serialize a graph to canonical Turtle text.

    Layout: optional ``@base`` line, ``@prefix`` lines in binding order, a
    blank line, then one block per subject. Subjects sort by absolute IRI;
    within a subject, rdf:type comes first (written ``a``) and the rest
    sorts by predicate IRI then rendered object, so equal graphs always
    produce byte-identical text.
    """
    writer = _TurtleWriter(graph)
    lines: list[str] = []
    if graph.base is not None:
        lines.append(f"@base <{graph.base.value}> .")
    for label, ns in graph.prefixes.items():
        lines.append(f"@prefix {label}: <{ns.value}> .")

    triples = graph.triples
    if triples:
        if lines:
            lines.append("")
        by_subject: dict[Iri, list[Triple]] = {}
        for t in triples:
            by_subject.setdefault(t.subject, []).append(t)
        first_block = True
        for subject in sorted(by_subject, key=lambda s: s.value):
            rows = sorted(
                by_subject[subject],
                key=lambda t: (
                    0 if t.predicate == RDF_TYPE else 1,
                    t.predicate.value,
                    writer.render_object(t.object),
                ),
            )
            if not first_block:
                lines.append("")
            first_block = False
            subject_text = writer.render_iri(subject)
            parts = []
            for i, t in enumerate(rows):
                pred = writer.render_predicate(t.predicate)
                obj = writer.render_object(t.object)
                if i == 0:
                    parts.append(f"{subject_text} {pred} {obj}")
                else:
                    parts.append(f"    {pred} {obj}")
            lines.append(" ;\n".join(parts) + " .")
    return "\n".join(lines) + "\n"
