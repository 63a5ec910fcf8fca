import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shexgen.rdf import (
    Iri,
    Literal,
    RDF_TYPE,
    RdfGraph,
    Triple,
    graph_equal,
    serialize_turtle,
)

from conftest import FOAF_NAME, FOAF_PERSON, FOKUS, ROMAN, person_simple_triples


def build_graph(triples, base=None, prefixes=()):
    g = RdfGraph(base=base)
    for label, ns in prefixes:
        g.bind(label, Iri(ns))
    for t in triples:
        g.add(t)
    return g


# -- term validation


def test_iri_rejects_relative_and_malformed():
    with pytest.raises(ValueError):
        Iri("")
    with pytest.raises(ValueError):
        Iri("Roman")
    with pytest.raises(ValueError):
        Iri("/path/only:colon")
    with pytest.raises(ValueError):
        Iri("http://x/ space")
    with pytest.raises(ValueError):
        Iri("http://x/<y>")


def test_iri_accepts_absolute():
    assert Iri("http://example.com/a#b").value == "http://example.com/a#b"
    assert Iri("urn:uuid:123").value == "urn:uuid:123"


def test_literal_rejects_language_plus_datatype():
    with pytest.raises(ValueError):
        Literal("x", language="de", datatype=Iri("http://www.w3.org/2001/XMLSchema#string"))
    assert Literal("x", language="de").datatype is None


# -- graph semantics


def test_add_is_idempotent():
    t = Triple(ROMAN, RDF_TYPE, FOAF_PERSON)
    g = build_graph([t, t, t])
    assert len(g) == 1


def test_insertion_order_does_not_matter():
    triples = sorted(person_simple_triples(), key=repr)
    forward = build_graph(triples)
    backward = build_graph(reversed(triples))
    assert graph_equal(forward, backward)
    # Canonical serialization is the independent witness for equality.
    assert serialize_turtle(forward) == serialize_turtle(backward)


def test_graph_equal_ignores_base_and_prefixes():
    triples = person_simple_triples()
    a = build_graph(triples, base=Iri(FOKUS))
    b = build_graph(triples, prefixes=[("foaf", "http://xmlns.com/foaf/0.1/")])
    assert graph_equal(a, a)
    assert graph_equal(a, b)


def test_graph_equal_detects_missing_triple():
    triples = list(person_simple_triples())
    assert not graph_equal(build_graph(triples), build_graph(triples[:-1]))


def test_prefix_rebinding_replaces():
    g = RdfGraph()
    g.bind("ex", Iri("http://example.com/"))
    g.bind("ex", Iri("http://example.org/"))
    assert g.prefixes == {"ex": Iri("http://example.org/")}


# -- serialization fixtures


def test_serialize_person_graph():
    g = build_graph(
        person_simple_triples(),
        base=Iri(FOKUS),
        prefixes=[
            ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
            ("foaf", "http://xmlns.com/foaf/0.1/"),
        ],
    )
    text = serialize_turtle(g)
    assert "<Roman> a foaf:Person ;" in text
    assert 'foaf:name "Roman Laas" .' in text


def test_serialize_base_only():
    g = RdfGraph(base=Iri(FOKUS))
    assert serialize_turtle(g) == "@base <http://fokus.fraunhofer.de/> .\n"


def test_serialize_language_tag():
    g = build_graph([Triple(ROMAN, FOAF_NAME, Literal("Roman Laas", language="de"))])
    assert '"Roman Laas"@de' in serialize_turtle(g)


def test_serialize_datatype_literal():
    dt = Iri("http://www.w3.org/2001/XMLSchema#integer")
    g = build_graph([Triple(ROMAN, FOAF_NAME, Literal("30", datatype=dt))])
    g.bind("xsd", Iri("http://www.w3.org/2001/XMLSchema#"))
    assert '"30"^^xsd:integer' in serialize_turtle(g)


def test_serialize_escapes_quotes_and_newlines():
    g = build_graph([Triple(ROMAN, FOAF_NAME, Literal('say "hi"\nplease\\'))])
    text = serialize_turtle(g)
    assert '"say \\"hi\\"\\nplease\\\\"' in text


def test_serialize_escapes_control_characters():
    g = build_graph([Triple(ROMAN, FOAF_NAME, Literal("a\x1eb c"))])
    text = serialize_turtle(g)
    assert '"a\\u001Eb\\u2028c"' in text
    # One statement stays one physical line under any line-split convention.
    assert len(text.splitlines()) == 1


def test_relativization_requires_strict_prefix_without_fragment():
    base = Iri(FOKUS)
    inside = Iri(FOKUS + "Roman")
    fragmented = Iri(FOKUS + "x#y")
    outside = Iri("http://elsewhere.org/Roman")
    g = build_graph(
        [
            Triple(inside, FOAF_NAME, Literal("a")),
            Triple(fragmented, FOAF_NAME, Literal("b")),
            Triple(outside, FOAF_NAME, Literal("c")),
        ],
        base=base,
    )
    text = serialize_turtle(g)
    assert "<Roman>" in text
    assert f"<{FOKUS}x#y>" in text
    assert "<http://elsewhere.org/Roman>" in text


def test_prefix_compaction_prefers_longest_namespace():
    g = build_graph([Triple(ROMAN, Iri("http://example.com/deep/p"), Literal("x"))])
    g.bind("ex", Iri("http://example.com/"))
    g.bind("deep", Iri("http://example.com/deep/"))
    assert "deep:p" in serialize_turtle(g)


def test_compaction_falls_back_to_absolute_for_unsafe_local():
    g = build_graph([Triple(ROMAN, Iri("http://example.com/a/b"), Literal("x"))])
    g.bind("ex", Iri("http://example.com/"))
    assert "<http://example.com/a/b>" in serialize_turtle(g)


def test_rdf_type_renders_as_a_even_without_rdf_prefix():
    g = build_graph([Triple(ROMAN, RDF_TYPE, FOAF_PERSON)])
    text = serialize_turtle(g)
    assert " a " in text
    assert "rdf-syntax-ns#type" not in text


# -- properties

_segments = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=8)
_iris = st.builds(
    lambda host, seg, tail: Iri(f"http://{host}/{seg}{tail}"),
    st.sampled_from(["example.com", "fokus.fraunhofer.de", "xmlns.com/foaf/0.1"]),
    _segments,
    st.sampled_from(["", "#frag", "/sub"]),
)
_lexicals = st.text(max_size=30).filter(lambda s: "_:" not in s)
_literals = st.one_of(
    st.builds(Literal, _lexicals),
    st.builds(lambda lex, lang: Literal(lex, language=lang), _lexicals, st.sampled_from(["en", "de", "fr-CA"])),
    st.builds(lambda lex, dt: Literal(lex, datatype=dt), _lexicals, _iris),
)
_terms = st.one_of(_iris, _literals)
_triples = st.builds(Triple, _iris, st.one_of(_iris, st.just(RDF_TYPE)), _terms)
_triple_lists = st.lists(_triples, max_size=25)


@given(_triple_lists, st.randoms())
@settings(max_examples=80, deadline=None)
def test_property_insertion_order_and_duplicates_are_invisible(triples, rnd):
    shuffled = list(triples)
    rnd.shuffle(shuffled)
    a = build_graph(triples + triples[:3])
    b = build_graph(shuffled)
    assert graph_equal(a, b)
    assert serialize_turtle(a) == serialize_turtle(b)


@given(_triple_lists)
@settings(max_examples=80, deadline=None)
def test_property_no_blank_node_syntax(triples):
    text = serialize_turtle(build_graph(triples, base=Iri(FOKUS)))
    assert "_:" not in text


@given(_triple_lists)
@settings(max_examples=80, deadline=None)
def test_property_one_terminator_per_subject(triples):
    g = build_graph(triples, base=Iri(FOKUS))
    text = serialize_turtle(g)
    terminators = sum(
        1 for line in text.splitlines() if line.endswith(" .") and not line.startswith("@")
    )
    assert terminators == len({t.subject for t in g})


@given(_triple_lists)
@settings(max_examples=40, deadline=None)
def test_property_serialization_is_pure(triples):
    g = build_graph(triples)
    assert serialize_turtle(g) == serialize_turtle(g)
