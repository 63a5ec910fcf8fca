from pathlib import Path

import pytest

from shexgen.rdf import Iri, Literal, RDF_TYPE, Triple
from shexgen.store import MemoryStore, SqliteStore

DATA = Path(__file__).parent / "data"

FOAF = "http://xmlns.com/foaf/0.1/"
EX = "http://example.com/"
FOKUS = "http://fokus.fraunhofer.de/"

ROMAN = Iri(FOKUS + "Roman")
BOB = Iri(FOKUS + "Bob")
FOAF_PERSON = Iri(FOAF + "Person")
FOAF_NAME = Iri(FOAF + "name")
FOAF_KNOWS = Iri(FOAF + "knows")


def load(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture
def person_simple() -> str:
    return load("person_simple.shex")


@pytest.fixture
def person_exvar() -> str:
    return load("person_exvar.shex")


@pytest.fixture
def person_nested() -> str:
    return load("person_nested.shex")


@pytest.fixture
def production() -> str:
    return load("production.shex")


@pytest.fixture
def truck_transport() -> str:
    return load("truck_transport.shex")


def person_simple_triples() -> set[Triple]:
    """Hand-built expected graph for the two-constraint person template."""
    return {
        Triple(ROMAN, RDF_TYPE, FOAF_PERSON),
        Triple(ROMAN, FOAF_NAME, Literal("Roman Laas")),
    }


@pytest.fixture(params=["memory", "sqlite"])
def store(request, tmp_path):
    if request.param == "memory":
        s = MemoryStore()
    else:
        s = SqliteStore(str(tmp_path / "store.db"))
    yield s
    s.close()
