import pytest
from fastapi.testclient import TestClient

from shexgen.api import create_app
from shexgen.rdf import serialize_turtle
from shexgen.store import MemoryStore

from conftest import load


@pytest.fixture
def backend():
    store = MemoryStore()
    with TestClient(create_app(store)) as client:
        yield client, store


def create_chain(client, label="Chain"):
    response = client.post("/supply-chain", json={"label": label, "description": "demo"})
    assert response.status_code == 201
    return response.json()


def create_template(client, filename, label=None):
    response = client.post(
        "/template",
        json={"label": label or filename, "description": "demo", "raw_shex": load(filename)},
    )
    assert response.status_code == 201
    return response.json()


def instantiate(client, template_id, chain_id):
    response = client.post(
        "/template-instance",
        json={"template_id": template_id, "supply_chain_id": chain_id},
    )
    assert response.status_code == 201
    return response.json()


def io_id(instance, direction, suffix):
    return next(
        io["id"]
        for io in instance["io_variables"]
        if io["direction"] == direction and io["iri"].endswith(suffix)
    )


def wire_demo_chain(client):
    chain = create_chain(client)
    transport = create_template(client, "transport_activity.shex")
    storage = create_template(client, "storage.shex")
    transport_instance = instantiate(client, transport["id"], chain["id"])
    storage_instance = instantiate(client, storage["id"], chain["id"])
    response = client.post(
        "/edge",
        json={
            "supply_chain_id": chain["id"],
            "source_io_id": io_id(transport_instance, "out", "endPoint"),
            "target_io_id": io_id(storage_instance, "in", "location"),
        },
    )
    assert response.status_code == 201
    return chain, response.json()


# -- lifecycle


def test_create_then_list_supply_chain(backend):
    client, _ = backend
    created = create_chain(client, label="My chain")
    listed = client.get("/supply-chain").json()
    assert [c["label"] for c in listed] == ["My chain"]
    assert listed[0]["id"] == created["id"]
    assert listed[0]["template_instances"] == []
    assert listed[0]["edges"] == []


def test_full_lifecycle_graph_roundtrip(backend):
    client, _ = backend
    chain, edge = wire_demo_chain(client)
    response = client.get(f"/supply-chain/{chain['id']}/graph")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/turtle")
    assert "attachment" in response.headers["content-disposition"]
    assert response.text.count("owl:sameAs") == 1

    deleted = client.delete(f"/edge/{edge['id']}")
    assert deleted.status_code == 204
    response = client.get(f"/supply-chain/{chain['id']}/graph")
    assert response.text.count("owl:sameAs") == 0


def test_graph_body_matches_store_graph(backend):
    client, store = backend
    chain, _ = wire_demo_chain(client)
    body = client.get(f"/supply-chain/{chain['id']}/graph").text
    assert body == serialize_turtle(store.chain_graph(chain["id"]))


def test_graph_merge_query_parameter(backend):
    client, _ = backend
    chain, _ = wire_demo_chain(client)
    merged = client.get(f"/supply-chain/{chain['id']}/graph", params={"merge": "true"}).text
    assert "owl:sameAs" not in merged


def test_chain_payload_embeds_instances_and_edges(backend):
    client, _ = backend
    chain, edge = wire_demo_chain(client)
    payload = client.get(f"/supply-chain/{chain['id']}").json()
    assert len(payload["template_instances"]) == 2
    assert [e["id"] for e in payload["edges"]] == [edge["id"]]
    io_ids = {io["id"] for inst in payload["template_instances"] for io in inst["io_variables"]}
    assert edge["source_io_id"] in io_ids
    assert edge["target_io_id"] in io_ids


def test_instance_delete_cascades_edges(backend):
    client, _ = backend
    chain, edge = wire_demo_chain(client)
    payload = client.get(f"/supply-chain/{chain['id']}").json()
    victim = payload["template_instances"][0]["id"]
    assert client.delete(f"/template-instance/{victim}").status_code == 204
    payload = client.get(f"/supply-chain/{chain['id']}").json()
    assert len(payload["template_instances"]) == 1
    assert payload["edges"] == []


def test_template_delete_keeps_chain_instances(backend):
    client, _ = backend
    chain = create_chain(client)
    template = create_template(client, "production.shex")
    instantiate(client, template["id"], chain["id"])
    assert client.delete(f"/template/{template['id']}").status_code == 204
    payload = client.get(f"/supply-chain/{chain['id']}").json()
    assert len(payload["template_instances"]) == 1


def test_template_update_and_warnings(backend):
    client, _ = backend
    template = create_template(client, "production.shex")
    assert template["warnings"] == []
    multi = create_template(client, "person_exvar.shex")
    assert any("2 shapes" in w for w in multi["warnings"])
    updated = client.put(
        f"/template/{template['id']}",
        json={"label": "renamed", "description": "", "raw_shex": load("truck_transport.shex")},
    )
    assert updated.status_code == 200
    assert updated.json()["label"] == "renamed"


def test_supply_chain_update(backend):
    client, _ = backend
    chain = create_chain(client)
    response = client.put(
        f"/supply-chain/{chain['id']}", json={"label": "new", "description": "d"}
    )
    assert response.status_code == 200
    assert client.get(f"/supply-chain/{chain['id']}").json()["label"] == "new"


# -- errors


def test_missing_chain_is_404_with_error_body(backend):
    client, _ = backend
    response = client.get("/supply-chain/999999")
    assert response.status_code == 404
    body = response.json()
    assert body["error"] == "not_found"
    assert "message" in body


def test_unparseable_template_is_422(backend):
    client, _ = backend
    response = client.post(
        "/template", json={"label": "x", "description": "", "raw_shex": "IMPORT <Nope>"}
    )
    assert response.status_code == 422
    assert response.json()["error"] == "validation_error"


def test_missing_field_is_422_with_details(backend):
    client, _ = backend
    response = client.post("/supply-chain", json={"label": "only"})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "validation_error"
    assert any("description" in d["field"] for d in body["details"])


def test_malformed_json_is_400(backend):
    client, _ = backend
    response = client.post(
        "/supply-chain", content=b"{not json", headers={"content-type": "application/json"}
    )
    assert response.status_code == 400
    assert response.json()["error"] == "bad_request"


def test_duplicate_edge_is_409(backend):
    client, _ = backend
    chain, edge = wire_demo_chain(client)
    response = client.post(
        "/edge",
        json={
            "supply_chain_id": chain["id"],
            "source_io_id": edge["source_io_id"],
            "target_io_id": edge["target_io_id"],
        },
    )
    assert response.status_code == 409
    assert response.json()["error"] == "conflict"


def test_same_direction_edge_is_422(backend):
    client, _ = backend
    chain = create_chain(client)
    template = create_template(client, "production.shex")
    instance = instantiate(client, template["id"], chain["id"])
    outs = [io["id"] for io in instance["io_variables"] if io["direction"] == "out"]
    response = client.post(
        "/edge",
        json={"supply_chain_id": chain["id"], "source_io_id": outs[0], "target_io_id": outs[1]},
    )
    assert response.status_code == 422


def test_cors_headers_are_permissive(backend):
    client, _ = backend
    response = client.get("/supply-chain", headers={"origin": "http://elsewhere.example"})
    assert response.headers.get("access-control-allow-origin") == "*"


# -- route inventory


def test_all_fifteen_routes_respond(backend):
    client, _ = backend
    chain, edge = wire_demo_chain(client)
    template = create_template(client, "person_simple.shex")
    instance = instantiate(client, create_template(client, "production.shex")["id"], chain["id"])
    spare_chain = create_chain(client, "spare")

    calls = [
        ("GET", "/supply-chain", None),
        ("GET", f"/supply-chain/{chain['id']}", None),
        ("POST", "/supply-chain", {"label": "x", "description": "y"}),
        ("PUT", f"/supply-chain/{chain['id']}", {"label": "x", "description": "y"}),
        ("DELETE", f"/supply-chain/{spare_chain['id']}", None),
        ("GET", "/template", None),
        ("GET", f"/template/{template['id']}", None),
        ("POST", "/template", {"label": "t", "description": "", "raw_shex": load("storage.shex")}),
        (
            "PUT",
            f"/template/{template['id']}",
            {"label": "t", "description": "", "raw_shex": load("person_simple.shex")},
        ),
        ("DELETE", f"/template/{template['id']}", None),
        (
            "POST",
            "/template-instance",
            {
                "template_id": create_template(client, "storage.shex", "s2")["id"],
                "supply_chain_id": chain["id"],
            },
        ),
        ("DELETE", f"/template-instance/{instance['id']}", None),
        (
            "POST",
            "/edge",
            None,  # filled below
        ),
        ("DELETE", f"/edge/{edge['id']}", None),
        ("GET", f"/supply-chain/{chain['id']}/graph", None),
    ]

    # A fresh valid edge for the POST /edge entry.
    t1 = instantiate(client, create_template(client, "transport_activity.shex", "t3")["id"], chain["id"])
    s1 = instantiate(client, create_template(client, "storage.shex", "s3")["id"], chain["id"])
    calls[12] = (
        "POST",
        "/edge",
        {
            "supply_chain_id": chain["id"],
            "source_io_id": io_id(t1, "out", "endPoint"),
            "target_io_id": io_id(s1, "in", "location"),
        },
    )

    assert len(calls) == 15
    for method, path, body in calls:
        response = client.request(method, path, json=body)
        assert response.status_code != 404, (method, path, response.text)
        assert response.status_code < 500, (method, path, response.text)
