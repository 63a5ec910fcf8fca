"""HTTP service exposing the store and graph generation.

Fifteen endpoints: full CRUD for supply chains and templates, create and
delete for template instances and edges, and the Turtle export of a
chain's graph.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .rdf import serialize_turtle
from .shexc import parse_schema
from .store import ConflictError, NotFoundError, Store, ValidationError


class SupplyChainPayload(BaseModel):
    label: str
    description: str


class TemplatePayload(BaseModel):
    label: str
    description: str
    raw_shex: str


class InstancePayload(BaseModel):
    template_id: int
    supply_chain_id: int


class EdgePayload(BaseModel):
    supply_chain_id: int
    source_io_id: int
    target_io_id: int


class WireIoVariable(BaseModel):
    id: int
    direction: str
    iri: str
    skolem_iri: str


class WireInstance(BaseModel):
    id: int
    label: str
    io_variables: list[WireIoVariable]


class WireEdge(BaseModel):
    id: int
    source_io_id: int
    target_io_id: int


class WireSupplyChain(BaseModel):
    id: int
    label: str
    description: str
    template_instances: list[WireInstance]
    edges: list[WireEdge]


class WireTemplate(BaseModel):
    id: int
    label: str
    description: str
    raw_shex: str
    warnings: list[str] = []


def _error_body(code: str, message: str, details=None) -> dict:
    body = {"error": code, "message": message}
    if details is not None:
        body["details"] = details
    return body


def _template_warnings(raw_shex: str) -> list[str]:
    # Instances expose the IO variables of the first shape only, so anything
    # other than exactly one shape deserves a heads-up.
    count = len(parse_schema(raw_shex).shapes)
    if count == 1:
        return []
    if count == 0:
        return ["template defines no shapes and cannot be instantiated"]
    return [
        f"template defines {count} shapes; instances expose the IO variables of the first shape only"
    ]


def create_app(store: Store) -> FastAPI:
    app = FastAPI(title="shexgen", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(NotFoundError)
    async def not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content=_error_body("not_found", str(exc)))

    @app.exception_handler(ValidationError)
    async def invalid(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content=_error_body("validation_error", str(exc)))

    @app.exception_handler(ConflictError)
    async def conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content=_error_body("conflict", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def request_invalid(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        details = [
            {"field": ".".join(str(p) for p in e.get("loc", ())), "message": e.get("msg", "")}
            for e in errors
        ]
        if any(e.get("type") == "json_invalid" for e in errors):
            return JSONResponse(
                status_code=400, content=_error_body("bad_request", "malformed JSON body", details)
            )
        return JSONResponse(
            status_code=422, content=_error_body("validation_error", "invalid request", details)
        )

    def wire_instance(record) -> WireInstance:
        io_vars = [
            WireIoVariable(
                id=io.id,
                direction=io.direction.value,
                iri=io.iri.value,
                skolem_iri=io.skolem_iri.value,
            )
            for io in store.list_io_variables(record.id)
        ]
        return WireInstance(id=record.id, label=record.label, io_variables=io_vars)

    def wire_chain(record) -> WireSupplyChain:
        return WireSupplyChain(
            id=record.id,
            label=record.label,
            description=record.description,
            template_instances=[wire_instance(i) for i in store.list_instances(record.id)],
            edges=[
                WireEdge(id=e.id, source_io_id=e.source_io_id, target_io_id=e.target_io_id)
                for e in store.list_edges(record.id)
            ],
        )

    def wire_template(record, warnings: list[str]) -> WireTemplate:
        return WireTemplate(
            id=record.id,
            label=record.label,
            description=record.description,
            raw_shex=record.raw_shex,
            warnings=warnings,
        )

    # -- supply chains

    @app.get("/supply-chain", response_model=list[WireSupplyChain])
    def list_supply_chains():
        return [wire_chain(r) for r in store.list_supply_chains()]

    @app.get("/supply-chain/{chain_id}", response_model=WireSupplyChain)
    def get_supply_chain(chain_id: int):
        return wire_chain(store.get_supply_chain(chain_id))

    @app.post("/supply-chain", response_model=WireSupplyChain, status_code=201)
    def create_supply_chain(payload: SupplyChainPayload):
        return wire_chain(store.create_supply_chain(payload.label, payload.description))

    @app.put("/supply-chain/{chain_id}", response_model=WireSupplyChain)
    def update_supply_chain(chain_id: int, payload: SupplyChainPayload):
        return wire_chain(store.update_supply_chain(chain_id, payload.label, payload.description))

    @app.delete("/supply-chain/{chain_id}", status_code=204)
    def delete_supply_chain(chain_id: int):
        store.delete_supply_chain(chain_id)

    # -- templates

    @app.get("/template", response_model=list[WireTemplate])
    def list_templates():
        return [wire_template(r, _template_warnings(r.raw_shex)) for r in store.list_templates()]

    @app.get("/template/{template_id}", response_model=WireTemplate)
    def get_template(template_id: int):
        record = store.get_template(template_id)
        return wire_template(record, _template_warnings(record.raw_shex))

    @app.post("/template", response_model=WireTemplate, status_code=201)
    def create_template(payload: TemplatePayload):
        record = store.create_template(payload.label, payload.description, payload.raw_shex)
        return wire_template(record, _template_warnings(record.raw_shex))

    @app.put("/template/{template_id}", response_model=WireTemplate)
    def update_template(template_id: int, payload: TemplatePayload):
        record = store.update_template(
            template_id, payload.label, payload.description, payload.raw_shex
        )
        return wire_template(record, _template_warnings(record.raw_shex))

    @app.delete("/template/{template_id}", status_code=204)
    def delete_template(template_id: int):
        store.delete_template(template_id)

    # -- template instances

    @app.post("/template-instance", response_model=WireInstance, status_code=201)
    def create_instance(payload: InstancePayload):
        instance, _ = store.instantiate(payload.template_id, payload.supply_chain_id)
        return wire_instance(instance)

    @app.delete("/template-instance/{instance_id}", status_code=204)
    def delete_instance(instance_id: int):
        store.delete_instance(instance_id)

    # -- edges

    @app.post("/edge", response_model=WireEdge, status_code=201)
    def create_edge(payload: EdgePayload):
        edge = store.add_edge(payload.supply_chain_id, payload.source_io_id, payload.target_io_id)
        return WireEdge(id=edge.id, source_io_id=edge.source_io_id, target_io_id=edge.target_io_id)

    @app.delete("/edge/{edge_id}", status_code=204)
    def delete_edge(edge_id: int):
        store.delete_edge(edge_id)

    # -- graph export

    @app.get("/supply-chain/{chain_id}/graph")
    def chain_graph(chain_id: int, merge: bool = False):
        turtle = serialize_turtle(store.chain_graph(chain_id, merge_mode=merge))
        return Response(
            content=turtle,
            media_type="text/turtle; charset=utf-8",
            headers={
                "Content-Disposition": f'attachment; filename="supply-chain-{chain_id}.ttl"'
            },
        )

    return app


def serve(store: Store, host: str = "127.0.0.1", port: int = 8187) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(store), host=host, port=port, log_level="info")
