"""Command line entry points: run the service, generate graphs headlessly,
and sanity-check template files.
"""

from __future__ import annotations

import random
import socket
import sys
from pathlib import Path

import click
import yaml

from .api import serve as api_serve
from .engine import (
    DEFAULT_BASE,
    GenerationOptions,
    SkolemGenerator,
    assemble_chain,
    materialize_instance,
)
from .rdf import Iri, serialize_turtle
from .shexc import Direction, EXVAR_NS, ShexError, collect_exvars, parse_schema
from .store import SqliteStore

EXIT_PARSE_ERROR = 1
EXIT_WIRING_ERROR = 2


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_base(value: str) -> Iri:
    try:
        base = Iri(value)
    except ValueError as exc:
        _fail(EXIT_PARSE_ERROR, f"invalid base IRI: {exc}")
    if not base.value.endswith("/"):
        _fail(EXIT_PARSE_ERROR, f"base IRI must end with '/': {value}")
    return base


def _parse_template_file(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_PARSE_ERROR, f"cannot read {path}: {exc}")
    try:
        return parse_schema(text)
    except ShexError as exc:
        location = f":{exc.line}:{exc.column}" if exc.line is not None else ""
        _fail(EXIT_PARSE_ERROR, f"{path}{location}: {exc.message}")


@click.group()
def main() -> None:
    """Model supply chains from ShEx templates and export them as RDF Turtle."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, envvar="SHEXGEN_HOST")
@click.option("--port", default=8187, show_default=True, type=int, envvar="SHEXGEN_PORT")
@click.option(
    "--store",
    "store_path",
    default="shexgen.db",
    show_default=True,
    envvar="SHEXGEN_STORE",
    help="SQLite file backing the service.",
)
@click.option("--base", default=DEFAULT_BASE.value, show_default=True, envvar="SHEXGEN_BASE")
def serve(host: str, port: int, store_path: str, base: str) -> None:
    """Run the REST service."""
    base_iri = _parse_base(base)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        _fail(EXIT_PARSE_ERROR, f"cannot listen on {host}:{port}: {exc}")
    finally:
        probe.close()

    store = SqliteStore(store_path, base=base_iri)
    try:
        api_serve(store, host=host, port=port)
    finally:
        store.close()


def _load_manifest(path: Path) -> dict:
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_PARSE_ERROR, f"cannot read {path}: {exc}")
    try:
        manifest = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        _fail(EXIT_PARSE_ERROR, f"{path}: invalid manifest: {exc}")
    if not isinstance(manifest, dict):
        _fail(EXIT_PARSE_ERROR, f"{path}: manifest must be a mapping")
    if manifest.get("version") != 1:
        _fail(EXIT_PARSE_ERROR, f"{path}: unsupported manifest version {manifest.get('version')!r}")
    return manifest


def _resolve_exvar(raw: object) -> Iri:
    text = str(raw).strip()
    if text.startswith("<") and text.endswith(">"):
        text = text[1:-1]
    if text.startswith("exVar:"):
        text = EXVAR_NS + text[len("exVar:"):]
    try:
        iri = Iri(text)
    except ValueError:
        _fail(EXIT_WIRING_ERROR, f"{raw!r} is not an exVar IRI or exVar: name")
    if not iri.value.startswith(EXVAR_NS):
        _fail(EXIT_WIRING_ERROR, f"<{iri}> is outside the {EXVAR_NS} namespace")
    return iri


@main.command()
@click.argument("manifest", type=click.Path(path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Write Turtle here instead of stdout.")
def generate(manifest: Path, out: Path | None) -> None:
    """Generate a chain graph from a wiring manifest, without any service."""
    data = _load_manifest(manifest)
    base = _parse_base(str(data.get("base", DEFAULT_BASE.value)))
    opts = GenerationOptions(base=base, merge_mode=bool(data.get("merge", False)))
    generator = SkolemGenerator(random.Random(data["seed"])) if "seed" in data else SkolemGenerator()

    entries = data.get("instances") or []
    if not isinstance(entries, list) or not entries:
        _fail(EXIT_PARSE_ERROR, f"{manifest}: manifest declares no instances")
    materialized: dict[str, tuple] = {}
    for entry in entries:
        name = str(entry.get("name", "")).strip()
        template = entry.get("template")
        if not name or not template:
            _fail(EXIT_PARSE_ERROR, f"{manifest}: every instance needs a name and a template path")
        if name in materialized:
            _fail(EXIT_WIRING_ERROR, f"instance name {name!r} is declared twice")
        schema = _parse_template_file(manifest.parent / str(template))
        mat = materialize_instance(schema, opts, name, generator)
        materialized[name] = (schema, mat)

    edges = []
    for edge in data.get("edges") or []:
        resolved = []
        for side, direction in (("from", Direction.OUT), ("to", Direction.IN)):
            endpoint = edge.get(side) if isinstance(edge, dict) else None
            if not isinstance(endpoint, dict) or "instance" not in endpoint or "var" not in endpoint:
                _fail(EXIT_PARSE_ERROR, f"{manifest}: edge {side!r} needs instance and var fields")
            name = str(endpoint["instance"])
            if name not in materialized:
                _fail(EXIT_WIRING_ERROR, f"edge references unknown instance {name!r}")
            var = _resolve_exvar(endpoint["var"])
            _, mat = materialized[name]
            binding = next(
                (b for b in mat.io_vars if b.direction is direction and b.iri == var), None
            )
            if binding is None:
                kind = "#out:" if direction is Direction.OUT else "#in:"
                _fail(
                    EXIT_WIRING_ERROR,
                    f"<{var}> is not in the {kind} list of instance {name!r}",
                )
            resolved.append(binding.skolem)
        edges.append((resolved[0], resolved[1]))

    graph = assemble_chain(
        [(schema, mat.skolem_map) for schema, mat in materialized.values()], edges, opts
    )
    turtle = serialize_turtle(graph)
    if out is None:
        click.echo(turtle, nl=False)
    else:
        out.write_text(turtle, encoding="utf-8")


@main.command()
@click.argument("template", type=click.Path(path_type=Path))
def check(template: Path) -> None:
    """Parse a template file and report its shapes and variables."""
    schema = _parse_template_file(template)
    shape_count = len(schema.shapes)
    click.echo(f"shapes: {shape_count}")
    exvars = collect_exvars(schema)
    click.echo("exVars: " + (", ".join(str(v) for v in exvars) if exvars else "(none)"))
    for shape in schema.shapes:
        label = shape.label.iri
        inputs = ", ".join(str(v) for v in shape.inputs) or "(none)"
        outputs = ", ".join(str(v) for v in shape.outputs) or "(none)"
        click.echo(f"shape <{label}>")
        click.echo(f"  in:  {inputs}")
        click.echo(f"  out: {outputs}")
    if shape_count != 1:
        click.echo(
            f"warning: expected exactly one shape per template, found {shape_count}", err=True
        )


if __name__ == "__main__":
    main()
