"""Persistence for supply chains, templates, instances, IO variables and edges.

The domain rules (validation, cascades, instantiation, edge orientation,
graph assembly) live in the abstract ``Store``; concrete backends only
provide primitive row operations. ``MemoryStore`` keeps everything in
dicts, ``SqliteStore`` persists to a single SQLite file.

Skolem assignments are persisted for *every* map entry, not just the IO
variables, so exporting the same chain twice yields the same graph.
"""

from __future__ import annotations

import os
import sqlite3
import threading
from abc import ABC, abstractmethod
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Optional

from .engine import (
    DEFAULT_BASE,
    EmptySchemaError,
    GenerationOptions,
    SkolemGenerator,
    assemble_chain,
    materialize_instance,
)
from .rdf import Iri, RdfGraph
from .shexc import Direction, ShexError, parse_schema


class StoreError(Exception):
    pass


class NotFoundError(StoreError):
    pass


class ValidationError(StoreError):
    pass


class ConflictError(StoreError):
    pass


@dataclass(frozen=True)
class SupplyChainRecord:
    id: int
    label: str
    description: str


@dataclass(frozen=True)
class TemplateRecord:
    id: int
    label: str
    description: str
    raw_shex: str


@dataclass(frozen=True)
class TemplateInstanceRecord:
    id: int
    label: str
    raw_shex: str
    supply_chain_id: int


@dataclass(frozen=True)
class IoVariableRecord:
    id: int
    template_instance_id: int
    direction: Direction
    iri: Iri
    skolem_iri: Iri


@dataclass(frozen=True)
class EdgeRecord:
    id: int
    supply_chain_id: int
    source_io_id: int
    target_io_id: int


_KINDS = ("supply_chain", "template", "instance", "io_variable", "edge", "skolem")


class Store(ABC):
    """Storage interface plus the domain logic shared by all backends."""

    def __init__(self, base: Iri = DEFAULT_BASE, generator: Optional[SkolemGenerator] = None):
        self.base = base
        self._generator = generator or SkolemGenerator()
        self._lock = threading.RLock()

    # -- backend primitives ------------------------------------------------

    @abstractmethod
    def _insert(self, kind: str, row: dict) -> int:
        """Insert a row, assign and return the next id for the kind."""

    @abstractmethod
    def _get(self, kind: str, row_id: int) -> Optional[dict]:
        ...

    @abstractmethod
    def _all(self, kind: str) -> list[dict]:
        """All rows of a kind in ascending id order."""

    @abstractmethod
    def _update(self, kind: str, row_id: int, fields: dict) -> None:
        ...

    @abstractmethod
    def _delete(self, kind: str, row_ids: Iterable[int]) -> None:
        ...

    @abstractmethod
    def _transaction(self):
        """Context manager making the enclosed mutations atomic."""

    def close(self) -> None:
        pass

    # -- record helpers ----------------------------------------------------

    def _require(self, kind: str, row_id: int, what: str) -> dict:
        row = self._get(kind, row_id)
        if row is None:
            raise NotFoundError(f"{what} {row_id} does not exist")
        return row

    @staticmethod
    def _chain_record(row: dict) -> SupplyChainRecord:
        return SupplyChainRecord(row["id"], row["label"], row["description"])

    @staticmethod
    def _template_record(row: dict) -> TemplateRecord:
        return TemplateRecord(row["id"], row["label"], row["description"], row["raw_shex"])

    @staticmethod
    def _instance_record(row: dict) -> TemplateInstanceRecord:
        return TemplateInstanceRecord(
            row["id"], row["label"], row["raw_shex"], row["supply_chain_id"]
        )

    @staticmethod
    def _io_record(row: dict) -> IoVariableRecord:
        return IoVariableRecord(
            row["id"],
            row["template_instance_id"],
            Direction(row["direction"]),
            Iri(row["iri"]),
            Iri(row["skolem_iri"]),
        )

    @staticmethod
    def _edge_record(row: dict) -> EdgeRecord:
        return EdgeRecord(
            row["id"], row["supply_chain_id"], row["source_io_id"], row["target_io_id"]
        )

    @staticmethod
    def _parse_or_raise(raw_shex: str):
        try:
            return parse_schema(raw_shex)
        except ShexError as exc:
            raise ValidationError(f"template text does not parse: {exc}") from exc

    # -- supply chains -----------------------------------------------------

    def create_supply_chain(self, label: str, description: str) -> SupplyChainRecord:
        with self._lock, self._transaction():
            cid = self._insert("supply_chain", {"label": label, "description": description})
        return SupplyChainRecord(cid, label, description)

    def get_supply_chain(self, chain_id: int) -> SupplyChainRecord:
        with self._lock:
            return self._chain_record(self._require("supply_chain", chain_id, "supply chain"))

    def list_supply_chains(self) -> list[SupplyChainRecord]:
        with self._lock:
            return [self._chain_record(r) for r in self._all("supply_chain")]

    def update_supply_chain(self, chain_id: int, label: str, description: str) -> SupplyChainRecord:
        with self._lock:
            self._require("supply_chain", chain_id, "supply chain")
            with self._transaction():
                self._update("supply_chain", chain_id, {"label": label, "description": description})
            return SupplyChainRecord(chain_id, label, description)

    def delete_supply_chain(self, chain_id: int) -> None:
        with self._lock:
            self._require("supply_chain", chain_id, "supply chain")
            instance_ids = [
                r["id"] for r in self._all("instance") if r["supply_chain_id"] == chain_id
            ]
            edge_ids = [r["id"] for r in self._all("edge") if r["supply_chain_id"] == chain_id]
            io_ids = [
                r["id"]
                for r in self._all("io_variable")
                if r["template_instance_id"] in instance_ids
            ]
            skolem_ids = [
                r["id"] for r in self._all("skolem") if r["template_instance_id"] in instance_ids
            ]
            with self._transaction():
                self._delete("edge", edge_ids)
                self._delete("io_variable", io_ids)
                self._delete("skolem", skolem_ids)
                self._delete("instance", instance_ids)
                self._delete("supply_chain", [chain_id])

    # -- templates -----------------------------------------------------------

    def create_template(self, label: str, description: str, raw_shex: str) -> TemplateRecord:
        self._parse_or_raise(raw_shex)
        with self._lock, self._transaction():
            tid = self._insert(
                "template", {"label": label, "description": description, "raw_shex": raw_shex}
            )
        return TemplateRecord(tid, label, description, raw_shex)

    def get_template(self, template_id: int) -> TemplateRecord:
        with self._lock:
            return self._template_record(self._require("template", template_id, "template"))

    def list_templates(self) -> list[TemplateRecord]:
        with self._lock:
            return [self._template_record(r) for r in self._all("template")]

    def update_template(
        self, template_id: int, label: str, description: str, raw_shex: str
    ) -> TemplateRecord:
        self._parse_or_raise(raw_shex)
        with self._lock:
            self._require("template", template_id, "template")
            with self._transaction():
                self._update(
                    "template",
                    template_id,
                    {"label": label, "description": description, "raw_shex": raw_shex},
                )
            return TemplateRecord(template_id, label, description, raw_shex)

    def delete_template(self, template_id: int) -> None:
        # Instances are snapshots tied to their chain, not to the template,
        # so they survive the template's deletion untouched.
        with self._lock:
            self._require("template", template_id, "template")
            with self._transaction():
                self._delete("template", [template_id])

    # -- template instances --------------------------------------------------

    def instantiate(
        self, template_id: int, supply_chain_id: int
    ) -> tuple[TemplateInstanceRecord, list[IoVariableRecord]]:
        with self._lock:
            template = self.get_template(template_id)
            self._require("supply_chain", supply_chain_id, "supply chain")
            schema = self._parse_or_raise(template.raw_shex)
            try:
                mat = materialize_instance(
                    schema, GenerationOptions(base=self.base), template.label, self._generator
                )
            except EmptySchemaError as exc:
                raise ValidationError(str(exc)) from exc
            with self._transaction():
                instance_id = self._insert(
                    "instance",
                    {
                        "label": mat.label,
                        "raw_shex": template.raw_shex,
                        "supply_chain_id": supply_chain_id,
                    },
                )
                io_records = []
                for binding in mat.io_vars:
                    io_id = self._insert(
                        "io_variable",
                        {
                            "template_instance_id": instance_id,
                            "direction": binding.direction.value,
                            "iri": binding.iri.value,
                            "skolem_iri": binding.skolem.value,
                        },
                    )
                    io_records.append(
                        IoVariableRecord(
                            io_id, instance_id, binding.direction, binding.iri, binding.skolem
                        )
                    )
                for key, skolem in mat.skolem_map.items():
                    self._insert(
                        "skolem",
                        {
                            "template_instance_id": instance_id,
                            "key": key.value,
                            "skolem_iri": skolem.value,
                        },
                    )
            instance = TemplateInstanceRecord(
                instance_id, mat.label, template.raw_shex, supply_chain_id
            )
            return instance, io_records

    def get_instance(self, instance_id: int) -> TemplateInstanceRecord:
        with self._lock:
            return self._instance_record(self._require("instance", instance_id, "template instance"))

    def list_instances(self, supply_chain_id: int) -> list[TemplateInstanceRecord]:
        with self._lock:
            return [
                self._instance_record(r)
                for r in self._all("instance")
                if r["supply_chain_id"] == supply_chain_id
            ]

    def delete_instance(self, instance_id: int) -> None:
        with self._lock:
            self._require("instance", instance_id, "template instance")
            io_ids = {
                r["id"]
                for r in self._all("io_variable")
                if r["template_instance_id"] == instance_id
            }
            edge_ids = [
                r["id"]
                for r in self._all("edge")
                if r["source_io_id"] in io_ids or r["target_io_id"] in io_ids
            ]
            skolem_ids = [
                r["id"] for r in self._all("skolem") if r["template_instance_id"] == instance_id
            ]
            with self._transaction():
                self._delete("edge", edge_ids)
                self._delete("io_variable", io_ids)
                self._delete("skolem", skolem_ids)
                self._delete("instance", [instance_id])

    def get_io_variable(self, io_id: int) -> IoVariableRecord:
        with self._lock:
            return self._io_record(self._require("io_variable", io_id, "IO variable"))

    def list_io_variables(self, instance_id: int) -> list[IoVariableRecord]:
        with self._lock:
            return [
                self._io_record(r)
                for r in self._all("io_variable")
                if r["template_instance_id"] == instance_id
            ]

    # -- edges -----------------------------------------------------------------

    def add_edge(self, supply_chain_id: int, first_io_id: int, second_io_id: int) -> EdgeRecord:
        """Create a wiring edge; accepts the endpoints in either order.

        The stored edge is always oriented output -> input.
        """
        with self._lock:
            self._require("supply_chain", supply_chain_id, "supply chain")
            if first_io_id == second_io_id:
                raise ValidationError("an edge cannot connect an IO variable to itself")
            first = self._io_record(self._require("io_variable", first_io_id, "IO variable"))
            second = self._io_record(self._require("io_variable", second_io_id, "IO variable"))
            for io in (first, second):
                owner = self._instance_record(
                    self._require("instance", io.template_instance_id, "template instance")
                )
                if owner.supply_chain_id != supply_chain_id:
                    raise ValidationError(
                        f"IO variable {io.id} belongs to a different supply chain"
                    )
            if first.direction == second.direction:
                raise ValidationError(
                    "an edge must connect an output variable with an input variable"
                )
            source, target = (first, second) if first.direction is Direction.OUT else (second, first)
            for row in self._all("edge"):
                if row["source_io_id"] == source.id and row["target_io_id"] == target.id:
                    raise ConflictError(
                        f"edge from IO variable {source.id} to {target.id} already exists"
                    )
            with self._transaction():
                edge_id = self._insert(
                    "edge",
                    {
                        "supply_chain_id": supply_chain_id,
                        "source_io_id": source.id,
                        "target_io_id": target.id,
                    },
                )
            return EdgeRecord(edge_id, supply_chain_id, source.id, target.id)

    def list_edges(self, supply_chain_id: int) -> list[EdgeRecord]:
        with self._lock:
            return [
                self._edge_record(r)
                for r in self._all("edge")
                if r["supply_chain_id"] == supply_chain_id
            ]

    def delete_edge(self, edge_id: int) -> None:
        with self._lock:
            self._require("edge", edge_id, "edge")
            with self._transaction():
                self._delete("edge", [edge_id])

    # -- graph export ------------------------------------------------------------

    def chain_graph(self, supply_chain_id: int, merge_mode: bool = False) -> RdfGraph:
        """Assemble the chain's RDF graph from persisted snapshots and skolems."""
        with self._lock:
            self._require("supply_chain", supply_chain_id, "supply chain")
            opts = GenerationOptions(base=self.base, merge_mode=merge_mode)
            instances = []
            for record in self.list_instances(supply_chain_id):
                schema = self._parse_or_raise(record.raw_shex)
                skolem_map = {
                    Iri(r["key"]): Iri(r["skolem_iri"])
                    for r in self._all("skolem")
                    if r["template_instance_id"] == record.id
                }
                instances.append((schema, skolem_map))
            edges = []
            for edge in self.list_edges(supply_chain_id):
                source = self.get_io_variable(edge.source_io_id)
                target = self.get_io_variable(edge.target_io_id)
                edges.append((source.skolem_iri, target.skolem_iri))
            return assemble_chain(instances, edges, opts)


class MemoryStore(Store):
    """Dict-backed store; used in tests and wherever durability is not needed."""

    def __init__(self, base: Iri = DEFAULT_BASE, generator: Optional[SkolemGenerator] = None):
        super().__init__(base, generator)
        self._tables: dict[str, dict[int, dict]] = {kind: {} for kind in _KINDS}
        self._counters: dict[str, int] = {kind: 0 for kind in _KINDS}

    def _insert(self, kind: str, row: dict) -> int:
        self._counters[kind] += 1
        row_id = self._counters[kind]
        stored = dict(row)
        stored["id"] = row_id
        self._tables[kind][row_id] = stored
        return row_id

    def _get(self, kind: str, row_id: int) -> Optional[dict]:
        row = self._tables[kind].get(row_id)
        return dict(row) if row is not None else None

    def _all(self, kind: str) -> list[dict]:
        table = self._tables[kind]
        return [dict(table[k]) for k in sorted(table)]

    def _update(self, kind: str, row_id: int, fields: dict) -> None:
        self._tables[kind][row_id].update(fields)

    def _delete(self, kind: str, row_ids: Iterable[int]) -> None:
        for row_id in row_ids:
            self._tables[kind].pop(row_id, None)

    @contextmanager
    def _transaction(self):
        snapshot = {kind: {k: dict(v) for k, v in table.items()} for kind, table in self._tables.items()}
        counters = dict(self._counters)
        try:
            yield
        except BaseException:
            self._tables = snapshot
            self._counters = counters
            raise


_SQLITE_SCHEMA = """
CREATE TABLE IF NOT EXISTS supply_chains (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    label TEXT NOT NULL,
    description TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS templates (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    label TEXT NOT NULL,
    description TEXT NOT NULL,
    raw_shex TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS template_instances (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    label TEXT NOT NULL,
    raw_shex TEXT NOT NULL,
    supply_chain_id INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS io_variables (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    template_instance_id INTEGER NOT NULL,
    direction TEXT NOT NULL,
    iri TEXT NOT NULL,
    skolem_iri TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS edges (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    supply_chain_id INTEGER NOT NULL,
    source_io_id INTEGER NOT NULL,
    target_io_id INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS skolems (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    template_instance_id INTEGER NOT NULL,
    key TEXT NOT NULL,
    skolem_iri TEXT NOT NULL
);
"""

_SQLITE_TABLES = {
    "supply_chain": ("supply_chains", ("label", "description")),
    "template": ("templates", ("label", "description", "raw_shex")),
    "instance": ("template_instances", ("label", "raw_shex", "supply_chain_id")),
    "io_variable": (
        "io_variables",
        ("template_instance_id", "direction", "iri", "skolem_iri"),
    ),
    "edge": ("edges", ("supply_chain_id", "source_io_id", "target_io_id")),
    "skolem": ("skolems", ("template_instance_id", "key", "skolem_iri")),
}


class SqliteStore(Store):
    """Single-file durable store; the file is created on first use."""

    def __init__(
        self,
        path: str,
        base: Iri = DEFAULT_BASE,
        generator: Optional[SkolemGenerator] = None,
    ):
        super().__init__(base, generator)
        self.path = path
        self._conn: Optional[sqlite3.Connection] = None

    def _connect(self) -> sqlite3.Connection:
        if self._conn is None:
            conn = sqlite3.connect(self.path, check_same_thread=False, isolation_level=None)
            conn.row_factory = sqlite3.Row
            conn.executescript(_SQLITE_SCHEMA)
            self._conn = conn
        return self._conn

    def close(self) -> None:
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def _insert(self, kind: str, row: dict) -> int:
        table, columns = _SQLITE_TABLES[kind]
        placeholders = ", ".join("?" for _ in columns)
        quoted = ", ".join(f'"{c}"' for c in columns)
        cursor = self._connect().execute(
            f'INSERT INTO {table} ({quoted}) VALUES ({placeholders})',
            tuple(row[c] for c in columns),
        )
        return cursor.lastrowid

    def _absent(self) -> bool:
        # Reads against a store that was never written stay empty without
        # materializing the file; the first mutation creates it.
        return self._conn is None and not os.path.exists(self.path)

    def _get(self, kind: str, row_id: int) -> Optional[dict]:
        if self._absent():
            return None
        table, _ = _SQLITE_TABLES[kind]
        row = self._connect().execute(f"SELECT * FROM {table} WHERE id = ?", (row_id,)).fetchone()
        return dict(row) if row is not None else None

    def _all(self, kind: str) -> list[dict]:
        if self._absent():
            return []
        table, _ = _SQLITE_TABLES[kind]
        rows = self._connect().execute(f"SELECT * FROM {table} ORDER BY id").fetchall()
        return [dict(r) for r in rows]

    def _update(self, kind: str, row_id: int, fields: dict) -> None:
        table, _ = _SQLITE_TABLES[kind]
        assignments = ", ".join(f'"{c}" = ?' for c in fields)
        self._connect().execute(
            f"UPDATE {table} SET {assignments} WHERE id = ?", (*fields.values(), row_id)
        )

    def _delete(self, kind: str, row_ids: Iterable[int]) -> None:
        table, _ = _SQLITE_TABLES[kind]
        ids = list(row_ids)
        if ids:
            marks = ", ".join("?" for _ in ids)
            self._connect().execute(f"DELETE FROM {table} WHERE id IN ({marks})", ids)

    @contextmanager
    def _transaction(self):
        conn = self._connect()
        conn.execute("BEGIN IMMEDIATE")
        try:
            yield
        except BaseException:
            conn.rollback()
            raise
        else:
            conn.commit()
