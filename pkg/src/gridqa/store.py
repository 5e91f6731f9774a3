"""In-memory property graph: vertices, typed edges, per-class/attribute indexes.

The store is read-only after load. Exact-match lookups go through hash
indexes; ordered comparators (dates, numbers) use per-attribute sorted
arrays. Every indexed lookup is required to equal the brute-force scan,
which the test suite checks property-style.
"""
from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from datetime import date

from .errors import ParseError, SchemaViolation, TypeMismatch, UnknownAttribute, UnknownVertex
from .schema import Direction, OntologySchema
from .values import Comparator, Datatype, evaluate_predicate, parse_typed_value


@dataclass(frozen=True)
class Vertex:
    id: str
    class_name: str
    attrs: dict

    def to_json(self) -> dict:
        out = {}
        for key in sorted(self.attrs):
            val = self.attrs[key]
            out[key] = val.isoformat() if isinstance(val, date) else val
        return {"id": self.id, "class": self.class_name, "attrs": out}


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    type: str
    attrs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"src": self.src, "dst": self.dst, "type": self.type}


class GraphStore:
    """Immutable vertex/edge sets plus the indexes query execution uses."""

    def __init__(self, schema: OntologySchema, vertices: dict[str, Vertex], edges: list[Edge]):
        self.schema = schema
        self.vertices = vertices
        self.edges = edges
        self.by_class: dict[str, list[str]] = {name: [] for name in schema.classes}
        self.out_edges: dict[str, list[Edge]] = {vid: [] for vid in vertices}
        self.in_edges: dict[str, list[Edge]] = {vid: [] for vid in vertices}
        self._hash_index: dict[tuple[str, str], dict] = {}
        self._ordered_index: dict[tuple[str, str], list[tuple]] = {}

        for vid in sorted(vertices):
            self.by_class[vertices[vid].class_name].append(vid)
        for edge in edges:
            self.out_edges[edge.src].append(edge)
            self.in_edges[edge.dst].append(edge)
        for adjacency in (self.out_edges, self.in_edges):
            for entries in adjacency.values():
                entries.sort(key=lambda e: (e.type, e.src, e.dst))
        self._build_attr_indexes()

    def _build_attr_indexes(self) -> None:
        for class_name, cdef in self.schema.classes.items():
            for attr in cdef.attributes:
                key = (class_name, attr.name)
                buckets: dict = {}
                ordered: list[tuple] = []
                for vid in self.by_class[class_name]:
                    val = self.vertices[vid].attrs.get(attr.name)
                    if val is None:
                        continue
                    buckets.setdefault(val, set()).add(vid)
                    if attr.datatype in (Datatype.INTEGER, Datatype.DECIMAL, Datatype.DATE):
                        ordered.append((val, vid))
                ordered.sort()
                self._hash_index[key] = buckets
                if ordered:
                    self._ordered_index[key] = ordered

    def vertex(self, vertex_id: str) -> Vertex:
        try:
            return self.vertices[vertex_id]
        except KeyError:
            raise UnknownVertex(f"unknown vertex: {vertex_id}") from None

    def class_vertices(self, class_name: str) -> list[str]:
        return self.by_class.get(class_name, [])

    def neighbors(
        self,
        vertex_id: str,
        edge_type: str | None = None,
        direction: str = "both",
    ) -> list[tuple[Edge, Vertex]]:
        """Adjacent (edge, vertex) pairs, ordered by edge type then neighbor id."""
        self.vertex(vertex_id)
        results: list[tuple[Edge, Vertex]] = []
        seen = set()
        if direction in ("out", "both"):
            for edge in self.out_edges[vertex_id]:
                if edge_type is None or edge.type == edge_type:
                    key = (id(edge), edge.dst)
                    if key not in seen:
                        seen.add(key)
                        results.append((edge, self.vertices[edge.dst]))
        if direction in ("in", "both"):
            for edge in self.in_edges[vertex_id]:
                if edge_type is None or edge.type == edge_type:
                    key = (id(edge), edge.src)
                    if key not in seen:
                        seen.add(key)
                        results.append((edge, self.vertices[edge.src]))
        results.sort(key=lambda pair: (pair[0].type, pair[1].id))
        return results

    def step(self, vertex_id: str, edge_type: str, direction: Direction) -> list[tuple[Edge, Vertex]]:
        """Traverse one schema step: FWD follows stored direction, BACK inverts."""
        wire = "out" if direction is Direction.FWD else "in"
        return self.neighbors(vertex_id, edge_type, wire)

    def vertices_by_attr(self, class_name: str, attr_name: str, comparator: Comparator, value, *, reference_date: date) -> set[str]:
        """Indexed attribute lookup; must equal the full-scan result."""
        adef = self.schema.class_def(class_name).attribute(attr_name)
        if adef is None:
            raise UnknownAttribute(f"{class_name} has no attribute {attr_name}")
        key = (class_name, attr_name)
        if comparator is Comparator.EQ:
            checked = parse_typed_value(value, adef.datatype)
            return set(self._hash_index.get(key, {}).get(checked, set()))
        if comparator in (Comparator.LT, Comparator.LE, Comparator.GT, Comparator.GE):
            checked = parse_typed_value(value, adef.datatype)
            return self._range_lookup(key, comparator, checked)
        if comparator is Comparator.IN_YEAR:
            if adef.datatype is not Datatype.DATE:
                raise TypeMismatch(f"in_year needs a date attribute, {attr_name} is {adef.datatype.value}")
            year = int(value)
            ids = self._range_lookup(key, Comparator.GE, date(year, 1, 1))
            return ids & self._range_lookup(key, Comparator.LE, date(year, 12, 31))
        # neq / contains / within_duration fall back to scanning the class
        return {
            vid
            for vid in self.by_class[class_name]
            if evaluate_predicate(
                self.vertices[vid].attrs.get(attr_name), comparator, value, reference_date=reference_date
            )
        }

    def _range_lookup(self, key: tuple[str, str], comparator: Comparator, value) -> set[str]:
        ordered = self._ordered_index.get(key, [])
        values = [entry[0] for entry in ordered]
        if comparator is Comparator.LT:
            hi = bisect_left(values, value)
            span = ordered[:hi]
        elif comparator is Comparator.LE:
            hi = bisect_right(values, value)
            span = ordered[:hi]
        elif comparator is Comparator.GT:
            lo = bisect_right(values, value)
            span = ordered[lo:]
        else:
            lo = bisect_left(values, value)
            span = ordered[lo:]
        return {vid for _, vid in span}

    def candidate_count(self, class_name: str, attr_name: str | None, comparator: Comparator | None, value) -> int:
        """Index statistic used for seed selection; cheap, never scans."""
        if attr_name is None:
            return len(self.by_class.get(class_name, []))
        key = (class_name, attr_name)
        if comparator is Comparator.EQ and key in self._hash_index:
            return len(self._hash_index[key].get(value, ()))
        return len(self.by_class.get(class_name, []))

    def stats(self) -> dict:
        return {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "classes": {name: len(ids) for name, ids in sorted(self.by_class.items()) if ids},
        }


def _parse_jsonl(source: str, what: str) -> list[dict]:
    rows = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{what} line {lineno}: {exc}") from None
        if not isinstance(row, dict):
            raise ParseError(f"{what} line {lineno}: expected an object")
        rows.append(row)
    return rows


def load_graph(schema: OntologySchema, vertex_source: str, edge_source: str) -> GraphStore:
    """Load vertices and edges from JSON-Lines text. All-or-nothing."""
    vertices: dict[str, Vertex] = {}
    for row in _parse_jsonl(vertex_source, "vertex file"):
        if not {"id", "class"} <= set(row):
            raise ParseError(f"vertex rows need id and class: {row}")
        vid, class_name = row["id"], row["class"]
        if vid in vertices:
            raise SchemaViolation(f"duplicate vertex id: {vid}")
        if class_name not in schema.classes:
            raise SchemaViolation(f"vertex {vid}: unknown class {class_name}")
        cdef = schema.classes[class_name]
        attrs = {}
        for name, raw in (row.get("attrs") or {}).items():
            adef = cdef.attribute(name)
            if adef is None:
                raise SchemaViolation(f"vertex {vid}: class {class_name} has no attribute {name}")
            try:
                attrs[name] = parse_typed_value(raw, adef.datatype)
            except TypeMismatch as exc:
                raise SchemaViolation(f"vertex {vid}.{name}: {exc}") from None
        vertices[vid] = Vertex(vid, class_name, attrs)

    edges: list[Edge] = []
    for row in _parse_jsonl(edge_source, "edge file"):
        if not {"src", "dst", "type"} <= set(row):
            raise ParseError(f"edge rows need src, dst, type: {row}")
        src, dst, type_name = row["src"], row["dst"], row["type"]
        for endpoint in (src, dst):
            if endpoint not in vertices:
                raise SchemaViolation(f"edge {type_name}: unknown vertex {endpoint}")
        etype = None
        for candidate in schema.edge_types:
            if candidate.name == type_name:
                etype = candidate
                break
        if etype is None:
            raise SchemaViolation(f"unknown edge type: {type_name}")
        if vertices[src].class_name != etype.from_class or vertices[dst].class_name != etype.to_class:
            raise SchemaViolation(
                f"edge {type_name} expects {etype.from_class}->{etype.to_class}, "
                f"got {vertices[src].class_name}->{vertices[dst].class_name}"
            )
        attrs = {}
        for name, raw in (row.get("attrs") or {}).items():
            adef = None
            for candidate in etype.attributes:
                if candidate.name == name:
                    adef = candidate
            if adef is None:
                raise SchemaViolation(f"edge type {type_name} has no attribute {name}")
            try:
                attrs[name] = parse_typed_value(raw, adef.datatype)
            except TypeMismatch as exc:
                raise SchemaViolation(f"edge {src}->{dst}.{name}: {exc}") from None
        edges.append(Edge(src, dst, type_name, attrs))

    return GraphStore(schema, vertices, edges)
