"""Ontology schema: classes, attribute definitions, typed edge types.

The schema is the substrate the reasoner searches over. It separates
abstract management classes (utilities, manufacturers, departments) from
physical equipment classes, and it must be connected: a class unreachable
from the rest of the schema could never participate in an answer path.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import ParseError, ValidationError
from .values import Datatype


class ClassKind(str, Enum):
    ABSTRACT = "abstract"
    PHYSICAL = "physical"


class Direction(str, Enum):
    """Traversal direction relative to an edge type's stored orientation."""

    FWD = "fwd"
    BACK = "back"

    def flipped(self) -> "Direction":
        return Direction.BACK if self is Direction.FWD else Direction.FWD


@dataclass(frozen=True)
class AttributeDef:
    name: str
    datatype: Datatype
    unit: str | None = None


@dataclass(frozen=True)
class ClassDef:
    name: str
    kind: ClassKind
    attributes: tuple[AttributeDef, ...] = ()

    def attribute(self, name: str) -> AttributeDef | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None


@dataclass(frozen=True)
class EdgeTypeDef:
    name: str
    from_class: str
    to_class: str
    attributes: tuple[AttributeDef, ...] = ()
    aggregated: bool = False


@dataclass(frozen=True)
class Neighbor:
    """One adjacency entry of the undirected schema view."""

    edge_type: EdgeTypeDef
    neighbor_class: str
    direction: Direction


@dataclass
class OntologySchema:
    classes: dict[str, ClassDef]
    edge_types: list[EdgeTypeDef]
    version: str = "1"
    _adjacency: dict[str, tuple[Neighbor, ...]] = field(default_factory=dict, repr=False)

    def class_def(self, name: str) -> ClassDef:
        try:
            return self.classes[name]
        except KeyError:
            raise ValidationError(f"unknown class: {name}") from None

    def edge_type(self, name: str) -> EdgeTypeDef:
        for et in self.edge_types:
            if et.name == name:
                return et
        raise ValidationError(f"unknown edge type: {name}")

    def attribute_def(self, class_name: str, attr_name: str) -> AttributeDef:
        cdef = self.class_def(class_name)
        adef = cdef.attribute(attr_name)
        if adef is None:
            raise ValidationError(f"class {class_name} has no attribute {attr_name}")
        return adef

    def neighbors(self, class_name: str) -> tuple[Neighbor, ...]:
        """Undirected adjacency: every edge type is walkable both ways.

        Deterministic order: edge type name, then neighbor class name.
        """
        if not self._adjacency:
            self._build_adjacency()
        return self._adjacency.get(class_name, ())

    def _build_adjacency(self) -> None:
        adj: dict[str, list[Neighbor]] = {name: [] for name in self.classes}
        for et in self.edge_types:
            adj[et.from_class].append(Neighbor(et, et.to_class, Direction.FWD))
            adj[et.to_class].append(Neighbor(et, et.from_class, Direction.BACK))
        for name, entries in adj.items():
            entries.sort(key=lambda n: (n.edge_type.name, n.neighbor_class, n.direction.value))
            self._adjacency[name] = tuple(entries)

    def diameter(self) -> int:
        """Longest shortest-path distance over the undirected class graph."""
        best = 0
        for start in self.classes:
            dist = {start: 0}
            queue = deque([start])
            while queue:
                cur = queue.popleft()
                for nb in self.neighbors(cur):
                    if nb.neighbor_class not in dist:
                        dist[nb.neighbor_class] = dist[cur] + 1
                        queue.append(nb.neighbor_class)
            best = max(best, max(dist.values()))
        return best

    def units(self) -> dict[str, tuple[str, str]]:
        """Map lowercase unit -> (class, attribute), only where unambiguous."""
        seen: dict[str, tuple[str, str] | None] = {}
        for cdef in self.classes.values():
            for attr in cdef.attributes:
                if not attr.unit:
                    continue
                key = attr.unit.lower()
                if key in seen:
                    seen[key] = None  # ambiguous, unusable for tagging
                else:
                    seen[key] = (cdef.name, attr.name)
        return {k: v for k, v in seen.items() if v is not None}

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "classes": [
                {
                    "name": c.name,
                    "kind": c.kind.value,
                    "attributes": [
                        {"name": a.name, "datatype": a.datatype.value}
                        | ({"unit": a.unit} if a.unit else {})
                        for a in c.attributes
                    ],
                }
                for c in sorted(self.classes.values(), key=lambda c: c.name)
            ],
            "edge_types": [
                {
                    "name": e.name,
                    "from": e.from_class,
                    "to": e.to_class,
                    "attributes": [
                        {"name": a.name, "datatype": a.datatype.value}
                        | ({"unit": a.unit} if a.unit else {})
                        for a in e.attributes
                    ],
                    "aggregated": e.aggregated,
                }
                for e in sorted(self.edge_types, key=lambda e: (e.name, e.from_class, e.to_class))
            ],
        }


def _parse_attributes(raw, owner: str) -> tuple[AttributeDef, ...]:
    attrs = []
    names = set()
    for entry in raw or []:
        if not isinstance(entry, dict) or "name" not in entry or "datatype" not in entry:
            raise ParseError(f"{owner}: attribute entries need name and datatype")
        name = entry["name"]
        if not name or not isinstance(name, str):
            raise ValidationError(f"{owner}: empty attribute name")
        if name in names:
            raise ValidationError(f"{owner}: duplicate attribute {name}")
        names.add(name)
        try:
            datatype = Datatype(entry["datatype"])
        except ValueError:
            raise ValidationError(f"{owner}.{name}: unknown datatype {entry['datatype']!r}") from None
        attrs.append(AttributeDef(name, datatype, entry.get("unit")))
    return tuple(attrs)


def parse_schema(document: dict) -> OntologySchema:
    """Build and validate a schema from a decoded schema document."""
    if not isinstance(document, dict):
        raise ParseError("schema document must be a JSON object")
    raw_classes = document.get("classes")
    raw_edges = document.get("edge_types")
    if not isinstance(raw_classes, list) or not isinstance(raw_edges, list):
        raise ParseError("schema document needs 'classes' and 'edge_types' arrays")

    classes: dict[str, ClassDef] = {}
    for entry in raw_classes:
        if not isinstance(entry, dict) or "name" not in entry:
            raise ParseError("class entries need a name")
        name = entry["name"]
        if not name or not isinstance(name, str):
            raise ValidationError("empty class name")
        if name in classes:
            raise ValidationError(f"duplicate class name: {name}")
        try:
            kind = ClassKind(entry.get("kind", "physical"))
        except ValueError:
            raise ValidationError(f"class {name}: unknown kind {entry['kind']!r}") from None
        classes[name] = ClassDef(name, kind, _parse_attributes(entry.get("attributes"), name))

    edge_types: list[EdgeTypeDef] = []
    seen_edges = set()
    for entry in raw_edges:
        if not isinstance(entry, dict) or not {"name", "from", "to"} <= set(entry):
            raise ParseError("edge type entries need name, from, to")
        name, src, dst = entry["name"], entry["from"], entry["to"]
        for endpoint in (src, dst):
            if endpoint not in classes:
                raise ValidationError(f"edge type {name}: unknown class {endpoint}")
        key = (name, src, dst)
        if key in seen_edges:
            raise ValidationError(f"duplicate edge type: {key}")
        seen_edges.add(key)
        edge_types.append(
            EdgeTypeDef(
                name,
                src,
                dst,
                _parse_attributes(entry.get("attributes"), name),
                bool(entry.get("aggregated", False)),
            )
        )

    schema = OntologySchema(classes, edge_types, str(document.get("version", "1")))
    _check_connected(schema)
    return schema


def _check_connected(schema: OntologySchema) -> None:
    if not schema.classes:
        raise ValidationError("schema has no classes")
    start = next(iter(schema.classes))
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nb in schema.neighbors(cur):
            if nb.neighbor_class not in seen:
                seen.add(nb.neighbor_class)
                queue.append(nb.neighbor_class)
    missing = set(schema.classes) - seen
    if missing:
        raise ValidationError(f"schema graph is disconnected; unreachable: {sorted(missing)}")


def load_schema(source: str) -> OntologySchema:
    """Parse a schema document from JSON text."""
    try:
        document = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed schema document: {exc}") from None
    return parse_schema(document)


def dump_schema(schema: OntologySchema) -> str:
    return json.dumps(schema.to_json(), indent=2, sort_keys=True)
