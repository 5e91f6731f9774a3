"""Multi-constraint shortest-path reasoning over the ontology schema.

For each constraint anchor class the reasoner finds a minimal-hop route to
the target class over the undirected schema graph, reusing already-found
routes two ways: a constraint whose anchor lies on an existing route
attaches in place, and a fresh search splices onto an existing route at
the earliest node where doing so stays distance-tight.  Steps traversed
against an edge type's stored direction carry a reverse mark instead of
duplicating vertices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import NoPath, UnresolvedTarget
from .nlq import Constraint, ParsedQuestion
from .schema import Direction, OntologySchema


@dataclass(frozen=True)
class Step:
    """One schema-level hop, in traversal order (from_class -> to_class)."""

    edge_type: str
    direction: Direction
    from_class: str
    to_class: str

    @property
    def reversed(self) -> bool:
        return self.direction is Direction.BACK

    def key(self) -> tuple[str, str, str]:
        """Ordering used for lexicographic tie-breaking."""
        return (self.edge_type, self.to_class, self.direction.value)

    def to_json(self) -> dict:
        return {
            "edge": self.edge_type,
            "direction": self.direction.value,
            "from": self.from_class,
            "to": self.to_class,
            "reversed": self.reversed,
        }


@dataclass(frozen=True)
class ReasoningPath:
    anchor_class: str
    steps: tuple[Step, ...]
    spliced_at: str | None = None  # class where the search joined an existing route

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def classes(self) -> tuple[str, ...]:
        chain = [self.anchor_class]
        for step in self.steps:
            chain.append(step.to_class)
        return tuple(chain)

    @property
    def reversed_steps(self) -> frozenset[int]:
        return frozenset(i for i, step in enumerate(self.steps) if step.reversed)

    def validate(self) -> None:
        cursor = self.anchor_class
        for step in self.steps:
            if step.from_class != cursor:
                raise NoPath(f"broken chain at {step.from_class}, expected {cursor}")
            cursor = step.to_class

    def to_json(self) -> dict:
        return {
            "anchor": self.anchor_class,
            "steps": [s.to_json() for s in self.steps],
            "spliced_at": self.spliced_at,
        }


def distances_from(schema: OntologySchema, source: str) -> dict[str, int]:
    """BFS hop counts over the undirected schema graph."""
    if source not in schema.classes:
        raise NoPath(f"unknown class {source!r}")
    dist = {source: 0}
    queue = deque([source])
    while queue:
        cur = queue.popleft()
        for nbr in schema.neighbors(cur):
            if nbr.neighbor_class not in dist:
                dist[nbr.neighbor_class] = dist[cur] + 1
                queue.append(nbr.neighbor_class)
    return dist


def _lex_path(schema: OntologySchema, source: str, target: str) -> tuple[Step, ...]:
    """Lexicographically smallest shortest path, built greedily.

    At each node the smallest admissible step (by edge type, then reached
    class, then direction) that still leaves a shortest route to the
    target is taken; neighbors() is pre-sorted in exactly that order.
    """
    dist = distances_from(schema, target)
    if source not in dist:
        raise NoPath(f"no route from {source} to {target}")
    steps: list[Step] = []
    cursor = source
    while cursor != target:
        for nbr in schema.neighbors(cursor):
            if dist.get(nbr.neighbor_class, -1) == dist[cursor] - 1:
                steps.append(Step(nbr.edge_type.name, nbr.direction, cursor, nbr.neighbor_class))
                cursor = nbr.neighbor_class
                break
        else:  # pragma: no cover - unreachable on a connected schema
            raise NoPath(f"stuck at {cursor} heading for {target}")
    return tuple(steps)


def shortest_path(
    schema: OntologySchema,
    from_class: str,
    to_class: str,
    existing: list[ReasoningPath] | tuple[ReasoningPath, ...] = (),
) -> ReasoningPath:
    """Minimal-hop route, splicing onto an existing route when tight.

    A node X of an existing route is a splice point when d(anchor, X) +
    r(X) equals the direct shortest distance, r being X's remaining hops
    along that route.  The earliest such touch (smallest d) wins, ties
    broken by the lexicographically smallest reused suffix.
    """
    if from_class == to_class:
        return ReasoningPath(from_class, ())
    d_from = distances_from(schema, from_class)
    if to_class not in d_from:
        raise NoPath(f"no route from {from_class} to {to_class}")
    direct = d_from[to_class]

    best: tuple[int, tuple, str, tuple[Step, ...]] | None = None
    for path in existing:
        chain = path.classes
        if chain[-1] != to_class:
            continue
        for pos, node in enumerate(chain):
            remaining = len(path.steps) - pos
            reach = d_from.get(node)
            if reach is None or reach + remaining != direct or remaining == 0:
                continue
            suffix = path.steps[pos:]
            rank = (reach, tuple(s.key() for s in suffix), node, suffix)
            if best is None or rank < best:
                best = rank
    if best is not None:
        reach, _, node, suffix = best
        prefix = _lex_path(schema, from_class, node) if reach else ()
        return ReasoningPath(from_class, tuple(prefix) + suffix, spliced_at=node)
    return ReasoningPath(from_class, _lex_path(schema, from_class, to_class))


@dataclass
class ReasoningPlan:
    target_class: str
    routes: list[ReasoningPath]
    bindings: dict[int, tuple[int, int]] = field(default_factory=dict)  # constraint -> (route, chain position)

    @property
    def merged_steps(self) -> list[Step]:
        """The merged DAG rooted at the target: each distinct step once."""
        unique = {s for route in self.routes for s in route.steps}
        return sorted(unique, key=lambda s: (s.from_class, s.edge_type, s.to_class, s.direction.value))

    @property
    def merged_classes(self) -> set[str]:
        found = {self.target_class}
        for route in self.routes:
            found.update(route.classes)
        return found

    def route_for(self, constraint_index: int) -> tuple[Step, ...]:
        """The constraint's anchor-to-target step sequence."""
        route_idx, position = self.bindings[constraint_index]
        return self.routes[route_idx].steps[position:]

    def max_hops(self) -> int:
        return max((r.length for r in self.routes), default=0)

    def to_json(self) -> dict:
        return {
            "target": self.target_class,
            "routes": [r.to_json() for r in self.routes],
            "bindings": [
                {"constraint": idx, "route": route, "position": pos}
                for idx, (route, pos) in sorted(self.bindings.items())
            ],
            "merged": [s.to_json() for s in self.merged_steps],
        }


def _edge_route_head(schema: OntologySchema, constraint: Constraint, dist_to_target: dict[str, int]) -> tuple[str, Step]:
    """Anchor class and forced first step for an edge-existence constraint."""
    etype = schema.edge_type(constraint.edge_name)
    r_from = dist_to_target.get(etype.from_class)
    r_to = dist_to_target.get(etype.to_class)
    if r_from is None or r_to is None:
        raise NoPath(f"edge {etype.name} endpoints unreachable from target")
    if r_from <= r_to:
        near, far = etype.from_class, etype.to_class
    else:
        near, far = etype.to_class, etype.from_class
    direction = Direction.FWD if etype.from_class == far else Direction.BACK
    return far, Step(etype.name, direction, far, near)


def plan(schema: OntologySchema, parsed: ParsedQuestion, reuse: bool = True) -> ReasoningPlan:
    """Build the merged reasoning plan for a parsed question.

    Constraints are processed in ascending anchor-to-target distance
    (ties by position in C) — a deterministic order that maximizes route
    reuse and keeps plans identical run to run.  With reuse disabled
    every constraint is searched independently — used by tests to check
    splice soundness.
    """
    if parsed.target is None:
        raise UnresolvedTarget("question has no resolved target")
    target = parsed.target.class_name
    if target not in schema.classes:
        raise UnresolvedTarget(f"target class {target!r} not in schema")
    dist_to_target = distances_from(schema, target)

    heads: list[tuple[str, Step | None]] = []
    for constraint in parsed.constraints:
        if constraint.kind == "edge":
            heads.append(_edge_route_head(schema, constraint, dist_to_target))
        else:
            anchor = constraint.class_name
            if anchor not in dist_to_target:
                raise NoPath(f"no route from {anchor} to {target}")
            heads.append((anchor, None))

    order = sorted(
        range(len(parsed.constraints)),
        key=lambda i: (dist_to_target[heads[i][0]], i),
    )

    result = ReasoningPlan(target, [])
    empty_route: int | None = None
    for i in order:
        anchor, forced = heads[i]
        if forced is None and anchor == target:
            if empty_route is None:
                result.routes.append(ReasoningPath(target, ()))
                empty_route = len(result.routes) - 1
            result.bindings[i] = (empty_route, 0)
            continue
        if forced is None:
            if reuse:
                hit = _find_on_routes(result.routes, anchor)
                if hit is not None:
                    result.bindings[i] = hit
                    continue
            path = shortest_path(schema, anchor, target, result.routes if reuse else [])
            result.routes.append(path)
            result.bindings[i] = (len(result.routes) - 1, 0)
        else:
            near = forced.to_class
            if near == target:
                path = ReasoningPath(anchor, (forced,))
            else:
                rest = shortest_path(schema, near, target, result.routes if reuse else [])
                path = ReasoningPath(anchor, (forced,) + rest.steps, rest.spliced_at)
            path.validate()
            result.routes.append(path)
            result.bindings[i] = (len(result.routes) - 1, 0)

    for route in result.routes:
        route.validate()
    return result


def _find_on_routes(routes: list[ReasoningPath], anchor: str) -> tuple[int, int] | None:
    for route_idx, route in enumerate(routes):
        chain = route.classes
        if anchor in chain:
            return (route_idx, chain.index(anchor))
    return None
