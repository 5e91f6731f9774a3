"""Traversal-plan compilation and execution.

compile_plan() lowers a ReasoningPlan to a TraversalPlan: one route per
constraint (anchor predicate + step chain to the target), grouped into
disjunct groups at every "or" connector, ordered within a group by seed
selectivity with anti-joins last.  execute() runs the plan with indexed
anchor lookups and level-by-level semi-joins, collecting one witness per
answer per constraint, and returns the AnswerGraph.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import date

from .errors import InconsistentPlan
from .nlq import ParsedQuestion
from .reasoner import ReasoningPlan, Step
from .store import Edge, GraphStore, Vertex
from .values import (
    Comparator,
    DEFAULT_EVALUATION_DATE,
    evaluate_predicate,
    value_to_json,
)


@dataclass(frozen=True)
class ConstraintRoute:
    """One constraint lowered to an anchor predicate plus a step chain."""

    index: int
    kind: str  # class | instance | attribute | edge
    anchor_class: str
    steps: tuple[Step, ...]
    attr_name: str | None = None
    comparator: Comparator | None = None
    value: object = None
    vertex_id: str | None = None
    negated: bool = False
    surface: str = ""

    def describe_predicate(self) -> str:
        if self.kind == "instance":
            return f"{self.anchor_class} is {self.vertex_id}"
        if self.kind == "edge":
            edge = self.steps[0].edge_type if self.steps else "?"
            return f"edge {edge} present"
        if self.comparator is None:
            if self.attr_name is None:
                return f"any {self.anchor_class}"
            return f"{self.anchor_class}.{self.attr_name} present"
        rendered = json.dumps(value_to_json(self.value), sort_keys=True)
        return f"{self.anchor_class}.{self.attr_name} {self.comparator.value} {rendered}"

    def to_json(self) -> dict:
        doc: dict = {
            "constraint": self.index,
            "kind": self.kind,
            "anchor": self.anchor_class,
            "steps": [s.to_json() for s in self.steps],
            "negated": self.negated,
        }
        if self.vertex_id is not None:
            doc["vertex"] = self.vertex_id
        if self.attr_name is not None:
            doc["attribute"] = self.attr_name
        if self.comparator is not None:
            doc["comparator"] = self.comparator.value
            doc["value"] = value_to_json(self.value)
        return doc


@dataclass(frozen=True)
class GroupPlan:
    """One disjunct: positives in seed order, then anti-joined negatives."""

    routes: tuple[ConstraintRoute, ...]

    @property
    def positives(self) -> tuple[ConstraintRoute, ...]:
        return tuple(r for r in self.routes if not r.negated)

    @property
    def negatives(self) -> tuple[ConstraintRoute, ...]:
        return tuple(r for r in self.routes if r.negated)


@dataclass
class TraversalPlan:
    target_class: str
    groups: tuple[GroupPlan, ...]
    question_type: str = "selection"
    reference_date: date = DEFAULT_EVALUATION_DATE

    def to_json(self) -> dict:
        return {
            "target": self.target_class,
            "question_type": self.question_type,
            "reference_date": self.reference_date.isoformat(),
            "groups": [[r.to_json() for r in g.routes] for g in self.groups],
        }

    def pseudo_query(self) -> str:
        """Human-readable rendering of the traversal, for explanations."""
        lines = [f"MATCH {self.target_class}"]
        for gi, group in enumerate(self.groups):
            if gi:
                lines.append("OR")
            if not group.routes:
                lines.append("  SCAN all")
                continue
            seed_seen = False
            for route in group.routes:
                if route.negated:
                    verb = "DROP"
                elif not seed_seen:
                    verb, seed_seen = "SEED", True
                else:
                    verb = "KEEP"
                hops = " . ".join(
                    f"{s.edge_type}({'back' if s.reversed else 'fwd'})->{s.to_class}" for s in route.steps
                )
                suffix = f" VIA {hops}" if hops else ""
                lines.append(f"  {verb} {route.describe_predicate()}{suffix}")
        if self.question_type == "count":
            lines.append("RETURN count")
        else:
            lines.append(f"RETURN {self.target_class}")
        return "\n".join(lines)


def _resolve_reference_date(parsed: ParsedQuestion, evaluation_date: date) -> date:
    """Dec 31 of the first in_year constraint, else the injected evaluation date."""
    for constraint in parsed.constraints:
        if constraint.comparator is Comparator.IN_YEAR:
            return date(int(constraint.value), 12, 31)
    return evaluation_date


def compile_plan(
    rplan: ReasoningPlan,
    parsed: ParsedQuestion,
    store: GraphStore,
    evaluation_date: date = DEFAULT_EVALUATION_DATE,
) -> TraversalPlan:
    if parsed.target is None:
        raise InconsistentPlan("parsed question has no target")
    if rplan.target_class != parsed.target.class_name:
        raise InconsistentPlan(
            f"plan targets {rplan.target_class}, question targets {parsed.target.class_name}"
        )
    if sorted(rplan.bindings) != list(range(len(parsed.constraints))):
        raise InconsistentPlan("plan bindings do not cover the constraint set")

    routes: list[ConstraintRoute] = []
    for i, constraint in enumerate(parsed.constraints):
        steps = rplan.route_for(i)
        anchor = steps[0].from_class if steps else rplan.target_class
        routes.append(
            ConstraintRoute(
                index=i,
                kind=constraint.kind,
                anchor_class=anchor,
                steps=steps,
                attr_name=constraint.attr_name,
                comparator=constraint.comparator,
                value=constraint.value,
                vertex_id=constraint.vertex_id,
                negated=constraint.connector == "not",
                surface=constraint.surface,
            )
        )

    # split the constraint list into disjunct groups at each "or"
    group_lists: list[list[ConstraintRoute]] = [[]]
    for i, constraint in enumerate(parsed.constraints):
        if constraint.connector == "or" and group_lists[-1]:
            group_lists.append([])
        group_lists[-1].append(routes[i])

    def selectivity(route: ConstraintRoute) -> tuple[int, int]:
        if route.kind == "instance":
            count = 1
        else:
            count = store.candidate_count(
                route.anchor_class, route.attr_name, route.comparator, route.value
            )
        return (count, route.index)

    groups = []
    for members in group_lists:
        positives = sorted((r for r in members if not r.negated), key=selectivity)
        negatives = sorted((r for r in members if r.negated), key=lambda r: r.index)
        groups.append(GroupPlan(tuple(positives) + tuple(negatives)))

    return TraversalPlan(
        target_class=rplan.target_class,
        groups=tuple(groups),
        question_type=parsed.target.question_type,
        reference_date=_resolve_reference_date(parsed, evaluation_date),
    )


@dataclass
class AnswerGraph:
    answers: list[str]
    vertices: list[Vertex]
    edges: list[Edge]
    bindings: list[dict]  # [{constraint_index, witness_ids aligned with answers}]
    stats: dict
    pseudo_query: str
    empty_reason: str | None = None
    witness_rows: list[dict] = field(default_factory=list)  # per-answer view, for tests/UI

    @property
    def count(self) -> int:
        return len(self.answers)

    def to_json(self) -> dict:
        doc = {
            "answers": [v.to_json() for v in sorted(
                (x for x in self.vertices if x.id in set(self.answers)), key=lambda v: v.id
            )],
            "count": self.count,
            "subgraph": {
                "vertices": [v.to_json() for v in self.vertices],
                "edges": [e.to_json() for e in self.edges],
            },
            "bindings": self.bindings,
            "stats": self.stats,
            "pseudo_query": self.pseudo_query,
        }
        if self.empty_reason is not None:
            doc["empty_reason"] = self.empty_reason
        return doc

    def canonical_json(self) -> str:
        """Serialization with volatile fields (elapsed time) removed."""
        doc = self.to_json()
        doc["stats"] = {k: v for k, v in doc["stats"].items() if k != "elapsed_ms"}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _anchor_set(store: GraphStore, route: ConstraintRoute, reference_date: date) -> set[str]:
    if route.kind == "instance":
        return {route.vertex_id} if route.vertex_id in store.vertices else set()
    if route.kind in ("class", "edge"):
        return set(store.class_vertices(route.anchor_class))
    if route.comparator is None:  # attribute presence
        return {
            vid
            for vid in store.class_vertices(route.anchor_class)
            if store.vertices[vid].attrs.get(route.attr_name) is not None
        }
    return store.vertices_by_attr(
        route.anchor_class, route.attr_name, route.comparator, route.value,
        reference_date=reference_date,
    )


class _Walk:
    """Forward walk of one route: level sets and a min-id witness per vertex."""

    def __init__(self, store: GraphStore, route: ConstraintRoute, reference_date: date):
        self.route = route
        anchor = _anchor_set(store, route, reference_date)
        self.levels: list[dict[str, str]] = [{vid: vid for vid in anchor}]
        self.hops = 0
        self.touched = len(anchor)
        for step in route.steps:
            nxt: dict[str, str] = {}
            for vid in sorted(self.levels[-1]):
                witness = self.levels[-1][vid]
                for _, neighbor in store.step(vid, step.edge_type, step.direction):
                    prior = nxt.get(neighbor.id)
                    if prior is None or witness < prior:
                        nxt[neighbor.id] = witness
            self.levels.append(nxt)
            self.hops += 1
            self.touched += len(nxt)

    @property
    def result(self) -> dict[str, str]:
        """target vertex id -> smallest witness anchor id."""
        return self.levels[-1]


def _collect_subgraph(
    store: GraphStore,
    walk: _Walk,
    answers: set[str],
    vertex_ids: set[str],
    edge_keys: set[tuple[str, str, str]],
    edges: list[Edge],
) -> None:
    """Trim the walk's level sets to the paths that reach accepted answers."""
    route = walk.route
    back: set[str] = answers & set(walk.levels[-1])
    vertex_ids |= back
    for level in range(len(route.steps) - 1, -1, -1):
        step = route.steps[level]
        forward = walk.levels[level]
        prev: set[str] = set()
        for vid in sorted(back):
            # reverse the step to find supporting vertices one level up
            for edge, neighbor in store.step(vid, step.edge_type, step.direction.flipped()):
                if neighbor.id in forward:
                    prev.add(neighbor.id)
                    key = (edge.src, edge.type, edge.dst)
                    if key not in edge_keys:
                        edge_keys.add(key)
                        edges.append(edge)
        vertex_ids |= prev
        back = prev


def execute(store: GraphStore, tplan: TraversalPlan) -> AnswerGraph:
    started = time.perf_counter()
    candidates = sorted(store.class_vertices(tplan.target_class))
    reference = tplan.reference_date

    hops = 0
    touched = len(candidates)
    group_results: list[tuple[set[str], dict[int, dict[str, str]]]] = []
    group_walks: list[dict[int, _Walk]] = []
    for group in tplan.groups:
        surviving: set[str] | None = None
        witness_maps: dict[int, dict[str, str]] = {}
        walks: dict[int, _Walk] = {}
        for route in group.positives:
            walk = _Walk(store, route, reference)
            walks[route.index] = walk
            hops += walk.hops
            touched += walk.touched
            witness_maps[route.index] = walk.result
            found = set(walk.result)
            surviving = found if surviving is None else surviving & found
            if not surviving:
                break
        if surviving is None:
            surviving = set(candidates)
        if surviving:
            for route in group.negatives:
                walk = _Walk(store, route, reference)
                hops += walk.hops
                touched += walk.touched
                surviving -= set(walk.result)
                if not surviving:
                    break
        group_results.append((surviving & set(candidates), witness_maps))
        group_walks.append(walks)

    answers = sorted(set().union(*(result for result, _ in group_results)) if group_results else set())

    # bindings: per constraint, witnesses aligned with the answer list; an
    # answer's witnesses come from the first group that accepted it
    accepting_group: dict[str, int] = {}
    for gi, (result, _) in enumerate(group_results):
        for vid in result:
            accepting_group.setdefault(vid, gi)

    all_routes = [r for g in tplan.groups for r in g.routes]
    bindings = []
    witness_rows = []
    for answer in answers:
        row: dict[str, str | None] = {}
        gi = accepting_group[answer]
        _, witness_maps = group_results[gi]
        for route in tplan.groups[gi].routes:
            row[str(route.index)] = None if route.negated else witness_maps[route.index].get(answer)
        witness_rows.append({"answer": answer, "group": gi, "witnesses": row})
    for route in sorted(all_routes, key=lambda r: r.index):
        bindings.append(
            {
                "constraint_index": route.index,
                "witness_ids": [rows["witnesses"].get(str(route.index)) for rows in witness_rows],
            }
        )

    # supporting subgraph: answers plus every vertex/edge on a witnessed path
    vertex_ids: set[str] = set(answers)
    edge_keys: set[tuple[str, str, str]] = set()
    edges: list[Edge] = []
    for gi, group in enumerate(tplan.groups):
        accepted_here = {a for a in answers if accepting_group[a] == gi}
        if not accepted_here:
            continue
        for route in group.positives:
            _collect_subgraph(store, group_walks[gi][route.index], accepted_here, vertex_ids, edge_keys, edges)

    vertices = sorted((store.vertices[vid] for vid in vertex_ids), key=lambda v: v.id)
    edges.sort(key=lambda e: (e.type, e.src, e.dst))

    elapsed_ms = (time.perf_counter() - started) * 1000.0
    stats = {
        "hops": hops,
        "vertices_touched": touched,
        "answers": len(answers),
        "elapsed_ms": max(round(elapsed_ms, 3), 0.001),
    }
    empty_reason = None
    if not answers:
        empty_reason = "no vertices satisfy every constraint" if all_routes else "no vertices of the target class"
    return AnswerGraph(
        answers=answers,
        vertices=vertices,
        edges=edges,
        bindings=bindings,
        stats=stats,
        pseudo_query=tplan.pseudo_query(),
        empty_reason=empty_reason,
        witness_rows=witness_rows,
    )
