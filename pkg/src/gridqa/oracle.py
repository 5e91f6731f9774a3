"""Brute-force plan evaluation.

This is the reference evaluator the optimized executor is checked
against, and the source of expected answers baked into generated
corpora.  It deliberately shares no execution machinery with
query.execute(): every target-class vertex is tested one at a time by
depth-first path existence going backward along each route, attribute
predicates are evaluated by direct scans, and no index, seed ordering,
or witness bookkeeping is involved.
"""
from __future__ import annotations

from datetime import date

from .query import ConstraintRoute, TraversalPlan
from .store import GraphStore, Vertex
from .values import evaluate_predicate


def _matches(vertex: Vertex, route: ConstraintRoute, reference_date: date) -> bool:
    if route.kind == "instance":
        return vertex.id == route.vertex_id
    if route.kind in ("class", "edge"):
        return True
    if route.comparator is None:
        return vertex.attrs.get(route.attr_name) is not None
    return evaluate_predicate(
        vertex.attrs.get(route.attr_name), route.comparator, route.value,
        reference_date=reference_date,
    )


def _witness_exists(
    store: GraphStore,
    route: ConstraintRoute,
    level: int,
    vertex_id: str,
    reference_date: date,
) -> bool:
    """Does any path from the anchor reach vertex_id at this route level?"""
    if level == 0:
        return _matches(store.vertices[vertex_id], route, reference_date)
    step = route.steps[level - 1]
    for _, neighbor in store.step(vertex_id, step.edge_type, step.direction.flipped()):
        if _witness_exists(store, route, level - 1, neighbor.id, reference_date):
            return True
    return False


def satisfies(store: GraphStore, route: ConstraintRoute, candidate: str, reference_date: date) -> bool:
    return _witness_exists(store, route, len(route.steps), candidate, reference_date)


def brute_force_answers(store: GraphStore, tplan: TraversalPlan) -> set[str]:
    """Answer set by naive enumeration; must equal execute()'s answers."""
    reference = tplan.reference_date
    accepted: set[str] = set()
    for candidate in store.class_vertices(tplan.target_class):
        for group in tplan.groups:
            ok = all(
                satisfies(store, route, candidate, reference) for route in group.positives
            ) and not any(
                satisfies(store, route, candidate, reference) for route in group.negatives
            )
            if ok:
                accepted.add(candidate)
                break
    return accepted
