import json
import random
from datetime import date, timedelta
from pathlib import Path

import pytest

from gridqa import corpus
from gridqa.engine import Engine
from gridqa.nlq import Constraint, ParsedQuestion, Target
from gridqa.schema import OntologySchema, load_schema
from gridqa.store import GraphStore, load_graph
from gridqa.values import Comparator, Duration

FIXTURES = Path(__file__).parent / "fixtures"
DEMO = Path(__file__).parent.parent / "demo"


@pytest.fixture(scope="session")
def demo_dir() -> Path:
    return DEMO


@pytest.fixture(scope="session")
def demo_engine() -> Engine:
    return Engine.load(DEMO)


@pytest.fixture(scope="session")
def mini_store(demo_engine) -> GraphStore:
    return load_graph(
        demo_engine.schema,
        (FIXTURES / "mini_vertices.jsonl").read_text(),
        (FIXTURES / "mini_edges.jsonl").read_text(),
    )


@pytest.fixture(scope="session")
def letter_schema() -> OntologySchema:
    return load_schema((FIXTURES / "letter_schema.json").read_text())


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("corpus42")
    corpus.generate(root, seed=42, vertex_count=10_000, case_count=50)
    return root


@pytest.fixture(scope="session")
def corpus_engine(corpus_dir) -> Engine:
    return Engine.load(corpus_dir)


def make_parsed(target_class: str | None, constraints, question_type: str = "selection") -> ParsedQuestion:
    """Build a ParsedQuestion directly, bypassing the language front end."""
    target = None
    if target_class is not None:
        target = Target(
            class_name=target_class, attr_name=None,
            question_type=question_type, surface=target_class.lower(),
        )
    return ParsedQuestion(
        raw="synthetic", tokens=[], tags=[], target=target, constraints=list(constraints),
    )


@pytest.fixture
def parsed_factory():
    return make_parsed


def random_schema(rng: random.Random, n_classes: int) -> OntologySchema:
    """Connected random schema; every class carries string/decimal/date attrs."""
    classes = [
        {
            "name": f"K{i}",
            "kind": "physical" if i % 2 == 0 else "abstract",
            "attributes": [
                {"name": "name", "datatype": "string"},
                {"name": "size", "datatype": "decimal"},
                {"name": "when", "datatype": "date"},
            ],
        }
        for i in range(n_classes)
    ]
    edges = []
    for i in range(1, n_classes):
        j = rng.randrange(i)
        a, b = (i, j) if rng.random() < 0.5 else (j, i)
        edges.append({"name": f"e{len(edges)}", "from": f"K{a}", "to": f"K{b}"})
    for _ in range(rng.randrange(n_classes)):
        a, b = rng.randrange(n_classes), rng.randrange(n_classes)
        if a != b:
            edges.append({"name": f"e{len(edges)}", "from": f"K{a}", "to": f"K{b}"})
    return load_schema(json.dumps({"version": "1", "classes": classes, "edge_types": edges}))


def random_graph(rng: random.Random, schema: OntologySchema, n_vertices: int) -> GraphStore:
    names = sorted(schema.classes)
    vrows = []
    for i in range(n_vertices):
        cls = rng.choice(names)
        when = date(2010, 1, 1) + timedelta(days=rng.randrange(4380))
        vrows.append({
            "id": f"x{i}",
            "class": cls,
            "attrs": {
                "name": f"{cls.lower()}-{i % 7}",
                "size": round(rng.uniform(0, 100), 1),
                "when": when.isoformat(),
            },
        })
    by_class: dict[str, list[str]] = {}
    for row in vrows:
        by_class.setdefault(row["class"], []).append(row["id"])
    erows, seen = [], set()
    for et in schema.edge_types:
        for src in by_class.get(et.from_class, []):
            if rng.random() < 0.6:
                dsts = by_class.get(et.to_class)
                if not dsts:
                    continue
                dst = rng.choice(dsts)
                if src != dst and (src, et.name, dst) not in seen:
                    seen.add((src, et.name, dst))
                    erows.append({"src": src, "dst": dst, "type": et.name})
    return load_graph(
        schema,
        "\n".join(json.dumps(r) for r in vrows),
        "\n".join(json.dumps(r) for r in erows),
    )


def random_constraint(rng: random.Random, schema: OntologySchema, store: GraphStore) -> Constraint:
    names = sorted(schema.classes)
    kind = rng.choice(["class", "attribute", "attribute", "instance", "edge"])
    if kind == "class":
        return Constraint("class", rng.choice(names))
    if kind == "edge":
        et = rng.choice(schema.edge_types)
        return Constraint("edge", edge_name=et.name)
    if kind == "instance":
        vid = rng.choice(sorted(store.vertices))
        return Constraint(
            "instance", store.vertices[vid].class_name,
            vertex_id=vid, comparator=Comparator.EQ, value=vid,
        )
    cls = rng.choice(names)
    attr = rng.choice(["name", "size", "when"])
    if attr == "name":
        comp = rng.choice([Comparator.EQ, Comparator.NEQ, Comparator.CONTAINS])
        value: object = f"{cls.lower()}-{rng.randrange(7)}"
        if comp is Comparator.CONTAINS:
            value = str(value)[:3]
    elif attr == "size":
        comp = rng.choice([Comparator.LT, Comparator.LE, Comparator.GT, Comparator.GE, Comparator.EQ])
        value = round(rng.uniform(0, 100), 1)
    else:
        comp = rng.choice([Comparator.IN_YEAR, Comparator.WITHIN_DURATION, Comparator.GE, Comparator.LT])
        if comp is Comparator.IN_YEAR:
            value = rng.randrange(2010, 2022)
        elif comp is Comparator.WITHIN_DURATION:
            value = Duration(rng.randrange(1, 6), "years")
        else:
            value = date(2010, 1, 1) + timedelta(days=rng.randrange(4380))
    return Constraint("attribute", cls, attr, comparator=comp, value=value)


def random_parsed(rng: random.Random, schema: OntologySchema, store: GraphStore) -> ParsedQuestion:
    target = rng.choice(sorted(schema.classes))
    constraints = []
    for i in range(rng.randrange(0, 4)):
        c = random_constraint(rng, schema, store)
        connector = "and" if i == 0 else rng.choice(["and", "and", "or", "not"])
        constraints.append(Constraint(
            c.kind, c.class_name, c.attr_name, c.edge_name, c.vertex_id,
            c.comparator, c.value, connector, c.surface,
        ))
    return make_parsed(target, constraints)
