"""Acceptance gate: one test per shipping criterion.

Run with ``pytest -v tests/test_acceptance.py`` to get exactly one
pass/fail line per criterion.  Every check is zero-tolerance — plain
assertions, no approximate comparisons except the stated latency budgets.
"""
import json
import random
import time

import networkx as nx

from gridqa.corpus import load_cases
from gridqa.engine import Engine
from gridqa.nlq import Constraint, ParsedQuestion
from gridqa.oracle import brute_force_answers
from gridqa.query import compile_plan, execute
from gridqa.reasoner import plan
from gridqa.session import SessionRegistry, merge_constraints
from gridqa.values import Comparator, Duration

from conftest import DEMO, make_parsed, random_graph, random_parsed, random_schema
from test_reasoner import _as_tuples, _enumerate_shortest

GOLDEN_QUESTION = (
    "Which transformers in the California power grid have oil leakage"
    " within five years of operation in 2019?"
)
GOLDEN_CONSTRAINTS = [
    ("instance", "Utility", None, Comparator.EQ, "U1", "and"),
    ("attribute", "DefectRecord", "defect_type", Comparator.EQ, "oil leakage", "and"),
    ("attribute", "Transformer", "commission_date", Comparator.WITHIN_DURATION, Duration(5, "years"), "and"),
    ("attribute", "DefectRecord", "report_date", Comparator.IN_YEAR, 2019, "and"),
]


def _tuples(parsed):
    return [
        (c.kind, c.class_name, c.attr_name, c.comparator, c.value, c.connector)
        for c in parsed.constraints
    ]


def test_criterion_1_golden_parse_under_either_provider(demo_engine):
    deps = (DEMO / "deps" / "golden_question.conllu").read_text()
    for provider_deps in (None, deps):
        started = time.perf_counter()
        parsed = demo_engine.parse(GOLDEN_QUESTION, deps=provider_deps)
        elapsed = time.perf_counter() - started
        assert parsed.target.class_name == "Transformer"
        assert parsed.target.question_type == "selection"
        assert _tuples(parsed) == GOLDEN_CONSTRAINTS
        assert parsed.provider == ("rule" if provider_deps is None else "override")
        assert elapsed < 1.0
    print("PASS criterion 1: golden parse, both providers, < 1s")


def test_criterion_2_letter_fixture_reasoning(letter_schema):
    parsed = make_parsed("D", [Constraint("class", n) for n in ("A", "E", "G")])
    merged = plan(letter_schema, parsed)

    # all three anchors appear, each on a route that ends at the target
    assert {r.anchor_class for r in merged.routes} == {"A", "E", "G"}
    assert all(r.classes[-1] == "D" for r in merged.routes)

    # the A and E routes intersect: six route steps merge into five
    assert sum(len(merged.route_for(i)) for i in range(3)) == 6
    assert len(merged.merged_steps) == 5
    by_anchor = {r.anchor_class: r for r in merged.routes}
    shared = set(by_anchor["A"].steps) & set(by_anchor["E"].steps)
    assert {(s.from_class, s.to_class) for s in shared} == {("C", "D")}

    # the G-D hop rides the stored D->G edge backwards instead of adding a vertex
    g_route = merged.route_for(2)
    assert len(g_route) == 1
    assert g_route[0].reversed
    assert (g_route[0].from_class, g_route[0].to_class) == ("G", "D")
    assert merged.merged_classes == {"A", "B", "C", "D", "E", "G"}

    # every chosen route is one of the exhaustively enumerated shortest paths
    for idx, anchor in enumerate(["A", "E", "G"]):
        shortest = _enumerate_shortest(letter_schema, anchor, "D")
        assert _as_tuples(merged.route_for(idx)) in shortest
        assert len(merged.route_for(idx)) == len(next(iter(shortest)))
    print("PASS criterion 2: letter-fixture plan merged, reverse mark verified")


def test_criterion_3_shortest_path_oracle_suite():
    rng = random.Random(2026)
    schemas = 0
    while schemas < 100:
        schema = random_schema(rng, rng.randrange(2, 21))
        graph = nx.Graph()
        graph.add_nodes_from(schema.classes)
        for et in schema.edge_types:
            graph.add_edge(et.from_class, et.to_class)
        names = sorted(schema.classes)
        target = rng.choice(names)
        anchors = rng.sample(names, k=min(len(names), rng.randrange(1, 7)))
        merged = plan(schema, make_parsed(target, [Constraint("class", a) for a in anchors]))
        for idx, anchor in enumerate(anchors):
            assert len(merged.route_for(idx)) == nx.shortest_path_length(graph, anchor, target)
        schemas += 1
    assert schemas >= 100
    print(f"PASS criterion 3: {schemas} random schemas, all path lengths equal BFS oracle")


def test_criterion_4_query_oracle_suite(corpus_engine, corpus_dir):
    rng = random.Random(2027)
    instances = 0
    while instances < 200:
        schema = random_schema(rng, rng.randrange(2, 8))
        store = random_graph(rng, schema, rng.randrange(20, 150))
        for _ in range(2):
            parsed = random_parsed(rng, schema, store)
            tplan = compile_plan(plan(schema, parsed), parsed, store)
            assert set(execute(store, tplan).answers) == brute_force_answers(store, tplan)
            instances += 1

    # a pair of larger graphs, still within the stated 10k-vertex bound
    big = random.Random(2028)
    schema = random_schema(big, 10)
    store = random_graph(big, schema, 4000)
    for _ in range(8):
        parsed = random_parsed(big, schema, store)
        tplan = compile_plan(plan(schema, parsed), parsed, store)
        assert set(execute(store, tplan).answers) == brute_force_answers(store, tplan)
        instances += 1

    # full bundled corpus: the optimized executor against the naive evaluator
    cases = load_cases((corpus_dir / "cases.json").read_text())
    engine = corpus_engine
    for case in cases:
        parsed = engine.parse(case.question)
        if case.follow_up is not None:
            try:
                extra = engine.parse(case.follow_up)
            except Exception:
                extra = engine.parse_fragment(case.follow_up)
            parsed = ParsedQuestion(
                raw=case.follow_up, tokens=extra.tokens, tags=extra.tags,
                target=extra.target or parsed.target,
                constraints=merge_constraints(parsed.constraints, extra.constraints),
            )
        tplan = compile_plan(plan(engine.schema, parsed), parsed, engine.store, engine.evaluation_date)
        got = set(execute(engine.store, tplan).answers)
        assert got == brute_force_answers(engine.store, tplan), case.id
        assert sorted(got) == sorted(case.expected), case.id
    print(f"PASS criterion 4: {instances} random instances + {len(cases)} corpus cases match brute force")


def test_criterion_5_corpus_run_through_the_cli(corpus_dir):
    from click.testing import CliRunner

    from gridqa.cli import main

    runner = CliRunner()
    as_json = runner.invoke(main, ["eval", "--data", str(corpus_dir), "--json"])
    assert as_json.exit_code == 0, as_json.output
    report = json.loads(as_json.output)
    assert report["total"] == 50
    assert report["accepted"] == 50
    assert report["accuracy"] == 1.0
    assert report["parsing_errors"] == 0
    assert report["reasoning_errors"] == 0
    assert report["avg_ms"] < 100.0
    categories = report["categories"]
    assert categories["multi_hop"]["avg_ms"] >= categories["single_hop"]["avg_ms"]

    as_text = runner.invoke(main, ["eval", "--data", str(corpus_dir)])
    assert as_text.exit_code == 0
    lines = as_text.output.splitlines()
    assert lines[0].split() == ["Question", "Type", "Quantity", "Accepted", "Avg", "Time", "(ms)"]
    assert [line.split()[0] for line in lines[1:6]] == [
        "Single-hop", "Multi-hop", "Single-condition", "Multi-condition", "Overall",
    ]
    print(f"PASS criterion 5: eval 50/50 accepted, avg {report['avg_ms']:.1f}ms < 100ms, ordering holds")


def test_criterion_6_session_equivalence_on_every_follow_up(corpus_engine, corpus_dir):
    cases = [c for c in load_cases((corpus_dir / "cases.json").read_text()) if c.follow_up]
    assert cases
    registry = SessionRegistry(corpus_engine)
    for case in cases:
        session = registry.create()
        registry.ask(session.id, case.question)
        via_session = registry.ask(session.id, case.follow_up, mode="follow_up")

        first = corpus_engine.parse(case.question)
        try:
            extra = corpus_engine.parse(case.follow_up)
        except Exception:
            extra = corpus_engine.parse_fragment(case.follow_up)
        merged = ParsedQuestion(
            raw=case.follow_up, tokens=extra.tokens, tags=extra.tags,
            target=extra.target or first.target,
            constraints=merge_constraints(first.constraints, extra.constraints),
        )
        fresh = corpus_engine.answer_parsed(merged)
        assert via_session.answer.canonical_json() == fresh.answer.canonical_json(), case.id
        assert sorted(via_session.answer.answers) == sorted(case.expected), case.id
    print(f"PASS criterion 6: {len(cases)} follow-up cases equal their merged fresh answers")


def test_criterion_7_two_runs_serialize_identically(corpus_dir):
    questions = [
        GOLDEN_QUESTION,
        "Which manufacturers made 220kV transformers with oil leakage?",
        "How many transformers are there?",
    ]

    def run(data_dir, asked):
        engine = Engine.load(data_dir)
        blobs = []
        for question in asked:
            result = engine.answer(question)
            blobs.append(json.dumps(result.reasoning.to_json(), sort_keys=True))
            blobs.append(json.dumps(result.traversal.to_json(), sort_keys=True))
            blobs.append(result.answer.canonical_json())
        return blobs

    assert run(DEMO, questions) == run(DEMO, questions)

    corpus_questions = [c.question for c in load_cases((corpus_dir / "cases.json").read_text())[:10]]
    assert run(corpus_dir, corpus_questions) == run(corpus_dir, corpus_questions)
    print("PASS criterion 7: plan and answer serializations byte-identical across runs")
