import json
from datetime import date

import pytest

from gridqa.deptree import build_rule_tree, parse_conllu
from gridqa.errors import (
    DanglingQualifier,
    EmptyQuestion,
    GridQAError,
    NoTargetFound,
    ParseError,
    UnparseableInput,
)
from gridqa.lexicon import TagKind, load_lexicon
from gridqa.nlq import parse_fragment, parse_question
from gridqa.tagging import tag_entities, tokenize
from gridqa.values import Comparator, Duration

GOLDEN_QUESTION = "Which transformers in the California power grid have oil leakage within five years of operation in 2019?"
MAKER_QUESTION = "Which manufacturers made 220kV transformers with oil leakage?"


def _parse(engine, question, deps=None):
    return parse_question(engine.schema, engine.lexicon, engine.gazetteer, question, deps_override=deps)


def _constraint_tuples(parsed):
    return [
        (c.kind, c.class_name, c.attr_name, c.comparator, c.value, c.connector)
        for c in parsed.constraints
    ]


GOLDEN_CONSTRAINTS = [
    ("instance", "Utility", None, Comparator.EQ, "U1", "and"),
    ("attribute", "DefectRecord", "defect_type", Comparator.EQ, "oil leakage", "and"),
    ("attribute", "Transformer", "commission_date", Comparator.WITHIN_DURATION, Duration(5, "years"), "and"),
    ("attribute", "DefectRecord", "report_date", Comparator.IN_YEAR, 2019, "and"),
]


def test_golden_question_tags(demo_engine):
    parsed = _parse(demo_engine, GOLDEN_QUESTION)
    kinds = {tag.surface: tag.binding.tag_kind for tag in parsed.tags}
    assert kinds["which"] is TagKind.QUESTION_WORD
    assert kinds["transformers"] is TagKind.CLASS
    assert kinds["california power grid"] is TagKind.INSTANCE
    assert kinds["oil leakage"] is TagKind.VALUE
    assert kinds["within"] is TagKind.TIME
    assert kinds["five years"] is TagKind.VALUE
    assert kinds["operation"] is TagKind.ATTRIBUTE
    assert kinds["2019"] is TagKind.VALUE


def test_golden_parse_rule_provider(demo_engine):
    parsed = _parse(demo_engine, GOLDEN_QUESTION)
    assert parsed.provider == "rule"
    assert parsed.target.class_name == "Transformer"
    assert parsed.target.question_type == "selection"
    assert _constraint_tuples(parsed) == GOLDEN_CONSTRAINTS


def test_golden_parse_conllu_provider(demo_engine, demo_dir):
    deps = (demo_dir / "deps" / "golden_question.conllu").read_text()
    parsed = _parse(demo_engine, GOLDEN_QUESTION, deps=deps)
    assert parsed.provider == "override"
    assert parsed.target.class_name == "Transformer"
    assert _constraint_tuples(parsed) == GOLDEN_CONSTRAINTS


def test_single_class_token(demo_engine):
    tokens, quoted = tokenize("transformers")
    tags = tag_entities(tokens, demo_engine.lexicon, demo_engine.gazetteer, demo_engine.schema, quoted)
    assert len(tags) == 1
    assert tags[0].binding.tag_kind is TagKind.CLASS
    assert tags[0].binding.class_name == "Transformer"


def test_instance_tag_via_lexicon_variant(demo_engine):
    entries = [
        {
            "surface": "state grid corp",
            "variants": ["sgcc"],
            "tag_kind": "instance",
            "binds_to": {"kind": "instance", "ref": "U1"},
        }
    ]
    lexicon = load_lexicon(json.dumps(entries), demo_engine.schema, demo_engine.store)
    tokens, quoted = tokenize("SGCC")
    tags = tag_entities(tokens, lexicon, {}, demo_engine.schema, quoted)
    assert len(tags) == 1
    assert tags[0].binding.tag_kind is TagKind.INSTANCE
    assert tags[0].binding.vertex_id == "U1"


def test_longest_match_wins(demo_engine):
    tokens, quoted = tokenize("oil leakage")
    tags = tag_entities(tokens, demo_engine.lexicon, demo_engine.gazetteer, demo_engine.schema, quoted)
    assert [t.span for t in tags] == [(0, 2)]


def test_tags_partition_tokens(demo_engine):
    questions = [
        GOLDEN_QUESTION, MAKER_QUESTION,
        "List transformers with capacity at least 300 mva.",
        "Which substations have transformers with oil leakage and over 100 mva?",
        "List defect records with defect type containing 'leak'.",
    ]
    for question in questions:
        parsed = _parse(demo_engine, question)
        covered = []
        for tag in parsed.tags:
            covered.extend(range(tag.start, tag.end))
        assert len(covered) == len(set(covered)), question
        assert all(0 <= i < len(parsed.tokens) for i in covered)


def test_tagging_deterministic(demo_engine):
    a = _parse(demo_engine, GOLDEN_QUESTION)
    b = _parse(demo_engine, GOLDEN_QUESTION)
    assert [t.to_json() for t in a.tags] == [t.to_json() for t in b.tags]


def test_rule_tree_golden_question_shape(demo_engine):
    parsed = _parse(demo_engine, GOLDEN_QUESTION)
    tree = build_rule_tree(parsed.tokens, parsed.tags)
    root = tree.root
    assert tree.tokens[root][0] == "have"
    transformers = parsed.tokens.index("transformers")
    assert (tree.heads[transformers], tree.labels[transformers]) == (root, "nsubj")
    # the "oil leakage" span hangs off the root as its object
    oil = parsed.tokens.index("oil")
    span_labels = {tree.labels[oil]: tree.heads[oil], tree.labels[oil + 1]: tree.heads[oil + 1]}
    assert span_labels.get("obj") == root


def test_rule_tree_imperative_shape(demo_engine):
    parsed = _parse(demo_engine, "list transformers")
    tree = build_rule_tree(parsed.tokens, parsed.tags)
    assert tree.tokens[tree.root][0] == "list"
    assert (tree.heads[1], tree.labels[1]) == (tree.root, "obj")


def test_conllu_taken_verbatim():
    source = "\n".join([
        "1\tlist\tVB\t0\troot",
        "2\ttransformers\tNNS\t1\tobj",
    ])
    tree = parse_conllu(source)
    assert tree.root == 0
    assert tree.tokens == [("list", "VB"), ("transformers", "NNS")]
    assert (tree.heads, tree.labels) == ([-1, 0], ["root", "obj"])


def test_conllu_rejects_cycles():
    source = "\n".join([
        "1\thave\tVB\t0\troot",
        "2\ta\tNN\t3\tdep",
        "3\tb\tNN\t2\tdep",
    ])
    with pytest.raises((ParseError, UnparseableInput)):
        parse_conllu(source)


def test_conllu_rejects_rootless_input():
    source = "\n".join([
        "1\ta\tNN\t2\tdep",
        "2\tb\tNN\t1\tdep",
    ])
    with pytest.raises((ParseError, UnparseableInput)):
        parse_conllu(source)


def test_target_parent_child(demo_engine):
    parsed = _parse(demo_engine, GOLDEN_QUESTION)
    assert (parsed.target.class_name, parsed.target.question_type) == ("Transformer", "selection")


def test_target_brothers_pattern(demo_engine):
    parsed = _parse(demo_engine, MAKER_QUESTION)
    assert parsed.target.class_name == "Manufacturer"


def test_target_count_type(demo_engine):
    parsed = _parse(demo_engine, "How many transformers are located in Bayview Substation?")
    assert parsed.target.class_name == "Transformer"
    assert parsed.target.question_type == "count"


def test_no_target_without_question_word_or_verb(demo_engine):
    with pytest.raises((NoTargetFound, UnparseableInput)):
        _parse(demo_engine, "oil leakage 2019")


def test_maker_question_constraints_one_shot(demo_engine):
    parsed = _parse(demo_engine, MAKER_QUESTION)
    assert _constraint_tuples(parsed) == [
        ("attribute", "VoltageLevel", "kv", Comparator.EQ, 220, "and"),
        ("class", "Transformer", None, None, None, "and"),
        ("attribute", "DefectRecord", "defect_type", Comparator.EQ, "oil leakage", "and"),
    ]


def test_spaced_measurement_equivalent(demo_engine):
    spaced = _parse(demo_engine, "Which manufacturers made 220 kv transformers with oil leakage?")
    packed = _parse(demo_engine, MAKER_QUESTION)
    assert _constraint_tuples(spaced) == _constraint_tuples(packed)


def test_negated_edge_constraint(demo_engine):
    parsed = _parse(demo_engine, "List transformers without defects.")
    assert [(c.kind, c.edge_name, c.connector) for c in parsed.constraints] == [
        ("edge", "hasDefect", "not")
    ]


def test_typed_value_absorbs_attribute_mention(demo_engine):
    parsed = _parse(demo_engine, "List transformers with capacity over 150 mva.")
    assert _constraint_tuples(parsed) == [
        ("attribute", "Transformer", "capacity_mva", Comparator.GT, 150.0, "and"),
    ]


def test_typed_value_absorbs_class_mention(demo_engine):
    fragment = parse_fragment(
        demo_engine.schema, demo_engine.lexicon, demo_engine.gazetteer, "voltage level as 220kv"
    )
    assert fragment.target is None
    assert _constraint_tuples(fragment) == [
        ("attribute", "VoltageLevel", "kv", Comparator.EQ, 220, "and"),
    ]


def test_or_connector(demo_engine):
    parsed = _parse(demo_engine, "Which transformers have oil leakage or overheating?")
    assert [(c.value, c.connector) for c in parsed.constraints] == [
        ("oil leakage", "and"), ("overheating", "or"),
    ]


def test_leading_or_downgraded(demo_engine):
    fragment = parse_fragment(
        demo_engine.schema, demo_engine.lexicon, demo_engine.gazetteer, "or oil leakage"
    )
    assert [c.connector for c in fragment.constraints] == ["and"]


def test_quoted_literal_claims_attribute(demo_engine):
    parsed = _parse(demo_engine, "List manufacturers with country other than 'USA'.")
    assert _constraint_tuples(parsed) == [
        ("attribute", "Manufacturer", "country", Comparator.NEQ, "usa", "and"),
    ]


def test_dangling_time_qualifier(demo_engine):
    with pytest.raises(DanglingQualifier):
        _parse(demo_engine, "Which transformers are within?")


def test_dangling_quoted_value(demo_engine):
    with pytest.raises(GridQAError):
        _parse(demo_engine, "List transformers 'loose'.")


def test_empty_question_rejected(demo_engine):
    with pytest.raises(EmptyQuestion):
        _parse(demo_engine, "   ")


def test_every_question_parses_or_raises_typed_error(demo_engine):
    probes = [
        GOLDEN_QUESTION, MAKER_QUESTION, "", "  ", "???", "hello world", "which", "transformers",
        "not", "or or or", "220kv", "within five years", "'quoted'",
        "List transformers made by nobody in particular.",
        "Which turbines spin fastest?",
        "have have have", "which which transformers",
    ]
    for question in probes:
        try:
            parsed = _parse(demo_engine, question)
        except GridQAError:
            continue
        assert parsed.target is not None
    # fragments relax the target requirement but never the error typing
    for question in probes:
        try:
            parse_fragment(demo_engine.schema, demo_engine.lexicon, demo_engine.gazetteer, question)
        except GridQAError:
            continue


def test_target_never_in_constraints(demo_engine):
    questions = [GOLDEN_QUESTION, MAKER_QUESTION, "List transformers without defects.", "How many substations have transformers?"]
    for question in questions:
        parsed = _parse(demo_engine, question)
        for constraint in parsed.constraints:
            if constraint.kind == "class":
                assert constraint.class_name != parsed.target.class_name


def test_fragment_keeps_constraints_without_target(demo_engine):
    fragment = parse_fragment(
        demo_engine.schema, demo_engine.lexicon, demo_engine.gazetteer, "only 220kv"
    )
    assert fragment.target is None
    assert _constraint_tuples(fragment) == [
        ("attribute", "VoltageLevel", "kv", Comparator.EQ, 220, "and"),
    ]


def test_year_without_time_word_is_in_year(demo_engine):
    parsed = _parse(demo_engine, "List defect records reported in 2019.")
    assert _constraint_tuples(parsed) == [
        ("attribute", "DefectRecord", "report_date", Comparator.IN_YEAR, 2019, "and"),
    ]


def test_since_year_becomes_ge(demo_engine):
    parsed = _parse(demo_engine, "Which transformers were commissioned since 2010?")
    ((kind, cls, attr, comp, value, _),) = _constraint_tuples(parsed)
    assert (kind, cls, attr, comp) == ("attribute", "Transformer", "commission_date", Comparator.GE)
    assert value == date(2010, 1, 1)


def test_before_year_becomes_lt(demo_engine):
    parsed = _parse(demo_engine, "Which transformers were commissioned before 2010?")
    ((_, _, _, comp, value, _),) = _constraint_tuples(parsed)
    assert comp == Comparator.LT
    assert value == date(2010, 1, 1)
