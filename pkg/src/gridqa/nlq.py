"""Question analysis: entity tag set E, target T, constraint set C.

The pipeline is tokenize -> tag -> dependency tree -> target extraction
(parent-child pattern, then brothers pattern) -> constraint extraction.
Every tagged entity except the target, question words, operators, and
attribute tags absorbed as value anchors yields exactly one constraint.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .deptree import DependencyTree, build_rule_tree, parse_conllu, span_root
from .errors import DanglingQualifier, NoTargetFound, TypeMismatch, UnparseableInput
from .lexicon import Binding, Lexicon, TagKind
from .schema import OntologySchema
from .tagging import EntityTag, tag_entities, tokenize
from .values import Comparator, Datatype, comparator_valid, parse_typed_value, value_to_json

CONNECTOR_OPERATORS = {"and", "or", "not"}
_COMPARATOR_OPERATORS = {
    "gt": Comparator.GT, "lt": Comparator.LT, "ge": Comparator.GE,
    "le": Comparator.LE, "neq": Comparator.NEQ, "contains": Comparator.CONTAINS,
}
_ENTITY_KINDS = {TagKind.CLASS, TagKind.INSTANCE, TagKind.ATTRIBUTE, TagKind.EDGE, TagKind.VALUE}


@dataclass(frozen=True)
class Target:
    """Question target T: the class (optionally an attribute) being asked for."""

    class_name: str
    attr_name: str | None = None
    question_type: str = "selection"  # selection | count
    surface: str = ""

    def to_json(self) -> dict:
        doc = {"class": self.class_name, "question_type": self.question_type}
        if self.attr_name:
            doc["attribute"] = self.attr_name
        return doc


@dataclass(frozen=True)
class Constraint:
    """One element of the constraint set C.

    kind=instance pins a specific vertex; kind=attribute filters on an
    attribute predicate (comparator None = attribute merely present);
    kind=class requires reachability of any instance of the class;
    kind=edge requires (or, under connector=not, forbids) an incident
    edge of the named type.
    """

    kind: str  # class | instance | attribute | edge
    class_name: str | None = None
    attr_name: str | None = None
    edge_name: str | None = None
    vertex_id: str | None = None
    comparator: Comparator | None = None
    value: object = None
    connector: str = "and"  # and | or | not, relative to the prior constraint
    surface: str = ""

    def anchor_key(self) -> tuple:
        """Merge identity for session follow-ups."""
        return (self.kind, self.class_name, self.attr_name, self.edge_name, self.vertex_id)

    def describe(self) -> str:
        if self.kind == "instance":
            core = f"instance {self.class_name}:{self.vertex_id}"
        elif self.kind == "class":
            core = f"class {self.class_name}"
        elif self.kind == "edge":
            core = f"edge {self.edge_name}"
        elif self.comparator is None:
            core = f"{self.class_name}.{self.attr_name} present"
        else:
            core = f"{self.class_name}.{self.attr_name} {self.comparator.value} {self.value}"
        return f"[{self.connector}] {core}"

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind, "connector": self.connector}
        for key, val in (
            ("class", self.class_name), ("attribute", self.attr_name),
            ("edge", self.edge_name), ("vertex", self.vertex_id),
        ):
            if val is not None:
                doc[key] = val
        if self.comparator is not None:
            doc["comparator"] = self.comparator.value
            doc["value"] = value_to_json(self.value)
        return doc


@dataclass
class ParsedQuestion:
    raw: str
    tokens: list[str]
    tags: list[EntityTag]
    target: Target | None
    constraints: list[Constraint]
    provider: str = "rule"  # rule | override

    def to_json(self) -> dict:
        return {
            "question": self.raw,
            "tokens": list(self.tokens),
            "tags": [t.to_json() for t in self.tags],
            "target": self.target.to_json() if self.target else None,
            "constraints": [c.to_json() for c in self.constraints],
        }


def _covering_tag(tags: list[EntityTag], position: int) -> EntityTag | None:
    for tag in tags:
        if tag.start <= position < tag.end:
            return tag
    return None


def _target_from_tag(tag: EntityTag, question_type: str) -> Target:
    binding = tag.binding
    if binding.tag_kind is TagKind.CLASS or binding.tag_kind is TagKind.INSTANCE:
        return Target(binding.class_name, question_type=question_type, surface=tag.surface)
    if binding.tag_kind is TagKind.ATTRIBUTE:
        return Target(binding.class_name, binding.attr_name, question_type, tag.surface)
    raise NoTargetFound(f"target span {tag.surface!r} is not a class or attribute")


_TARGET_KINDS = {TagKind.CLASS, TagKind.ATTRIBUTE, TagKind.INSTANCE}


def extract_target(tree: DependencyTree, tags: list[EntityTag]) -> tuple[Target, EntityTag]:
    """Locate T: parent-child pattern first, then the brothers pattern."""
    question_tags = [t for t in tags if t.binding.tag_kind is TagKind.QUESTION_WORD]

    # parent-child: the question word's head lies inside a tagged noun span;
    # that noun is the target and the question word carries the type
    for qw in question_tags:
        head = tree.heads[span_root(tree, qw)]
        if head < 0:
            continue
        parent = _covering_tag(tags, head)
        if parent is not None and parent.binding.tag_kind in _TARGET_KINDS:
            return _target_from_tag(parent, qw.binding.operator or "selection"), parent

    # brothers: a verb root whose children include a question word (or the
    # root itself is an imperative question word) and a tagged noun
    root_children = set(tree.children(tree.root))
    root_tag = _covering_tag(tags, tree.root)
    root_is_imperative = root_tag is not None and root_tag.binding.tag_kind is TagKind.QUESTION_WORD
    qw_child = None
    for qw in question_tags:
        if span_root(tree, qw) in root_children:
            qw_child = qw
            break
    if qw_child is not None or root_is_imperative:
        qtype = (qw_child or root_tag).binding.operator or "selection"
        for tag in sorted(tags, key=lambda t: t.start):
            if tag.binding.tag_kind in _TARGET_KINDS and span_root(tree, tag) in root_children:
                return _target_from_tag(tag, qtype), tag

    raise NoTargetFound("no parent-child or brothers pattern matched")


def _date_anchor(schema: OntologySchema, tag: EntityTag) -> tuple[str, str] | None:
    """(class, attr) a temporal value may filter, if the tag offers one."""
    binding = tag.binding
    if binding.tag_kind is TagKind.ATTRIBUTE:
        adef = schema.attribute_def(binding.class_name, binding.attr_name)
        return (binding.class_name, binding.attr_name) if adef.datatype is Datatype.DATE else None
    if binding.class_name is None or binding.class_name not in schema.classes:
        return None
    dates = [a.name for a in schema.classes[binding.class_name].attributes if a.datatype is Datatype.DATE]
    if len(dates) == 1:
        return (binding.class_name, dates[0])
    return None


def _nearest(
    tree: DependencyTree,
    from_tag: EntityTag,
    candidates: list[tuple[EntityTag, object]],
) -> tuple[EntityTag, object] | None:
    """Closest candidate by tree hops, then token gap, then leftmost."""
    if not candidates:
        return None
    origin = span_root(tree, from_tag)
    dist = tree.distances_from(origin)

    def rank(item: tuple[EntityTag, object]):
        node = span_root(tree, item[0])
        return (dist.get(node, len(tree.tokens) + 1), abs(node - origin), item[0].start)

    return min(candidates, key=rank)


def _year_bounds(year: int) -> tuple[date, date]:
    return date(year, 1, 1), date(year, 12, 31)


def _temporal_constraint(anchor: tuple[str, str], tag: EntityTag, time_op: str | None) -> Constraint:
    class_name, attr_name = anchor
    binding = tag.binding
    if binding.value_kind == "duration":
        return Constraint(
            "attribute", class_name, attr_name,
            comparator=Comparator.WITHIN_DURATION, value=binding.literal, surface=tag.surface,
        )
    year = int(binding.literal)
    start, end = _year_bounds(year)
    if time_op == "since":
        comparator, value = Comparator.GE, start
    elif time_op == "before":
        comparator, value = Comparator.LT, start
    elif time_op == "after":
        comparator, value = Comparator.GT, end
    else:  # bare year or "within"
        comparator, value = Comparator.IN_YEAR, year
    return Constraint("attribute", class_name, attr_name, comparator=comparator, value=value, surface=tag.surface)


def extract_constraints(
    schema: OntologySchema,
    tree: DependencyTree,
    tags: list[EntityTag],
    target_tag: EntityTag | None,
) -> list[Constraint]:
    ordered = sorted(tags, key=lambda t: t.start)
    value_tags = [t for t in ordered if t.binding.tag_kind is TagKind.VALUE]

    # route comparator/time operators to the next value tag
    comp_for: dict[int, Comparator] = {}
    time_for: dict[int, str] = {}
    for tag in ordered:
        binding = tag.binding
        if binding.tag_kind is TagKind.TIME:
            nxt = next(
                (v for v in value_tags if v.start >= tag.end and v.binding.value_kind in ("year", "duration")),
                None,
            )
            if nxt is None:
                raise DanglingQualifier(f"time qualifier {tag.surface!r} has no temporal value to modify")
            time_for[nxt.start] = binding.operator
        elif binding.tag_kind is TagKind.LOGIC and binding.operator in _COMPARATOR_OPERATORS:
            nxt = next((v for v in value_tags if v.start >= tag.end), None)
            if nxt is None:
                raise DanglingQualifier(f"qualifier {tag.surface!r} has no value to modify")
            comp_for[nxt.start] = _COMPARATOR_OPERATORS[binding.operator]

    # temporal values claim date anchors in token order; a later temporal
    # value skips already-claimed attributes when an unclaimed one exists
    attribute_tags = [t for t in ordered if t.binding.tag_kind is TagKind.ATTRIBUTE and t is not target_tag]
    # the target tag may still provide a date anchor — filtering the target
    # class's own date attribute is an attribute constraint, not a membership
    date_candidates: list[tuple[EntityTag, tuple[str, str]]] = []
    for tag in ordered:
        anchor = _date_anchor(schema, tag)
        if anchor is not None:
            date_candidates.append((tag, anchor))

    temporal_anchor: dict[int, tuple[str, str]] = {}
    claimed_anchors: set[tuple[str, str]] = set()
    absorbed: set[int] = set()  # start positions of attribute tags absorbed into a value constraint
    for tag in value_tags:
        if tag.binding.value_kind not in ("year", "duration"):
            continue
        open_candidates = [c for c in date_candidates if c[1] not in claimed_anchors]
        chosen = _nearest(tree, tag, open_candidates or date_candidates)
        if chosen is None:
            raise DanglingQualifier(f"temporal value {tag.surface!r} has no date attribute to filter")
        anchor_tag, anchor = chosen
        temporal_anchor[tag.start] = anchor
        claimed_anchors.add(anchor)
        if anchor_tag.binding.tag_kind is TagKind.ATTRIBUTE:
            absorbed.add(anchor_tag.start)

    # quoted raw values claim the nearest attribute tag outright
    raw_anchor: dict[int, EntityTag] = {}
    for tag in value_tags:
        if tag.binding.value_kind != "raw":
            continue
        open_attrs = [(a, a) for a in attribute_tags if a.start not in absorbed]
        chosen = _nearest(tree, tag, open_attrs or [(a, a) for a in attribute_tags])
        if chosen is None:
            raise DanglingQualifier(f"quoted value {tag.surface!r} has no attribute to filter")
        raw_anchor[tag.start] = chosen[0]
        absorbed.add(chosen[0].start)

    # an attribute tag naming the same attribute a typed value already
    # filters collapses into that value's constraint ("capacity over 150
    # mva" is one constraint, not a presence check plus a filter)
    filtered_attrs = {
        (t.binding.class_name, t.binding.attr_name)
        for t in value_tags
        if t.binding.value_kind in ("lexicon", "measurement")
    }
    for tag in attribute_tags:
        if (tag.binding.class_name, tag.binding.attr_name) in filtered_attrs:
            absorbed.add(tag.start)

    # likewise a bare class mention collapses into a typed value filtering
    # one of its attributes: "voltage level as 220kv" pins kv == 220, it
    # does not also demand membership
    absorbed_classes = {class_name for class_name, _ in filtered_attrs}

    def typed(comparator: Comparator, class_name: str, attr_name: str, value) -> object:
        adef = schema.attribute_def(class_name, attr_name)
        if comparator in (Comparator.WITHIN_DURATION, Comparator.IN_YEAR):
            if adef.datatype is not Datatype.DATE:
                raise TypeMismatch(f"{class_name}.{attr_name} is not a date attribute")
            return value
        if isinstance(value, str):
            value = parse_typed_value(value, adef.datatype)
        if not comparator_valid(comparator, adef.datatype):
            raise TypeMismatch(f"{comparator.value} not valid for {adef.datatype.value} attribute {attr_name}")
        return value

    constraints: list[Constraint] = []
    window_start = 0
    used_connectors: set[int] = set()
    connector_tags = [
        t for t in ordered
        if t.binding.tag_kind is TagKind.LOGIC and t.binding.operator in CONNECTOR_OPERATORS
    ]

    def connector_for(span_start: int) -> str:
        # rightmost and/or/not between the previous constraint and this one
        found = "and"
        for tag in connector_tags:
            if window_start <= tag.start < span_start:
                found = tag.binding.operator
                used_connectors.add(tag.start)
        return found

    for tag in ordered:
        binding = tag.binding
        if tag is target_tag or binding.tag_kind not in _ENTITY_KINDS:
            continue
        if binding.tag_kind is TagKind.ATTRIBUTE and tag.start in absorbed:
            continue
        if binding.tag_kind is TagKind.CLASS and binding.class_name in absorbed_classes:
            continue
        connector = connector_for(tag.start)
        constraint: Constraint
        if binding.tag_kind is TagKind.CLASS:
            constraint = Constraint("class", binding.class_name, surface=tag.surface)
        elif binding.tag_kind is TagKind.INSTANCE:
            constraint = Constraint(
                "instance", binding.class_name, vertex_id=binding.vertex_id,
                comparator=Comparator.EQ, value=binding.vertex_id, surface=tag.surface,
            )
        elif binding.tag_kind is TagKind.EDGE:
            constraint = Constraint("edge", binding.class_name, edge_name=binding.edge_name, surface=tag.surface)
        elif binding.tag_kind is TagKind.ATTRIBUTE:
            constraint = Constraint("attribute", binding.class_name, binding.attr_name, surface=tag.surface)
        else:  # VALUE
            kind = binding.value_kind
            if kind in ("year", "duration"):
                constraint = _temporal_constraint(temporal_anchor[tag.start], tag, time_for.get(tag.start))
            elif kind == "raw":
                anchor_tag = raw_anchor[tag.start]
                comparator = comp_for.get(tag.start, Comparator.EQ)
                class_name, attr_name = anchor_tag.binding.class_name, anchor_tag.binding.attr_name
                value = typed(comparator, class_name, attr_name, str(binding.literal))
                constraint = Constraint(
                    "attribute", class_name, attr_name,
                    comparator=comparator, value=value, surface=tag.surface,
                )
            else:  # lexicon | measurement
                comparator = comp_for.get(tag.start, Comparator.EQ)
                value = typed(comparator, binding.class_name, binding.attr_name, binding.literal)
                constraint = Constraint(
                    "attribute", binding.class_name, binding.attr_name,
                    comparator=comparator, value=value, surface=tag.surface,
                )
        if not constraints and connector == "or":
            connector = "and"  # a leading disjunction has nothing to join
        constraints.append(
            Constraint(
                constraint.kind, constraint.class_name, constraint.attr_name,
                constraint.edge_name, constraint.vertex_id, constraint.comparator,
                constraint.value, connector, constraint.surface,
            )
        )
        window_start = tag.end

    for tag in connector_tags:
        if tag.start >= window_start and tag.start not in used_connectors:
            raise DanglingQualifier(f"connector {tag.surface!r} has no following constraint")

    return constraints


def build_tree(
    tokens: list[str],
    tags: list[EntityTag],
    deps_override: str | None = None,
) -> DependencyTree:
    if deps_override is not None:
        return parse_conllu(deps_override)
    return build_rule_tree(tokens, tags)


def parse_question(
    schema: OntologySchema,
    lexicon: Lexicon,
    gazetteer: dict[tuple[str, ...], Binding],
    question: str,
    deps_override: str | None = None,
) -> ParsedQuestion:
    """Full analysis of a standalone question."""
    if deps_override is not None:
        tree = parse_conllu(deps_override)
        tokens = [text.lower() for text, _ in tree.tokens]
        tags = tag_entities(tokens, lexicon, gazetteer, schema)
    else:
        tokens, quoted = tokenize(question)
        tags = tag_entities(tokens, lexicon, gazetteer, schema, quoted)
        tree = build_rule_tree(tokens, tags)
    target, target_tag = extract_target(tree, tags)
    constraints = extract_constraints(schema, tree, tags, target_tag)
    provider = "override" if deps_override is not None else "rule"
    return ParsedQuestion(question, tokens, tags, target, constraints, provider)


def parse_fragment(
    schema: OntologySchema,
    lexicon: Lexicon,
    gazetteer: dict[tuple[str, ...], Binding],
    question: str,
    deps_override: str | None = None,
) -> ParsedQuestion:
    """Constraint-only analysis for follow-up turns with no target of their own."""
    if deps_override is not None:
        tree = parse_conllu(deps_override)
        tokens = [text.lower() for text, _ in tree.tokens]
        tags = tag_entities(tokens, lexicon, gazetteer, schema)
    else:
        tokens, quoted = tokenize(question)
        tags = tag_entities(tokens, lexicon, gazetteer, schema, quoted)
        try:
            tree = build_rule_tree(tokens, tags)
        except UnparseableInput:
            # fragments like "only 220kV" have no verb; a flat tree is enough
            tree = _flat_tree(tokens, tags)
    constraints = extract_constraints(schema, tree, tags, None)
    provider = "override" if deps_override is not None else "rule"
    return ParsedQuestion(question, tokens, tags, None, constraints, provider)


def _flat_tree(tokens: list[str], tags: list[EntityTag]) -> DependencyTree:
    heads = [0] * len(tokens)
    labels = ["dep"] * len(tokens)
    heads[0], labels[0] = -1, "root"
    tree = DependencyTree([(t, "NN") for t in tokens], heads, labels, 0)
    tree.validate()
    return tree
