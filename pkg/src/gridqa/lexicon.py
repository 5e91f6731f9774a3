"""Lexicon: surface forms bound to ontology elements, plus the gazetteer.

Entries map normalized question words to classes, instances, attributes,
edge types, value literals, or operators (time/logic/question words).
Instance names are additionally harvested from vertex "name" attributes at
load time, so generated graphs stay taggable without hand-curated entries.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import ParseError, ValidationError
from .schema import OntologySchema
from .store import GraphStore
from .values import Datatype


class TagKind(str, Enum):
    CLASS = "class"
    INSTANCE = "instance"
    ATTRIBUTE = "attribute"
    EDGE = "edge"
    VALUE = "value"
    TIME = "time"
    LOGIC = "logic"
    QUESTION_WORD = "question_word"


#: operators allowed per tag kind in lexicon files
TIME_OPERATORS = {"within", "since", "before", "after"}
LOGIC_OPERATORS = {"and", "or", "not", "gt", "lt", "ge", "le", "neq", "contains"}
QUESTION_OPERATORS = {"selection", "count"}


@dataclass(frozen=True)
class Binding:
    """Resolved meaning of a tagged span."""

    tag_kind: TagKind
    class_name: str | None = None
    attr_name: str | None = None
    edge_name: str | None = None
    vertex_id: str | None = None
    literal: object = None
    value_kind: str | None = None  # lexicon | year | duration | measurement | raw
    operator: str | None = None

    def anchor_key(self) -> tuple:
        """Identity used for constraint merging in sessions."""
        return (self.tag_kind.value, self.class_name, self.attr_name, self.edge_name, self.vertex_id)

    def describe(self) -> str:
        if self.tag_kind is TagKind.CLASS:
            return f"class {self.class_name}"
        if self.tag_kind is TagKind.INSTANCE:
            return f"instance {self.vertex_id}"
        if self.tag_kind is TagKind.ATTRIBUTE:
            return f"attribute {self.class_name}.{self.attr_name}"
        if self.tag_kind is TagKind.EDGE:
            return f"edge {self.edge_name}"
        if self.tag_kind is TagKind.VALUE:
            return f"value {self.class_name}.{self.attr_name}" if self.attr_name else "value"
        return f"{self.tag_kind.value} {self.operator}"


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    variants: tuple[str, ...]
    tag_kind: TagKind
    ref: str
    binding: Binding


_WORD_RE = re.compile(r"[a-z0-9][a-z0-9\-_.]*")


def normalize_token(raw: str) -> str:
    """Lowercase and strip surrounding punctuation; '' if nothing remains."""
    token = raw.lower().strip()
    match = _WORD_RE.search(token)
    if not match:
        return ""
    # keep the inner span from first to last word character
    start = match.start()
    end = start
    for m in _WORD_RE.finditer(token):
        end = m.end()
    return token[start:end].strip(".,;:!?'\"()")


def normalize_phrase(raw: str) -> tuple[str, ...]:
    return tuple(t for t in (normalize_token(part) for part in raw.split()) if t)


def _resolve_binding(kind: TagKind, ref: str, schema: OntologySchema, store: GraphStore | None) -> Binding:
    if kind is TagKind.CLASS:
        if ref not in schema.classes:
            raise ValidationError(f"lexicon class ref {ref!r} not in schema")
        return Binding(kind, class_name=ref)
    if kind is TagKind.ATTRIBUTE or kind is TagKind.VALUE:
        if "." not in ref:
            raise ValidationError(f"lexicon {kind.value} ref must be Class.attr, got {ref!r}")
        class_name, attr_name = ref.split(".", 1)
        adef = schema.attribute_def(class_name, attr_name)
        if kind is TagKind.VALUE and adef.datatype is not Datatype.STRING:
            raise ValidationError(f"lexicon value entries need a string attribute, {ref} is {adef.datatype.value}")
        return Binding(kind, class_name=class_name, attr_name=attr_name)
    if kind is TagKind.EDGE:
        etype = schema.edge_type(ref)
        return Binding(kind, edge_name=etype.name, class_name=etype.from_class)
    if kind is TagKind.INSTANCE:
        if store is None:
            raise ValidationError("instance lexicon entries need a loaded graph")
        vertex = store.vertex(ref)
        return Binding(kind, vertex_id=ref, class_name=vertex.class_name)
    # operator kinds
    allowed = {
        TagKind.TIME: TIME_OPERATORS,
        TagKind.LOGIC: LOGIC_OPERATORS,
        TagKind.QUESTION_WORD: QUESTION_OPERATORS,
    }[kind]
    if ref not in allowed:
        raise ValidationError(f"{kind.value} entry ref must be one of {sorted(allowed)}, got {ref!r}")
    return Binding(kind, operator=ref)


@dataclass
class Lexicon:
    entries: list[LexiconEntry]
    lookup: dict[tuple[str, ...], Binding] = field(default_factory=dict)
    max_span: int = 1

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(source: str, schema: OntologySchema, store: GraphStore | None = None) -> Lexicon:
    """Parse and validate a lexicon file (JSON array of entries)."""
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed lexicon: {exc}") from None
    if not isinstance(raw, list):
        raise ParseError("lexicon must be a JSON array")

    entries: list[LexiconEntry] = []
    for item in raw:
        if not isinstance(item, dict) or "surface" not in item or "tag_kind" not in item:
            raise ParseError(f"lexicon entries need surface and tag_kind: {item}")
        binds_raw = item.get("binds_to")
        if not isinstance(binds_raw, dict) or "kind" not in binds_raw or "ref" not in binds_raw:
            raise ParseError(f"lexicon entry {item['surface']!r} needs binds_to {{kind, ref}}")
        try:
            tag_kind = TagKind(item["tag_kind"])
        except ValueError:
            raise ValidationError(f"unknown tag_kind {item['tag_kind']!r}") from None
        surface = item["surface"]
        variants = tuple(item.get("variants", []))
        if not surface or any(not v for v in variants):
            raise ValidationError(f"empty surface/variant in lexicon entry {item!r}")
        binding = _resolve_binding(tag_kind, str(binds_raw["ref"]), schema, store)
        if tag_kind is TagKind.VALUE:
            # the canonical surface doubles as the stored literal
            binding = Binding(
                tag_kind,
                class_name=binding.class_name,
                attr_name=binding.attr_name,
                literal=surface.lower(),
                value_kind="lexicon",
            )
        entries.append(LexiconEntry(surface, variants, tag_kind, str(binds_raw["ref"]), binding))

    lexicon = Lexicon(entries)
    for entry in entries:
        for phrase in (entry.surface, *entry.variants):
            key = normalize_phrase(phrase)
            if not key:
                raise ValidationError(f"lexicon surface {phrase!r} normalizes to nothing")
            lexicon.lookup[key] = entry.binding
            lexicon.max_span = max(lexicon.max_span, len(key))
    return lexicon


def build_gazetteer(store: GraphStore) -> dict[tuple[str, ...], Binding]:
    """Instance surface forms from vertex name attributes.

    Duplicate names resolve to the lexicographically smallest vertex id so
    tagging stays deterministic.
    """
    gazetteer: dict[tuple[str, ...], Binding] = {}
    for vid in sorted(store.vertices):
        vertex = store.vertices[vid]
        name = vertex.attrs.get("name")
        if not isinstance(name, str):
            continue
        key = normalize_phrase(name)
        if key and key not in gazetteer:
            gazetteer[key] = Binding(TagKind.INSTANCE, vertex_id=vid, class_name=vertex.class_name)
    return gazetteer
