"""Dependency trees: file-based ingestion and a built-in rule tagger.

Two interchangeable providers produce the tree the extractor consumes:

* ``parse_conllu`` reads a CoNLL-U-style override (index, form, POS, head,
  relation per line) written offline by any real parser.
* ``build_rule_tree`` derives a tree deterministically from the token
  sequence and its entity tags; it covers the templated question corpus
  without any NLP runtime dependency.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ParseError, UnparseableInput
from .lexicon import TagKind
from .tagging import EntityTag, tag_index

VERB_WORDS = {
    "have", "has", "had", "is", "are", "was", "were", "be", "been",
    "make", "makes", "made", "host", "hosts", "hosted", "hold", "holds",
    "operate", "operates", "operated", "supply", "supplies", "supplied",
    "contain", "contains", "belong", "belongs", "do", "does", "did",
    "list", "show", "find", "give", "get", "return",
}
IMPERATIVE_WORDS = {"list", "show", "find", "give", "get", "return"}
DETERMINERS = {"the", "a", "an", "this", "that", "these", "those", "its", "their", "only", "all", "any"}
PREPOSITIONS = {"in", "of", "with", "by", "from", "on", "at", "to", "for", "as"}


@dataclass
class DependencyTree:
    tokens: list[tuple[str, str]]  # (text, pos)
    heads: list[int]  # head index per token; -1 marks the root
    labels: list[str]
    root: int

    @property
    def relations(self) -> list[tuple[int, int, str]]:
        """(head, dependent, label) triples, dependents in token order."""
        return [
            (head, dep, self.labels[dep])
            for dep, head in enumerate(self.heads)
            if head >= 0
        ]

    def children(self, index: int) -> list[int]:
        return [dep for dep, head in enumerate(self.heads) if head == index]

    def validate(self) -> None:
        roots = [i for i, head in enumerate(self.heads) if head < 0]
        if len(roots) != 1 or roots[0] != self.root:
            raise ParseError(f"tree must have exactly one root, got {roots}")
        for dep, head in enumerate(self.heads):
            if head >= len(self.heads):
                raise ParseError(f"token {dep}: head {head} out of range")
            # walking up must terminate at the root (acyclic)
            seen = {dep}
            cursor = head
            while cursor >= 0:
                if cursor in seen:
                    raise ParseError(f"cycle through token {dep}")
                seen.add(cursor)
                cursor = self.heads[cursor]

    def distances_from(self, index: int) -> dict[int, int]:
        """Hop distances over the undirected tree, for nearest-tag search."""
        adjacency: dict[int, list[int]] = {i: [] for i in range(len(self.tokens))}
        for dep, head in enumerate(self.heads):
            if head >= 0:
                adjacency[dep].append(head)
                adjacency[head].append(dep)
        dist = {index: 0}
        queue = deque([index])
        while queue:
            cur = queue.popleft()
            for nxt in sorted(adjacency[cur]):
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        return dist


def parse_conllu(source: str) -> DependencyTree:
    """Read one tree: 'index form pos head relation' per line, blank line ends."""
    tokens: list[tuple[str, str]] = []
    heads: list[int] = []
    labels: list[str] = []
    for raw_line in source.splitlines():
        line = raw_line.strip()
        if not line:
            if tokens:
                break
            continue
        if line.startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) < 5:
            raise ParseError(f"dependency line needs 5 fields: {line!r}")
        try:
            index = int(fields[0])
            head = int(fields[3])
        except ValueError:
            raise ParseError(f"bad index/head in dependency line: {line!r}") from None
        if index != len(tokens) + 1:
            raise ParseError(f"dependency lines must be numbered consecutively from 1, got {index}")
        tokens.append((fields[1], fields[2]))
        heads.append(head - 1)  # CoNLL heads are 1-based; 0 becomes -1 (root)
        labels.append(fields[4])
    if not tokens:
        raise ParseError("empty dependency override")
    roots = [i for i, head in enumerate(heads) if head < 0]
    if len(roots) != 1:
        raise ParseError(f"dependency override needs exactly one root, got {len(roots)}")
    tree = DependencyTree(tokens, heads, labels, roots[0])
    tree.validate()
    return tree


def span_root(tree: DependencyTree, tag: EntityTag) -> int:
    """The span token whose head lies outside the span (first token if none)."""
    span = range(tag.start, tag.end)
    for pos in span:
        if tree.heads[pos] not in span:
            return pos
    return tag.start


def _pos_for(tag: EntityTag | None, token: str) -> str:
    if tag is not None:
        if tag.binding.tag_kind is TagKind.QUESTION_WORD:
            return "WDT"
        if tag.binding.tag_kind in (TagKind.TIME, TagKind.LOGIC):
            return "IN"
        if tag.binding.tag_kind is TagKind.VALUE:
            return "CD" if token[:1].isdigit() else "NN"
        return "NN"
    if token in VERB_WORDS:
        return "VB"
    if token in DETERMINERS:
        return "DT"
    if token in PREPOSITIONS:
        return "IN"
    if token in ("and", "or"):
        return "CC"
    if token[:1].isdigit():
        return "CD"
    return "NN"


ENTITY_KINDS = {TagKind.CLASS, TagKind.INSTANCE, TagKind.ATTRIBUTE, TagKind.EDGE, TagKind.VALUE}
_TEMPORAL_VALUE_KINDS = {"year", "duration"}


def build_rule_tree(tokens: list[str], tags: list[EntityTag]) -> DependencyTree:
    """Deterministic heuristic tree sufficient for templated questions.

    Shape guarantees the extractor relies on: a question word immediately
    before a tagged noun becomes its determiner child (parent-child
    pattern); pre-verb entities chain off the subject; temporal values
    attach to the nearest attribute tag; operators attach to the value
    they modify.
    """
    if not tokens:
        raise UnparseableInput("no tokens")
    covering = tag_index(tags)
    pos_tags = [_pos_for(covering.get(i), tok) for i, tok in enumerate(tokens)]

    # root: first verb-capable token outside multi-word entity spans
    root = -1
    for i, token in enumerate(tokens):
        tag = covering.get(i)
        if token in VERB_WORDS and (tag is None or tag.binding.tag_kind is TagKind.QUESTION_WORD):
            root = i
            pos_tags[i] = "VB"
            break
    if root < 0:
        raise UnparseableInput("no verb/root identifiable")

    heads = [-2] * len(tokens)  # -2 = unassigned, -1 = root
    labels = [""] * len(tokens)
    heads[root] = -1
    labels[root] = "root"

    spans = sorted(tags, key=lambda t: t.start)
    roots_of: dict[EntityTag, int] = {}
    for tag in spans:
        roots_of[tag] = tag.start
        for pos in range(tag.start + 1, tag.end):
            if pos != root:
                heads[pos] = tag.start
                labels[pos] = "compound"

    def is_temporal(tag: EntityTag) -> bool:
        return tag.binding.tag_kind is TagKind.VALUE and tag.binding.value_kind in _TEMPORAL_VALUE_KINDS

    entity_spans = [t for t in spans if t.binding.tag_kind in ENTITY_KINDS]
    attribute_spans = [t for t in spans if t.binding.tag_kind is TagKind.ATTRIBUTE]

    # pass 1: non-temporal entity spans
    prev_pre: EntityTag | None = None
    prev_post: EntityTag | None = None
    for tag in entity_spans:
        head_pos = roots_of[tag]
        if head_pos == root or heads[head_pos] != -2 or is_temporal(tag):
            continue
        if head_pos < root:
            if prev_pre is None:
                heads[head_pos], labels[head_pos] = root, "nsubj"
            else:
                heads[head_pos], labels[head_pos] = roots_of[prev_pre], "nmod"
            prev_pre = tag
        else:
            before = tokens[tag.start - 1] if tag.start > 0 else ""
            if prev_post is None:
                heads[head_pos], labels[head_pos] = root, "obj"
            elif before == "of":
                heads[head_pos], labels[head_pos] = roots_of[prev_post], "nmod"
            else:
                heads[head_pos], labels[head_pos] = root, "obl"
            prev_post = tag

    # pass 2: temporal values hang off the nearest attribute tag
    for tag in entity_spans:
        head_pos = roots_of[tag]
        if heads[head_pos] != -2 or not is_temporal(tag):
            continue
        nearest = None
        for attr_tag in attribute_spans:
            gap = abs(roots_of[attr_tag] - head_pos)
            if nearest is None or gap < nearest[0]:
                nearest = (gap, attr_tag)
        if nearest is not None:
            heads[head_pos], labels[head_pos] = roots_of[nearest[1]], "nmod:tmod"
        else:
            heads[head_pos], labels[head_pos] = root, "obl:tmod"

    # question words: determiner of the next entity span when adjacent
    for tag in spans:
        head_pos = roots_of[tag]
        if heads[head_pos] != -2 or tag.binding.tag_kind is not TagKind.QUESTION_WORD:
            continue
        attached = False
        for other in entity_spans:
            if 0 <= other.start - tag.end <= 1 and other.binding.tag_kind in (
                TagKind.CLASS, TagKind.ATTRIBUTE, TagKind.INSTANCE,
            ):
                heads[head_pos], labels[head_pos] = roots_of[other], "det"
                attached = True
                break
        if not attached:
            heads[head_pos], labels[head_pos] = root, "dep"

    # operators: attach to the next value span, else the previous span
    for tag in spans:
        head_pos = roots_of[tag]
        if heads[head_pos] != -2 or tag.binding.tag_kind not in (TagKind.TIME, TagKind.LOGIC):
            continue
        target = None
        for other in entity_spans:
            if other.start >= tag.end and other.binding.tag_kind is TagKind.VALUE:
                target = roots_of[other]
                break
        if target is None:
            for other in reversed(spans):
                if other.end <= tag.start and other is not tag:
                    target = roots_of[other]
                    break
        heads[head_pos], labels[head_pos] = (target, "case") if target is not None else (root, "dep")

    # remaining untagged tokens
    for i, token in enumerate(tokens):
        if heads[i] != -2:
            continue
        if pos_tags[i] in ("DT", "IN"):
            attached = False
            for tag in spans:
                if 0 <= tag.start - i <= 3:
                    heads[i], labels[i] = roots_of[tag], "case" if pos_tags[i] == "IN" else "det"
                    attached = True
                    break
            if not attached:
                heads[i], labels[i] = root, "dep"
        else:
            heads[i], labels[i] = root, "dep"

    tree = DependencyTree([(tokens[i], pos_tags[i]) for i in range(len(tokens))], heads, labels, root)
    tree.validate()
    return tree
