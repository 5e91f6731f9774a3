"""Question tokenization and entity tagging.

Tagging is longest-match, left-to-right, non-overlapping over the combined
lexicon + gazetteer table, followed by dynamic recognizers for values the
lexicon cannot enumerate: years, durations ("five years"), unit-suffixed
measurements ("220kv"), and quoted raw strings.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyQuestion
from .lexicon import Binding, Lexicon, TagKind, normalize_token
from .schema import OntologySchema
from .values import Duration

_QUOTED_RE = re.compile(r"\"([^\"]+)\"|'([^']+)'")
_YEAR_RE = re.compile(r"^(19|20)\d{2}$")
_NUMBER_RE = re.compile(r"^\d+(\.\d+)?$")
_MEASURE_RE = re.compile(r"^(\d+(?:\.\d+)?)([a-z]+)$")
_DURATION_UNITS = {
    "year": "years", "years": "years",
    "month": "months", "months": "months",
    "day": "days", "days": "days",
}
_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6, "seven": 7,
    "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12, "fifteen": 15,
    "twenty": 20, "thirty": 30, "fifty": 50, "hundred": 100,
}


@dataclass(frozen=True)
class EntityTag:
    start: int
    end: int  # exclusive
    surface: str
    binding: Binding

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def to_json(self) -> dict:
        return {"span": [self.start, self.end], "surface": self.surface, "binding": self.binding.describe()}


def tokenize(question: str) -> tuple[list[str], set[int]]:
    """Split into normalized tokens; quoted segments become single tokens.

    Returns (tokens, quoted positions). Raises EmptyQuestion when nothing
    survives normalization.
    """
    if not question or not question.strip():
        raise EmptyQuestion("empty question")
    tokens: list[str] = []
    quoted: set[int] = set()
    cursor = 0
    for match in _QUOTED_RE.finditer(question):
        for part in question[cursor:match.start()].split():
            norm = normalize_token(part)
            if norm:
                tokens.append(norm)
        literal = (match.group(1) or match.group(2)).strip().lower()
        if literal:
            quoted.add(len(tokens))
            tokens.append(literal)
        cursor = match.end()
    for part in question[cursor:].split():
        norm = normalize_token(part)
        if norm:
            tokens.append(norm)
    if not tokens:
        raise EmptyQuestion("question contains no usable tokens")
    return tokens, quoted


def _parse_count(token: str) -> int | None:
    if token in _NUMBER_WORDS:
        return _NUMBER_WORDS[token]
    if _NUMBER_RE.match(token) and "." not in token:
        return int(token)
    return None


def _parse_number(token: str) -> float | int | None:
    if token in _NUMBER_WORDS:
        return _NUMBER_WORDS[token]
    if _NUMBER_RE.match(token):
        return float(token) if "." in token else int(token)
    return None


def tag_entities(
    tokens: list[str],
    lexicon: Lexicon,
    gazetteer: dict[tuple[str, ...], Binding],
    schema: OntologySchema,
    quoted: set[int] | None = None,
) -> list[EntityTag]:
    """Tag a token sequence. Connectives and non-entity words stay untagged."""
    if not tokens:
        raise EmptyQuestion("empty question")
    quoted = quoted or set()
    units = schema.units()
    max_span = max(lexicon.max_span, max((len(k) for k in gazetteer), default=1))

    tags: list[EntityTag] = []
    taken = [False] * len(tokens)

    # pass 1: longest-match lexicon/gazetteer tagging
    i = 0
    while i < len(tokens):
        if i in quoted or not tokens[i]:
            i += 1
            continue
        match = None
        for width in range(min(max_span, len(tokens) - i), 0, -1):
            if any((i + k) in quoted for k in range(width)):
                continue
            key = tuple(tokens[i : i + width])
            binding = lexicon.lookup.get(key)
            if binding is None:
                binding = gazetteer.get(key)
            if binding is not None:
                match = (width, binding)
                break
        if match:
            width, binding = match
            tags.append(EntityTag(i, i + width, " ".join(tokens[i : i + width]), binding))
            for k in range(i, i + width):
                taken[k] = True
            i += width
        else:
            i += 1

    # pass 2: dynamic values over untagged tokens
    i = 0
    while i < len(tokens):
        if taken[i]:
            i += 1
            continue
        token = tokens[i]
        if i in quoted:
            tags.append(EntityTag(i, i + 1, token, Binding(TagKind.VALUE, literal=token, value_kind="raw")))
            taken[i] = True
            i += 1
            continue
        # duration: "<count> <unit>" pair, e.g. "five years"
        if i + 1 < len(tokens) and not taken[i + 1]:
            count = _parse_count(token)
            unit = _DURATION_UNITS.get(tokens[i + 1])
            if count is not None and unit is not None:
                binding = Binding(TagKind.VALUE, literal=Duration(count, unit), value_kind="duration")
                tags.append(EntityTag(i, i + 2, f"{token} {tokens[i + 1]}", binding))
                taken[i] = taken[i + 1] = True
                i += 2
                continue
            # measurement pair: "220 kv"
            number = _parse_number(token)
            if number is not None and tokens[i + 1] in units:
                class_name, attr_name = units[tokens[i + 1]]
                binding = Binding(
                    TagKind.VALUE, class_name=class_name, attr_name=attr_name,
                    literal=number, value_kind="measurement",
                )
                tags.append(EntityTag(i, i + 2, f"{token} {tokens[i + 1]}", binding))
                taken[i] = taken[i + 1] = True
                i += 2
                continue
        # fused measurement: "220kv"
        fused = _MEASURE_RE.match(token)
        if fused and fused.group(2) in units:
            class_name, attr_name = units[fused.group(2)]
            number = float(fused.group(1)) if "." in fused.group(1) else int(fused.group(1))
            binding = Binding(
                TagKind.VALUE, class_name=class_name, attr_name=attr_name,
                literal=number, value_kind="measurement",
            )
            tags.append(EntityTag(i, i + 1, token, binding))
            taken[i] = True
            i += 1
            continue
        # bare year
        if _YEAR_RE.match(token):
            binding = Binding(TagKind.VALUE, literal=int(token), value_kind="year")
            tags.append(EntityTag(i, i + 1, token, binding))
            taken[i] = True
            i += 1
            continue
        i += 1

    tags.sort(key=lambda t: t.start)
    return tags


def tag_index(tags: list[EntityTag]) -> dict[int, EntityTag]:
    """token position -> covering tag."""
    index: dict[int, EntityTag] = {}
    for tag in tags:
        for pos in range(tag.start, tag.end):
            index[pos] = tag
    return index
