"""End-to-end facade: load a data directory, answer questions.

The engine owns no conversation state; multi-turn logic lives in
:mod:`gridqa.session` and calls back into :meth:`Engine.answer_parsed`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .errors import ValidationError
from .lexicon import Binding, Lexicon, build_gazetteer, load_lexicon
from .nlq import ParsedQuestion, parse_fragment, parse_question
from .query import AnswerGraph, TraversalPlan, compile_plan, execute
from .reasoner import ReasoningPlan, plan
from .schema import OntologySchema, load_schema
from .store import GraphStore, load_graph
from .values import DEFAULT_EVALUATION_DATE

#: files every data directory must provide, in load order
DATA_FILES = ("schema.json", "vertices.jsonl", "edges.jsonl", "lexicon.json")


@dataclass
class Answered:
    """Everything produced while answering one question, for callers that
    want to show intermediate artifacts (CLI --explain, the HTTP API)."""

    parsed: ParsedQuestion
    reasoning: ReasoningPlan
    traversal: TraversalPlan
    answer: AnswerGraph

    def to_json(self) -> dict:
        return {
            "parsed": self.parsed.to_json(),
            "plan": self.reasoning.to_json(),
            "traversal": self.traversal.to_json(),
            **self.answer.to_json(),
        }


@dataclass
class Engine:
    schema: OntologySchema
    store: GraphStore
    lexicon: Lexicon
    gazetteer: dict[tuple[str, ...], Binding] = field(default_factory=dict)
    evaluation_date: date = DEFAULT_EVALUATION_DATE

    @classmethod
    def load(cls, data_dir: str | Path, evaluation_date: date | None = None) -> "Engine":
        """Build an engine from the standard four-file data directory."""
        root = Path(data_dir)
        missing = [name for name in DATA_FILES if not (root / name).exists()]
        if missing:
            raise ValidationError(f"data directory {root} is missing {', '.join(missing)}")
        schema = load_schema((root / "schema.json").read_text())
        store = load_graph(
            schema,
            (root / "vertices.jsonl").read_text(),
            (root / "edges.jsonl").read_text(),
        )
        lexicon = load_lexicon((root / "lexicon.json").read_text(), schema, store)
        return cls(
            schema,
            store,
            lexicon,
            build_gazetteer(store),
            evaluation_date or DEFAULT_EVALUATION_DATE,
        )

    # ----------------------------------------------------------------- parsing

    def parse(self, question: str, deps: str | None = None) -> ParsedQuestion:
        return parse_question(self.schema, self.lexicon, self.gazetteer, question, deps_override=deps)

    def parse_fragment(self, fragment: str, deps: str | None = None) -> ParsedQuestion:
        return parse_fragment(self.schema, self.lexicon, self.gazetteer, fragment, deps_override=deps)

    # --------------------------------------------------------------- answering

    def answer_parsed(self, parsed: ParsedQuestion, reuse: bool = True) -> Answered:
        """Plan, compile and execute an already-parsed question."""
        reasoning = plan(self.schema, parsed, reuse=reuse)
        traversal = compile_plan(reasoning, parsed, self.store, evaluation_date=self.evaluation_date)
        answer = execute(self.store, traversal)
        return Answered(parsed, reasoning, traversal, answer)

    def answer(self, question: str, deps: str | None = None, reuse: bool = True) -> Answered:
        return self.answer_parsed(self.parse(question, deps), reuse=reuse)

    # ------------------------------------------------------------ graph lookup

    def neighborhood(self, vertex_id: str, hops: int = 1) -> dict:
        """A bounded ego subgraph, shaped like AnswerGraph's ``subgraph`` block."""
        if hops < 0:
            raise ValidationError("hops must be >= 0")
        center = self.store.vertex(vertex_id)  # raises UnknownVertex
        seen = {vertex_id}
        frontier = [vertex_id]
        edges: dict[tuple[str, str, str], dict] = {}
        for _ in range(hops):
            nxt: list[str] = []
            for vid in frontier:
                for edge, other in self.store.neighbors(vid):
                    key = (edge.src, edge.type, edge.dst)
                    edges.setdefault(key, edge.to_json())
                    if other.id not in seen:
                        seen.add(other.id)
                        nxt.append(other.id)
            frontier = nxt
        return {
            "center": center.to_json(),
            "hops": hops,
            "vertices": [self.store.vertex(v).to_json() for v in sorted(seen)],
            "edges": [edges[key] for key in sorted(edges)],
        }


__all__ = ["Answered", "Engine", "DATA_FILES"]
