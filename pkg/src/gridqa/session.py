"""Multi-round conversation state.

A follow-up question is "the extension of the previous question": the new
parse is merged into the context carried from the latest successful turn.
Anchoring pins the context to a chosen vertex so the next question starts
from that node.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from .engine import Answered, Engine
from .errors import EmptyQuestion, GridQAError, NoTargetFound, UnknownSession, UnparseableInput
from .nlq import Constraint, ParsedQuestion, Target

DEFAULT_TTL_SECONDS = 30 * 60


def merge_constraints(inherited: list[Constraint], new: list[Constraint]) -> list[Constraint]:
    """Replace same-anchor inherited constraints in place, append the rest.

    Anchor identity is (kind, class, attribute, edge, vertex) — a follow-up
    that re-filters the same attribute tightens it rather than duplicating
    it, which also makes verbatim repeats idempotent.  Each inherited slot
    is consumed by at most one replacement so a fragment like "overheating
    or oil leakage" keeps both of its own disjuncts.
    """
    merged = list(inherited)
    index = {c.anchor_key(): i for i, c in enumerate(merged)}
    for constraint in new:
        key = constraint.anchor_key()
        slot = index.pop(key, None)
        if slot is not None:
            merged[slot] = constraint
        else:
            merged.append(constraint)
    return merged


@dataclass
class Session:
    id: str
    turns: list[dict] = field(default_factory=list)
    target: Target | None = None
    constraints: list[Constraint] = field(default_factory=list)
    last_used: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def context_json(self) -> dict:
        return {
            "target": self.target.to_json() if self.target else None,
            "constraints": [c.to_json() for c in self.constraints],
        }


class SessionRegistry:
    """In-memory session store with idle expiry.

    The clock is injectable so expiry is testable without sleeping.
    """

    def __init__(self, engine: Engine, ttl_seconds: float = DEFAULT_TTL_SECONDS, clock=time.monotonic):
        self.engine = engine
        self.ttl_seconds = ttl_seconds
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()

    def create(self) -> Session:
        session = Session(id=uuid.uuid4().hex[:12], last_used=self.clock())
        with self._registry_lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        now = self.clock()
        with self._registry_lock:
            session = self._sessions.get(session_id)
            if session is not None and now - session.last_used > self.ttl_seconds:
                del self._sessions[session_id]
                session = None
            if session is None:
                raise UnknownSession(f"unknown or expired session {session_id!r}")
            session.last_used = now
            return session

    # ------------------------------------------------------------------ turns

    def ask(self, session_id: str, question: str, mode: str = "fresh", deps: str | None = None) -> Answered:
        if not question or not question.strip():
            raise EmptyQuestion("question must not be empty")
        if mode not in ("fresh", "follow_up"):
            raise ValueError(f"mode must be fresh or follow_up, got {mode!r}")
        session = self.get(session_id)
        with session.lock:
            try:
                effective = self._effective_parse(session, question, mode, deps)
                result = self.engine.answer_parsed(effective)
            except GridQAError as exc:
                session.turns.append(self._turn_base(session, question, mode, deps) | {
                    "ok": False,
                    "error": {"code": exc.code, "message": str(exc)},
                })
                raise
            session.target = effective.target
            session.constraints = list(effective.constraints)
            session.turns.append(self._turn_base(session, question, mode, deps) | {
                "ok": True,
                "provider": effective.provider,
                "context": session.context_json(),
                "answers": list(result.answer.answers),
                "canonical": result.answer.canonical_json(),
            })
            return result

    def _effective_parse(self, session: Session, question: str, mode: str, deps: str | None) -> ParsedQuestion:
        if mode == "fresh":
            return self.engine.parse(question, deps)
        try:
            parsed = self.engine.parse(question, deps)
        except (NoTargetFound, UnparseableInput):
            # bare refinement ("only 220kV") — no target pattern, maybe no verb
            parsed = self.engine.parse_fragment(question, deps)
        target = parsed.target if parsed.target is not None else session.target
        constraints = merge_constraints(session.constraints, parsed.constraints)
        return ParsedQuestion(
            raw=question,
            tokens=parsed.tokens,
            tags=parsed.tags,
            target=target,
            constraints=constraints,
            provider=parsed.provider,
        )

    def anchor(self, session_id: str, vertex_id: str) -> Session:
        session = self.get(session_id)
        with session.lock:
            vertex = self.engine.store.vertex(vertex_id)  # raises UnknownVertex
            constraint = Constraint(
                kind="instance",
                class_name=vertex.class_name,
                vertex_id=vertex.id,
                surface=str(vertex.attrs.get("name", vertex.id)),
            )
            session.constraints = merge_constraints(session.constraints, [constraint])
            session.target = None  # next question must name what it wants
            session.turns.append({
                "index": len(session.turns),
                "kind": "anchor",
                "vertex": vertex.id,
                "ok": True,
                "context": session.context_json(),
            })
            return session

    def _turn_base(self, session: Session, question: str, mode: str, deps: str | None) -> dict:
        base = {"index": len(session.turns), "kind": "ask", "mode": mode, "question": question}
        if deps is not None:
            base["deps"] = deps
        return base

    def transcript(self, session_id: str) -> list[dict]:
        return [dict(turn) for turn in self.get(session_id).turns]


__all__ = ["DEFAULT_TTL_SECONDS", "Session", "SessionRegistry", "merge_constraints"]
