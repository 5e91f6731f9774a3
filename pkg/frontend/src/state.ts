// View state and its transitions. Everything here is a pure function:
// the DOM layer feeds in API payloads and user gestures, and each
// transition returns a fresh state. The render model is derived solely
// from the most recent answer document — the UI never computes answers.

import type {
  AnswerDoc,
  AskMode,
  ContextDoc,
  EdgeDoc,
  SchemaDoc,
} from "./types.js";

export class StateError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "StateError";
  }
}

export interface RenderNode {
  id: string;
  class: string;
  label: string;
  kind: "answer" | "witness";
}

export interface RenderModel {
  nodes: RenderNode[];
  edges: EdgeDoc[];
  highlights: string[]; // answer vertex ids, always a subset of nodes
  expansions: string[]; // neighbor classes of the target, offered as chips
  target: string;
  pseudoQuery: string;
  emptyReason: string | null;
}

export interface TranscriptEntry {
  question: string;
  mode: AskMode;
  ok: boolean;
  answers: string[];
  summary: string;
  error?: string;
}

export interface ViewState {
  session: string | null;
  mode: AskMode;
  busy: boolean;
  banner: string | null;
  transcript: TranscriptEntry[];
  doc: AnswerDoc | null;
  render: RenderModel | null;
  selected: string | null;
  anchored: string | null;
  context: ContextDoc | null;
}

export function initialState(): ViewState {
  return {
    session: null,
    mode: "fresh",
    busy: false,
    banner: null,
    transcript: [],
    doc: null,
    render: null,
    selected: null,
    anchored: null,
    context: null,
  };
}

function nodeLabel(id: string, attrs: Record<string, unknown>): string {
  for (const key of ["name", "label", "title"]) {
    const val = attrs[key];
    if (typeof val === "string" && val) return val;
  }
  return id;
}

/** Neighbor classes one schema edge away from the target class. */
export function expansionClasses(target: string, schema: SchemaDoc | null): string[] {
  if (!schema) return [];
  const out = new Set<string>();
  for (const et of schema.edge_types) {
    if (et.from === target) out.add(et.to);
    if (et.to === target) out.add(et.from);
  }
  out.delete(target);
  return [...out].sort();
}

/** Pure projection of an answer document into what the graph view draws. */
export function buildRender(doc: AnswerDoc, schema: SchemaDoc | null): RenderModel {
  const answerIds = new Set(doc.answers.map((v) => v.id));
  const nodes: RenderNode[] = [...doc.subgraph.vertices]
    .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0))
    .map((v) => ({
      id: v.id,
      class: v.class,
      label: nodeLabel(v.id, v.attrs),
      kind: answerIds.has(v.id) ? "answer" : "witness",
    }));
  const present = new Set(nodes.map((n) => n.id));
  const highlights = [...answerIds].filter((id) => present.has(id)).sort();
  if (highlights.length !== answerIds.size) {
    throw new StateError("answer vertices missing from the rendered subgraph");
  }
  return {
    nodes,
    edges: doc.subgraph.edges,
    highlights,
    expansions: expansionClasses(doc.plan.target, schema),
    target: doc.plan.target,
    pseudoQuery: doc.pseudo_query,
    emptyReason: doc.empty_reason ?? null,
  };
}

function summarize(doc: AnswerDoc): string {
  if (doc.traversal.question_type === "count") return `count: ${doc.count}`;
  if (doc.count === 0) return doc.empty_reason ?? "no results";
  const ids = doc.answers.map((v) => v.id);
  const head = ids.slice(0, 5).join(", ");
  return ids.length > 5 ? `${doc.count} answers: ${head}, …` : `${doc.count} answer(s): ${head}`;
}

export function sessionStarted(state: ViewState, sessionId: string, context: ContextDoc): ViewState {
  return { ...state, session: sessionId, context };
}

export function modeSet(state: ViewState, mode: AskMode): ViewState {
  return { ...state, mode };
}

export function vertexSelected(state: ViewState, vertexId: string | null): ViewState {
  if (vertexId !== null && !state.render?.nodes.some((n) => n.id === vertexId)) {
    return state; // ignore clicks on things we are not drawing
  }
  return { ...state, selected: vertexId };
}

/** Begin a request. Only one may be in flight at a time. */
export function submitStarted(state: ViewState): ViewState {
  if (state.busy) throw new StateError("a request is already in flight");
  return { ...state, busy: true };
}

export function answerArrived(
  state: ViewState,
  question: string,
  mode: AskMode,
  doc: AnswerDoc,
  schema: SchemaDoc | null,
): ViewState {
  const render = buildRender(doc, schema);
  const entry: TranscriptEntry = {
    question,
    mode,
    ok: true,
    answers: doc.answers.map((v) => v.id),
    summary: summarize(doc),
  };
  return {
    ...state,
    busy: false,
    banner: null,
    transcript: [...state.transcript, entry],
    doc,
    render,
    selected: null,
    // a fresh ask starts a new line of questioning; the old anchor is gone
    anchored: mode === "fresh" ? null : state.anchored,
    session: doc.session ?? state.session,
    context: doc.context ?? state.context,
  };
}

/** A failed request keeps the previous view; only the banner changes. */
export function requestFailed(
  state: ViewState,
  question: string,
  mode: AskMode,
  message: string,
): ViewState {
  const entry: TranscriptEntry = {
    question,
    mode,
    ok: false,
    answers: [],
    summary: message,
    error: message,
  };
  return {
    ...state,
    busy: false,
    banner: message,
    transcript: [...state.transcript, entry],
  };
}

/** Non-request failures (e.g. anchoring) surface a banner without a transcript row. */
export function bannerRaised(state: ViewState, message: string): ViewState {
  return { ...state, busy: false, banner: message };
}

/**
 * A node was anchored into the session context. Re-anchoring the same
 * vertex is a no-op (the same state object comes back), and the next
 * submission defaults to follow-up mode.
 */
export function anchorApplied(state: ViewState, vertexId: string, context: ContextDoc): ViewState {
  if (state.anchored === vertexId) return state;
  return { ...state, busy: false, anchored: vertexId, context, mode: "follow_up" };
}

/** The question/mode pairs needed to replay this conversation verbatim. */
export function replayScript(state: ViewState): { question: string; mode: AskMode }[] {
  return state.transcript.filter((t) => t.ok).map((t) => ({ question: t.question, mode: t.mode }));
}
