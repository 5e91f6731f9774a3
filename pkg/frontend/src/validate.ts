// Structural checks on incoming payloads. The server is trusted but the
// view must never tear down a good render because a proxy or a stale
// deploy handed back something half-shaped, so every answer document is
// verified before it reaches the reducer.

import type { AnswerDoc, VertexDoc } from "./types.js";

export class PayloadError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PayloadError";
  }
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function need(doc: Record<string, unknown>, field: string): unknown {
  if (!(field in doc)) throw new PayloadError(`answer payload missing "${field}"`);
  return doc[field];
}

function asVertex(value: unknown, where: string): VertexDoc {
  if (!isRecord(value)) throw new PayloadError(`${where}: vertex is not an object`);
  if (typeof value.id !== "string") throw new PayloadError(`${where}: vertex missing string "id"`);
  if (typeof value.class !== "string") throw new PayloadError(`${where}: vertex missing string "class"`);
  if (!isRecord(value.attrs)) throw new PayloadError(`${where}: vertex missing "attrs" object`);
  return value as unknown as VertexDoc;
}

export function validateAnswerDoc(raw: unknown): AnswerDoc {
  if (!isRecord(raw)) throw new PayloadError("answer payload is not an object");

  const answers = need(raw, "answers");
  if (!Array.isArray(answers)) throw new PayloadError('"answers" is not an array');
  answers.forEach((v, i) => asVertex(v, `answers[${i}]`));

  const subgraph = need(raw, "subgraph");
  if (!isRecord(subgraph)) throw new PayloadError('"subgraph" is not an object');
  if (!Array.isArray(subgraph.vertices)) throw new PayloadError('"subgraph.vertices" is not an array');
  if (!Array.isArray(subgraph.edges)) throw new PayloadError('"subgraph.edges" is not an array');
  subgraph.vertices.forEach((v, i) => asVertex(v, `subgraph.vertices[${i}]`));
  for (const [i, e] of subgraph.edges.entries()) {
    if (!isRecord(e) || typeof e.src !== "string" || typeof e.dst !== "string" || typeof e.type !== "string") {
      throw new PayloadError(`subgraph.edges[${i}] is malformed`);
    }
  }

  if (typeof need(raw, "pseudo_query") !== "string") throw new PayloadError('"pseudo_query" is not a string');
  if (typeof need(raw, "count") !== "number") throw new PayloadError('"count" is not a number');

  const stats = need(raw, "stats");
  if (!isRecord(stats)) throw new PayloadError('"stats" is not an object');
  for (const key of ["hops", "vertices_touched", "answers", "elapsed_ms"]) {
    if (typeof stats[key] !== "number") throw new PayloadError(`"stats.${key}" is not a number`);
  }

  const plan = need(raw, "plan");
  if (!isRecord(plan) || typeof plan.target !== "string" || !Array.isArray(plan.routes)) {
    throw new PayloadError('"plan" is malformed');
  }
  const parsed = need(raw, "parsed");
  if (!isRecord(parsed) || !Array.isArray(parsed.constraints)) {
    throw new PayloadError('"parsed" is malformed');
  }
  const traversal = need(raw, "traversal");
  if (!isRecord(traversal) || !Array.isArray(traversal.groups)) {
    throw new PayloadError('"traversal" is malformed');
  }

  // Every answer must also appear inside the subgraph: the render derives
  // highlights from answers and nodes from the subgraph, and the invariant
  // "highlights are a subset of rendered nodes" starts here.
  const known = new Set((subgraph.vertices as VertexDoc[]).map((v) => v.id));
  for (const v of answers as VertexDoc[]) {
    if (!known.has(v.id)) throw new PayloadError(`answer ${v.id} missing from subgraph`);
  }

  return raw as unknown as AnswerDoc;
}
