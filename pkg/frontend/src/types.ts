// Mirrors of the JSON documents the gridqa HTTP API returns.
// Field names match the wire format exactly; the UI never reshapes them
// beyond what rendering needs.

export interface VertexDoc {
  id: string;
  class: string;
  attrs: Record<string, unknown>;
}

export interface EdgeDoc {
  src: string;
  dst: string;
  type: string;
}

export interface StepDoc {
  edge: string;
  direction: string;
  from: string;
  to: string;
  reversed: boolean;
}

export interface TargetDoc {
  class: string;
  question_type: string;
  attribute?: string;
}

export interface ConstraintDoc {
  kind: string;
  connector: string;
  class?: string;
  attribute?: string;
  edge?: string;
  vertex?: string;
  comparator?: string;
  value?: unknown;
}

export interface ParsedDoc {
  question: string;
  tokens: string[];
  tags: unknown[];
  target: TargetDoc | null;
  constraints: ConstraintDoc[];
}

export interface PlanRouteDoc {
  anchor: string;
  steps: StepDoc[];
  spliced_at: string | null;
}

export interface PlanDoc {
  target: string;
  routes: PlanRouteDoc[];
  bindings: { constraint: number; route: number; position: number }[];
  merged: StepDoc[];
}

export interface TraversalRouteDoc {
  constraint: number;
  kind: string;
  anchor: string;
  steps: StepDoc[];
  negated: boolean;
  vertex?: string;
  attribute?: string;
  comparator?: string;
  value?: unknown;
}

export interface TraversalDoc {
  target: string;
  question_type: string;
  reference_date: string;
  groups: TraversalRouteDoc[][];
}

export interface BindingDoc {
  constraint_index: number;
  witness_ids: (string | null)[];
}

export interface StatsDoc {
  hops: number;
  vertices_touched: number;
  answers: number;
  elapsed_ms: number;
}

export interface ContextDoc {
  target: TargetDoc | null;
  constraints: ConstraintDoc[];
}

export interface AnswerDoc {
  parsed: ParsedDoc;
  plan: PlanDoc;
  traversal: TraversalDoc;
  answers: VertexDoc[];
  count: number;
  subgraph: { vertices: VertexDoc[]; edges: EdgeDoc[] };
  bindings: BindingDoc[];
  stats: StatsDoc;
  pseudo_query: string;
  empty_reason?: string;
  session?: string;
  context?: ContextDoc;
}

export interface SessionDoc {
  session: string;
  context: ContextDoc;
}

export interface SchemaAttributeDoc {
  name: string;
  datatype: string;
  unit?: string;
}

export interface SchemaClassDoc {
  name: string;
  kind: string;
  attributes: SchemaAttributeDoc[];
}

export interface SchemaEdgeTypeDoc {
  name: string;
  from: string;
  to: string;
  attributes: SchemaAttributeDoc[];
  aggregated: boolean;
}

export interface SchemaDoc {
  version: string;
  classes: SchemaClassDoc[];
  edge_types: SchemaEdgeTypeDoc[];
}

export interface NeighborhoodDoc {
  center: VertexDoc;
  hops: number;
  vertices: VertexDoc[];
  edges: EdgeDoc[];
}

export interface HealthDoc {
  status: string;
  graph: { vertices: number; edges: number; classes: Record<string, number> };
  evaluation_date: string;
}

export interface ErrorDoc {
  error: { code: string; message: string };
}

export type AskMode = "fresh" | "follow_up";
