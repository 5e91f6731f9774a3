// HTML renderers for everything that is not the graph: the explanation
// panel, transcript, banner, and context strip. Renderers return plain
// strings so they can be unit-tested without a DOM.

import type { AnswerDoc, ConstraintDoc, ContextDoc, StepDoc } from "./types.js";
import type { TranscriptEntry } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function stepArrow(step: StepDoc): string {
  const mark = step.reversed ? "&#8656;" : "&#8658;"; // ⇐ / ⇒ by edge direction
  return `${escapeHtml(step.edge)} ${mark} ${escapeHtml(step.to)}`;
}

export function describeConstraint(c: ConstraintDoc): string {
  const neg = c.connector === "not" ? "not " : "";
  if (c.kind === "instance") return `${neg}is ${c.vertex}`;
  if (c.kind === "class") return `${neg}linked to a ${c.class}`;
  if (c.kind === "edge") return `${neg}has ${c.edge}`;
  const pred = c.comparator ? ` ${c.comparator} ${JSON.stringify(c.value)}` : " present";
  return `${neg}${c.class}.${c.attribute}${pred}`;
}

/**
 * The explanation panel: the server's pseudo-query verbatim, the plan
 * routes with splice points, and the execution stats line.
 */
export function renderExplanation(doc: AnswerDoc): string {
  const routes = doc.plan.routes
    .map((r, i) => {
      const hops = r.steps.map(stepArrow).join(" &middot; ");
      const splice = r.spliced_at ? ` <span class="splice">joins at ${escapeHtml(r.spliced_at)}</span>` : "";
      return `<li class="route"><span class="anchor">${escapeHtml(r.anchor)}</span>${
        hops ? " " + hops : " (target itself)"
      }${splice}<span class="route-index">#${i}</span></li>`;
    })
    .join("");
  const stats = doc.stats;
  return [
    '<section class="explanation">',
    "<h3>How this was answered</h3>",
    `<pre class="pseudo-query">${escapeHtml(doc.pseudo_query)}</pre>`,
    `<ul class="routes">${routes}</ul>`,
    `<p class="stats">${stats.answers} answer(s) &middot; ${stats.hops} hop(s) &middot; ` +
      `${stats.vertices_touched} vertices touched &middot; ${stats.elapsed_ms.toFixed(1)}ms</p>`,
    "</section>",
  ].join("\n");
}

/** Shown instead of a graph when the answer set is empty. */
export function renderNoResults(doc: AnswerDoc): string {
  const target = doc.parsed.target;
  const constraints = doc.parsed.constraints
    .map((c) => `<li>${escapeHtml(describeConstraint(c))}</li>`)
    .join("");
  return [
    '<section class="no-results">',
    `<p class="empty-reason">No results: ${escapeHtml(doc.empty_reason ?? "no matching vertices")}</p>`,
    `<p class="sought">Looked for <strong>${escapeHtml(target?.class ?? "?")}</strong> where:</p>`,
    `<ul class="constraints">${constraints || "<li>(no constraints)</li>"}</ul>`,
    "</section>",
  ].join("\n");
}

export function renderBanner(message: string | null): string {
  if (!message) return "";
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function renderTranscript(entries: TranscriptEntry[]): string {
  if (entries.length === 0) return '<p class="transcript-empty">No questions yet.</p>';
  const items = entries
    .map((t) => {
      const cls = t.ok ? "turn ok" : "turn failed";
      const mode = t.mode === "follow_up" ? '<span class="mode-tag">follow-up</span> ' : "";
      return (
        `<li class="${cls}">${mode}<span class="q">${escapeHtml(t.question)}</span>` +
        `<span class="a">${escapeHtml(t.summary)}</span></li>`
      );
    })
    .join("");
  return `<ol class="transcript">${items}</ol>`;
}

/** The active session context: target plus accumulated constraints. */
export function renderContext(context: ContextDoc | null, anchored: string | null): string {
  if (!context || (!context.target && context.constraints.length === 0 && !anchored)) {
    return '<p class="context-empty">Fresh conversation.</p>';
  }
  const bits: string[] = [];
  if (context.target) bits.push(`<span class="ctx-target">${escapeHtml(context.target.class)}</span>`);
  for (const c of context.constraints) {
    bits.push(`<span class="ctx-constraint">${escapeHtml(describeConstraint(c))}</span>`);
  }
  const badge = anchored
    ? `<span class="anchored-badge" data-vertex="${escapeHtml(anchored)}">&#9875; ${escapeHtml(anchored)}</span>`
    : "";
  return `<div class="context">${badge}${bits.join(" ")}</div>`;
}

/** Expansion chips: neighbor classes a user can pivot the question toward. */
export function renderChips(classes: string[]): string {
  return classes
    .map((c) => `<button class="chip" data-class="${escapeHtml(c)}">${escapeHtml(c)}</button>`)
    .join("");
}
