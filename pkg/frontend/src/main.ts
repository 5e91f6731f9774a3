// Browser entry point: wires the pure render/state modules to the DOM.
// All answering happens server-side; this file only moves payloads and
// gestures back and forth.

import { ApiClient, ApiError } from "./api.js";
import { renderGraphSVG } from "./graph_view.js";
import {
  renderBanner,
  renderChips,
  renderContext,
  renderExplanation,
  renderNoResults,
  renderTranscript,
} from "./panel.js";
import {
  anchorApplied,
  answerArrived,
  bannerRaised,
  initialState,
  modeSet,
  requestFailed,
  sessionStarted,
  submitStarted,
  vertexSelected,
  type ViewState,
} from "./state.js";
import type { AskMode, SchemaDoc } from "./types.js";

const api = new ApiClient("");
let state: ViewState = initialState();
let schema: SchemaDoc | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function paint(): void {
  const box = el<HTMLInputElement>("question-box");
  const button = el<HTMLButtonElement>("ask-btn");
  const toggle = el<HTMLInputElement>("mode-toggle");

  box.disabled = state.busy;
  button.disabled = state.busy;
  toggle.checked = state.mode === "follow_up";
  toggle.disabled = state.busy || !state.session;

  el("banner").innerHTML = renderBanner(state.banner);
  el("context").innerHTML = renderContext(state.context, state.anchored);
  el("transcript").innerHTML = renderTranscript(state.transcript);
  el("chips").innerHTML = state.render ? renderChips(state.render.expansions) : "";

  if (state.render) {
    el("graph").innerHTML = renderGraphSVG(state.render, {
      selected: state.selected,
      anchored: state.anchored,
    });
    el("panel").innerHTML =
      state.doc && state.doc.count === 0
        ? renderNoResults(state.doc) + renderExplanation(state.doc)
        : state.doc
          ? renderExplanation(state.doc)
          : "";
  }
}

async function submit(question: string): Promise<void> {
  if (state.busy || !question.trim()) return;
  const mode: AskMode = state.mode;
  state = submitStarted(state);
  paint();
  try {
    const doc = await api.ask(question, {
      session: state.session ?? undefined,
      mode,
    });
    state = answerArrived(state, question, mode, doc, schema);
  } catch (err) {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    state = requestFailed(state, question, mode, message);
  }
  paint();
  el<HTMLInputElement>("question-box").focus();
}

async function anchorNode(vertexId: string): Promise<void> {
  const session = state.session;
  if (state.busy || !session) return;
  if (state.anchored === vertexId) return; // re-click is a no-op
  state = submitStarted(state);
  paint();
  try {
    const doc = await api.anchor(session, vertexId);
    state = anchorApplied({ ...state, busy: false }, vertexId, doc.context);
  } catch (err) {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    state = bannerRaised(state, message);
  }
  paint();
  el<HTMLInputElement>("question-box").focus();
}

async function boot(): Promise<void> {
  el<HTMLFormElement>("ask-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void submit(el<HTMLInputElement>("question-box").value);
  });

  el<HTMLInputElement>("mode-toggle").addEventListener("change", (ev) => {
    state = modeSet(state, (ev.target as HTMLInputElement).checked ? "follow_up" : "fresh");
  });

  el("graph").addEventListener("click", (ev) => {
    const hit = (ev.target as Element).closest("[data-id]");
    if (!hit) return;
    const id = hit.getAttribute("data-id");
    if (!id) return;
    state = vertexSelected(state, id);
    void anchorNode(id);
  });

  el("chips").addEventListener("click", (ev) => {
    const chip = (ev.target as Element).closest("button.chip");
    if (!chip) return;
    const cls = chip.getAttribute("data-class") ?? "";
    const box = el<HTMLInputElement>("question-box");
    box.value = `Which ${cls.toLowerCase()}s `;
    box.focus();
  });

  try {
    const [health, schemaDoc, session] = await Promise.all([
      api.health(),
      api.schema(),
      api.createSession(),
    ]);
    schema = schemaDoc;
    state = sessionStarted(state, session.session, session.context);
    el("health").textContent =
      `${health.graph.vertices} vertices / ${health.graph.edges} edges · as of ${health.evaluation_date}`;
  } catch (err) {
    state = bannerRaised(state, `could not reach the API: ${String(err)}`);
  }
  paint();
}

void boot();
