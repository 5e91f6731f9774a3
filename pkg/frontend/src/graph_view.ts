// SVG renderer for the answer graph. Output is a string so tests can
// assert on it directly; the browser layer injects it and wires click
// handlers through data-id attributes.

import { layoutGraph, type Point } from "./layout.js";
import { escapeHtml } from "./panel.js";
import type { RenderModel } from "./state.js";

export interface GraphViewOptions {
  width?: number;
  height?: number;
  selected?: string | null;
  anchored?: string | null;
}

const NODE_RADIUS = 16;

function edgeLine(x1: number, y1: number, x2: number, y2: number, type: string): string {
  // shorten so the arrowhead is not buried under the node circle
  const dx = x2 - x1;
  const dy = y2 - y1;
  const d = Math.max(Math.sqrt(dx * dx + dy * dy), 0.01);
  const tx = x2 - (dx / d) * (NODE_RADIUS + 4);
  const ty = y2 - (dy / d) * (NODE_RADIUS + 4);
  const mx = (x1 + x2) / 2;
  const my = (y1 + y2) / 2;
  return (
    `<g class="edge" data-type="${escapeHtml(type)}">` +
    `<line x1="${x1}" y1="${y1}" x2="${tx}" y2="${ty}" marker-end="url(#arrow)"></line>` +
    `<text class="edge-label" x="${mx}" y="${my - 4}">${escapeHtml(type)}</text>` +
    "</g>"
  );
}

/**
 * Render the answer graph. Answer vertices get the ``node answer`` class
 * (the visual highlight), everything else is a witness; the anchored
 * vertex carries a badge ring and the selected one a focus ring.
 */
export function renderGraphSVG(render: RenderModel, opts: GraphViewOptions = {}): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 480;
  if (render.nodes.length === 0) {
    return `<svg class="graph" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg"></svg>`;
  }

  const positions = layoutGraph(
    render.nodes.map((n) => n.id),
    render.edges,
    { width, height },
  );
  const at = (id: string): Point => positions.get(id) ?? { x: width / 2, y: height / 2 };

  const edges = render.edges
    .map((e) => {
      const a = at(e.src);
      const b = at(e.dst);
      return edgeLine(a.x, a.y, b.x, b.y, e.type);
    })
    .join("\n");

  const nodes = render.nodes
    .map((n) => {
      const p = at(n.id);
      const classes = ["node", n.kind];
      if (opts.selected === n.id) classes.push("selected");
      const badge =
        opts.anchored === n.id
          ? `<circle class="anchor-ring" cx="${p.x}" cy="${p.y}" r="${NODE_RADIUS + 5}"></circle>` +
            `<text class="anchor-glyph" x="${p.x + NODE_RADIUS}" y="${p.y - NODE_RADIUS}">&#9875;</text>`
          : "";
      return (
        `<g class="${classes.join(" ")}" data-id="${escapeHtml(n.id)}" data-class="${escapeHtml(n.class)}">` +
        badge +
        `<circle cx="${p.x}" cy="${p.y}" r="${NODE_RADIUS}"></circle>` +
        `<text class="node-label" x="${p.x}" y="${p.y + NODE_RADIUS + 12}">${escapeHtml(n.label)}</text>` +
        `<text class="node-class" x="${p.x}" y="${p.y - NODE_RADIUS - 4}">${escapeHtml(n.class)}</text>` +
        "</g>"
      );
    })
    .join("\n");

  return [
    `<svg class="graph" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
    "<defs>",
    '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse">',
    '<path d="M 0 0 L 10 5 L 0 10 z"></path>',
    "</marker>",
    "</defs>",
    edges,
    nodes,
    "</svg>",
  ].join("\n");
}
