import type { CounterStrategy } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_R = 26;
const COL_W = 150;
const ROW_H = 110;
const MARGIN = 70;

export interface Point {
  x: number;
  y: number;
}

/**
 * Deterministic layered layout: column is breadth-first distance from
 * the initial state, row is arrival order within the column.  States
 * unreachable in the edge list (should not happen) go in a final column.
 */
export function layerLayout(cs: CounterStrategy): Map<number, Point> {
  const succ = new Map<number, number[]>();
  for (const [a, b] of cs.edges) {
    const list = succ.get(a);
    if (list) {
      list.push(b);
    } else {
      succ.set(a, [b]);
    }
  }
  const level = new Map<number, number>();
  level.set(cs.initial, 0);
  const queue = [cs.initial];
  while (queue.length > 0) {
    const here = queue.shift()!;
    const targets = (succ.get(here) ?? []).slice().sort((p, q) => p - q);
    for (const next of targets) {
      if (!level.has(next)) {
        level.set(next, level.get(here)! + 1);
        queue.push(next);
      }
    }
  }
  let maxLevel = 0;
  for (const l of level.values()) {
    maxLevel = Math.max(maxLevel, l);
  }
  for (const state of cs.states) {
    if (!level.has(state.id)) {
      level.set(state.id, maxLevel + 1);
    }
  }
  const rows = new Map<number, number>();
  const layout = new Map<number, Point>();
  const ordered = cs.states.map((s) => s.id).sort((p, q) => p - q);
  for (const id of ordered) {
    const col = level.get(id)!;
    const row = rows.get(col) ?? 0;
    rows.set(col, row + 1);
    layout.set(id, {
      x: MARGIN + col * COL_W,
      y: MARGIN + row * ROW_H,
    });
  }
  return layout;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

function edgePath(a: Point, b: Point, bidirectional: boolean): string {
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const len = Math.hypot(dx, dy) || 1;
  const ux = dx / len;
  const uy = dy / len;
  const sx = a.x + ux * NODE_R;
  const sy = a.y + uy * NODE_R;
  const ex = b.x - ux * (NODE_R + 4);
  const ey = b.y - uy * (NODE_R + 4);
  if (!bidirectional) {
    return `M ${sx} ${sy} L ${ex} ${ey}`;
  }
  // bow outwards so the opposite edge stays readable
  const mx = (sx + ex) / 2 - uy * 24;
  const my = (sy + ey) / 2 + ux * 24;
  return `M ${sx} ${sy} Q ${mx} ${my} ${ex} ${ey}`;
}

function loopPath(p: Point): string {
  const x = p.x;
  const top = p.y - NODE_R;
  return (
    `M ${x - 10} ${top + 4} ` +
    `C ${x - 36} ${top - 44}, ${x + 36} ${top - 44}, ${x + 10} ${top + 4}`
  );
}

/** Render the machine as an inline SVG with predicate labels. */
export function renderGraph(
  cs: CounterStrategy,
  doc: Document = document,
): SVGSVGElement {
  const layout = layerLayout(cs);
  let width = 0;
  let height = 0;
  for (const p of layout.values()) {
    width = Math.max(width, p.x + MARGIN);
    height = Math.max(height, p.y + MARGIN);
  }
  const svg = svgEl(doc, "svg", {
    class: "machine",
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
  });

  const defs = svgEl(doc, "defs", {});
  const marker = svgEl(doc, "marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: "9",
    refY: "5",
    markerWidth: "7",
    markerHeight: "7",
    orient: "auto-start-reverse",
  });
  marker.appendChild(svgEl(doc, "path", { d: "M 0 0 L 10 5 L 0 10 z" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  const edgeSet = new Set(cs.edges.map(([a, b]) => `${a}>${b}`));
  for (const [a, b] of cs.edges) {
    const from = layout.get(a)!;
    const to = layout.get(b)!;
    const d =
      a === b ? loopPath(from) : edgePath(from, to, edgeSet.has(`${b}>${a}`));
    svg.appendChild(
      svgEl(doc, "path", {
        class: "edge",
        d,
        fill: "none",
        "marker-end": "url(#arrow)",
      }),
    );
  }

  for (const state of cs.states) {
    const p = layout.get(state.id)!;
    const group = svgEl(doc, "g", {
      class: state.id === cs.initial ? "state initial" : "state",
      "data-state": String(state.id),
    });
    if (state.id === cs.initial) {
      group.appendChild(
        svgEl(doc, "circle", {
          cx: String(p.x),
          cy: String(p.y),
          r: String(NODE_R + 4),
          class: "initial-ring",
        }),
      );
    }
    group.appendChild(
      svgEl(doc, "circle", {
        cx: String(p.x),
        cy: String(p.y),
        r: String(NODE_R),
      }),
    );
    const text = svgEl(doc, "text", {
      x: String(p.x),
      y: String(p.y - 4),
      "text-anchor": "middle",
    });
    const name = svgEl(doc, "tspan", {
      x: String(p.x),
      class: "state-name",
    });
    name.textContent = `q${state.id}`;
    const pred = svgEl(doc, "tspan", {
      x: String(p.x),
      dy: "14",
      class: "state-pred",
    });
    pred.textContent = state.predicate;
    text.appendChild(name);
    text.appendChild(pred);
    group.appendChild(text);
    svg.appendChild(group);
  }
  return svg;
}
