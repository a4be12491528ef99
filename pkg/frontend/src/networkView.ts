/**
 * SVG rendering of the learned DAG. Layout is deterministic for a given
 * model: nodes sit in longest-path layers, ordered within a layer by
 * declaration order. Nodes are colored by variable group (the four
 * canonical groups) or, when scores are supplied, by a sensitivity
 * grayscale with the target excluded.
 */

import type { ModelInfo } from "./types.js";

export const GROUP_COLORS: Record<string, string> = {
  structural: "#f2d750",
  spatial: "#7fbf7f",
  amenity: "#7fa8d9",
  target: "#e89bc2",
  other: "#cccccc",
};

export interface NodePosition {
  name: string;
  group: string;
  layer: number;
  x: number;
  y: number;
}

export interface EdgePosition {
  parent: string;
  child: string;
  strength?: number;
  from: { x: number; y: number };
  to: { x: number; y: number };
}

export interface Layout {
  nodes: NodePosition[];
  edges: EdgePosition[];
  width: number;
  height: number;
}

const X_SPACING = 170;
const Y_SPACING = 64;
const MARGIN = 60;

export function layoutNetwork(model: ModelInfo): Layout {
  const order = model.variables.map((v) => v.name);
  const parents = new Map<string, string[]>(order.map((n) => [n, []]));
  for (const arc of model.arcs) {
    parents.get(arc.child)?.push(arc.parent);
  }
  // longest path from any root, computed in declaration order until fixpoint
  const layer = new Map<string, number>(order.map((n) => [n, 0]));
  let changed = true;
  while (changed) {
    changed = false;
    for (const node of order) {
      const depth = Math.max(0, ...(parents.get(node) ?? []).map((p) => (layer.get(p) ?? 0) + 1));
      if (depth !== layer.get(node)) {
        layer.set(node, depth);
        changed = true;
      }
    }
  }
  const byLayer = new Map<number, string[]>();
  for (const node of order) {
    const l = layer.get(node) ?? 0;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)?.push(node);
  }
  const positions = new Map<string, NodePosition>();
  const groups = new Map(model.variables.map((v) => [v.name, v.group]));
  let maxRows = 1;
  for (const [l, nodes] of byLayer) {
    maxRows = Math.max(maxRows, nodes.length);
    nodes.forEach((name, i) => {
      positions.set(name, {
        name,
        group: groups.get(name) ?? "other",
        layer: l,
        x: MARGIN + l * X_SPACING,
        y: MARGIN + i * Y_SPACING,
      });
    });
  }
  const edges: EdgePosition[] = model.arcs.map((arc) => {
    const from = positions.get(arc.parent);
    const to = positions.get(arc.child);
    if (!from || !to) throw new Error(`arc references unknown node ${arc.parent}->${arc.child}`);
    return {
      parent: arc.parent,
      child: arc.child,
      strength: arc.strength,
      from: { x: from.x, y: from.y },
      to: { x: to.x, y: to.y },
    };
  });
  const layers = Math.max(...[...byLayer.keys()], 0) + 1;
  return {
    nodes: [...positions.values()],
    edges,
    width: MARGIN * 2 + (layers - 1) * X_SPACING + 120,
    height: MARGIN * 2 + (maxRows - 1) * Y_SPACING,
  };
}

/** Grayscale fill for sensitivity mode: white (0) to near-black (max). */
export function sensitivityColor(score: number, maxScore: number): string {
  const intensity = maxScore > 0 ? Math.min(1, score / maxScore) : 0;
  const channel = Math.round(245 - intensity * 205);
  return `rgb(${channel}, ${channel}, ${channel})`;
}

export function nodeFill(
  node: NodePosition,
  mode: "group" | "sensitivity",
  scores: Record<string, number> | null,
  target: string | null,
): string {
  if (mode === "sensitivity" && scores) {
    if (node.name === target) return "none";
    const max = Math.max(...Object.values(scores), 0);
    return sensitivityColor(scores[node.name] ?? 0, max);
  }
  return GROUP_COLORS[node.group] ?? GROUP_COLORS["other"] ?? "#cccccc";
}

const SVG_NS = "http://www.w3.org/2000/svg";

export interface NetworkCallbacks {
  onNodeClick(name: string): void;
}

export function renderNetwork(
  root: HTMLElement,
  layout: Layout,
  mode: "group" | "sensitivity",
  scores: Record<string, number> | null,
  target: string | null,
  callbacks: NetworkCallbacks,
): void {
  root.replaceChildren();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", "100%");

  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("markerWidth", "8");
  marker.setAttribute("markerHeight", "8");
  marker.setAttribute("refX", "7");
  marker.setAttribute("refY", "3");
  marker.setAttribute("orient", "auto");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M0,0 L7,3 L0,6 z");
  tip.setAttribute("fill", "#555");
  marker.appendChild(tip);
  const defs = document.createElementNS(SVG_NS, "defs");
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const edge of layout.edges) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(edge.from.x + 50));
    line.setAttribute("y1", String(edge.from.y));
    line.setAttribute("x2", String(edge.to.x - 52));
    line.setAttribute("y2", String(edge.to.y));
    line.setAttribute("stroke", "#555");
    line.setAttribute("stroke-width", edge.strength ? String(0.6 + 2.2 * edge.strength) : "1");
    line.setAttribute("marker-end", "url(#arrow)");
    if (edge.strength !== undefined) {
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${edge.parent} -> ${edge.child} (frequency ${edge.strength})`;
      line.appendChild(title);
    }
    svg.appendChild(line);
  }

  for (const node of layout.nodes) {
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("transform", `translate(${node.x}, ${node.y})`);
    g.setAttribute("class", "network-node");
    const shape = document.createElementNS(SVG_NS, "ellipse");
    shape.setAttribute("rx", "50");
    shape.setAttribute("ry", "20");
    shape.setAttribute("fill", nodeFill(node, mode, scores, target));
    shape.setAttribute("stroke", node.name === target ? "#c2186b" : "#444");
    shape.setAttribute("stroke-width", node.name === target ? "3" : "1");
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("dominant-baseline", "central");
    text.setAttribute("font-size", "12");
    text.textContent = node.name;
    g.append(shape, text);
    g.addEventListener("click", () => callbacks.onNodeClick(node.name));
    svg.appendChild(g);
  }
  root.appendChild(svg);
}
