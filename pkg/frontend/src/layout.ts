/**
 * Deterministic layered layout for the alternating arena graph.
 * Breadth-first layers from the initial node, ties broken by node id, so
 * the same graph document always renders at the same coordinates.
 */

import type { GraphDoc } from "./api.js";

export interface PlacedNode {
  key: string; // "a3" | "o1"
  kind: "and" | "or";
  id: number;
  label: string;
  final: boolean;
  x: number;
  y: number;
}

export interface PlacedEdge {
  from: string;
  to: string;
  guard: string;
  kind: "env" | "agent";
}

export interface Layout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  width: number;
  height: number;
}

const X_STEP = 190;
const Y_STEP = 92;
const MARGIN = 60;

export function layoutGraph(doc: GraphDoc): Layout {
  const layers = new Map<string, number>();
  const queue: string[] = [`a${doc.initial}`];
  layers.set(`a${doc.initial}`, 0);

  const envByAnd = new Map<number, { to: number; guard: string }[]>();
  for (const e of [...doc.env_edges].sort((a, b) => a.to - b.to)) {
    const list = envByAnd.get(e.from) ?? [];
    list.push(e);
    envByAnd.set(e.from, list);
  }
  const agentByOr = new Map<number, { to: number; guard: string }[]>();
  for (const e of [...doc.agent_edges].sort((a, b) => a.to - b.to)) {
    const list = agentByOr.get(e.from) ?? [];
    list.push(e);
    agentByOr.set(e.from, list);
  }

  while (queue.length > 0) {
    const key = queue.shift()!;
    const layer = layers.get(key)!;
    const successors: string[] = [];
    if (key.startsWith("a")) {
      for (const e of envByAnd.get(Number(key.slice(1))) ?? []) {
        successors.push(`o${e.to}`);
      }
    } else {
      for (const e of agentByOr.get(Number(key.slice(1))) ?? []) {
        successors.push(`a${e.to}`);
      }
    }
    for (const next of successors) {
      if (!layers.has(next)) {
        layers.set(next, layer + 1);
        queue.push(next);
      }
    }
  }

  // anything unreachable from the initial node goes to a trailing layer
  let maxLayer = 0;
  for (const layer of layers.values()) maxLayer = Math.max(maxLayer, layer);
  for (const n of doc.and_nodes) {
    if (!layers.has(`a${n.id}`)) layers.set(`a${n.id}`, maxLayer + 1);
  }
  for (const id of doc.or_nodes) {
    if (!layers.has(`o${id}`)) layers.set(`o${id}`, maxLayer + 1);
  }

  const byLayer = new Map<number, string[]>();
  for (const [key, layer] of layers) {
    const list = byLayer.get(layer) ?? [];
    list.push(key);
    byLayer.set(layer, list);
  }

  const nodes: PlacedNode[] = [];
  let height = 0;
  for (const [layer, keys] of [...byLayer.entries()].sort((a, b) => a[0] - b[0])) {
    keys.sort();
    keys.forEach((key, row) => {
      const kind = key.startsWith("a") ? "and" : "or";
      const id = Number(key.slice(1));
      const meta = kind === "and" ? doc.and_nodes.find((n) => n.id === id) : undefined;
      nodes.push({
        key,
        kind,
        id,
        label: meta ? meta.label : "∨",
        final: meta ? meta.final : false,
        x: MARGIN + layer * X_STEP,
        y: MARGIN + row * Y_STEP,
      });
      height = Math.max(height, MARGIN + row * Y_STEP);
    });
  }

  const edges: PlacedEdge[] = [
    ...doc.env_edges.map((e) => ({
      from: `a${e.from}`,
      to: `o${e.to}`,
      guard: e.guard,
      kind: "env" as const,
    })),
    ...doc.agent_edges.map((e) => ({
      from: `o${e.from}`,
      to: `a${e.to}`,
      guard: e.guard,
      kind: "agent" as const,
    })),
  ];

  return {
    nodes,
    edges,
    width: MARGIN * 2 + (maxLayer + 1) * X_STEP,
    height: height + MARGIN,
  };
}
