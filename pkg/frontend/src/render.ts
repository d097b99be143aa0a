/**
 * Pure HTML/SVG string builders. Everything shown on screen is taken
 * verbatim from a service response that the caller passes in; the tests
 * assert that rendered output contains exactly the served values.
 */

import type { CheckResponse } from "./api.js";
import type { Layout } from "./layout.js";
import type { UiSession } from "./session.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderVerdict(check: CheckResponse): string {
  const k = check.K !== null ? `, K = ${check.K}` : "";
  const classes: Record<string, string> = {
    realizable: "verdict-good",
    "not-boundedly-realizable": "verdict-bad",
    unknown: "verdict-unknown",
  };
  const note =
    check.verdict === "unknown" ? " (iteration budget exhausted)" : "";
  const fragment = check.fragment
    .map((line) => `<li>${escapeHtml(line)}</li>`)
    .join("");
  return (
    `<p class="${classes[check.verdict] ?? ""}">` +
    `<strong>${escapeHtml(check.verdict)}</strong>${k}${note}</p>` +
    `<p>arena: ${check.graph.andNodes} choice nodes, ${check.graph.orNodes} reply nodes</p>` +
    `<ul class="fragment">${fragment}</ul>`
  );
}

export function renderAgentReply(session: UiSession): string {
  if (!session.lastAgent) {
    return "";
  }
  const values = Object.entries(session.lastAgent)
    .map(([name, value]) => `${escapeHtml(name)} = ${escapeHtml(value)}`)
    .join(", ");
  return `<p class="agent-reply">agent: <strong>${values}</strong></p>`;
}

export function renderStatus(session: UiSession): string {
  const win =
    session.winFormula === null
      ? ""
      : `<p>winning formula in play: <code>${escapeHtml(session.winFormula)}</code></p>`;
  const done = session.done
    ? `<p class="${session.satisfied ? "verdict-good" : "verdict-bad"}">` +
      `play over after ${session.k} step(s): trace ` +
      `<strong>${session.satisfied ? "satisfied" : "violated"}</strong></p>`
    : `<p>step ${session.k} of at most ${session.bound}</p>`;
  return (
    `<p>node: <code>${escapeHtml(session.nodeLabel)}</code></p>` + win + done
  );
}

export function renderTraceTable(session: UiSession): string {
  const names = [...session.envVars, ...session.agentVars].map(([n]) => n);
  const header = names.map((n) => `<th>${escapeHtml(n)}</th>`).join("");
  const rows = session.trace
    .map((row, i) => {
      const cells = names
        .map((n) => `<td>${escapeHtml(row.values[n] ?? "")}</td>`)
        .join("");
      return `<tr><td>${i}</td>${cells}</tr>`;
    })
    .join("");
  return (
    `<table class="trace"><thead><tr><th>instant</th>${header}</tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderGraphSvg(layout: Layout, currentKey: string | null): string {
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${layout.width} ${layout.height + 40}" ` +
    `xmlns="http://www.w3.org/2000/svg" class="arena">`,
  );
  const at = new Map(layout.nodes.map((n) => [n.key, n]));
  for (const edge of layout.edges) {
    const a = at.get(edge.from);
    const b = at.get(edge.to);
    if (!a || !b) continue;
    const cls = edge.kind === "env" ? "edge-env" : "edge-agent";
    parts.push(
      `<g class="${cls}"><line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}">` +
      `</line><title>${escapeHtml(edge.guard)}</title></g>`,
    );
  }
  for (const node of layout.nodes) {
    const highlight = node.key === currentKey ? " node-current" : "";
    if (node.kind === "and") {
      const final = node.final ? " node-final" : "";
      parts.push(
        `<g class="node-and${final}${highlight}">` +
        `<rect x="${node.x - 60}" y="${node.y - 16}" width="120" height="32" rx="6">` +
        `</rect><title>${escapeHtml(node.label)}</title>` +
        `<text x="${node.x}" y="${node.y + 4}">${escapeHtml(clip(node.label, 16))}</text></g>`,
      );
    } else {
      parts.push(
        `<g class="node-or${highlight}"><circle cx="${node.x}" cy="${node.y}" r="10">` +
        `</circle><text x="${node.x}" y="${node.y + 4}">∨</text></g>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

function clip(text: string, length: number): string {
  return text.length <= length ? text : text.slice(0, length - 1) + "…";
}
