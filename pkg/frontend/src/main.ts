/** DOM wiring: one page, three panels (spec editor, play view, arena). */

import { ArenaApi, ApiError, CheckResponse, GraphDoc } from "./api.js";
import { layoutGraph } from "./layout.js";
import {
  renderAgentReply,
  renderGraphSvg,
  renderStatus,
  renderTraceTable,
  renderVerdict,
  escapeHtml,
} from "./render.js";
import {
  UiSession,
  applyMove,
  applySnapshot,
  freshSession,
  readMoveInputs,
} from "./session.js";

const api = new ArenaApi("");

let check: CheckResponse | null = null;
let graphDoc: GraphDoc | null = null;
let session: UiSession | null = null;
let pending = false;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element ${id}`);
  return found as T;
}

function setHtml(id: string, html: string): void {
  el(id).innerHTML = html;
}

function refreshPlayPanel(): void {
  const startButton = el<HTMLButtonElement>("start-game");
  startButton.disabled = !(check && check.verdict === "realizable") || pending;
  if (!session) {
    setHtml("play-state", "");
    setHtml("move-form", "");
    setHtml("trace", "");
    return;
  }
  setHtml("play-state", renderAgentReply(session) + renderStatus(session));
  const inputs = session.envVars
    .map(
      ([name, sort]) =>
        `<label>${escapeHtml(name)} (${escapeHtml(sort)}) ` +
        `<input id="env-${escapeHtml(name)}" size="8"></label>`,
    )
    .join(" ");
  const disabled = session.done || pending ? "disabled" : "";
  setHtml(
    "move-form",
    `${inputs} <button id="move" ${disabled}>Move</button>` +
    `<span id="move-error" class="error"></span>`,
  );
  if (!session.done && !pending) {
    el<HTMLButtonElement>("move").addEventListener("click", () => void doMove());
  }
  setHtml("trace", renderTraceTable(session));
  drawGraph();
}

function drawGraph(): void {
  if (!graphDoc) {
    setHtml("graph", "");
    return;
  }
  const current = session ? `a${session.nodeId}` : `a${graphDoc.initial}`;
  setHtml("graph", renderGraphSvg(layoutGraph(graphDoc), current));
}

async function doSubmit(): Promise<void> {
  const text = el<HTMLTextAreaElement>("spec-input").value;
  if (!text.trim() || pending) return;
  pending = true;
  session = null;
  setHtml("verdict", "<p>checking…</p>");
  try {
    check = await api.submitSpec(text);
    graphDoc = await api.graph(check.specId);
    setHtml("verdict", renderVerdict(check));
  } catch (error) {
    check = null;
    graphDoc = null;
    const detail = error instanceof ApiError ? error.message : String(error);
    setHtml("verdict", `<p class="error">${escapeHtml(detail)}</p>`);
  } finally {
    pending = false;
    refreshPlayPanel();
  }
}

async function startGame(): Promise<void> {
  if (!check || pending) return;
  pending = true;
  try {
    const created = await api.createSession(check.specId);
    session = freshSession(check.specId, created);
    sessionStorage.setItem("arena-session", JSON.stringify({
      specId: check.specId,
      sessionId: created.sessionId,
    }));
  } catch (error) {
    const detail = error instanceof ApiError ? error.message : String(error);
    setHtml("play-state", `<p class="error">${escapeHtml(detail)}</p>`);
  } finally {
    pending = false;
    refreshPlayPanel();
  }
}

async function doMove(): Promise<void> {
  if (!session || session.done || pending) return;
  const values = readMoveInputs(session, (name) =>
    el<HTMLInputElement>(`env-${name}`).value,
  );
  if ("error" in values) {
    setHtml("move-error", escapeHtml(values.error));
    return;
  }
  pending = true;
  refreshPlayPanel();
  try {
    const move = await api.move(session.sessionId, values);
    session = applyMove(session, move);
  } catch (error) {
    const detail = error instanceof ApiError ? error.message : String(error);
    setHtml("play-state", `<p class="error">${escapeHtml(detail)}</p>`);
  } finally {
    pending = false;
    refreshPlayPanel();
  }
}

async function restore(): Promise<void> {
  const stored = sessionStorage.getItem("arena-session");
  if (!stored) return;
  try {
    const { specId, sessionId } = JSON.parse(stored);
    const snap = await api.snapshot(sessionId);
    graphDoc = await api.graph(specId);
    const created = await api.createSession(specId);
    // reuse the stored session's state, not the fresh one
    session = applySnapshot(freshSession(specId, created), snap);
    session = { ...session, sessionId };
    refreshPlayPanel();
  } catch {
    sessionStorage.removeItem("arena-session");
  }
}

export function wire(): void {
  el<HTMLButtonElement>("submit-spec").addEventListener("click", () => void doSubmit());
  el<HTMLButtonElement>("start-game").addEventListener("click", () => void startGame());
  const input = el<HTMLTextAreaElement>("spec-input");
  input.addEventListener("input", () => {
    el<HTMLButtonElement>("submit-spec").disabled = !input.value.trim();
  });
  el<HTMLButtonElement>("submit-spec").disabled = !input.value.trim();
  void restore();
}

if (typeof document !== "undefined" && document.getElementById("spec-input")) {
  wire();
}
