/**
 * Client-side mirror of a play session. The browser performs no logic of
 * its own: every field below is copied verbatim from a service response,
 * and the reducer only swaps in the newest server state.
 */

import type { MoveResponse, SessionCreated, Snapshot } from "./api.js";

export interface TraceRow {
  values: Record<string, string>;
}

export interface UiSession {
  specId: string;
  sessionId: string;
  bound: number;
  k: number;
  nodeId: number;
  nodeLabel: string;
  winFormula: string | null;
  done: boolean;
  satisfied: boolean | null;
  trace: TraceRow[];
  lastAgent: Record<string, string> | null;
  envVars: [string, string][];
  agentVars: [string, string][];
}

export function freshSession(specId: string, created: SessionCreated): UiSession {
  return {
    specId,
    sessionId: created.sessionId,
    bound: created.K,
    k: created.k,
    nodeId: created.nodeId,
    nodeLabel: created.nodeLabel,
    winFormula: null,
    done: created.done,
    satisfied: null,
    trace: [],
    lastAgent: null,
    envVars: created.envVars,
    agentVars: created.agentVars,
  };
}

export function applyMove(session: UiSession, move: MoveResponse): UiSession {
  return {
    ...session,
    k: move.k,
    nodeId: move.nodeId,
    nodeLabel: move.nodeLabel,
    winFormula: move.winFormula,
    done: move.done,
    satisfied: move.satisfied,
    trace: move.traceSoFar.map((values) => ({ values })),
    lastAgent: move.agent,
  };
}

export function applySnapshot(session: UiSession, snap: Snapshot): UiSession {
  return {
    ...session,
    k: snap.k,
    nodeId: snap.nodeId,
    nodeLabel: snap.nodeLabel,
    winFormula: snap.winFormula,
    done: snap.done,
    satisfied: snap.satisfied,
    trace: snap.traceSoFar.map((values) => ({ values })),
  };
}

/** A value is sent only if it is an exact decimal or p/q literal. */
export function isExactNumber(text: string): boolean {
  return /^-?\d+(\/\d+)?$/.test(text.trim());
}

export function readMoveInputs(
  session: UiSession,
  read: (name: string) => string,
): Record<string, string> | { error: string } {
  const values: Record<string, string> = {};
  for (const [name] of session.envVars) {
    const raw = read(name).trim();
    if (!isExactNumber(raw)) {
      return { error: `value for ${name} must be an integer or p/q fraction` };
    }
    values[name] = raw;
  }
  return values;
}
