import { describe, expect, it } from "vitest";

import type { MoveResponse, SessionCreated } from "../src/api.js";
import {
  applyMove,
  applySnapshot,
  freshSession,
  isExactNumber,
  readMoveInputs,
} from "../src/session.js";

const created: SessionCreated = {
  sessionId: "sess-1",
  nodeLabel: "((x < 0) | X(...))",
  nodeId: 0,
  k: 0,
  done: false,
  K: 2,
  envVars: [["x", "real"]],
  agentVars: [["y", "real"]],
};

const move: MoveResponse = {
  sessionId: "sess-1",
  specId: "spec-1",
  k: 1,
  nodeLabel: "(next label)",
  nodeId: 1,
  done: false,
  winFormula: "(or (< (+ x 2) 0) (< (+ x 2) y))",
  traceSoFar: [{ x: "3", y: "6" }],
  satisfied: null,
  agent: { y: "6" },
};

describe("session state", () => {
  it("mirrors the creation response", () => {
    const s = freshSession("spec-1", created);
    expect(s.sessionId).toBe("sess-1");
    expect(s.bound).toBe(2);
    expect(s.k).toBe(0);
    expect(s.trace).toEqual([]);
  });

  it("applyMove copies the server state verbatim", () => {
    const s = applyMove(freshSession("spec-1", created), move);
    expect(s.k).toBe(1);
    expect(s.nodeLabel).toBe("(next label)");
    expect(s.winFormula).toBe(move.winFormula);
    expect(s.lastAgent).toEqual({ y: "6" });
    expect(s.trace).toEqual([{ values: { x: "3", y: "6" } }]);
  });

  it("applySnapshot restores a refreshed page", () => {
    const snap = { ...move, satisfied: true, done: true };
    const s = applySnapshot(freshSession("spec-1", created), snap);
    expect(s.done).toBe(true);
    expect(s.satisfied).toBe(true);
    expect(s.lastAgent).toBeNull(); // snapshots carry no fresh reply
  });
});

describe("numeric entry", () => {
  it("accepts integers and fractions only", () => {
    for (const good of ["0", "-3", "9/2", " 14 ", "-7/3"]) {
      expect(isExactNumber(good)).toBe(true);
    }
    for (const bad of ["abc", "1.5", "", "1/0x", "--2", "1e3"]) {
      expect(isExactNumber(bad)).toBe(false);
    }
  });

  it("collects one value per environment variable", () => {
    const s = freshSession("spec-1", created);
    expect(readMoveInputs(s, () => "3")).toEqual({ x: "3" });
    expect(readMoveInputs(s, () => "oops")).toEqual({
      error: "value for x must be an integer or p/q fraction",
    });
  });
});
