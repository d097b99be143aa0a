import { describe, expect, it } from "vitest";

import { ApiError, ArenaApi } from "../src/api.js";

function fakeFetcher(expected: {
  path: string;
  method: string;
  status?: number;
  reply: unknown;
}) {
  const calls: { input: string; init?: RequestInit }[] = [];
  const fetcher = async (input: string, init?: RequestInit) => {
    calls.push({ input, init });
    return new Response(JSON.stringify(expected.reply), {
      status: expected.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetcher, calls };
}

describe("ArenaApi", () => {
  it("posts the spec text verbatim", async () => {
    const { fetcher, calls } = fakeFetcher({
      path: "/specs",
      method: "POST",
      reply: { specId: "s1", verdict: "realizable", K: 2,
               graph: { andNodes: 4, orNodes: 6 }, fragment: [] },
    });
    const api = new ArenaApi("", fetcher);
    const result = await api.submitSpec("(spec ...)");
    expect(calls[0]?.input).toBe("/specs");
    expect(calls[0]?.init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({ text: "(spec ...)" });
    expect(result.verdict).toBe("realizable");
    expect(result.K).toBe(2);
  });

  it("sends move values as exact strings, untouched", async () => {
    const { fetcher, calls } = fakeFetcher({
      path: "/sessions/x/move",
      method: "POST",
      reply: { agent: { y: "13/2" }, k: 1, done: false },
    });
    const api = new ArenaApi("", fetcher);
    await api.move("x", { x: "9/2" });
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({ x: "9/2" });
  });

  it("maps service diagnostics onto ApiError", async () => {
    const { fetcher } = fakeFetcher({
      path: "/specs",
      method: "POST",
      status: 400,
      reply: { detail: "variable declared twice: x" },
    });
    const api = new ArenaApi("", fetcher);
    await expect(api.submitSpec("bad")).rejects.toThrowError(ApiError);
    await expect(api.submitSpec("bad")).rejects.toThrow("variable declared twice: x");
  });

  it("prefixes the base url", async () => {
    const { fetcher, calls } = fakeFetcher({
      path: "/specs/s1/graph",
      method: "GET",
      reply: { initial: 0, and_nodes: [], or_nodes: [], env_edges: [], agent_edges: [] },
    });
    const api = new ArenaApi("http://host:1", fetcher);
    await api.graph("s1");
    expect(calls[0]?.input).toBe("http://host:1/specs/s1/graph");
  });
});
