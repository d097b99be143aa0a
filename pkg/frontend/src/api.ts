/**
 * Typed client for the synthesis service. Every numeric value crosses the
 * wire as an exact decimal or p/q string; the client never parses them
 * into floats.
 */

export interface CheckResponse {
  specId: string;
  verdict: "realizable" | "not-boundedly-realizable" | "unknown";
  K: number | null;
  graph: { andNodes: number; orNodes: number };
  fragment: string[];
}

export interface SessionCreated {
  sessionId: string;
  nodeLabel: string;
  nodeId: number;
  k: number;
  done: boolean;
  K: number;
  envVars: [string, string][];
  agentVars: [string, string][];
}

export interface MoveResponse {
  sessionId: string;
  specId: string;
  k: number;
  nodeLabel: string;
  nodeId: number;
  done: boolean;
  winFormula: string;
  traceSoFar: Record<string, string>[];
  satisfied: boolean | null;
  agent: Record<string, string>;
}

export type Snapshot = Omit<MoveResponse, "agent">;

export interface GraphDoc {
  initial: number;
  and_nodes: { id: number; label: string; final: boolean }[];
  or_nodes: number[];
  env_edges: { from: number; to: number; guard: string }[];
  agent_edges: { from: number; to: number; guard: string }[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ArenaApi {
  constructor(
    private readonly base: string = "",
    private readonly fetcher: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetcher(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let doc: unknown = null;
    try {
      doc = text ? JSON.parse(text) : null;
    } catch {
      doc = { detail: text };
    }
    if (!response.ok) {
      const detail =
        doc && typeof doc === "object" && "detail" in doc
          ? String((doc as { detail: unknown }).detail)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return doc as T;
  }

  submitSpec(text: string): Promise<CheckResponse> {
    return this.request<CheckResponse>("POST", "/specs", { text });
  }

  createSession(specId: string): Promise<SessionCreated> {
    return this.request<SessionCreated>("POST", `/specs/${specId}/sessions`);
  }

  move(sessionId: string, values: Record<string, string>): Promise<MoveResponse> {
    return this.request<MoveResponse>("POST", `/sessions/${sessionId}/move`, values);
  }

  graph(specId: string): Promise<GraphDoc> {
    return this.request<GraphDoc>("GET", `/specs/${specId}/graph`);
  }

  snapshot(sessionId: string): Promise<Snapshot> {
    return this.request<Snapshot>("GET", `/sessions/${sessionId}`);
  }
}
