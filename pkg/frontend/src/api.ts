import type { PreviewResponse, SessionInfo, TreeResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly nodeId?: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "error";
  let message = `request failed with status ${response.status}`;
  let nodeId: number | undefined;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
    nodeId = body.node_id;
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ServiceError(response.status, code, message, nodeId);
}

/** Thin typed wrapper over the session endpoints. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async createSession(csvText: string): Promise<SessionInfo> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csvText,
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async getTree(session: string): Promise<TreeResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${session}/tree`);
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async preview(
    session: string,
    body: { requests: string[]; relax: Record<string, number> },
    signal?: AbortSignal,
  ): Promise<PreviewResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${session}/preview`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async commit(
    session: string,
    body: { requests: string[]; relax: Record<string, number>; dataset_hash: string },
  ): Promise<PreviewResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${session}/commit`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return response.json();
  }

  async exportCsv(session: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${session}/export`);
    if (!response.ok) await parseError(response);
    return response.text();
  }
}
