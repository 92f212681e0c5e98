/** Thin client for the /api/v1/ endpoints. All board data comes from here;
 * the client never computes scores or reflections itself. */

import type {
  AnswerFile,
  Assignment,
  InstanceSummary,
  InstanceView,
  ReflectionReport,
  ScoreReport,
  SessionInfo,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + "/api/v1" + path, init);
    } catch (err) {
      throw new ApiError(0, `network error: ${String(err)}`);
    }
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        /* non-JSON error body: keep raw text */
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(text) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listInstances(): Promise<{ instances: InstanceSummary[] }> {
    return this.request("/instances");
  }

  getInstance(instanceId: string): Promise<InstanceView> {
    return this.request(`/instances/${encodeURIComponent(instanceId)}`);
  }

  openSession(instanceId: string): Promise<SessionInfo> {
    return this.post("/sessions", { instance_id: instanceId });
  }

  propose(sessionId: string, assignment: Assignment): Promise<ReflectionReport> {
    return this.post(`/sessions/${sessionId}/propose`, { assignment });
  }

  finalize(sessionId: string, assignment: Assignment): Promise<ScoreReport> {
    return this.post(`/sessions/${sessionId}/finalize`, { assignment });
  }

  exportAnswer(sessionId: string): Promise<AnswerFile> {
    return this.request(`/sessions/${sessionId}/answer`);
  }
}
