// Typed client for the session service. The console talks to the service
// exclusively through this module; it holds no authority the API lacks.

import { readSse } from "./sse.js";
import type { ConsoleConfig, SessionEvent, SessionRecord } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class NotFoundError extends ApiError {
  constructor(detail: string) {
    super(404, detail);
  }
}

export interface StreamOptions {
  since?: number;
  signal?: AbortSignal;
  onConnection?: (live: boolean) => void;
  retryDelayMs?: number;
  maxRetries?: number;
}

export class ConsoleApi {
  constructor(private readonly config: ConsoleConfig) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["content-type"] = "application/json";
    if (this.config.token) headers["authorization"] = `Bearer ${this.config.token}`;
    return headers;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await fetch(`${this.config.baseUrl}${path}`, {
      method,
      headers: this.headers(body !== undefined),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: string };
        if (payload.detail) detail = payload.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw response.status === 404
        ? new NotFoundError(detail)
        : new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listSessions(filter?: { status?: string; outcome?: string }): Promise<SessionRecord[]> {
    const params = new URLSearchParams();
    if (filter?.status) params.set("status", filter.status);
    if (filter?.outcome) params.set("outcome", filter.outcome);
    const query = params.toString();
    return this.request("GET", `/sessions${query ? `?${query}` : ""}`);
  }

  getSession(sessionId: string): Promise<SessionRecord> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  createSession(body: Record<string, unknown>): Promise<SessionRecord> {
    return this.request("POST", "/sessions", body);
  }

  resolveApproval(
    sessionId: string,
    decision: "approve" | "deny",
    reason?: string,
  ): Promise<SessionRecord> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/approval`, {
      decision,
      reason,
    });
  }

  annotate(
    sessionId: string,
    outcome: string,
    errorCategory?: string | null,
    note?: string,
  ): Promise<SessionRecord> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/annotation`, {
      outcome,
      error_category: errorCategory ?? null,
      note: note ?? null,
    });
  }

  abort(sessionId: string): Promise<SessionRecord> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/abort`);
  }

  screenshotUrl(sessionId: string, ref: string): string {
    const index = ref.replace(/^shot_/, "");
    return `${this.config.baseUrl}/sessions/${encodeURIComponent(sessionId)}/screenshots/${index}`;
  }

  /**
   * Stream a session's events in order, resuming from the last delivered
   * sequence number across connection drops. Ends when the session is
   * terminal and fully delivered.
   */
  async *streamEvents(
    sessionId: string,
    options: StreamOptions = {},
  ): AsyncGenerator<SessionEvent> {
    let cursor = options.since ?? 0;
    const retryDelay = options.retryDelayMs ?? 1000;
    const maxRetries = options.maxRetries ?? 10;
    let failures = 0;
    for (;;) {
      if (options.signal?.aborted) return;
      let response: Response;
      try {
        response = await fetch(
          `${this.config.baseUrl}/sessions/${encodeURIComponent(sessionId)}/events?since=${cursor}`,
          { headers: this.headers(), signal: options.signal },
        );
      } catch (err) {
        if (options.signal?.aborted) return;
        options.onConnection?.(false);
        if (++failures > maxRetries) throw err;
        await new Promise((resolve) => setTimeout(resolve, retryDelay));
        continue;
      }
      if (response.status === 404) throw new NotFoundError(`no session ${sessionId}`);
      if (!response.ok || !response.body) {
        options.onConnection?.(false);
        if (++failures > maxRetries) throw new ApiError(response.status, response.statusText);
        await new Promise((resolve) => setTimeout(resolve, retryDelay));
        continue;
      }
      options.onConnection?.(true);
      failures = 0;
      try {
        for await (const raw of readSse(response.body)) {
          const event: SessionEvent = {
            seq: raw.id === null ? cursor : Number(raw.id),
            type: raw.event,
            payload: raw.data ? (JSON.parse(raw.data) as Record<string, unknown>) : {},
          };
          cursor = event.seq + 1;
          yield event;
        }
      } catch (err) {
        if (options.signal?.aborted) return;
        options.onConnection?.(false);
        if (++failures > maxRetries) throw err;
        await new Promise((resolve) => setTimeout(resolve, retryDelay));
        continue;
      }
      // clean end of stream: terminal sessions are done; otherwise resume
      const record = await this.getSession(sessionId);
      if (record.status !== "running" && record.status !== "awaiting_approval") {
        return;
      }
      await new Promise((resolve) => setTimeout(resolve, retryDelay));
    }
  }
}
