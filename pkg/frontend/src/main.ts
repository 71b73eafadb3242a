// Console bootstrap: config from the query string, one live stream per
// selected session, all mutations through the service API.

import { ConsoleApi, NotFoundError } from "./api.js";
import {
  applyEvent,
  applyRecordStatus,
  beginApproval,
  initialState,
  markAnnotationSaved,
  setAnnotationCategory,
  setAnnotationNote,
  setAnnotationOutcome,
  setConnection,
  type ConsoleViewState,
} from "./state.js";
import { buildShell, renderConsole, renderSessionList, type Handlers } from "./render.js";
import type { SessionRecord } from "./types.js";

function configFromLocation(): { baseUrl: string; token?: string } {
  const params = new URLSearchParams(window.location.search);
  return {
    baseUrl: params.get("service") ?? "http://127.0.0.1:8700",
    token: params.get("token") ?? undefined,
  };
}

class Controller {
  private state: ConsoleViewState = initialState();
  private sessions: SessionRecord[] = [];
  private streamAbort: AbortController | null = null;
  private readonly api: ConsoleApi;

  constructor(
    private readonly root: HTMLElement,
    config: { baseUrl: string; token?: string },
  ) {
    this.api = new ConsoleApi(config);
  }

  async start(): Promise<void> {
    buildShell(this.root, this.handlers);
    await this.refreshSessions();
    setInterval(() => void this.refreshSessions(), 3000);
    this.render();
  }

  private readonly handlers: Handlers = {
    selectSession: (sessionId) => void this.select(sessionId),
    submitInstruction: (instruction) => void this.create(instruction),
    approve: () => void this.resolve("approve"),
    deny: () => void this.resolve("deny"),
    abort: () => void this.abortSelected(),
    setOutcome: (outcome) => this.update(setAnnotationOutcome(this.state, outcome)),
    setCategory: (category) => this.update(setAnnotationCategory(this.state, category)),
    setNote: (note) => this.update(setAnnotationNote(this.state, note)),
    submitAnnotation: () => void this.saveAnnotation(),
  };

  private update(state: ConsoleViewState): void {
    this.state = state;
    this.render();
  }

  private render(): void {
    const list = this.root.querySelector(".session-list") as HTMLElement;
    renderSessionList(list, this.sessions, this.state.sessionId, this.handlers);
    renderConsole(this.root, this.state, (ref) =>
      this.state.sessionId ? this.api.screenshotUrl(this.state.sessionId, ref) : "",
    );
  }

  private async refreshSessions(): Promise<void> {
    try {
      this.sessions = await this.api.listSessions();
    } catch {
      // list refresh failures are non-fatal; the banner covers stream health
    }
    this.render();
  }

  private async create(instruction: string): Promise<void> {
    const record = await this.api.createSession({
      instruction,
      adapter: { type: "scripted", script: "demo_script" },
      backend: { type: "simulated", scene: "demo_scene" },
    });
    await this.refreshSessions();
    await this.select(record.session_id);
  }

  private async select(sessionId: string): Promise<void> {
    this.streamAbort?.abort();
    const abort = new AbortController();
    this.streamAbort = abort;
    this.update({ ...initialState(sessionId), connection: "connecting" });
    try {
      const record = await this.api.getSession(sessionId);
      let seeded = applyRecordStatus(this.state, record);
      if (record.outcome) seeded = markAnnotationSaved(seeded, record);
      this.update(seeded);
    } catch (err) {
      if (err instanceof NotFoundError) {
        this.update({ ...initialState(sessionId), status: "not found", connection: "closed" });
        return;
      }
      throw err;
    }
    try {
      for await (const event of this.api.streamEvents(sessionId, {
        signal: abort.signal,
        onConnection: (live) =>
          this.update(setConnection(this.state, live ? "live" : "lost")),
      })) {
        if (abort.signal.aborted) return;
        this.update(applyEvent(this.state, event));
      }
      this.update(setConnection(this.state, "closed"));
      await this.refreshSessions();
    } catch (err) {
      if (!abort.signal.aborted) {
        this.update(setConnection(this.state, "lost"));
        throw err;
      }
    }
  }

  private async resolve(decision: "approve" | "deny"): Promise<void> {
    const began = beginApproval(this.state);
    if (!began || !this.state.sessionId) return; // double click: single POST
    this.update(began);
    try {
      await this.api.resolveApproval(this.state.sessionId, decision);
    } catch {
      this.update({ ...this.state, approvalInFlight: false });
    }
  }

  private async abortSelected(): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      await this.api.abort(this.state.sessionId);
    } catch {
      // aborting a terminal session is a no-op error; the stream shows truth
    }
  }

  private async saveAnnotation(): Promise<void> {
    const { sessionId, annotation } = this.state;
    if (!sessionId || !annotation.outcome) return;
    const record = await this.api.annotate(
      sessionId,
      annotation.outcome,
      annotation.outcome === "Failed" ? annotation.category : null,
      annotation.note || undefined,
    );
    this.update(markAnnotationSaved(this.state, record));
    await this.refreshSessions();
  }
}

const root = document.getElementById("app");
if (root) {
  void new Controller(root, configFromLocation()).start();
}
