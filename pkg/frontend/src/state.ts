// Console view state: a pure projection of the event stream.
//
// The reducer applies events strictly in sequence order: events below the
// cursor are duplicates from a resume and are dropped, so a reconnect never
// duplicates cards; the rendered step list is always exactly the stream's
// prefix up to the cursor, never reordered or synthesized.

import type { SessionEvent, SessionRecord } from "./types.js";
import { TERMINAL_STATUSES } from "./types.js";

export interface InvocationView {
  callId: string;
  toolName: string;
  summary: string;
}

export interface ResultView {
  callId: string;
  status: string;
  text: string;
}

export interface StepCard {
  step: number;
  commentary: string;
  invocations: InvocationView[];
  results: ResultView[];
  screenshots: string[];
}

export interface ApprovalCard {
  callId: string;
  toolName: string;
  summary: string;
  riskReason: string;
}

export interface AnnotationForm {
  enabled: boolean;
  outcome: "Success" | "Failed" | null;
  category: "PE" | "AE" | "CE" | null;
  note: string;
  saved: boolean;
}

export interface ConsoleViewState {
  sessionId: string | null;
  cursor: number; // next expected sequence number
  steps: StepCard[];
  status: string | null;
  latestScreenshot: string | null;
  pendingApproval: ApprovalCard | null;
  approvalInFlight: boolean;
  connection: "connecting" | "live" | "lost" | "closed";
  annotation: AnnotationForm;
}

export function initialState(sessionId: string | null = null): ConsoleViewState {
  return {
    sessionId,
    cursor: 0,
    steps: [],
    status: null,
    latestScreenshot: null,
    pendingApproval: null,
    approvalInFlight: false,
    connection: "connecting",
    annotation: { enabled: false, outcome: null, category: null, note: "", saved: false },
  };
}

export function summarizeArguments(args: Record<string, unknown>): string {
  const parts = Object.entries(args).map(([key, value]) => {
    const rendered = typeof value === "string" ? value : JSON.stringify(value);
    return `${key}=${rendered}`;
  });
  return parts.join(", ");
}

function currentStep(state: ConsoleViewState): StepCard | null {
  return state.steps.length ? state.steps[state.steps.length - 1] : null;
}

export function isTerminal(status: string | null): boolean {
  return status !== null && TERMINAL_STATUSES.has(status);
}

/** Apply one event; returns the same object for dropped duplicates. */
export function applyEvent(
  state: ConsoleViewState,
  event: SessionEvent,
): ConsoleViewState {
  if (event.seq < state.cursor) return state; // duplicate from a resume
  const next: ConsoleViewState = {
    ...state,
    cursor: event.seq + 1,
    steps: state.steps.slice(),
  };
  const payload = event.payload;
  switch (event.type) {
    case "step_started": {
      next.steps.push({
        step: Number(payload.step ?? next.steps.length),
        commentary: "",
        invocations: [],
        results: [],
        screenshots: [],
      });
      break;
    }
    case "invocation": {
      const step = currentStep(next);
      if (step) {
        step.invocations = step.invocations.concat({
          callId: String(payload.call_id ?? ""),
          toolName: String(payload.tool_name ?? ""),
          summary: summarizeArguments(
            (payload.arguments as Record<string, unknown>) ?? {},
          ),
        });
        if (payload.commentary) step.commentary = String(payload.commentary);
      }
      break;
    }
    case "result": {
      const step = currentStep(next);
      if (step) {
        step.results = step.results.concat({
          callId: String(payload.call_id ?? ""),
          status: String(payload.status ?? ""),
          text: String(payload.text ?? ""),
        });
      }
      break;
    }
    case "screenshot_ref": {
      const ref = String(payload.ref ?? "");
      const step = currentStep(next);
      if (step) step.screenshots = step.screenshots.concat(ref);
      next.latestScreenshot = ref;
      break;
    }
    case "awaiting_approval": {
      next.pendingApproval = {
        callId: String(payload.call_id ?? ""),
        toolName: String(payload.tool_name ?? ""),
        summary: summarizeArguments(
          (payload.arguments as Record<string, unknown>) ?? {},
        ),
        riskReason: String(payload.risk_reason ?? ""),
      };
      break;
    }
    case "status_change": {
      const status = String(payload.status ?? "");
      next.status = status;
      if (status !== "awaiting_approval") {
        // the pending card clears on the status change, not on the POST
        next.pendingApproval = null;
        next.approvalInFlight = false;
      }
      next.annotation = { ...next.annotation, enabled: isTerminal(status) };
      if (isTerminal(status)) next.connection = "closed";
      break;
    }
    default:
      break; // unknown event types render nothing (no synthesis)
  }
  return next;
}

export function applyEvents(
  state: ConsoleViewState,
  events: Iterable<SessionEvent>,
): ConsoleViewState {
  let current = state;
  for (const event of events) current = applyEvent(current, event);
  return current;
}

/**
 * Idempotence guard for the approve/deny buttons: returns the state with the
 * request marked in flight, or null when a request is already outstanding
 * (a double click must produce a single POST).
 */
export function beginApproval(state: ConsoleViewState): ConsoleViewState | null {
  if (!state.pendingApproval || state.approvalInFlight) return null;
  return { ...state, approvalInFlight: true };
}

export function setConnection(
  state: ConsoleViewState,
  connection: ConsoleViewState["connection"],
): ConsoleViewState {
  if (state.connection === "closed" && connection !== "closed") return state;
  return { ...state, connection };
}

/** Seed status-dependent gating from a fetched record (not a stream event). */
export function applyRecordStatus(
  state: ConsoleViewState,
  record: SessionRecord,
): ConsoleViewState {
  return {
    ...state,
    status: record.status,
    annotation: { ...state.annotation, enabled: isTerminal(record.status) },
  };
}

export interface AnnotationControls {
  formEnabled: boolean;
  categoryEnabled: boolean;
  submittable: boolean;
}

/** Success never carries a category; non-terminal sessions take no annotation. */
export function annotationControls(state: ConsoleViewState): AnnotationControls {
  const formEnabled = state.annotation.enabled;
  const categoryEnabled = formEnabled && state.annotation.outcome === "Failed";
  const submittable =
    formEnabled &&
    state.annotation.outcome !== null &&
    (state.annotation.outcome === "Failed" || state.annotation.category === null);
  return { formEnabled, categoryEnabled, submittable };
}

export function setAnnotationOutcome(
  state: ConsoleViewState,
  outcome: "Success" | "Failed" | null,
): ConsoleViewState {
  return {
    ...state,
    annotation: {
      ...state.annotation,
      outcome,
      // switching to Success drops any selected category
      category: outcome === "Failed" ? state.annotation.category : null,
      saved: false,
    },
  };
}

export function setAnnotationCategory(
  state: ConsoleViewState,
  category: "PE" | "AE" | "CE" | null,
): ConsoleViewState {
  if (state.annotation.outcome !== "Failed") return state;
  return { ...state, annotation: { ...state.annotation, category, saved: false } };
}

export function setAnnotationNote(state: ConsoleViewState, note: string): ConsoleViewState {
  return { ...state, annotation: { ...state.annotation, note, saved: false } };
}

export function markAnnotationSaved(
  state: ConsoleViewState,
  record: SessionRecord,
): ConsoleViewState {
  return {
    ...state,
    annotation: {
      enabled: state.annotation.enabled,
      outcome: record.outcome,
      category: record.error_category,
      note: record.note ?? "",
      saved: true,
    },
  };
}
