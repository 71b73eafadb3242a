// Wire types of the session service HTTP API.

export interface SessionRecord {
  session_id: string;
  instruction: string;
  domain_tag: string | null;
  status: string;
  outcome: "Success" | "Failed" | null;
  error_category: "PE" | "AE" | "CE" | null;
  note: string | null;
  detail: string | null;
  created_at: string;
}

export interface SessionEvent {
  seq: number;
  type:
    | "step_started"
    | "invocation"
    | "awaiting_approval"
    | "result"
    | "screenshot_ref"
    | "status_change"
    | string;
  payload: Record<string, unknown>;
}

// Review vocabulary is fixed so labels stay comparable across studies.
export const OUTCOMES = ["Success", "Failed"] as const;
export const ERROR_CATEGORIES = ["PE", "AE", "CE"] as const;

export const ERROR_CATEGORY_LABELS: Record<string, string> = {
  PE: "PE: planning error (wrong plan from the task)",
  AE: "AE: action error (right plan, wrong execution)",
  CE: "CE: critic error (wrong self-assessment)",
};

export const TERMINAL_STATUSES = new Set([
  "completed",
  "aborted",
  "error",
  "awaiting_user",
]);

export interface ConsoleConfig {
  baseUrl: string;
  token?: string;
}
