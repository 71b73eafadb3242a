// DOM rendering. Everything here is a dumb projection of ConsoleViewState;
// behavior lives in state.ts and main.ts.

import type { ConsoleViewState, StepCard } from "./state.js";
import { annotationControls } from "./state.js";
import type { SessionRecord } from "./types.js";
import { ERROR_CATEGORIES, ERROR_CATEGORY_LABELS, OUTCOMES } from "./types.js";

export interface Handlers {
  selectSession(sessionId: string): void;
  submitInstruction(instruction: string): void;
  approve(): void;
  deny(): void;
  abort(): void;
  setOutcome(outcome: "Success" | "Failed" | null): void;
  setCategory(category: "PE" | "AE" | "CE" | null): void;
  setNote(note: string): void;
  submitAnnotation(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderSessionList(
  container: HTMLElement,
  sessions: SessionRecord[],
  selected: string | null,
  handlers: Handlers,
): void {
  container.replaceChildren();
  for (const session of sessions) {
    const row = el("button", "session-row" + (session.session_id === selected ? " selected" : ""));
    row.append(
      el("span", "session-id", session.session_id),
      el("span", `status status-${session.status}`, session.status),
      el("span", "outcome", session.outcome ?? ""),
      el("span", "instruction", session.instruction),
    );
    row.addEventListener("click", () => handlers.selectSession(session.session_id));
    container.append(row);
  }
  if (!sessions.length) container.append(el("p", "empty", "no sessions yet"));
}

function renderStep(card: StepCard, screenshotUrl: (ref: string) => string): HTMLElement {
  const node = el("section", "step-card");
  node.dataset.step = String(card.step);
  node.append(el("h3", undefined, `step ${card.step}`));
  if (card.commentary) node.append(el("p", "commentary", card.commentary));
  for (const invocation of card.invocations) {
    node.append(
      el(
        "p",
        "invocation",
        `-> ${invocation.toolName}(${invocation.summary}) [${invocation.callId}]`,
      ),
    );
  }
  for (const result of card.results) {
    node.append(el("p", `result result-${result.status}`, `<- ${result.status}: ${result.text}`));
  }
  for (const ref of card.screenshots) {
    const img = el("img", "screenshot");
    img.src = screenshotUrl(ref);
    img.alt = ref;
    node.append(img);
  }
  return node;
}

export function renderConsole(
  root: HTMLElement,
  state: ConsoleViewState,
  screenshotUrl: (ref: string) => string,
): void {
  const banner = root.querySelector(".connection-banner") as HTMLElement;
  banner.dataset.state = state.connection;
  banner.textContent =
    state.connection === "lost"
      ? "connection lost; retrying..."
      : state.connection === "connecting"
        ? "connecting..."
        : state.connection === "live"
          ? "live"
          : "stream closed";

  const statusLine = root.querySelector(".session-status") as HTMLElement;
  statusLine.textContent = state.sessionId
    ? `${state.sessionId}: ${state.status ?? "..."}`
    : "no session selected";

  const steps = root.querySelector(".steps") as HTMLElement;
  steps.replaceChildren(...state.steps.map((card) => renderStep(card, screenshotUrl)));

  const latest = root.querySelector(".latest-screenshot") as HTMLImageElement;
  if (state.latestScreenshot) {
    latest.src = screenshotUrl(state.latestScreenshot);
    latest.hidden = false;
  } else {
    latest.hidden = true;
  }

  const approval = root.querySelector(".approval-card") as HTMLElement;
  if (state.pendingApproval) {
    approval.hidden = false;
    (approval.querySelector(".approval-summary") as HTMLElement).textContent =
      `${state.pendingApproval.toolName}(${state.pendingApproval.summary})` +
      ` - ${state.pendingApproval.riskReason}`;
    const approveButton = approval.querySelector(".approve") as HTMLButtonElement;
    const denyButton = approval.querySelector(".deny") as HTMLButtonElement;
    approveButton.disabled = state.approvalInFlight;
    denyButton.disabled = state.approvalInFlight;
  } else {
    approval.hidden = true;
  }

  renderAnnotation(root, state);
}

function renderAnnotation(root: HTMLElement, state: ConsoleViewState): void {
  const controls = annotationControls(state);
  const form = root.querySelector(".annotation-form") as HTMLElement;
  const outcomeSelect = form.querySelector(".outcome") as HTMLSelectElement;
  const categorySelect = form.querySelector(".category") as HTMLSelectElement;
  const noteInput = form.querySelector(".note") as HTMLTextAreaElement;
  const saveButton = form.querySelector(".save") as HTMLButtonElement;
  const savedMark = form.querySelector(".saved") as HTMLElement;

  outcomeSelect.disabled = !controls.formEnabled;
  categorySelect.disabled = !controls.categoryEnabled;
  noteInput.disabled = !controls.formEnabled;
  saveButton.disabled = !controls.submittable;
  outcomeSelect.value = state.annotation.outcome ?? "";
  categorySelect.value = state.annotation.category ?? "";
  if (noteInput.value !== state.annotation.note) noteInput.value = state.annotation.note;
  savedMark.hidden = !state.annotation.saved;
}

export function buildShell(root: HTMLElement, handlers: Handlers): void {
  root.replaceChildren();
  const layout = el("div", "layout");

  const sidebar = el("aside", "sidebar");
  sidebar.append(el("h2", undefined, "sessions"));
  const form = el("form", "new-session");
  const input = el("input") as HTMLInputElement;
  input.placeholder = "new instruction (runs the demo script)";
  const submit = el("button", undefined, "start");
  form.append(input, submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (input.value.trim()) handlers.submitInstruction(input.value.trim());
    input.value = "";
  });
  sidebar.append(form, el("div", "session-list"));

  const main = el("main", "viewer");
  main.append(el("div", "connection-banner"));
  const header = el("div", "viewer-header");
  header.append(el("h2", "session-status"));
  const abortButton = el("button", "abort", "stop run");
  abortButton.addEventListener("click", () => handlers.abort());
  header.append(abortButton);
  main.append(header);

  const approval = el("div", "approval-card");
  approval.hidden = true;
  approval.append(el("h3", undefined, "approval required"));
  approval.append(el("p", "approval-summary"));
  const approve = el("button", "approve", "approve");
  const deny = el("button", "deny", "deny");
  approve.addEventListener("click", () => handlers.approve());
  deny.addEventListener("click", () => handlers.deny());
  approval.append(approve, deny);
  main.append(approval);

  const latest = el("img", "latest-screenshot") as HTMLImageElement;
  latest.hidden = true;
  main.append(latest);
  main.append(el("div", "steps"));

  const annotation = el("form", "annotation-form");
  annotation.append(el("h3", undefined, "review"));
  const outcome = el("select", "outcome") as HTMLSelectElement;
  outcome.append(new Option("outcome...", ""));
  for (const value of OUTCOMES) outcome.append(new Option(value, value));
  outcome.addEventListener("change", () =>
    handlers.setOutcome((outcome.value || null) as "Success" | "Failed" | null),
  );
  const category = el("select", "category") as HTMLSelectElement;
  category.append(new Option("error category...", ""));
  for (const value of ERROR_CATEGORIES)
    category.append(new Option(ERROR_CATEGORY_LABELS[value], value));
  category.addEventListener("change", () =>
    handlers.setCategory((category.value || null) as "PE" | "AE" | "CE" | null),
  );
  const note = el("textarea", "note") as HTMLTextAreaElement;
  note.placeholder = "reviewer note";
  note.addEventListener("input", () => handlers.setNote(note.value));
  const save = el("button", "save", "save annotation");
  annotation.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.submitAnnotation();
  });
  const saved = el("span", "saved", "saved");
  saved.hidden = true;
  annotation.append(outcome, category, note, save, saved);
  main.append(annotation);

  layout.append(sidebar, main);
  root.append(layout);
}
