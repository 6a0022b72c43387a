import { ApiClient } from "./api.js";
import { ApiError, DecisionResult, PendingReview } from "./types.js";

export interface DecisionInput {
  cacheId: string;
  token: string;
  decision: "approve" | "reject";
  tags: string[];
  note: string;
}

/** Client-side gate mirroring the server rule: approvals must carry tags.
 *  Returns a list of problems; empty means the decision may be sent. */
export function validateDecision(input: DecisionInput): string[] {
  const problems: string[] = [];
  if (!input.token.trim()) problems.push("paste the review token from the panel email");
  if (input.decision === "approve" && input.tags.filter((t) => t.trim()).length === 0) {
    problems.push("an approval needs at least one topic tag");
  }
  return problems;
}

/** Split a free-text tag field ("science, space") into clean tags. */
export function parseTags(raw: string): string[] {
  return raw
    .split(",")
    .map((t) => t.trim().toLowerCase())
    .filter((t) => t.length > 0);
}

export type ReviewOutcome =
  | { kind: "decided"; result: DecisionResult }
  | { kind: "invalid"; problems: string[] }
  | { kind: "error"; message: string };

export async function submitDecision(api: ApiClient, input: DecisionInput): Promise<ReviewOutcome> {
  const problems = validateDecision(input);
  if (problems.length > 0) return { kind: "invalid", problems };
  try {
    const result = await api.decideReview(
      input.cacheId,
      input.token.trim(),
      input.decision,
      parseTags(input.tags.join(",")),
      input.note,
    );
    return { kind: "decided", result };
  } catch (err) {
    const message = err instanceof ApiError ? err.message : "network error; try again";
    return { kind: "error", message };
  }
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderPendingReview(review: PendingReview): string {
  const payload = review.payload as Record<string, unknown>;
  const title = typeof payload.title === "string" ? payload.title : "(untitled)";
  const teacher = typeof payload.teacher_name === "string" ? payload.teacher_name : "unknown";
  return [
    `<article class="review" data-cache-id="${escapeHtml(review.cache_id)}">`,
    `<h3>${escapeHtml(title)}</h3>`,
    `<p class="teacher">submitted by ${escapeHtml(teacher)}</p>`,
    `<p class="meta">received ${escapeHtml(review.submitted_at ?? "just now")}</p>`,
    `<input class="review-tags" placeholder="tags (comma separated)">`,
    `<button class="approve-btn" data-cache-id="${escapeHtml(review.cache_id)}">Approve</button>`,
    `<button class="reject-btn" data-cache-id="${escapeHtml(review.cache_id)}">Reject</button>`,
    `</article>`,
  ].join("\n");
}
