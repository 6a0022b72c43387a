import { z } from "zod";
import {
  ApiError,
  CatalogClass,
  ConfirmResult,
  DecisionResult,
  Envelope,
  Health,
  OutboxEntry,
  PendingReview,
  Recommendations,
  SignupResult,
} from "./types.js";

export interface StudentProfile {
  name: string;
  grade: number;
}

export interface Submission {
  teacher_email: string;
  teacher_name: string;
  title: string;
  description: string;
  schedule: string[];
  grade_range?: [number, number];
  teacher_bio?: string;
  duration_minutes?: number;
}

type Fetch = typeof fetch;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: Fetch;

  constructor(baseUrl: string, fetchImpl: Fetch = fetch) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async call<T>(
    schema: z.ZodType<T>,
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    const envelope = Envelope.parse(await response.json());
    if (!envelope.ok || envelope.error) {
      const err = envelope.error;
      throw new ApiError(err?.code ?? "error", err?.message ?? "request failed", err?.fields);
    }
    return schema.parse(envelope.data);
  }

  private post<T>(schema: z.ZodType<T>, path: string, body: unknown): Promise<T> {
    return this.call(schema, path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<Health> {
    return this.call(Health, "/health");
  }

  catalog(): Promise<CatalogClass[]> {
    return this.call(z.array(CatalogClass), "/classes");
  }

  signup(email: string, classId: string, profile?: StudentProfile): Promise<SignupResult> {
    const body: Record<string, unknown> = { email, class_id: classId };
    if (profile) body.profile = profile;
    return this.post(SignupResult, "/students/signup", body);
  }

  recommendations(studentId: string, n = 3): Promise<Recommendations> {
    return this.call(Recommendations, `/students/${studentId}/recommendations?n=${n}`);
  }

  submitClass(submission: Submission): Promise<{ cache_id: string }> {
    return this.post(z.object({ cache_id: z.string() }), "/teachers/submissions", submission);
  }

  pendingReviews(): Promise<PendingReview[]> {
    return this.call(z.array(PendingReview), "/reviews/pending");
  }

  decideReview(
    cacheId: string,
    token: string,
    decision: "approve" | "reject",
    tags: string[],
    note = "",
  ): Promise<DecisionResult> {
    return this.post(DecisionResult, `/reviews/${cacheId}/decision`, {
      token,
      approver_id: "panel-ui",
      decision,
      tags,
      note,
    });
  }

  confirmReady(classId: string, token: string): Promise<ConfirmResult> {
    return this.post(
      ConfirmResult,
      `/classes/${classId}/confirm-ready?token=${encodeURIComponent(token)}`,
      {},
    );
  }

  sendFeedback(studentId: string, classId: string, criterion: string, rating: number): Promise<{ response_id: string }> {
    return this.post(z.object({ response_id: z.string() }), "/feedback", {
      student_id: studentId,
      class_id: classId,
      criterion,
      rating,
    });
  }

  adminOutbox(): Promise<OutboxEntry[]> {
    return this.call(z.array(OutboxEntry), "/admin/outbox");
  }

  /** Resolve a tracked /t/{token} link without following the redirect. */
  async resolveTrackedLink(url: string): Promise<string | null> {
    const response = await this.fetchImpl(url, { redirect: "manual" });
    return response.headers.get("location");
  }
}
