import { z } from "zod";

// Every endpoint answers with this envelope.
export const ErrorBody = z.object({
  code: z.string(),
  message: z.string(),
  fields: z.array(z.string()).nullish(),
});

export const Envelope = z.object({
  ok: z.boolean(),
  data: z.unknown().nullish(),
  error: ErrorBody.nullish(),
});

export const CatalogClass = z.object({
  class_id: z.string(),
  title: z.string(),
  description: z.string(),
  teacher_name: z.string(),
  grade_range: z.tuple([z.number(), z.number()]),
  schedule: z.array(z.string()),
  tags: z.array(z.string()),
  signup_count: z.number(),
});
export type CatalogClass = z.infer<typeof CatalogClass>;

export const SignupResult = z.object({
  outcome: z.enum(["needs_profile", "enrolled"]),
  student_id: z.string(),
  welcome_email_id: z.string(),
});
export type SignupResult = z.infer<typeof SignupResult>;

export const Recommendations = z.object({
  student_id: z.string(),
  fallback_popularity: z.boolean(),
  recommendations: z.array(z.object({ class_id: z.string(), score: z.number() })),
});
export type Recommendations = z.infer<typeof Recommendations>;

export const PendingReview = z.object({
  cache_id: z.string(),
  submitted_at: z.string().nullable(),
  payload: z.record(z.string(), z.unknown()),
});
export type PendingReview = z.infer<typeof PendingReview>;

export const DecisionResult = z.object({
  class_id: z.string().nullable(),
  decision: z.string(),
});
export type DecisionResult = z.infer<typeof DecisionResult>;

export const ConfirmResult = z.object({
  class_id: z.string(),
  status: z.string(),
  meeting_link: z.string(),
});
export type ConfirmResult = z.infer<typeof ConfirmResult>;

export const Health = z.object({
  version: z.string(),
  roster_hash: z.string(),
});
export type Health = z.infer<typeof Health>;

export const OutboxEntry = z.object({
  entry_id: z.string(),
  template_id: z.string(),
  recipient: z.string(),
  subject: z.string(),
  body: z.string(),
  created_at: z.string().nullable(),
  delivery_state: z.string(),
});
export type OutboxEntry = z.infer<typeof OutboxEntry>;

export class ApiError extends Error {
  readonly code: string;
  readonly fields: string[];

  constructor(code: string, message: string, fields?: string[] | null) {
    super(message);
    this.code = code;
    this.fields = fields ?? [];
  }
}
