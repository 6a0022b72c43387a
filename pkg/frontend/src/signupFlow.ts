import { ApiClient, StudentProfile } from "./api.js";
import { ApiError } from "./types.js";

/** State machine for the student signup dialog.
 *
 *  idle -> submitting -> enrolled
 *                    \-> needs_profile -> submitting -> enrolled
 *                    \-> error (recoverable; retry goes back to submitting)
 */
export type SignupState =
  | { kind: "idle" }
  | { kind: "submitting" }
  | { kind: "needs_profile"; email: string; classId: string }
  | { kind: "enrolled"; studentId: string }
  | { kind: "error"; message: string; fields: string[] };

export class SignupFlow {
  state: SignupState = { kind: "idle" };

  constructor(private readonly api: ApiClient) {}

  async submit(email: string, classId: string, profile?: StudentProfile): Promise<SignupState> {
    if (!email.includes("@")) {
      this.state = { kind: "error", message: "enter a valid email address", fields: ["email"] };
      return this.state;
    }
    if (profile && (!profile.name.trim() || profile.grade < 0 || profile.grade > 12)) {
      this.state = {
        kind: "error",
        message: "profile needs a name and a grade between 0 and 12",
        fields: [!profile.name.trim() ? "name" : "grade"],
      };
      return this.state;
    }
    this.state = { kind: "submitting" };
    try {
      const result = await this.api.signup(email, classId, profile);
      this.state =
        result.outcome === "needs_profile"
          ? { kind: "needs_profile", email, classId }
          : { kind: "enrolled", studentId: result.student_id };
    } catch (err) {
      if (err instanceof ApiError) {
        this.state = { kind: "error", message: err.message, fields: err.fields };
      } else {
        this.state = { kind: "error", message: "network error; try again", fields: [] };
      }
    }
    return this.state;
  }

  reset(): void {
    this.state = { kind: "idle" };
  }
}
