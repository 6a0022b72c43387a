import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { SignupFlow } from "../src/signupFlow.js";

function apiReturning(...bodies: unknown[]): ApiClient {
  let i = 0;
  const fake = async () =>
    new Response(JSON.stringify(bodies[Math.min(i++, bodies.length - 1)]), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  return new ApiClient("http://x.test", fake as typeof fetch);
}

const needsProfile = {
  ok: true,
  data: { outcome: "needs_profile", student_id: "s1", welcome_email_id: "e1" },
};
const enrolled = {
  ok: true,
  data: { outcome: "enrolled", student_id: "s1", welcome_email_id: "e1" },
};

describe("SignupFlow", () => {
  it("moves idle -> needs_profile -> enrolled across two submits", async () => {
    const flow = new SignupFlow(apiReturning(needsProfile, enrolled));
    expect(flow.state.kind).toBe("idle");
    const first = await flow.submit("kid@x.org", "c1");
    expect(first).toEqual({ kind: "needs_profile", email: "kid@x.org", classId: "c1" });
    const second = await flow.submit("kid@x.org", "c1", { name: "Ada", grade: 5 });
    expect(second).toEqual({ kind: "enrolled", studentId: "s1" });
  });

  it("enrolls known students in one step", async () => {
    const flow = new SignupFlow(apiReturning(enrolled));
    const state = await flow.submit("kid@x.org", "c1");
    expect(state.kind).toBe("enrolled");
  });

  it("rejects a malformed email without calling the server", async () => {
    let called = false;
    const fake = async () => {
      called = true;
      return new Response("{}", { status: 200 });
    };
    const flow = new SignupFlow(new ApiClient("http://x.test", fake as typeof fetch));
    const state = await flow.submit("not-an-email", "c1");
    expect(state).toMatchObject({ kind: "error", fields: ["email"] });
    expect(called).toBe(false);
  });

  it("validates the profile locally", async () => {
    const flow = new SignupFlow(apiReturning(enrolled));
    expect(await flow.submit("kid@x.org", "c1", { name: "  ", grade: 5 })).toMatchObject({
      kind: "error",
      fields: ["name"],
    });
    expect(await flow.submit("kid@x.org", "c1", { name: "Ada", grade: 13 })).toMatchObject({
      kind: "error",
      fields: ["grade"],
    });
  });

  it("surfaces server-side errors with their fields", async () => {
    const flow = new SignupFlow(
      apiReturning({ ok: false, error: { code: "not_found", message: "unknown class", fields: ["class_id"] } }),
    );
    const state = await flow.submit("kid@x.org", "missing");
    expect(state).toEqual({ kind: "error", message: "unknown class", fields: ["class_id"] });
  });

  it("turns network failures into a retryable error state", async () => {
    const fake = async () => {
      throw new Error("boom");
    };
    const flow = new SignupFlow(new ApiClient("http://x.test", fake as unknown as typeof fetch));
    const state = await flow.submit("kid@x.org", "c1");
    expect(state).toMatchObject({ kind: "error", message: "network error; try again" });
    flow.reset();
    expect(flow.state.kind).toBe("idle");
  });
});
