import { ApiClient } from "./api.js";
import { buildCatalogCards, renderCatalogCard } from "./catalog.js";
import { parseTags, renderPendingReview, submitDecision } from "./reviewPanel.js";
import { SignupFlow } from "./signupFlow.js";
import { Recommendations } from "./types.js";

/** DOM wiring for the single-page app. Pure logic lives in the sibling
 *  modules so it can be tested without a browser. */
export function startApp(root: HTMLElement, api: ApiClient): void {
  const flow = new SignupFlow(api);
  let studentId: string | null = localStorage.getItem("student_id");

  root.innerHTML = [
    `<header><h1>Class catalog</h1><p id="status" role="status"></p></header>`,
    `<section id="catalog"></section>`,
    `<section id="reviews"><h2>Review panel</h2><div id="review-list"></div></section>`,
  ].join("\n");
  const status = root.querySelector<HTMLElement>("#status")!;
  const catalogEl = root.querySelector<HTMLElement>("#catalog")!;
  const reviewList = root.querySelector<HTMLElement>("#review-list")!;

  async function refreshCatalog(): Promise<void> {
    const classes = await api.catalog();
    let recs: Recommendations | null = null;
    if (studentId) {
      try {
        recs = await api.recommendations(studentId);
      } catch {
        recs = null; // catalog still renders without badges
      }
    }
    catalogEl.innerHTML = buildCatalogCards(classes, recs).map(renderCatalogCard).join("\n");
  }

  async function refreshReviews(): Promise<void> {
    const pending = await api.pendingReviews();
    reviewList.innerHTML = pending.length
      ? pending.map(renderPendingReview).join("\n")
      : "<p>nothing waiting for review</p>";
  }

  catalogEl.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLElement>(".signup-btn");
    if (!button) return;
    const classId = button.dataset.classId!;
    void (async () => {
      const email = window.prompt("Your email?");
      if (!email) return;
      let state = await flow.submit(email, classId);
      if (state.kind === "needs_profile") {
        const name = window.prompt("Student name?") ?? "";
        const grade = Number(window.prompt("Grade (0-12)?") ?? "");
        state = await flow.submit(email, classId, { name, grade });
      }
      if (state.kind === "enrolled") {
        studentId = state.studentId;
        localStorage.setItem("student_id", studentId);
        status.textContent = "enrolled — recommendations updated";
        await refreshCatalog();
      } else if (state.kind === "error") {
        status.textContent = state.message;
      }
    })();
  });

  reviewList.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLElement>(".approve-btn, .reject-btn");
    if (!button) return;
    const card = button.closest<HTMLElement>(".review")!;
    const decision = button.classList.contains("approve-btn") ? "approve" : "reject";
    const tags = parseTags(card.querySelector<HTMLInputElement>(".review-tags")?.value ?? "");
    const token = window.prompt("Review token from the panel email?") ?? "";
    void (async () => {
      const outcome = await submitDecision(api, {
        cacheId: button.dataset.cacheId!,
        token,
        decision,
        tags,
        note: "",
      });
      if (outcome.kind === "decided") {
        status.textContent = `submission ${outcome.result.decision}d`;
        await refreshReviews();
        await refreshCatalog();
      } else {
        status.textContent = outcome.kind === "invalid" ? outcome.problems.join("; ") : outcome.message;
      }
    })();
  });

  void refreshCatalog();
  void refreshReviews();
}

// Only wire the DOM when loaded in a browser; tests import the modules directly.
if (typeof document !== "undefined" && document.getElementById("app")) {
  startApp(document.getElementById("app")!, new ApiClient(window.location.origin));
}
