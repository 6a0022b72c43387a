import { CatalogClass, Recommendations } from "./types.js";

export interface CatalogCard extends CatalogClass {
  recommended: boolean;
  recommendationRank: number | null;
}

/** Merge the catalog with a student's recommendations into badge-ready cards.
 *  Recommended classes float to the top in recommendation order; the rest
 *  keep catalog order. */
export function buildCatalogCards(
  classes: CatalogClass[],
  recs: Recommendations | null,
): CatalogCard[] {
  const rank = new Map<string, number>();
  recs?.recommendations.forEach((r, i) => rank.set(r.class_id, i + 1));
  const cards = classes.map((cls) => ({
    ...cls,
    recommended: rank.has(cls.class_id),
    recommendationRank: rank.get(cls.class_id) ?? null,
  }));
  return cards.sort((a, b) => {
    const ra = a.recommendationRank ?? Infinity;
    const rb = b.recommendationRank ?? Infinity;
    if (ra !== rb) return ra - rb;
    return classes.indexOf(a as CatalogClass & CatalogCard) - classes.indexOf(b as CatalogClass & CatalogCard);
  });
}

export function formatSchedule(isoTimes: string[]): string {
  if (isoTimes.length === 0) return "schedule to be announced";
  const first = new Date(isoTimes[0]!);
  const label = first.toLocaleString("en-US", {
    month: "short",
    day: "numeric",
    hour: "numeric",
    minute: "2-digit",
    timeZone: "UTC",
  });
  return isoTimes.length === 1 ? label : `${label} (+${isoTimes.length - 1} more)`;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderCatalogCard(card: CatalogCard): string {
  const badge = card.recommended
    ? `<span class="badge badge-rec">recommended #${card.recommendationRank}</span>`
    : "";
  const tags = card.tags.map((t) => `<span class="tag">${escapeHtml(t)}</span>`).join(" ");
  return [
    `<article class="card" data-class-id="${escapeHtml(card.class_id)}">`,
    `<h3>${escapeHtml(card.title)} ${badge}</h3>`,
    `<p class="teacher">taught by ${escapeHtml(card.teacher_name)}</p>`,
    `<p>${escapeHtml(card.description)}</p>`,
    `<p class="meta">grades ${card.grade_range[0]}&ndash;${card.grade_range[1]} &middot; ` +
      `${formatSchedule(card.schedule)} &middot; ${card.signup_count} signed up</p>`,
    `<p class="tags">${tags}</p>`,
    `<button class="signup-btn" data-class-id="${escapeHtml(card.class_id)}">Sign up</button>`,
    `</article>`,
  ].join("\n");
}
