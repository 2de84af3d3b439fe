/**
 * Pure HTML renderers. Each function maps service documents plus form
 * state to a markup string; no arithmetic beyond display formatting of
 * server-rendered numbers, and no DOM access, so every view is
 * assertable in tests as a plain string.
 */

import type { FormState } from "./form.js";
import type {
  ContributionDoc,
  ItemDoc,
  ScaleDoc,
  ScoreDoc,
  WhatIfDoc,
} from "./wire.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** "0.832714" -> "83.27%"; passes "n/a" through untouched. */
export function percent(ratio: string): string {
  if (ratio === "n/a") {
    return "n/a";
  }
  return (Number(ratio) * 100).toFixed(2) + "%";
}

function groupByCategory(items: ItemDoc[]): Map<string, ItemDoc[]> {
  const groups = new Map<string, ItemDoc[]>();
  for (const item of items) {
    const bucket = groups.get(item.category);
    if (bucket) {
      bucket.push(item);
    } else {
      groups.set(item.category, [item]);
    }
  }
  return groups;
}

function renderItemControl(item: ItemDoc, state: FormState): string {
  const entry = state.entries.get(item.id) ?? { kind: "unknown" as const };
  const name = `item-${item.id}`;
  const options: string[] = [];
  for (let points = 0; points <= item.max_points; points++) {
    const checked =
      entry.kind === "answered" && entry.points === points ? " checked" : "";
    options.push(
      `<label class="points-option"><input type="radio" name="${name}"` +
        ` value="${points}" data-item-id="${item.id}"${checked}>` +
        `${points}</label>`,
    );
  }
  const unknownChecked = entry.kind === "unknown" ? " checked" : "";
  options.push(
    `<label class="points-option points-option-unknown">` +
      `<input type="radio" name="${name}" value="unknown"` +
      ` data-item-id="${item.id}"${unknownChecked}>unknown / missing</label>`,
  );
  const stateClass = entry.kind === "unknown" ? "item-missing" : "item-answered";
  return (
    `<fieldset class="item-control ${stateClass}" data-item="${item.id}">` +
    `<legend>item ${item.id}: ${escapeHtml(item.label_key)}</legend>` +
    `<p class="guidance">${escapeHtml(item.guidance)}</p>` +
    `<div class="options">${options.join("")}</div>` +
    `</fieldset>`
  );
}

export function renderAssessmentForm(scale: ScaleDoc, state: FormState): string {
  const sections: string[] = [];
  for (const [category, items] of groupByCategory(scale.items)) {
    sections.push(
      `<section class="category" data-category="${escapeHtml(category)}">` +
        `<h3>${escapeHtml(category)}</h3>` +
        items.map((item) => renderItemControl(item, state)).join("") +
        `</section>`,
    );
  }
  return `<form class="assessment-form" data-role="assessment-form">${sections.join("")}</form>`;
}

function renderContributions(contributions: ContributionDoc[]): string {
  const rows = contributions
    .map((entry) => {
      const points = entry.missing
        ? `<em class="missing-cell">missing</em>`
        : String(entry.points);
      return (
        `<tr class="${entry.missing ? "row-missing" : "row-answered"}">` +
        `<td>${entry.item_id}</td><td>${points}</td>` +
        `<td>${entry.max_points}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="contributions"><thead>` +
    `<tr><th>item</th><th>points</th><th>max</th></tr>` +
    `</thead><tbody>${rows}</tbody></table>`
  );
}

function renderBanner(text: string): string {
  return `<aside class="relative-risk-banner" data-role="risk-banner">${escapeHtml(text)}</aside>`;
}

// Fallback banner text for states with no score document yet. The
// service copy (ScoreDoc.relative_risk_banner) replaces it as soon as
// a score arrives; the banner itself must never disappear.
export const DEFAULT_BANNER =
  "Tier placement expresses risk relative to reported population cases " +
  "scored by this instrument; it is not an absolute probability of harm.";

export type ScorePanelState =
  | { kind: "empty" }
  | { kind: "pending" }
  | { kind: "error"; message: string }
  | { kind: "scored"; score: ScoreDoc };

export function renderScorePanel(panel: ScorePanelState): string {
  if (panel.kind === "scored") {
    const score = panel.score;
    const badges: string[] = [];
    if (score.warnings.includes("imputation-applied")) {
      badges.push(
        `<span class="badge badge-imputation" data-role="imputation-badge">` +
          `imputation applied` +
          `</span>`,
      );
    }
    if (score.warnings.includes("low-completeness")) {
      badges.push(`<span class="badge badge-low-completeness">low completeness</span>`);
    }
    return (
      `<div class="score-panel" data-role="score-panel">` +
      `<p class="score-total">total: <strong data-role="total">${score.total}</strong></p>` +
      `<p class="score-tier">tier: <strong data-role="tier">${escapeHtml(score.tier)}</strong></p>` +
      `<p class="score-completeness">completeness: ` +
      `<span data-role="completeness">${percent(score.completeness)}</span></p>` +
      (badges.length ? `<p class="badges">${badges.join(" ")}</p>` : "") +
      renderContributions(score.contributions) +
      `<pre class="disclosure">${escapeHtml(score.disclosure)}</pre>` +
      renderBanner(score.relative_risk_banner) +
      `</div>`
    );
  }
  const body =
    panel.kind === "pending"
      ? `<p class="score-pending">scoring&hellip;</p>`
      : panel.kind === "error"
        ? `<p class="score-error">${escapeHtml(panel.message)}</p>`
        : `<p class="score-empty">No score yet: answer at least one item. ` +
          `Unanswered items stay "unknown" until you choose a value.</p>`;
  return (
    `<div class="score-panel" data-role="score-panel">` +
    body +
    renderBanner(DEFAULT_BANNER) +
    `</div>`
  );
}

export type WhatIfPanelState =
  | { kind: "pending"; cutoff: number }
  | { kind: "error"; cutoff: number; message: string }
  | { kind: "loaded"; whatIf: WhatIfDoc };

export function renderWhatIfPanel(
  panel: WhatIfPanelState,
  maxCutoff: number,
): string {
  const cutoff = panel.kind === "loaded" ? panel.whatIf.cutoff : panel.cutoff;
  const slider =
    `<label class="cutoff-slider-label">cutoff: ` +
    `<input type="range" min="0" max="${maxCutoff}" step="1"` +
    ` value="${cutoff}" data-role="cutoff-slider">` +
    ` <output data-role="cutoff-value">${cutoff}</output></label>`;
  let body: string;
  if (panel.kind === "pending") {
    body = `<p class="whatif-pending">loading consequences&hellip;</p>`;
  } else if (panel.kind === "error") {
    body = `<p class="whatif-error">${escapeHtml(panel.message)}</p>`;
  } else {
    const doc = panel.whatIf;
    const notices: string[] = [];
    if (doc.cutoff === 0) {
      notices.push(
        `<p class="notice notice-flag-all" data-role="flag-all-notice">` +
          `all cases flagged severe at this cutoff</p>`,
      );
    }
    if (doc.flags.fn_majority) {
      notices.push(
        `<p class="notice notice-fn-majority" data-role="fn-majority-flag">` +
          `FN-majority: missed severe cases (${doc.confusion.fn}) outnumber ` +
          `detected ones (${doc.confusion.tp})</p>`,
      );
    }
    if (doc.flags.accuracy_paradox) {
      notices.push(
        `<p class="notice notice-paradox" data-role="accuracy-paradox-flag">` +
          `${escapeHtml(doc.flags.accuracy_paradox_explanation)}</p>`,
      );
    }
    body =
      `<dl class="whatif-metrics">` +
      `<dt>sensitivity</dt><dd data-role="sensitivity">${percent(doc.metrics.sensitivity)}</dd>` +
      `<dt>specificity</dt><dd data-role="specificity">${percent(doc.metrics.specificity)}</dd>` +
      `<dt>missed severe cases (FN)</dt><dd data-role="fn-count">${doc.confusion.fn}</dd>` +
      `<dt>false alarms (FP)</dt><dd data-role="fp-count">${doc.confusion.fp}</dd>` +
      `</dl>` +
      notices.join("");
  }
  return (
    `<div class="whatif-panel" data-role="whatif-panel">` +
    `<h3>what-if: consequences of moving the cutoff</h3>` +
    slider +
    body +
    `</div>`
  );
}

export function renderBlockingError(message: string): string {
  return (
    `<div class="blocking-error" data-role="blocking-error">` +
    `<h2>scoring service unreachable</h2>` +
    `<p>${escapeHtml(message)}</p>` +
    `<p>This interface never scores from a cache; reconnect the service ` +
    `and reload.</p>` +
    `</div>`
  );
}
