/**
 * Browser bootstrap: fetch the scale and anchor cohort, then keep the
 * three regions (form, live score, what-if) in sync with user edits.
 * All scoring happens on the service; edits are debounced and applied
 * latest-wins so a slow early response can never overwrite a newer one.
 */

import { ApiClient, ServiceError } from "./client.js";
import {
  answeredCount,
  initialForm,
  setItemPoints,
  setItemUnknown,
  toAssessmentBody,
  type FormState,
} from "./form.js";
import {
  renderAssessmentForm,
  renderBlockingError,
  renderScorePanel,
  renderWhatIfPanel,
  type ScorePanelState,
  type WhatIfPanelState,
} from "./render.js";
import { LatestWins, debounce } from "./sequencer.js";
import type { ScaleDoc } from "./wire.js";

const EDIT_DEBOUNCE_MS = 150;

function requireRegion(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing page region #${id}`);
  }
  return node;
}

async function boot(): Promise<void> {
  const formRegion = requireRegion("form-region");
  const scoreRegion = requireRegion("score-region");
  const whatIfRegion = requireRegion("whatif-region");

  const client = new ApiClient(
    new URLSearchParams(window.location.search).get("service") ??
      "http://127.0.0.1:8787",
  );

  let scale: ScaleDoc;
  let maxCutoff: number;
  let cohortId: string;
  try {
    scale = await client.getScale("epv");
    const cohort = await client.registerAnchorsCohort();
    cohortId = cohort.cohort_id;
    maxCutoff = cohort.max_total + 1;
  } catch (failure) {
    const message =
      failure instanceof ServiceError
        ? `${failure.code}: ${failure.message}`
        : String(failure);
    document.body.innerHTML = renderBlockingError(message);
    return;
  }

  let form: FormState = initialForm(scale);
  let scorePanel: ScorePanelState = { kind: "empty" };
  let whatIfPanel: WhatIfPanelState = { kind: "pending", cutoff: 10 };

  const scoreRequests = new LatestWins<ScorePanelState>();
  const whatIfRequests = new LatestWins<WhatIfPanelState>();

  function paintScore(): void {
    scoreRegion.innerHTML = renderScorePanel(scorePanel);
  }

  function paintWhatIf(): void {
    whatIfRegion.innerHTML = renderWhatIfPanel(whatIfPanel, maxCutoff);
  }

  function paintForm(): void {
    formRegion.innerHTML = renderAssessmentForm(scale, form);
  }

  async function refreshScore(): Promise<void> {
    if (answeredCount(form) === 0) {
      scorePanel = { kind: "empty" };
      paintScore();
      return;
    }
    scorePanel = { kind: "pending" };
    paintScore();
    const body = toAssessmentBody(form);
    let next: ScorePanelState | null;
    try {
      next = await scoreRequests.run(async () => ({
        kind: "scored" as const,
        score: await client.score(body),
      }));
    } catch (failure) {
      next = {
        kind: "error",
        message:
          failure instanceof ServiceError
            ? `${failure.code}: ${failure.message}`
            : String(failure),
      };
    }
    if (next !== null) {
      scorePanel = next;
      paintScore();
    }
  }

  async function refreshWhatIf(cutoff: number): Promise<void> {
    whatIfPanel = { kind: "pending", cutoff };
    paintWhatIf();
    let next: WhatIfPanelState | null;
    try {
      next = await whatIfRequests.run(async () => ({
        kind: "loaded" as const,
        whatIf: await client.whatIf(cohortId, cutoff),
      }));
    } catch (failure) {
      next = {
        kind: "error",
        cutoff,
        message:
          failure instanceof ServiceError
            ? `${failure.code}: ${failure.message}`
            : String(failure),
      };
    }
    if (next !== null) {
      whatIfPanel = next;
      paintWhatIf();
    }
  }

  const scheduleScore = debounce(() => {
    void refreshScore();
  }, EDIT_DEBOUNCE_MS);

  formRegion.addEventListener("change", (event) => {
    const target = event.target as HTMLInputElement | null;
    if (!target || target.type !== "radio") {
      return;
    }
    const itemId = Number(target.dataset["itemId"]);
    const item = scale.items.find((candidate) => candidate.id === itemId);
    if (!item) {
      return;
    }
    const edit =
      target.value === "unknown"
        ? setItemUnknown(form, itemId)
        : setItemPoints(form, item, target.value);
    if (edit.error !== null) {
      // out-of-range input never reaches the service
      paintForm();
      return;
    }
    form = edit.state;
    // repaint only the missing/answered accent; radio state is already right
    const fieldset = formRegion.querySelector(`fieldset[data-item="${itemId}"]`);
    if (fieldset) {
      fieldset.classList.toggle(
        "item-missing",
        form.entries.get(itemId)?.kind === "unknown",
      );
      fieldset.classList.toggle(
        "item-answered",
        form.entries.get(itemId)?.kind === "answered",
      );
    }
    scheduleScore();
  });

  whatIfRegion.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement | null;
    if (!target || target.dataset["role"] !== "cutoff-slider") {
      return;
    }
    const output = whatIfRegion.querySelector('[data-role="cutoff-value"]');
    if (output) {
      output.textContent = target.value;
    }
    void refreshWhatIf(Number(target.value));
  });

  paintForm();
  paintScore();
  await refreshWhatIf(10);
}

void boot();
