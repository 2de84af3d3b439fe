/**
 * Assessment form state.
 *
 * Every item starts as "unknown": the assessor must choose each value,
 * including zero, explicitly. Unknown is a first-class state distinct
 * from zero everywhere (state, wire body, rendering). Out-of-range or
 * non-integer input is rejected at the edit, so an invalid value can
 * never reach the service.
 */

import type { AssessmentBody, ItemDoc, ScaleDoc } from "./wire.js";

export type ItemEntry =
  | { kind: "unknown" }
  | { kind: "answered"; points: number };

export interface FormState {
  scaleId: string;
  caseId: string;
  entries: Map<number, ItemEntry>;
}

export interface EditResult {
  state: FormState;
  error: string | null;
}

export function initialForm(scale: ScaleDoc, caseId = ""): FormState {
  const entries = new Map<number, ItemEntry>();
  for (const item of scale.items) {
    entries.set(item.id, { kind: "unknown" });
  }
  return { scaleId: scale.scale_id, caseId, entries };
}

function withEntry(
  state: FormState,
  itemId: number,
  entry: ItemEntry,
): FormState {
  const entries = new Map(state.entries);
  entries.set(itemId, entry);
  return { ...state, entries };
}

export function setItemUnknown(state: FormState, itemId: number): EditResult {
  if (!state.entries.has(itemId)) {
    return { state, error: `no item with id ${itemId}` };
  }
  return { state: withEntry(state, itemId, { kind: "unknown" }), error: null };
}

export function setItemPoints(
  state: FormState,
  item: ItemDoc,
  rawValue: string,
): EditResult {
  if (!state.entries.has(item.id)) {
    return { state, error: `no item with id ${item.id}` };
  }
  const trimmed = rawValue.trim();
  if (!/^\d+$/.test(trimmed)) {
    return {
      state,
      error: `item ${item.id}: points must be a whole number, got "${rawValue}"`,
    };
  }
  const points = Number(trimmed);
  if (points > item.max_points) {
    return {
      state,
      error: `item ${item.id}: points must be between 0 and ${item.max_points}`,
    };
  }
  return {
    state: withEntry(state, item.id, { kind: "answered", points }),
    error: null,
  };
}

export function answeredCount(state: FormState): number {
  let count = 0;
  for (const entry of state.entries.values()) {
    if (entry.kind === "answered") {
      count += 1;
    }
  }
  return count;
}

export function missingItemIds(state: FormState): number[] {
  const ids: number[] = [];
  for (const [itemId, entry] of state.entries) {
    if (entry.kind === "unknown") {
      ids.push(itemId);
    }
  }
  return ids.sort((a, b) => a - b);
}

/** Wire body for POST /score; unknown items go over as null points. */
export function toAssessmentBody(state: FormState): AssessmentBody {
  const responses = [...state.entries.entries()]
    .sort(([a], [b]) => a - b)
    .map(([itemId, entry]) => ({
      item_id: itemId,
      points: entry.kind === "answered" ? entry.points : null,
    }));
  return {
    case_id: state.caseId,
    scale_id: state.scaleId.toLowerCase(),
    responses,
  };
}
