/**
 * Wire types for the scoring service, schema_version "1".
 *
 * Counts arrive as raw integers; user-facing ratios arrive as
 * six-decimal strings rendered server-side ("n/a" when undefined).
 * The UI treats all of them as opaque display values: it formats,
 * it never computes.
 */

export const SCHEMA_VERSION = "1";

export interface ItemDoc {
  id: number;
  label_key: string;
  category: string;
  guidance: string;
  max_points: number;
}

export interface ScaleDoc {
  schema_version: string;
  scale_id: string;
  item_count: number;
  max_total: number;
  tier_bounds: { low_max: number; moderate_max: number; high_max: number };
  provenance_note: string;
  items: ItemDoc[];
}

export interface ContributionDoc {
  item_id: number;
  points: number | null;
  max_points: number;
  missing: boolean;
}

export interface ScoreDoc {
  schema_version: string;
  scale_id: string;
  case_id: string;
  total: number;
  tier: string;
  answered_points: number;
  answered_max: number;
  completeness: string;
  warnings: string[];
  contributions: ContributionDoc[];
  disclosure: string;
  relative_risk_banner: string;
}

export interface CohortDoc {
  schema_version: string;
  cohort_id: string;
  source: string;
  n_severe: number;
  n_non_severe: number;
  max_total: number;
}

export interface MetricsRowDoc {
  cutoff: number;
  tp: number;
  fn: number;
  fp: number;
  tn: number;
  sensitivity: string;
  specificity: string;
  fpr: string;
  fnr: string;
  accuracy: string;
  precision: string;
  npv: string;
  f_measure: string;
  g_mean: string;
}

export interface SweepDoc {
  schema_version: string;
  cohort_id: string;
  rows: MetricsRowDoc[];
  auc: string;
}

export interface WhatIfDoc {
  schema_version: string;
  cohort_id: string;
  cutoff: number;
  confusion: { tp: number; fn: number; fp: number; tn: number };
  metrics: MetricsRowDoc;
  flags: {
    fn_majority: boolean;
    accuracy_paradox: boolean;
    accuracy_paradox_explanation: string;
  };
}

export interface ErrorBody {
  schema_version: string;
  error: { code: string; message: string };
}

export interface AssessmentResponseBody {
  item_id: number;
  points: number | null;
}

export interface AssessmentBody {
  case_id: string;
  scale_id?: string;
  responses: AssessmentResponseBody[];
}
