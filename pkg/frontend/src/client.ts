/**
 * Typed fetch client for the scoring service. Every method resolves to
 * the parsed JSON document or throws ServiceError carrying the
 * machine-readable code from the service's error envelope. Transport
 * failures surface as code "unreachable" so callers can raise the
 * blocking no-cached-scoring banner.
 */

import type {
  AssessmentBody,
  CohortDoc,
  ErrorBody,
  ScaleDoc,
  ScoreDoc,
  SweepDoc,
  WhatIfDoc,
} from "./wire.js";
import { SCHEMA_VERSION } from "./wire.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ServiceError";
    this.code = code;
    this.status = status;
  }
}

function isErrorBody(body: unknown): body is ErrorBody {
  return (
    typeof body === "object" &&
    body !== null &&
    "error" in body &&
    typeof (body as ErrorBody).error?.code === "string"
  );
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    // default to the browser fetch, bound so it keeps its receiver
    this.fetchImpl =
      fetchImpl ?? (globalThis.fetch.bind(globalThis) as FetchLike);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ServiceError(
        "unreachable",
        `scoring service unreachable: ${String(cause)}`,
        0,
      );
    }
    let document: unknown;
    try {
      document = await response.json();
    } catch {
      throw new ServiceError(
        "bad-response",
        `service returned non-JSON (HTTP ${response.status})`,
        response.status,
      );
    }
    if (!response.ok) {
      if (isErrorBody(document)) {
        throw new ServiceError(
          document.error.code,
          document.error.message,
          response.status,
        );
      }
      throw new ServiceError(
        "bad-response",
        `HTTP ${response.status} without an error envelope`,
        response.status,
      );
    }
    const version = (document as { schema_version?: unknown }).schema_version;
    if (version !== SCHEMA_VERSION) {
      throw new ServiceError(
        "schema-mismatch",
        `expected schema_version ${SCHEMA_VERSION}, got ${String(version)}`,
        response.status,
      );
    }
    return document as T;
  }

  getScale(scaleId: string): Promise<ScaleDoc> {
    return this.request<ScaleDoc>("GET", `/scale/${encodeURIComponent(scaleId)}`);
  }

  score(assessment: AssessmentBody): Promise<ScoreDoc> {
    return this.request<ScoreDoc>("POST", "/score", assessment);
  }

  registerAnchorsCohort(): Promise<CohortDoc> {
    return this.request<CohortDoc>("POST", "/cohorts", { source: "anchors" });
  }

  uploadCohort(
    scores: { score: number; label: string }[],
  ): Promise<CohortDoc> {
    return this.request<CohortDoc>("POST", "/cohorts", {
      source: "upload",
      scores,
    });
  }

  sweep(cohortId: string): Promise<SweepDoc> {
    return this.request<SweepDoc>(
      "GET",
      `/cohorts/${encodeURIComponent(cohortId)}/sweep`,
    );
  }

  whatIf(cohortId: string, cutoff: number): Promise<WhatIfDoc> {
    return this.request<WhatIfDoc>(
      "GET",
      `/cohorts/${encodeURIComponent(cohortId)}/whatif?cutoff=${cutoff}`,
    );
  }
}
