"""HTTP service for the assessor UI.

Wire conventions, fixed across every endpoint: JSON bodies carrying a
schema_version, counts as raw integers, user-facing ratios as
fixed-precision decimal strings (rendering them server-side keeps a
court-adjacent display identical across client platforms), and errors
as {"error": {"code", "message"}} with the same machine-readable codes
the library raises.

The cohort store is in-memory and append-only. Ids are content-derived
("anchors", or a hash of the uploaded distribution), so posting the
same cohort twice returns the same id and every response is a pure
function of the request.
"""

from __future__ import annotations

import argparse
import hashlib
import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import audit as audit_mod
from .cohort import anchor_provenance, reconstruct_anchor_cohort
from .errors import EpvAuditError, ValidationError
from .metrics import (
    LabeledScore,
    ScoreDistribution,
    accuracy_paradox_flag,
    auc,
    confusion,
    format_ratio,
    metrics,
    row_as_wire_dict,
    sweep,
)
from .scale import (
    ScaleDefinition,
    assessment_from_dict,
    builtin_scale,
    score,
)

SCHEMA_VERSION = "1"

_STATUS_BY_CODE = {
    "validation-error": 422,
    "assessment-invalid": 422,
    "all-missing-blocked": 422,
    "cohort-format": 422,
    "degenerate-data": 422,
    "out-of-range": 400,
    "scale-config": 404,
    "not-found": 404,
    "invalid-request": 422,
    "internal-error": 500,
}

COHORT_SOURCE_ANCHORS = "anchors"
COHORT_SOURCE_UPLOAD = "upload"
ANCHORS_COHORT_ID = "anchors"


class NotFoundError(EpvAuditError):
    code = "not-found"


@dataclass(frozen=True)
class SessionCohort:
    cohort_id: str
    distribution: ScoreDistribution
    source: str
    created_at: float  # stored for bookkeeping, never serialized


class CohortStore:
    """Append-only, id-stable cohort registry; safe under concurrent
    reads and writes."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, SessionCohort] = {}

    def add(self, distribution: ScoreDistribution, source: str) -> SessionCohort:
        cohort_id = (
            ANCHORS_COHORT_ID
            if source == COHORT_SOURCE_ANCHORS
            else "u-" + _distribution_digest(distribution)
        )
        with self._lock:
            existing = self._by_id.get(cohort_id)
            if existing is not None:
                return existing
            cohort = SessionCohort(
                cohort_id, distribution, source, time.time()
            )
            self._by_id[cohort_id] = cohort
            return cohort

    def get(self, cohort_id: str) -> SessionCohort:
        with self._lock:
            cohort = self._by_id.get(cohort_id)
        if cohort is None:
            raise NotFoundError(f"no cohort with id {cohort_id!r}")
        return cohort


def _distribution_digest(distribution: ScoreDistribution) -> str:
    payload = ",".join(
        str(c)
        for c in distribution.pos_counts.tolist()
        + distribution.neg_counts.tolist()
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:12]


def _error_body(code: str, message: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "error": {"code": code, "message": message},
    }


def _scale_document(scale: ScaleDefinition) -> dict:
    document = audit_mod.scale_summary(scale)
    document["schema_version"] = SCHEMA_VERSION
    document["items"] = [
        {
            "id": item.id,
            "label_key": item.label_key,
            "category": item.category,
            "guidance": item.guidance,
            "max_points": item.max_points,
        }
        for item in scale.items
    ]
    return document


def _score_document(scale: ScaleDefinition, body: dict) -> dict:
    if not isinstance(body, dict):
        raise ValidationError("request body must be a JSON object")
    assessment = assessment_from_dict(body)
    result = score(scale, assessment)
    return {
        "schema_version": SCHEMA_VERSION,
        "scale_id": scale.scale_id,
        "case_id": assessment.case_id,
        "total": result.imputed_total,
        "tier": result.tier,
        "answered_points": result.answered_points,
        "answered_max": result.answered_max,
        "completeness": format_ratio(result.completeness),
        "warnings": list(result.warnings),
        "contributions": [
            {
                "item_id": c.item_id,
                "points": c.points,
                "max_points": c.max_points,
                "missing": c.missing,
            }
            for c in result.contributions
        ],
        "disclosure": audit_mod.case_disclosure(
            result, scale, case_id=assessment.case_id
        ),
        "relative_risk_banner": audit_mod.RELATIVE_RISK_BANNER,
    }


def _upload_distribution(body: dict, max_total: int) -> ScoreDistribution:
    raw_scores = body.get("scores")
    if not isinstance(raw_scores, list) or not raw_scores:
        raise ValidationError("upload cohorts need a non-empty 'scores' list")
    records = []
    for position, entry in enumerate(raw_scores):
        if (
            not isinstance(entry, dict)
            or not isinstance(entry.get("score"), int)
            or isinstance(entry.get("score"), bool)
            or not isinstance(entry.get("label"), str)
        ):
            raise ValidationError(
                f"scores[{position}] must be {{score: int, label: str}}"
            )
        records.append(LabeledScore(entry["score"], entry["label"]))
    return ScoreDistribution.from_labeled_scores(records, max_total)


def create_app() -> FastAPI:
    app = FastAPI(title="scale audit service", version="1.0.0")
    store = CohortStore()

    @app.exception_handler(EpvAuditError)
    async def _domain_error(request: Request, exc: EpvAuditError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status, content=_error_body(exc.code, str(exc))
        )

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content=_error_body("invalid-request", str(exc.errors())),
        )

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content=_error_body("internal-error", repr(exc)),
        )

    @app.get("/scale/{scale_id}")
    def get_scale(scale_id: str):
        return _scale_document(builtin_scale(scale_id))

    @app.post("/score")
    async def post_score(request: Request):
        body = await request.json()
        scale_id = (
            body.get("scale_id", "epv") if isinstance(body, dict) else "epv"
        )
        return _score_document(builtin_scale(str(scale_id)), body)

    @app.post("/cohorts")
    async def post_cohorts(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise ValidationError("request body must be a JSON object")
        source = body.get("source")
        if source == COHORT_SOURCE_ANCHORS:
            cohort = store.add(
                reconstruct_anchor_cohort(), COHORT_SOURCE_ANCHORS
            )
        elif source == COHORT_SOURCE_UPLOAD:
            distribution = _upload_distribution(
                body, builtin_scale("epv").max_total
            )
            cohort = store.add(distribution, COHORT_SOURCE_UPLOAD)
        else:
            raise ValidationError(
                "source must be 'anchors' or 'upload'"
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "cohort_id": cohort.cohort_id,
            "source": cohort.source,
            "n_severe": cohort.distribution.n_pos,
            "n_non_severe": cohort.distribution.n_neg,
            "max_total": cohort.distribution.max_total,
        }

    @app.get("/cohorts/{cohort_id}/sweep")
    def get_sweep(cohort_id: str):
        cohort = store.get(cohort_id)
        rows = sweep(cohort.distribution)
        return {
            "schema_version": SCHEMA_VERSION,
            "cohort_id": cohort.cohort_id,
            "rows": [row_as_wire_dict(row) for row in rows],
            "auc": format_ratio(auc(rows)),
        }

    @app.get("/cohorts/{cohort_id}/whatif")
    def get_whatif(cohort_id: str, cutoff: int):
        cohort = store.get(cohort_id)
        cm = confusion(cohort.distribution, cutoff)
        row = metrics(cm, cutoff)
        paradox, explanation = accuracy_paradox_flag(row, cohort.distribution)
        return {
            "schema_version": SCHEMA_VERSION,
            "cohort_id": cohort.cohort_id,
            "cutoff": cutoff,
            "confusion": {
                "tp": cm.tp, "fn": cm.fn, "fp": cm.fp, "tn": cm.tn,
            },
            "metrics": row_as_wire_dict(row),
            "flags": {
                "fn_majority": cm.fn > cm.tp,
                "accuracy_paradox": paradox,
                "accuracy_paradox_explanation": explanation,
            },
        }

    @app.post("/audit")
    async def post_audit(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise ValidationError("request body must be a JSON object")
        cohort = store.get(str(body.get("cohort_id", "")))
        cost_ratio = body.get("cost_ratio")
        if not isinstance(cost_ratio, (int, float)) or isinstance(
            cost_ratio, bool
        ):
            raise ValidationError("cost_ratio must be a number")
        provenance = (
            anchor_provenance()
            if cohort.source == COHORT_SOURCE_ANCHORS
            else [f"uploaded cohort {cohort.cohort_id}"]
        )
        report = audit_mod.build_audit(
            cohort.distribution,
            None,
            float(cost_ratio),
            builtin_scale("epv"),
            provenance=provenance,
        )
        document = audit_mod.audit_to_dict(report)
        document["cohort_id"] = cohort.cohort_id
        return document

    return app


def serve_main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="epv-audit-serve",
        description="Run the scoring/audit HTTP service.",
    )
    parser.add_argument(
        "--host", default="127.0.0.1",
        help="bind address (default loopback; widen deliberately)",
    )
    parser.add_argument("--port", type=int, default=8787)
    args = parser.parse_args(argv)

    import uvicorn

    uvicorn.run(create_app(), host=args.host, port=args.port)


if __name__ == "__main__":
    serve_main()
