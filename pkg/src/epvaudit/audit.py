"""Audit artifacts: cutoff trade-off analysis, flags, case disclosure.

Every numeric block in a rendered report carries a source tag naming
the operation that produced it, so a reviewer can re-derive any cell.
Rendering is a pure function of its inputs; regenerating a report gives
identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ValidationError
from .metrics import (
    MetricsRow,
    ScoreDistribution,
    accuracy_paradox_flag,
    auc,
    format_ratio,
    row_as_wire_dict,
    sweep,
)
from .scale import ScaleDefinition, ScoreResult

SCHEMA_VERSION = "1"

# shown on every disclosure, complete or not; the tier compares the case
# with other reported cases, it is not an absolute probability of harm
RELATIVE_RISK_BANNER = (
    "Tier placement expresses risk relative to reported population cases "
    "scored by this instrument; it is not an absolute probability of harm."
)

SOURCE_SWEEP = "confusion-and-ratio computation over the score distribution"
SOURCE_COST = "expected cost = cost_ratio x fn + fp per cutoff"
SOURCE_AUC = "trapezoidal area under the discrete ROC polygon"
SOURCE_FLAGS = "predicates evaluated on the sweep table"


@dataclass(frozen=True)
class CostPoint:
    cutoff: int
    expected_cost: float


@dataclass(frozen=True)
class AuditReport:
    scale_summary: dict
    rows: tuple[MetricsRow, ...]
    auc_value: float
    cost_ratio: float
    costs: tuple[CostPoint, ...]
    best_cutoff: int
    fn_majority_cutoffs: tuple[int, ...]
    paradox_flags: tuple[tuple[int, str], ...]
    provenance: tuple[str, ...]
    disclosures: tuple[str, ...] = ()
    schema_version: str = SCHEMA_VERSION


def scale_summary(scale: ScaleDefinition) -> dict:
    return {
        "scale_id": scale.scale_id,
        "item_count": len(scale.items),
        "max_total": scale.max_total,
        "tier_bounds": {
            "low_max": scale.low_max,
            "moderate_max": scale.moderate_max,
            "high_max": scale.max_total,
        },
        "provenance_note": scale.provenance_note,
    }


def build_audit(
    dist: ScoreDistribution,
    rows: Sequence[MetricsRow] | None,
    cost_ratio: float,
    scale: ScaleDefinition,
    provenance: Iterable[str] = (),
    disclosures: Iterable[str] = (),
) -> AuditReport:
    """Assemble the full audit over a labeled score distribution.

    cost_ratio is the cost of one false negative measured in false
    positives; it has no default because choosing it is a judgment
    call, not a computation. Ties in expected cost go to the lowest
    cutoff.
    """
    if not cost_ratio > 0:
        raise ValidationError("cost_ratio must be > 0")
    if rows is None:
        rows = sweep(dist)
    rows = tuple(rows)

    costs = tuple(
        CostPoint(row.cutoff, cost_ratio * row.fn + row.fp) for row in rows
    )
    best = min(costs, key=lambda point: (point.expected_cost, point.cutoff))

    fn_majority = tuple(row.cutoff for row in rows if row.fn > row.tp)
    paradox = []
    for row in rows:
        flagged, explanation = accuracy_paradox_flag(row, dist)
        if flagged:
            paradox.append((row.cutoff, explanation))

    return AuditReport(
        scale_summary=scale_summary(scale),
        rows=rows,
        auc_value=auc(rows),
        cost_ratio=float(cost_ratio),
        costs=costs,
        best_cutoff=best.cutoff,
        fn_majority_cutoffs=fn_majority,
        paradox_flags=tuple(paradox),
        provenance=tuple(provenance),
        disclosures=tuple(disclosures),
    )


def case_disclosure(
    result: ScoreResult, scale: ScaleDefinition, case_id: str = ""
) -> str:
    """Per-case transparency block; emitted for every scored case, with
    no short form for complete assessments."""
    n_items = len(scale.items)
    missing = [c.item_id for c in result.contributions if c.missing]
    answered = n_items - len(missing)
    if missing:
        imputation = (
            f"imputation applied; prorated total {result.imputed_total} "
            f"from {result.answered_points}/{result.answered_max} "
            "answered points"
        )
    else:
        imputation = "no imputation"
    lines = []
    if case_id:
        lines.append(f"case: {case_id}")
    lines.extend(
        [
            f"scale: {scale.scale_id} ({n_items} items, "
            f"max total {scale.max_total})",
            f"{answered}/{n_items} items answered; {imputation}",
            "missing items: "
            + (", ".join(str(i) for i in missing) if missing else "none"),
            f"completeness: {format_ratio(result.completeness)}",
            f"total: {result.imputed_total}",
            f"tier: {result.tier} (low 0-{scale.low_max}, moderate "
            f"{scale.low_max + 1}-{scale.moderate_max}, high "
            f"{scale.moderate_max + 1}-{scale.max_total})",
            f"note: {RELATIVE_RISK_BANNER}",
        ]
    )
    if result.warnings:
        lines.append("warnings: " + ", ".join(result.warnings))
    return "\n".join(lines)


def _row_cells(row: MetricsRow) -> list[str]:
    return [
        str(row.cutoff),
        str(row.tp),
        str(row.fn),
        str(row.fp),
        str(row.tn),
        format_ratio(row.sensitivity),
        format_ratio(row.specificity),
        format_ratio(row.accuracy),
        format_ratio(row.precision),
        format_ratio(row.f_measure),
    ]


def audit_to_markdown(report: AuditReport) -> str:
    summary = report.scale_summary
    bounds = summary["tier_bounds"]
    out = [
        "# Scale audit report",
        "",
        f"schema_version: {report.schema_version}",
        "",
        "## Scale",
        "",
        f"- scale: {summary['scale_id']}",
        f"- items: {summary['item_count']}",
        f"- max total: {summary['max_total']}",
        f"- tiers: low 0-{bounds['low_max']}, moderate "
        f"{bounds['low_max'] + 1}-{bounds['moderate_max']}, high "
        f"{bounds['moderate_max'] + 1}-{bounds['high_max']}",
        "",
        f"## Cutoff sweep (source: {SOURCE_SWEEP})",
        "",
        "| cutoff | tp | fn | fp | tn | sensitivity | specificity "
        "| accuracy | precision | f_measure |",
        "|---|---|---|---|---|---|---|---|---|---|",
    ]
    for row in report.rows:
        out.append("| " + " | ".join(_row_cells(row)) + " |")
    out.extend(
        [
            "",
            f"## Discrimination (source: {SOURCE_AUC})",
            "",
            f"- area under ROC: {format_ratio(report.auc_value)}",
            "",
            f"## Expected cost (source: {SOURCE_COST})",
            "",
            f"- false-negative cost ratio: {report.cost_ratio:g}",
            f"- cost-minimizing cutoff: {report.best_cutoff} "
            "(ties go to the lowest cutoff)",
            "",
            "| cutoff | expected cost |",
            "|---|---|",
        ]
    )
    for point in report.costs:
        out.append(f"| {point.cutoff} | {point.expected_cost:g} |")
    out.extend(["", f"## Flags (source: {SOURCE_FLAGS})", ""])
    if report.fn_majority_cutoffs:
        joined = ", ".join(str(c) for c in report.fn_majority_cutoffs)
        out.append(
            f"- false-negative majority (fn > tp) at cutoffs: {joined}"
        )
    else:
        out.append("- no cutoff has a false-negative majority")
    if report.paradox_flags:
        for cutoff, explanation in report.paradox_flags:
            out.append(f"- accuracy paradox at cutoff {cutoff}: {explanation}")
    else:
        out.append("- no accuracy-paradox cutoffs")
    out.extend(["", "## Provenance", ""])
    if report.provenance:
        out.extend(f"- {note}" for note in report.provenance)
    else:
        out.append("- none recorded")
    if report.disclosures:
        out.extend(["", "## Case disclosures", ""])
        for block in report.disclosures:
            out.append("```")
            out.append(block)
            out.append("```")
            out.append("")
        out.pop()
    out.append("")
    return "\n".join(out)


def audit_to_dict(report: AuditReport) -> dict:
    """Machine-readable form: ratios as fixed-point decimal strings,
    counts as integers, every numeric block tagged with its source."""
    return {
        "schema_version": report.schema_version,
        "scale": report.scale_summary,
        "sweep": {
            "source": SOURCE_SWEEP,
            "rows": [row_as_wire_dict(row) for row in report.rows],
        },
        "auc": {"source": SOURCE_AUC, "value": format_ratio(report.auc_value)},
        "cost_analysis": {
            "source": SOURCE_COST,
            "cost_ratio": report.cost_ratio,
            "best_cutoff": report.best_cutoff,
            "tie_rule": "lowest cutoff wins ties",
            "points": [
                {"cutoff": p.cutoff, "expected_cost": p.expected_cost}
                for p in report.costs
            ],
        },
        "flags": {
            "source": SOURCE_FLAGS,
            "fn_majority_cutoffs": list(report.fn_majority_cutoffs),
            "accuracy_paradox": [
                {"cutoff": cutoff, "explanation": explanation}
                for cutoff, explanation in report.paradox_flags
            ],
        },
        "provenance": list(report.provenance),
        "disclosures": list(report.disclosures),
    }


def audit_to_json(report: AuditReport) -> str:
    return json.dumps(audit_to_dict(report), indent=2, sort_keys=True) + "\n"


def write_tradeoff_csv(rows: Sequence[MetricsRow], path) -> None:
    """Cutoff trade-off curve data: cutoff, sensitivity, specificity,
    accuracy."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cutoff", "sensitivity", "specificity", "accuracy"])
        for row in rows:
            writer.writerow(
                [
                    row.cutoff,
                    format_ratio(row.sensitivity),
                    format_ratio(row.specificity),
                    format_ratio(row.accuracy),
                ]
            )


def write_roc_csv(rows: Sequence[MetricsRow], path) -> None:
    """ROC polygon data: fpr, tpr, one row per cutoff where both are
    defined."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for row in rows:
            if row.fpr is None or row.sensitivity is None:
                continue
            writer.writerow(
                [format_ratio(row.fpr), format_ratio(row.sensitivity)]
            )
