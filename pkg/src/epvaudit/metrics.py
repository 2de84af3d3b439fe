"""Confusion matrices, cutoff sweeps, imbalance-aware metrics and ROC AUC.

A case is predicted severe when its score is at or above the cutoff, so
cutoff 0 flags everyone and cutoff max_total + 1 flags no one. Ratios
whose denominator is zero are first-class ``None`` values rendered as
"n/a" in exports; they are never silently coerced to 0 or 1, which would
corrupt the sweep extremes and the ROC endpoints.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DegenerateDataError, OutOfRangeError, ValidationError
from .psychometrics import LABEL_NON_SEVERE, LABEL_SEVERE

SWEEP_CSV_COLUMNS = (
    "cutoff", "tp", "fn", "fp", "tn",
    "sensitivity", "specificity", "fpr", "fnr",
    "accuracy", "precision", "npv", "f_measure", "g_mean",
)

UNDEFINED_TOKEN = "n/a"
RATIO_PLACES = 6


class LabeledScore(NamedTuple):
    score: int
    label: str


@dataclass(frozen=True)
class ScoreDistribution:
    """Per-class histograms of integer totals 0..max_total."""

    pos_counts: np.ndarray
    neg_counts: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.pos_counts, dtype=np.int64)
        neg = np.asarray(self.neg_counts, dtype=np.int64)
        if pos.ndim != 1 or pos.shape != neg.shape or len(pos) < 2:
            raise ValidationError("histograms must be 1-d, equal length >= 2")
        if (pos < 0).any() or (neg < 0).any():
            raise ValidationError("histogram counts must be non-negative")
        object.__setattr__(self, "pos_counts", pos)
        object.__setattr__(self, "neg_counts", neg)

    @property
    def max_total(self) -> int:
        return len(self.pos_counts) - 1

    @property
    def n_pos(self) -> int:
        return int(self.pos_counts.sum())

    @property
    def n_neg(self) -> int:
        return int(self.neg_counts.sum())

    @classmethod
    def from_labeled_scores(
        cls, scores: Iterable[LabeledScore], max_total: int
    ) -> "ScoreDistribution":
        pos = np.zeros(max_total + 1, dtype=np.int64)
        neg = np.zeros(max_total + 1, dtype=np.int64)
        for record in scores:
            if not 0 <= record.score <= max_total:
                raise OutOfRangeError(
                    f"score {record.score} outside 0..{max_total}"
                )
            if record.label == LABEL_SEVERE:
                pos[record.score] += 1
            elif record.label == LABEL_NON_SEVERE:
                neg[record.score] += 1
            else:
                raise ValidationError(f"unknown label {record.label!r}")
        return cls(pos, neg)

    def to_labeled_scores(self) -> list[LabeledScore]:
        out: list[LabeledScore] = []
        for counts, label in (
            (self.pos_counts, LABEL_SEVERE),
            (self.neg_counts, LABEL_NON_SEVERE),
        ):
            for score_value, count in enumerate(counts.tolist()):
                out.extend(LabeledScore(score_value, label) for _ in range(count))
        return out


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.tp, self.fn, self.fp, self.tn)


@dataclass(frozen=True)
class MetricsRow:
    """One operating point. Counts are exact; each ratio is None when its
    denominator is zero."""

    cutoff: int | None
    tp: int
    fn: int
    fp: int
    tn: int
    sensitivity: float | None
    specificity: float | None
    fpr: float | None
    fnr: float | None
    accuracy: float | None
    precision: float | None
    npv: float | None
    f_measure: float | None
    g_mean: float | None


def confusion(dist: ScoreDistribution, cutoff: int) -> ConfusionMatrix:
    """Count outcomes when scores >= cutoff are predicted severe."""
    if isinstance(cutoff, bool) or not isinstance(cutoff, int):
        raise OutOfRangeError(f"cutoff must be an integer, got {cutoff!r}")
    if not 0 <= cutoff <= dist.max_total + 1:
        raise OutOfRangeError(
            f"cutoff {cutoff} outside 0..{dist.max_total + 1}"
        )
    tp = int(dist.pos_counts[cutoff:].sum())
    fp = int(dist.neg_counts[cutoff:].sum())
    return ConfusionMatrix(
        tp=tp, fn=dist.n_pos - tp, fp=fp, tn=dist.n_neg - fp
    )


def _ratio(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator > 0 else None


def metrics(cm: ConfusionMatrix, cutoff: int | None = None) -> MetricsRow:
    """Derive the full metric row from one confusion matrix."""
    if cm.total <= 0:
        raise ValidationError("empty confusion matrix")
    sensitivity = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    npv = _ratio(cm.tn, cm.tn + cm.fn)
    # complements share the denominator, so derive them exactly
    fnr = None if sensitivity is None else 1.0 - sensitivity
    fpr = None if specificity is None else 1.0 - specificity
    if precision is None or sensitivity is None or precision + sensitivity == 0:
        f_measure = None
    else:
        f_measure = 2 * precision * sensitivity / (precision + sensitivity)
    if sensitivity is None or specificity is None:
        g_mean = None
    else:
        g_mean = math.sqrt(sensitivity * specificity)
    return MetricsRow(
        cutoff=cutoff,
        tp=cm.tp, fn=cm.fn, fp=cm.fp, tn=cm.tn,
        sensitivity=sensitivity,
        specificity=specificity,
        fpr=fpr,
        fnr=fnr,
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        precision=precision,
        npv=npv,
        f_measure=f_measure,
        g_mean=g_mean,
    )


def sweep(dist: ScoreDistribution) -> list[MetricsRow]:
    """One metrics row per cutoff 0..max_total + 1.

    A single-class distribution still sweeps; the metrics that need the
    absent class simply come back undefined.
    """
    if dist.n_pos + dist.n_neg == 0:
        raise ValidationError("empty distribution")
    return [
        metrics(confusion(dist, cutoff), cutoff)
        for cutoff in range(dist.max_total + 2)
    ]


def auc(sweep_rows: list[MetricsRow]) -> float:
    """Trapezoidal area under the discrete ROC polygon.

    Points are the sweep's defined (fpr, tpr) pairs sorted by fpr with
    the (0,0) and (1,1) endpoints included; no smoothing.
    """
    points = {
        (row.fpr, row.sensitivity)
        for row in sweep_rows
        if row.fpr is not None and row.sensitivity is not None
    }
    if len(points) < 2:
        raise DegenerateDataError("fewer than 2 defined ROC points")
    points.update({(0.0, 0.0), (1.0, 1.0)})
    ordered = sorted(points)
    area = 0.0
    for (x0, y0), (x1, y1) in zip(ordered, ordered[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def accuracy_paradox_flag(
    row: MetricsRow, dist: ScoreDistribution
) -> tuple[bool, str]:
    """Flag the high-accuracy / poor-minority-detection trap.

    True when accuracy >= 0.7 while sensitivity < 0.6 on a distribution
    whose minority class holds under 35% of the cases.
    """
    if row.accuracy is None or row.sensitivity is None:
        raise ValidationError("accuracy and sensitivity must be defined")
    total = dist.n_pos + dist.n_neg
    minority_share = min(dist.n_pos, dist.n_neg) / total if total else 0.0
    flagged = (
        row.accuracy >= 0.7
        and row.sensitivity < 0.6
        and minority_share < 0.35
    )
    if flagged:
        explanation = (
            f"accuracy {100 * row.accuracy:.1f}% masks sensitivity "
            f"{100 * row.sensitivity:.2f}%: with the minority class at "
            f"{100 * minority_share:.1f}% of cases, mostly-correct majority "
            "labels keep accuracy high while most minority cases are missed"
        )
    else:
        explanation = (
            "no accuracy paradox at this operating point: accuracy "
            f"{100 * row.accuracy:.1f}%, sensitivity {100 * row.sensitivity:.2f}%, "
            f"minority share {100 * minority_share:.1f}%"
        )
    return flagged, explanation


def format_ratio(value: float | None, places: int = RATIO_PLACES) -> str:
    """Canonical fixed-precision rendering shared by CSV exports and the
    HTTP service; None becomes "n/a"."""
    if value is None:
        return UNDEFINED_TOKEN
    return f"{value:.{places}f}"


def row_as_wire_dict(row: MetricsRow) -> dict:
    """Interchange form shared by the audit document and the HTTP
    service: counts stay integers, ratios become fixed-precision decimal
    strings so renderings cannot drift between platforms."""
    return {
        "cutoff": row.cutoff,
        "tp": row.tp,
        "fn": row.fn,
        "fp": row.fp,
        "tn": row.tn,
        "sensitivity": format_ratio(row.sensitivity),
        "specificity": format_ratio(row.specificity),
        "fpr": format_ratio(row.fpr),
        "fnr": format_ratio(row.fnr),
        "accuracy": format_ratio(row.accuracy),
        "precision": format_ratio(row.precision),
        "npv": format_ratio(row.npv),
        "f_measure": format_ratio(row.f_measure),
        "g_mean": format_ratio(row.g_mean),
    }


def sweep_rows_as_csv_records(rows: list[MetricsRow]) -> list[list[str]]:
    records = [list(SWEEP_CSV_COLUMNS)]
    for row in rows:
        records.append(
            [
                str(row.cutoff),
                str(row.tp), str(row.fn), str(row.fp), str(row.tn),
                format_ratio(row.sensitivity),
                format_ratio(row.specificity),
                format_ratio(row.fpr),
                format_ratio(row.fnr),
                format_ratio(row.accuracy),
                format_ratio(row.precision),
                format_ratio(row.npv),
                format_ratio(row.f_measure),
                format_ratio(row.g_mean),
            ]
        )
    return records


def write_sweep_csv(rows: list[MetricsRow], path) -> None:
    """Write the fixed-column sweep table; byte-identical for equal input."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(sweep_rows_as_csv_records(rows))
