"""Cohort loading, anchor-constrained reconstruction, synthetic generation.

The original 1,081-case dataset is confidential. What survives in print
is a set of operating points: the class totals, the full cutoff-10
confusion matrix, and the quoted rates at cutoffs 6 and 12. This module
rebuilds a canonical score distribution that honours every one of those
anchors exactly; between anchors the mass is spread deterministically
(equal split, remainder to the lower scores), which is a declared
convention, not an estimate of the unpublished curve.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import CohortFormatError, ValidationError
from .metrics import LabeledScore, ScoreDistribution
from .psychometrics import (
    LABEL_NON_SEVERE,
    LABEL_SEVERE,
    LABELS,
    ResponseMatrix,
)
from .scale import ScaleDefinition, builtin_scale

N_SEVERE = 269
N_NON_SEVERE = 812
EPV_MAX_TOTAL = 20


@dataclass(frozen=True)
class AnchorPoint:
    """A published operating point: counts at or above a cutoff, per class."""

    cutoff: int
    severe_at_or_above: int
    nonsevere_at_or_above: int
    provenance: str


# Counts at quoted percentages are round-half-up(rate x class size); the
# cutoff-10 point is the one the validation study printed as raw counts.
ANCHORS = (
    AnchorPoint(
        0, N_SEVERE, N_NON_SEVERE,
        "class totals of the 1,081-case validation cohort: "
        "269 severe vs 812 non-severe",
    ),
    AnchorPoint(
        6, 224, 444,
        "cutoff-6 rates quoted in the validation analysis: sensitivity "
        "83.27% and specificity 45.32%; counts = round(rate x class size)",
    ),
    AnchorPoint(
        10, 129, 151,
        "cutoff-10 confusion matrix published with the validation study: "
        "tp 129, fn 140, fp 151, tn 661",
    ),
    AnchorPoint(
        12, 78, 49,
        "cutoff-12 rates quoted in the validation analysis: 29% of severe "
        "cases kept, 6% false-positive rate; counts = round(rate x class size)",
    ),
    AnchorPoint(
        21, 0, 0,
        "no score can exceed the 20-point maximum",
    ),
)


def _spread_segment(counts: np.ndarray, lo: int, hi: int, mass: int) -> None:
    # distribute `mass` over integer scores lo..hi-1: equal split,
    # remainder going to the lower scores
    width = hi - lo
    base, remainder = divmod(mass, width)
    counts[lo:hi] = base
    counts[lo:lo + remainder] += 1


def reconstruct_anchor_cohort() -> ScoreDistribution:
    """Deterministic EPV score distribution consistent with every anchor."""
    pos = np.zeros(EPV_MAX_TOTAL + 1, dtype=np.int64)
    neg = np.zeros(EPV_MAX_TOTAL + 1, dtype=np.int64)
    for current, following in zip(ANCHORS, ANCHORS[1:]):
        assert current.cutoff < following.cutoff, "anchors out of order"
        assert current.severe_at_or_above >= following.severe_at_or_above
        assert current.nonsevere_at_or_above >= following.nonsevere_at_or_above
        _spread_segment(
            pos, current.cutoff, following.cutoff,
            current.severe_at_or_above - following.severe_at_or_above,
        )
        _spread_segment(
            neg, current.cutoff, following.cutoff,
            current.nonsevere_at_or_above - following.nonsevere_at_or_above,
        )
    dist = ScoreDistribution(pos, neg)
    assert dist.n_pos == N_SEVERE and dist.n_neg == N_NON_SEVERE
    # the one exactly published operating point must reproduce verbatim
    assert int(pos[10:].sum()) == 129 and int(neg[10:].sum()) == 151
    return dist


def anchor_provenance() -> list[str]:
    return [f"cutoff {a.cutoff}: {a.provenance}" for a in ANCHORS]


# --- cohort CSV i/o ----------------------------------------------------------
#
# Two on-disk forms share the label vocabulary {severe, non_severe}:
#   score form:  header "score,label", one case per row
#   item form:   header "item_1,...,item_20,label"
# Labels are trimmed and lowercased on load, and a hyphen spelling of
# non-severe is accepted; anything else is a row-level error.


def _normalize_label(token: str, line_no: int) -> str:
    label = token.strip().lower().replace("-", "_")
    if label not in LABELS:
        raise CohortFormatError(
            f"line {line_no}: bad label {token!r}; expected one of {LABELS}"
        )
    return label


def _parse_int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise CohortFormatError(
            f"line {line_no}: {what} must be an integer, got {token!r}"
        ) from None


def load_cohort(
    path, scale: ScaleDefinition | None = None
) -> Union[list[LabeledScore], ResponseMatrix]:
    """Load a labeled cohort CSV.

    Returns a list of LabeledScore for the score form, or a
    ResponseMatrix when per-item columns are present. Validation is
    row-addressed: failures name the offending file line.
    """
    if scale is None:
        scale = builtin_scale("epv")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CohortFormatError("empty cohort file") from None
        header = [h.strip().lower() for h in header]
        if header == ["score", "label"]:
            return _load_score_rows(reader, scale.max_total)
        item_header = [f"item_{i}" for i in range(1, len(scale.items) + 1)]
        if header == item_header + ["label"]:
            return _load_item_rows(reader, scale)
        raise CohortFormatError(
            "unrecognized header: expected 'score,label' or "
            "'item_1,...,item_20,label'"
        )


def _load_score_rows(reader, max_total: int) -> list[LabeledScore]:
    records: list[LabeledScore] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise CohortFormatError(
                f"line {line_no}: expected 2 fields, got {len(row)}"
            )
        score_value = _parse_int(row[0], line_no, "score")
        if not 0 <= score_value <= max_total:
            raise CohortFormatError(
                f"line {line_no}: score {score_value} outside 0..{max_total}"
            )
        records.append(LabeledScore(score_value, _normalize_label(row[1], line_no)))
    return records


def _load_item_rows(reader, scale: ScaleDefinition) -> ResponseMatrix:
    n_items = len(scale.items)
    maxima = [item.max_points for item in scale.items]
    values: list[list[int]] = []
    labels: list[str] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != n_items + 1:
            raise CohortFormatError(
                f"line {line_no}: expected {n_items + 1} fields, got {len(row)}"
            )
        points = []
        for j, token in enumerate(row[:n_items]):
            value = _parse_int(token, line_no, f"item_{j + 1}")
            if not 0 <= value <= maxima[j]:
                raise CohortFormatError(
                    f"line {line_no}: item_{j + 1} value {value} outside "
                    f"0..{maxima[j]}"
                )
            points.append(value)
        values.append(points)
        labels.append(_normalize_label(row[-1], line_no))
    return ResponseMatrix(np.array(values, dtype=np.int64), np.array(labels))


def write_score_cohort_csv(records: Iterable[LabeledScore], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["score", "label"])
        for record in records:
            writer.writerow([record.score, record.label])


def write_matrix_csv(matrix: ResponseMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"item_{i}" for i in range(1, matrix.n_items + 1)] + ["label"])
        for row, label in zip(matrix.values.tolist(), matrix.labels.tolist()):
            writer.writerow(row + [label])


# --- synthetic cohorts -------------------------------------------------------


@dataclass(frozen=True)
class SyntheticCohortConfig:
    """Item-level Bernoulli cohort: per class, item j is affirmative with
    the configured rate; an affirmative response scores the item's
    maximum points."""

    n_severe: int
    n_nonsevere: int
    severe_rates: tuple[float, ...]
    nonsevere_rates: tuple[float, ...]
    seed: int | None = None

    def __post_init__(self):
        if self.n_severe <= 0 or self.n_nonsevere <= 0:
            raise ValidationError("class counts must be positive")
        for name in ("severe_rates", "nonsevere_rates"):
            rates = getattr(self, name)
            if any(not 0.0 <= r <= 1.0 for r in rates):
                raise ValidationError(f"{name} must lie in [0, 1]")


def synthetic_config_from_dict(raw: dict, n_items: int = 20) -> SyntheticCohortConfig:
    """Build a config from parsed YAML/JSON; scalar rates broadcast to
    every item."""
    if not isinstance(raw, dict):
        raise ValidationError("cohort config must be a mapping")

    def rates(key: str) -> tuple[float, ...]:
        value = raw.get(key)
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return (float(value),) * n_items
        if isinstance(value, list) and len(value) == n_items:
            return tuple(float(v) for v in value)
        raise ValidationError(
            f"{key} must be a scalar or a list of {n_items} rates"
        )

    try:
        n_severe = int(raw["n_severe"])
        n_nonsevere = int(raw["n_nonsevere"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError(
            "cohort config needs integer n_severe and n_nonsevere"
        ) from None
    seed = raw.get("seed")
    if seed is not None:
        seed = int(seed)
    return SyntheticCohortConfig(
        n_severe=n_severe,
        n_nonsevere=n_nonsevere,
        severe_rates=rates("severe_rates"),
        nonsevere_rates=rates("nonsevere_rates"),
        seed=seed,
    )


def generate_synthetic(
    config: SyntheticCohortConfig,
    scale: ScaleDefinition | None = None,
    seed: int | None = None,
) -> ResponseMatrix:
    """Seeded, reproducible item-level cohort: severe rows first, then
    non-severe. The explicit ``seed`` argument wins over the config's."""
    if scale is None:
        scale = builtin_scale("epv")
    if len(config.severe_rates) != len(scale.items):
        raise ValidationError(
            f"config has {len(config.severe_rates)} item rates but the scale "
            f"defines {len(scale.items)} items"
        )
    effective_seed = config.seed if seed is None else seed
    if effective_seed is None:
        raise ValidationError("a seed is required: pass one explicitly or in config")
    rng = np.random.default_rng(effective_seed)
    maxima = np.array([item.max_points for item in scale.items], dtype=np.int64)
    blocks = []
    labels = []
    for count, rates, label in (
        (config.n_severe, config.severe_rates, LABEL_SEVERE),
        (config.n_nonsevere, config.nonsevere_rates, LABEL_NON_SEVERE),
    ):
        affirmative = rng.random((count, len(maxima))) < np.asarray(rates)
        blocks.append(affirmative.astype(np.int64) * maxima)
        labels.extend([label] * count)
    return ResponseMatrix(np.vstack(blocks), np.array(labels))
