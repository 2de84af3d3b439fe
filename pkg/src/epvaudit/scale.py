"""The instrument itself: item definitions, assessments, and scoring.

A scale is 20 graded items plus two tier boundaries. Scoring sums the
answered points; when items are missing the total is prorated to the full
point range (round half up) and the result is flagged, so an incomplete
assessment can never pass for a complete one. An assessment with every
item missing is refused outright rather than scored 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
import json

import yaml

from .errors import (
    AllMissingError,
    AssessmentError,
    OutOfRangeError,
    ScaleConfigError,
)

CATEGORIES = (
    "personal-data",
    "relationship",
    "violence-type",
    "perpetrator-profile",
    "victim-vulnerability",
)

SCALE_IDS = ("EPV", "EPV-R", "custom")
ITEM_COUNT = 20

TIER_LOW = "low"
TIER_MODERATE = "moderate"
TIER_HIGH = "high"

ASSESSOR_ROLES = ("police", "judge", "auditor", "other")

WARN_IMPUTATION = "imputation-applied"
WARN_LOW_COMPLETENESS = "low-completeness"

# completeness threshold below which an assessment is flagged as thin
LOW_COMPLETENESS_NUM, LOW_COMPLETENESS_DEN = 3, 4


@dataclass(frozen=True)
class ItemSpec:
    id: int
    label_key: str
    category: str
    guidance: str
    max_points: int


@dataclass(frozen=True)
class ScaleDefinition:
    scale_id: str
    items: tuple[ItemSpec, ...]
    low_max: int
    moderate_max: int
    provenance_note: str = ""

    @property
    def max_total(self) -> int:
        return sum(item.max_points for item in self.items)

    def item(self, item_id: int) -> ItemSpec:
        try:
            return self._by_id[item_id]
        except KeyError:
            raise ScaleConfigError(f"no item with id {item_id}") from None

    @property
    def _by_id(self) -> dict[int, ItemSpec]:
        return {item.id: item for item in self.items}


@dataclass(frozen=True)
class ItemResponse:
    """One answered-or-missing item; ``points is None`` means missing."""

    item_id: int
    points: int | None

    @property
    def missing(self) -> bool:
        return self.points is None


@dataclass(frozen=True)
class Assessment:
    case_id: str
    responses: tuple[ItemResponse, ...]
    assessor_role: str = "other"
    recorded_at: str | None = None


@dataclass(frozen=True)
class ItemContribution:
    item_id: int
    points: int | None
    max_points: int
    missing: bool


@dataclass(frozen=True)
class ScoreResult:
    answered_points: int
    answered_max: int
    imputed_total: int
    tier: str
    completeness: float
    contributions: tuple[ItemContribution, ...] = field(repr=False)
    warnings: tuple[str, ...] = ()


def load_scale(document) -> ScaleDefinition:
    """Parse and validate a scale definition.

    Accepts a YAML/JSON string or an already-parsed mapping. Rejects
    anything that violates the instrument invariants: wrong item count,
    duplicate or out-of-range ids, maxima outside the variant's grading,
    non-increasing tier bounds.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as exc:
            raise ScaleConfigError(f"unparseable scale document: {exc}") from exc
    if not isinstance(document, dict):
        raise ScaleConfigError("scale document must be a mapping")

    scale_id = document.get("scale_id")
    if scale_id not in SCALE_IDS:
        raise ScaleConfigError(
            f"scale_id must be one of {SCALE_IDS}, got {scale_id!r}"
        )

    raw_items = document.get("items")
    if not isinstance(raw_items, list):
        raise ScaleConfigError("scale document needs an 'items' list")
    if len(raw_items) != ITEM_COUNT:
        raise ScaleConfigError(f"item count != {ITEM_COUNT}: got {len(raw_items)}")

    items: list[ItemSpec] = []
    seen: set[int] = set()
    for raw in raw_items:
        item = _parse_item(raw, scale_id)
        if item.id in seen:
            raise ScaleConfigError(f"duplicate item id {item.id}")
        seen.add(item.id)
        items.append(item)
    if seen != set(range(1, ITEM_COUNT + 1)):
        raise ScaleConfigError("item ids must cover 1..20 exactly")

    bounds = document.get("tier_bounds") or {}
    low_max = _as_int(bounds.get("low_max", 4), "tier_bounds.low_max")
    moderate_max = _as_int(bounds.get("moderate_max", 9), "tier_bounds.moderate_max")
    max_total = sum(it.max_points for it in items)
    if not (0 <= low_max < moderate_max < max_total):
        raise ScaleConfigError(
            "tier bounds must satisfy 0 <= low_max < moderate_max < max_total "
            f"(got {low_max}, {moderate_max}, max_total {max_total})"
        )

    return ScaleDefinition(
        scale_id=scale_id,
        items=tuple(items),
        low_max=low_max,
        moderate_max=moderate_max,
        provenance_note=str(document.get("provenance_note", "")).strip(),
    )


def _parse_item(raw, scale_id: str) -> ItemSpec:
    if not isinstance(raw, dict):
        raise ScaleConfigError("each item must be a mapping")
    item_id = _as_int(raw.get("id"), "item id")
    if not 1 <= item_id <= ITEM_COUNT:
        raise ScaleConfigError(f"item id {item_id} outside 1..{ITEM_COUNT}")
    category = raw.get("category")
    if category not in CATEGORIES:
        raise ScaleConfigError(
            f"item {item_id}: category {category!r} not in {CATEGORIES}"
        )
    max_points = _as_int(raw.get("max_points"), f"item {item_id} max_points")
    if scale_id == "EPV" and max_points != 1:
        raise ScaleConfigError(f"item {item_id}: EPV items are binary (max_points 1)")
    if scale_id == "EPV-R" and max_points not in (1, 2, 3):
        raise ScaleConfigError(
            f"item {item_id}: EPV-R max_points must be 1, 2 or 3, got {max_points}"
        )
    if max_points < 1:
        raise ScaleConfigError(f"item {item_id}: max_points must be >= 1")
    label_key = str(raw.get("label_key") or f"item_{item_id}")
    guidance = str(raw.get("guidance") or "").strip()
    return ItemSpec(
        id=item_id,
        label_key=label_key,
        category=category,
        guidance=guidance,
        max_points=max_points,
    )


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScaleConfigError(f"{what} must be an integer, got {value!r}")
    return value


_BUILTIN_FILES = {"epv": "epv.yaml", "epv-r": "epv_r.yaml"}
BUILTIN_SCALES = tuple(sorted(_BUILTIN_FILES))


def builtin_scale(name: str) -> ScaleDefinition:
    """Load one of the shipped definitions: ``epv`` or ``epv-r``."""
    key = name.strip().lower()
    if key not in _BUILTIN_FILES:
        raise ScaleConfigError(
            f"unknown built-in scale {name!r}; choose from {sorted(_BUILTIN_FILES)}"
        )
    text = (
        resources.files("epvaudit.data").joinpath(_BUILTIN_FILES[key]).read_text()
    )
    return load_scale(text)


def load_scale_file(path) -> ScaleDefinition:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scale(fh.read())


def classify_tier(total: int, scale: ScaleDefinition) -> str:
    """Map a total to low / moderate / high using the scale's tier bounds."""
    if not isinstance(total, int) or isinstance(total, bool):
        raise OutOfRangeError(f"total must be an integer, got {total!r}")
    if not 0 <= total <= scale.max_total:
        raise OutOfRangeError(
            f"total {total} outside 0..{scale.max_total} for scale {scale.scale_id}"
        )
    if total <= scale.low_max:
        return TIER_LOW
    if total <= scale.moderate_max:
        return TIER_MODERATE
    return TIER_HIGH


def _round_half_up_ratio(numerator: int, denominator: int) -> int:
    # round-half-up of numerator/denominator in pure integer arithmetic;
    # Python's round() is half-even and unsuitable here
    return (2 * numerator + denominator) // (2 * denominator)


def score(scale: ScaleDefinition, assessment: Assessment) -> ScoreResult:
    """Score one assessment against a scale.

    With every item answered the total is the plain sum. With missing
    items the total is prorated: round-half-up(answered_points x
    max_total / answered_max), and the result carries an
    imputation-applied warning; completeness below 3/4 additionally
    raises a low-completeness warning. All items missing is an error.
    """
    _validate_responses(scale, assessment)
    by_id = {r.item_id: r for r in assessment.responses}

    answered_points = 0
    answered_max = 0
    contributions: list[ItemContribution] = []
    any_missing = False
    for item in scale.items:
        response = by_id[item.id]
        if response.missing:
            any_missing = True
            contributions.append(
                ItemContribution(item.id, None, item.max_points, True)
            )
        else:
            answered_points += response.points
            answered_max += item.max_points
            contributions.append(
                ItemContribution(item.id, response.points, item.max_points, False)
            )

    if answered_max == 0:
        raise AllMissingError(
            f"case {assessment.case_id!r}: every item is missing; scoring refused"
        )

    max_total = scale.max_total
    if any_missing:
        imputed_total = _round_half_up_ratio(answered_points * max_total, answered_max)
    else:
        imputed_total = answered_points

    warnings: list[str] = []
    if any_missing:
        warnings.append(WARN_IMPUTATION)
    if answered_max * LOW_COMPLETENESS_DEN < max_total * LOW_COMPLETENESS_NUM:
        warnings.append(WARN_LOW_COMPLETENESS)

    return ScoreResult(
        answered_points=answered_points,
        answered_max=answered_max,
        imputed_total=imputed_total,
        tier=classify_tier(imputed_total, scale),
        completeness=answered_max / max_total,
        contributions=tuple(contributions),
        warnings=tuple(warnings),
    )


def _validate_responses(scale: ScaleDefinition, assessment: Assessment) -> None:
    ids = [r.item_id for r in assessment.responses]
    if len(ids) != len(set(ids)):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise AssessmentError(f"duplicate responses for item ids {dupes}")
    expected = {item.id for item in scale.items}
    got = set(ids)
    if got != expected:
        raise AssessmentError(
            f"responses must cover item ids 1..{ITEM_COUNT} exactly; "
            f"missing {sorted(expected - got)}, unexpected {sorted(got - expected)}"
        )
    if assessment.assessor_role not in ASSESSOR_ROLES:
        raise AssessmentError(
            f"assessor_role must be one of {ASSESSOR_ROLES}, "
            f"got {assessment.assessor_role!r}"
        )
    for response in assessment.responses:
        if response.missing:
            continue
        points = response.points
        if isinstance(points, bool) or not isinstance(points, int):
            raise AssessmentError(
                f"item {response.item_id}: points must be an integer or null"
            )
        max_points = scale.item(response.item_id).max_points
        if not 0 <= points <= max_points:
            raise AssessmentError(
                f"item {response.item_id}: points {points} outside 0..{max_points}"
            )


# --- assessment interchange -------------------------------------------------
#
# One record per case; field names below are the shared wire contract for
# files, the HTTP service and the cohort CSVs:
#   case_id, assessor_role, recorded_at,
#   responses: [{"item_id": 1..20, "points": int-or-null}, ...]


def assessment_from_dict(record: dict) -> Assessment:
    if not isinstance(record, dict):
        raise AssessmentError("assessment record must be a mapping")
    raw_responses = record.get("responses")
    if not isinstance(raw_responses, list):
        raise AssessmentError("assessment record needs a 'responses' list")
    responses = []
    for raw in raw_responses:
        if not isinstance(raw, dict) or "item_id" not in raw:
            raise AssessmentError("each response needs an 'item_id'")
        item_id = raw["item_id"]
        if isinstance(item_id, bool) or not isinstance(item_id, int):
            raise AssessmentError(f"item_id must be an integer, got {item_id!r}")
        points = raw.get("points", None)
        if points is not None and (
            isinstance(points, bool) or not isinstance(points, int)
        ):
            raise AssessmentError(
                f"item {item_id}: points must be an integer or null, got {points!r}"
            )
        responses.append(ItemResponse(item_id=item_id, points=points))
    return Assessment(
        case_id=str(record.get("case_id", "")),
        responses=tuple(responses),
        assessor_role=str(record.get("assessor_role", "other")),
        recorded_at=record.get("recorded_at"),
    )


def assessment_to_dict(assessment: Assessment) -> dict:
    return {
        "case_id": assessment.case_id,
        "assessor_role": assessment.assessor_role,
        "recorded_at": assessment.recorded_at,
        "responses": [
            {"item_id": r.item_id, "points": r.points} for r in assessment.responses
        ],
    }


def load_assessment(path) -> Assessment:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AssessmentError(f"unparseable assessment file: {exc}") from exc
    return assessment_from_dict(record)
