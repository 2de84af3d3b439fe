"""Feedback-loop simulator: biased recording feeding weight retraining.

Generative model, stated as a model and not as a claim about any real
deployment pipeline:

  * Cases are drawn per iteration with Bernoulli items at true per-class
    affirmative rates (severe rows first, then non-severe).
  * The prior iteration's model scores each case as initially drawn.
    Where that score reaches the cutoff, the recorded value of each
    boosted item is re-drawn with its affirmative probability raised by
    that item's bias strength, clamped to [0, 1]. This is the
    assessor-anchoring step: an expected-severe case gets its risk items
    recorded more generously.
  * The model then predicts on the recorded data, and weights are
    re-estimated proportional to per-item affirmative-rate gaps between
    the two training classes, renormalized so the weights always sum to
    the scale's fixed point budget.
  * selection_rule picks which labels supervise retraining:
    retrain-on-predicted-severe uses the model's own predictions (the
    self-confirming loop), retrain-on-all uses the true labels.

One uniform matrix is drawn per iteration and shared by the unbiased
and recorded draws, so a run consumes the same random stream regardless
of bias strength and traces are bit-identical per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ValidationError
from .scale import ScaleDefinition, builtin_scale
from .cohort import SyntheticCohortConfig

SELECTION_PREDICTED = "retrain-on-predicted-severe"
SELECTION_ALL = "retrain-on-all"
SELECTION_RULES = (SELECTION_PREDICTED, SELECTION_ALL)

# hard cap so a mistyped iteration count cannot wedge a run
MAX_ITERATIONS = 10_000

SUBGROUP_FLAGGED = "item1=1"
SUBGROUP_UNFLAGGED = "item1=0"


def _as_beta_vector(
    bias_strength: Union[float, Sequence[float], Mapping[int, float]],
    n_items: int,
) -> tuple[float, ...]:
    if isinstance(bias_strength, Mapping):
        betas = [0.0] * n_items
        for item_id, value in bias_strength.items():
            idx = int(item_id)
            if not 1 <= idx <= n_items:
                raise ValidationError(f"bias item id {item_id} outside 1..{n_items}")
            betas[idx - 1] = float(value)
    elif isinstance(bias_strength, (int, float)):
        betas = [float(bias_strength)] * n_items
    else:
        betas = [float(v) for v in bias_strength]
        if len(betas) != n_items:
            raise ValidationError(
                f"bias_strength must list {n_items} values, got {len(betas)}"
            )
    for value in betas:
        if not math.isfinite(value) or value < 0.0:
            raise ValidationError("bias strengths must be finite and >= 0")
    return tuple(betas)


@dataclass(frozen=True)
class FeedbackConfig:
    population: SyntheticCohortConfig
    bias_strength: tuple[float, ...]
    selection_rule: str
    iterations: int
    seed: int
    cutoff: int = 10

    def __post_init__(self):
        if self.selection_rule not in SELECTION_RULES:
            raise ValidationError(
                f"selection_rule must be one of {SELECTION_RULES}"
            )
        if not 0 <= self.iterations <= MAX_ITERATIONS:
            raise ValidationError(
                f"iterations must lie in 0..{MAX_ITERATIONS}"
            )
        _as_beta_vector(self.bias_strength, len(self.bias_strength))
        if self.cutoff < 0:
            raise ValidationError("cutoff must be >= 0")


def feedback_config_from_dict(raw: dict, n_items: int = 20) -> FeedbackConfig:
    from .cohort import synthetic_config_from_dict

    if not isinstance(raw, dict):
        raise ValidationError("feedback config must be a mapping")
    try:
        population = synthetic_config_from_dict(raw["population"], n_items)
        config = FeedbackConfig(
            population=population,
            bias_strength=_as_beta_vector(raw.get("bias_strength", 0.0), n_items),
            selection_rule=str(raw.get("selection_rule", SELECTION_ALL)),
            iterations=int(raw["iterations"]),
            seed=int(raw["seed"]),
            cutoff=int(raw.get("cutoff", 10)),
        )
    except KeyError as missing:
        raise ValidationError(f"feedback config missing key {missing}") from None
    except (TypeError, ValueError) as bad:
        raise ValidationError(f"feedback config malformed: {bad}") from None
    return config


@dataclass(frozen=True)
class IterationRecord:
    """State after iteration ``index`` (index 0 is the pre-loop state)."""

    index: int
    weights: tuple[float, ...]
    drift: tuple[float, ...]
    stalled: bool
    predicted_severe_prevalence: float | None
    # subgroup -> (tp, fn, fp, tn) against the true labels
    subgroup_counts: Mapping[str, tuple[int, int, int, int]]

    def subgroup_fnr(self, subgroup: str) -> float | None:
        tp, fn, _, _ = self.subgroup_counts[subgroup]
        if tp + fn == 0:
            return None
        return fn / (tp + fn)

    def subgroup_fpr(self, subgroup: str) -> float | None:
        _, _, fp, tn = self.subgroup_counts[subgroup]
        if fp + tn == 0:
            return None
        return fp / (fp + tn)


@dataclass(frozen=True)
class FeedbackTrace:
    config: FeedbackConfig
    point_budget: float
    records: tuple[IterationRecord, ...]

    def weights_matrix(self) -> np.ndarray:
        return np.array([record.weights for record in self.records])

    def item_weight_series(self, item_id: int) -> list[float]:
        return [record.weights[item_id - 1] for record in self.records]


def rate_gap_weights(
    values: np.ndarray,
    is_positive: np.ndarray,
    point_budget: float,
) -> np.ndarray | None:
    """Weights proportional to per-item affirmative-rate gaps.

    Returns None when retraining cannot proceed: a single-class training
    set, or no item with a positive gap. Gaps are clipped at zero before
    renormalizing so weights stay non-negative and sum to the budget.
    """
    positive_rows = values[is_positive]
    negative_rows = values[~is_positive]
    if len(positive_rows) == 0 or len(negative_rows) == 0:
        return None
    gaps = positive_rows.mean(axis=0) - negative_rows.mean(axis=0)
    gaps = np.clip(gaps, 0.0, None)
    total = gaps.sum()
    if total <= 0.0:
        return None
    return point_budget * gaps / total


def _subgroup_confusion(
    affirmative_first_item: np.ndarray,
    truth: np.ndarray,
    predicted: np.ndarray,
) -> dict[str, tuple[int, int, int, int]]:
    counts = {}
    for name, member in (
        (SUBGROUP_FLAGGED, affirmative_first_item),
        (SUBGROUP_UNFLAGGED, ~affirmative_first_item),
    ):
        counts[name] = (
            int((member & truth & predicted).sum()),
            int((member & truth & ~predicted).sum()),
            int((member & ~truth & predicted).sum()),
            int((member & ~truth & ~predicted).sum()),
        )
    return counts


_EMPTY_COUNTS = {
    SUBGROUP_FLAGGED: (0, 0, 0, 0),
    SUBGROUP_UNFLAGGED: (0, 0, 0, 0),
}


def run_feedback(
    config: FeedbackConfig, scale: ScaleDefinition | None = None
) -> FeedbackTrace:
    """Run the loop; trace has ``iterations + 1`` records, the first being
    the untouched initial state."""
    if scale is None:
        scale = builtin_scale("epv")
    n_items = len(scale.items)
    if len(config.bias_strength) != n_items:
        raise ValidationError(
            f"bias_strength covers {len(config.bias_strength)} items, "
            f"scale defines {n_items}"
        )
    if len(config.population.severe_rates) != n_items:
        raise ValidationError("population rates do not match the scale's items")
    if config.cutoff > scale.max_total + 1:
        raise ValidationError(
            f"cutoff {config.cutoff} exceeds max total + 1 = {scale.max_total + 1}"
        )

    budget = float(scale.max_total)
    initial = np.array([float(item.max_points) for item in scale.items])
    beta = np.asarray(config.bias_strength, dtype=float)
    boosted = beta > 0.0

    pop = config.population
    n_total = pop.n_severe + pop.n_nonsevere
    truth = np.zeros(n_total, dtype=bool)
    truth[: pop.n_severe] = True
    base_rates = np.empty((n_total, n_items))
    base_rates[: pop.n_severe] = np.asarray(pop.severe_rates)
    base_rates[pop.n_severe:] = np.asarray(pop.nonsevere_rates)

    rng = np.random.default_rng(config.seed)
    weights = initial.copy()
    records = [
        IterationRecord(
            index=0,
            weights=tuple(initial.tolist()),
            drift=tuple([0.0] * n_items),
            stalled=False,
            predicted_severe_prevalence=None,
            subgroup_counts=dict(_EMPTY_COUNTS),
        )
    ]

    for t in range(1, config.iterations + 1):
        uniforms = rng.random((n_total, n_items))
        unbiased = uniforms < base_rates
        expected_severe = unbiased @ weights >= config.cutoff
        recorded_rates = base_rates.copy()
        if boosted.any():
            rows = np.where(expected_severe)[0]
            cols = np.where(boosted)[0]
            if rows.size:
                recorded_rates[np.ix_(rows, cols)] = np.clip(
                    base_rates[np.ix_(rows, cols)] + beta[cols], 0.0, 1.0
                )
        recorded = uniforms < recorded_rates

        scores = recorded @ weights
        predicted = scores >= config.cutoff

        if config.selection_rule == SELECTION_PREDICTED:
            training_labels = predicted
        else:
            training_labels = truth

        new_weights = rate_gap_weights(
            recorded.astype(float), training_labels, budget
        )
        stalled = new_weights is None
        if not stalled:
            weights = new_weights

        records.append(
            IterationRecord(
                index=t,
                weights=tuple(weights.tolist()),
                drift=tuple((weights - initial).tolist()),
                stalled=stalled,
                predicted_severe_prevalence=float(predicted.mean()),
                subgroup_counts=_subgroup_confusion(
                    recorded[:, 0], truth, predicted
                ),
            )
        )

    return FeedbackTrace(
        config=config, point_budget=budget, records=tuple(records)
    )


DRIFT_FLAG_FACTOR = 1.5


def drift_report(trace: FeedbackTrace) -> dict:
    """Summarize a trace: end-minus-start weight deltas, the subgroup
    false-negative-rate gap per iteration, and growth flags for any item
    whose weight ended more than 50% above its starting value."""
    if not trace.records:
        raise ValidationError("trace has no records")
    first = trace.records[0]
    last = trace.records[-1]
    deltas = [
        final - start for final, start in zip(last.weights, first.weights)
    ]
    flagged = [
        item_index + 1
        for item_index, (start, final) in enumerate(
            zip(first.weights, last.weights)
        )
        if start > 0 and final > DRIFT_FLAG_FACTOR * start
    ]
    fnr_gap = []
    for record in trace.records:
        flagged_fnr = record.subgroup_fnr(SUBGROUP_FLAGGED)
        unflagged_fnr = record.subgroup_fnr(SUBGROUP_UNFLAGGED)
        if flagged_fnr is None or unflagged_fnr is None:
            fnr_gap.append(None)
        else:
            fnr_gap.append(flagged_fnr - unflagged_fnr)
    return {
        "iterations": len(trace.records) - 1,
        "point_budget": trace.point_budget,
        "weight_deltas": deltas,
        "flagged_items": flagged,
        "subgroup_fnr_gap": fnr_gap,
        "stalled_iterations": [
            record.index for record in trace.records if record.stalled
        ],
    }


def trace_to_dict(trace: FeedbackTrace) -> dict:
    """JSON-ready trace; float fields keep full precision via repr."""
    return {
        "schema_version": "1",
        "point_budget": trace.point_budget,
        "selection_rule": trace.config.selection_rule,
        "cutoff": trace.config.cutoff,
        "seed": trace.config.seed,
        "iterations": trace.config.iterations,
        "records": [
            {
                "index": record.index,
                "weights": list(record.weights),
                "drift": list(record.drift),
                "stalled": record.stalled,
                "predicted_severe_prevalence": record.predicted_severe_prevalence,
                "subgroup_counts": {
                    name: list(counts)
                    for name, counts in sorted(record.subgroup_counts.items())
                },
            }
            for record in trace.records
        ],
    }
