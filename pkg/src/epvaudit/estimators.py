"""Estimator-style wrappers over the scoring kernel.

Three pieces of the workbench have a natural fit/transform/predict
shape, so they are exposed with that idiom (get_params/set_params
included via the scikit-learn base class):

  * ScaleScorer      transform: item-point rows -> imputed totals
  * CutoffClassifier predict:   totals -> severe (1) / non-severe (0)
  * RateGapWeights   fit:       labeled item matrix -> budgeted weights

The rest of the package (cohort plumbing, audit rendering, the service)
does not pretend to be an estimator; these wrappers exist for pipeline
composition and for parity with the batch CLI paths.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .errors import DegenerateDataError, ValidationError
from .feedback import rate_gap_weights
from .scale import (
    Assessment,
    ItemResponse,
    builtin_scale,
    score as score_assessment,
)


def _as_2d_float(X, n_columns: int | None = None) -> np.ndarray:
    values = np.asarray(X, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2:
        raise ValidationError("expected a 2-dimensional array")
    if n_columns is not None and values.shape[1] != n_columns:
        raise ValidationError(
            f"expected {n_columns} columns, got {values.shape[1]}"
        )
    return values


class ScaleScorer(TransformerMixin, BaseEstimator):
    """Rows of item points -> assessment totals, NaN treated as missing.

    Missing items go through the same averaged-total imputation as the
    single-assessment scorer; rows where every item is missing are
    rejected rather than scored zero.
    """

    def __init__(self, scale_name: str = "epv"):
        self.scale_name = scale_name

    def fit(self, X=None, y=None):
        self.scale_ = builtin_scale(self.scale_name)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "scale_"):
            self.fit()
        scale = self.scale_
        values = _as_2d_float(X, len(scale.items))
        totals = np.empty((values.shape[0], 1), dtype=np.int64)
        for i, row in enumerate(values):
            responses = []
            for item, cell in zip(scale.items, row):
                if np.isnan(cell):
                    responses.append(ItemResponse(item.id, None))
                else:
                    responses.append(ItemResponse(item.id, int(cell)))
            result = score_assessment(
                scale,
                Assessment(case_id=f"row-{i}", responses=tuple(responses)),
            )
            totals[i, 0] = result.imputed_total
        return totals


class CutoffClassifier(ClassifierMixin, BaseEstimator):
    """Totals -> 1 (predicted severe) when total >= cutoff, else 0."""

    def __init__(self, cutoff: int = 10):
        self.cutoff = cutoff

    def fit(self, X=None, y=None):
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise ValidationError("cutoff must be a non-negative integer")
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X) -> np.ndarray:
        if not hasattr(self, "classes_"):
            self.fit()
        totals = _as_2d_float(X, 1)[:, 0]
        return totals - self.cutoff

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)


class RateGapWeights(TransformerMixin, BaseEstimator):
    """Fit per-item weights proportional to affirmative-rate gaps between
    the positive and negative class, renormalized to ``point_budget``.

    transform returns the weighted row scores under the fitted weights.
    """

    def __init__(self, point_budget: float = 20.0):
        self.point_budget = point_budget

    def fit(self, X, y):
        if self.point_budget <= 0:
            raise ValidationError("point_budget must be positive")
        values = _as_2d_float(X)
        labels = np.asarray(y).astype(bool)
        if labels.shape != (values.shape[0],):
            raise ValidationError("y must supply one boolean label per row")
        weights = rate_gap_weights(values, labels, float(self.point_budget))
        if weights is None:
            raise DegenerateDataError(
                "cannot fit weights: single-class data or no positive rate gap"
            )
        self.weights_ = weights
        self.n_features_in_ = values.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "weights_"):
            raise ValidationError("fit before transform")
        values = _as_2d_float(X, self.n_features_in_)
        return (values @ self.weights_).reshape(-1, 1)
