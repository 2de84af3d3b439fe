"""Design-process statistics: Cronbach's alpha, pooled t, Pearson chi-squared.

Significance is decided against fixed 0.05 critical-value tables rather
than p-value integration; the decision is all the original design process
reported, and tables keep this module dependency-free beyond numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateDataError, ValidationError

LABEL_SEVERE = "severe"
LABEL_NON_SEVERE = "non_severe"
LABELS = (LABEL_SEVERE, LABEL_NON_SEVERE)

T_ASSUMPTION_NOTE = (
    "pooled two-sample t assumes normally distributed groups with equal "
    "variances; neither condition is checked here and the original cohort "
    "analysis gave no evidence they held"
)

# Two-tailed critical values of Student's t at alpha = 0.05. Lookup uses
# the largest tabulated df not exceeding the requested df, so gap and
# beyond-table dfs borrow a slightly larger critical value: decisions
# there are conservative (the normal-limit value would be 1.960).
_T_CRIT_05 = {
    1: 12.706, 2: 4.303, 3: 3.182, 4: 2.776, 5: 2.571,
    6: 2.447, 7: 2.365, 8: 2.306, 9: 2.262, 10: 2.228,
    11: 2.201, 12: 2.179, 13: 2.160, 14: 2.145, 15: 2.131,
    16: 2.120, 17: 2.110, 18: 2.101, 19: 2.093, 20: 2.086,
    21: 2.080, 22: 2.074, 23: 2.069, 24: 2.064, 25: 2.060,
    26: 2.056, 27: 2.052, 28: 2.048, 29: 2.045, 30: 2.042,
    40: 2.021, 60: 2.000, 80: 1.990, 120: 1.980,
}

# Upper-tail critical values of chi-squared at alpha = 0.05, df 1..30.
_CHI2_CRIT_05 = {
    1: 3.841, 2: 5.991, 3: 7.815, 4: 9.488, 5: 11.070,
    6: 12.592, 7: 14.067, 8: 15.507, 9: 16.919, 10: 18.307,
    11: 19.675, 12: 21.026, 13: 22.362, 14: 23.685, 15: 24.996,
    16: 26.296, 17: 27.587, 18: 28.869, 19: 30.144, 20: 31.410,
    21: 32.671, 22: 33.924, 23: 35.172, 24: 36.415, 25: 37.652,
    26: 38.885, 27: 40.113, 28: 41.337, 29: 42.557, 30: 43.773,
}


def t_critical_05(dof: int) -> float:
    if dof < 1:
        raise DegenerateDataError(f"t test needs dof >= 1, got {dof}")
    eligible = [k for k in _T_CRIT_05 if k <= dof]
    return _T_CRIT_05[max(eligible)]


def chi2_critical_05(dof: int) -> float:
    if dof < 1:
        raise DegenerateDataError(f"chi-squared needs dof >= 1, got {dof}")
    if dof not in _CHI2_CRIT_05:
        raise DegenerateDataError(
            f"chi-squared critical table covers df 1..30, got {dof}"
        )
    return _CHI2_CRIT_05[dof]


@dataclass(frozen=True)
class TestReport:
    statistic: float
    degrees_of_freedom: float
    significant_at_05: bool
    assumption_notes: str = ""


@dataclass(frozen=True)
class ResponseMatrix:
    """Cases x items point matrix with a severe / non_severe label per row."""

    values: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        labels = np.asarray(self.labels)
        if values.ndim != 2:
            raise ValidationError("response matrix must be 2-dimensional")
        if labels.shape != (values.shape[0],):
            raise ValidationError("one label per matrix row required")
        bad = set(labels.tolist()) - set(LABELS)
        if bad:
            raise ValidationError(f"unknown labels {sorted(bad)}; use {LABELS}")
        if values.size and (values < 0).any():
            raise ValidationError("item points must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def n_cases(self) -> int:
        return self.values.shape[0]

    @property
    def n_items(self) -> int:
        return self.values.shape[1]

    def class_rows(self, label: str) -> np.ndarray:
        return self.values[self.labels == label]

    def totals(self) -> np.ndarray:
        return self.values.sum(axis=1)


def _as_values(matrix) -> np.ndarray:
    if isinstance(matrix, ResponseMatrix):
        return matrix.values
    return np.asarray(matrix)


def cronbach_alpha(matrix) -> float:
    """Internal-consistency alpha: k/(k-1) * (1 - sum item var / total var).

    Sample variances (n-1 denominator). Requires at least 2 items, 2
    cases and non-zero total-score variance.
    """
    values = _as_values(matrix).astype(float)
    if values.ndim != 2 or values.shape[1] < 2:
        raise DegenerateDataError("alpha needs at least 2 items")
    if values.shape[0] < 2:
        raise DegenerateDataError("alpha needs at least 2 cases")
    k = values.shape[1]
    item_vars = values.var(axis=0, ddof=1)
    total_var = values.sum(axis=1).var(ddof=1)
    if total_var == 0:
        raise DegenerateDataError("total-score variance is zero; alpha undefined")
    return float(k / (k - 1) * (1.0 - item_vars.sum() / total_var))


def two_sample_t(group_a, group_b) -> TestReport:
    """Classical pooled-variance Student t with dof n_a + n_b - 2."""
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or len(a) < 2 or len(b) < 2:
        raise DegenerateDataError("each group needs at least 2 values")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValidationError("groups must contain finite values")
    n_a, n_b = len(a), len(b)
    dof = n_a + n_b - 2
    pooled = ((n_a - 1) * a.var(ddof=1) + (n_b - 1) * b.var(ddof=1)) / dof
    mean_diff = a.mean() - b.mean()
    if pooled == 0:
        if mean_diff == 0:
            return TestReport(0.0, float(dof), False, T_ASSUMPTION_NOTE)
        raise DegenerateDataError(
            "zero pooled variance with unequal means; t undefined"
        )
    statistic = float(mean_diff / math.sqrt(pooled * (1 / n_a + 1 / n_b)))
    significant = abs(statistic) > t_critical_05(dof)
    return TestReport(statistic, float(dof), significant, T_ASSUMPTION_NOTE)


def chi_squared(table) -> TestReport:
    """Pearson chi-squared on a 2 x k count table, dof k - 1."""
    counts = np.asarray(table, dtype=float)
    if counts.ndim != 2 or counts.shape[0] != 2:
        raise ValidationError("table must be 2 x k")
    if counts.shape[1] < 2:
        raise DegenerateDataError("table needs at least 2 columns (dof >= 1)")
    if (counts < 0).any():
        raise ValidationError("counts must be non-negative")
    row_totals = counts.sum(axis=1)
    col_totals = counts.sum(axis=0)
    if (row_totals == 0).any() or (col_totals == 0).any():
        raise DegenerateDataError("zero row or column total; expected counts vanish")
    grand = counts.sum()
    expected = np.outer(row_totals, col_totals) / grand
    statistic = float(((counts - expected) ** 2 / expected).sum())
    dof = counts.shape[1] - 1
    return TestReport(statistic, float(dof), statistic > chi2_critical_05(dof))


@dataclass(frozen=True)
class ItemDiscrimination:
    item_id: int
    report: TestReport
    rate_severe: float
    rate_non_severe: float
    rate_gap: float


def item_discrimination(matrix: ResponseMatrix) -> list[ItemDiscrimination]:
    """Per-item 2x2 chi-squared of affirmative response vs class label.

    Affirmative means points > 0. Items come back ranked by statistic,
    largest first; an item with no response variation scores 0 and sinks
    to the bottom.
    """
    severe = matrix.class_rows(LABEL_SEVERE)
    non_severe = matrix.class_rows(LABEL_NON_SEVERE)
    if len(severe) == 0 or len(non_severe) == 0:
        raise DegenerateDataError("both labels must be present")

    results = []
    for j in range(matrix.n_items):
        aff_s = int((severe[:, j] > 0).sum())
        aff_n = int((non_severe[:, j] > 0).sum())
        not_s = len(severe) - aff_s
        not_n = len(non_severe) - aff_n
        rate_s = aff_s / len(severe)
        rate_n = aff_n / len(non_severe)
        if aff_s + aff_n == 0 or not_s + not_n == 0:
            # constant item: no affirmative-rate information
            report = TestReport(0.0, 1.0, False, "item response has no variation")
        else:
            report = chi_squared([[aff_s, aff_n], [not_s, not_n]])
        results.append(
            ItemDiscrimination(
                item_id=j + 1,
                report=report,
                rate_severe=rate_s,
                rate_non_severe=rate_n,
                rate_gap=rate_s - rate_n,
            )
        )
    results.sort(key=lambda r: (-r.report.statistic, r.item_id))
    return results
