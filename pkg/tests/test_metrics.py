"""Confusion matrices, cutoff sweeps, ROC area, and the paradox flag."""

import itertools

import numpy as np
import pytest

from epvaudit.errors import DegenerateDataError, OutOfRangeError, ValidationError
from epvaudit.metrics import (
    LabeledScore,
    MetricsRow,
    ScoreDistribution,
    SWEEP_CSV_COLUMNS,
    accuracy_paradox_flag,
    auc,
    confusion,
    format_ratio,
    metrics,
    row_as_wire_dict,
    sweep,
    write_sweep_csv,
)


def auc_pairwise_oracle(dist: ScoreDistribution) -> float:
    """Brute-force concordance: P(pos score > neg score) + half ties."""
    wins = 0
    ties = 0
    for sp, cp in enumerate(dist.pos_counts.tolist()):
        if cp == 0:
            continue
        for sn, cn in enumerate(dist.neg_counts.tolist()):
            if cn == 0:
                continue
            if sp > sn:
                wins += cp * cn
            elif sp == sn:
                ties += cp * cn
    total = dist.n_pos * dist.n_neg
    return (wins + 0.5 * ties) / total


def random_distribution(rng, max_total=20) -> ScoreDistribution:
    pos = rng.integers(0, 30, size=max_total + 1)
    neg = rng.integers(0, 30, size=max_total + 1)
    pos[rng.integers(0, max_total + 1)] += 1  # ensure both classes nonempty
    neg[rng.integers(0, max_total + 1)] += 1
    return ScoreDistribution(pos, neg)


class TestDistribution:
    def test_from_labeled_scores_round_trip(self):
        records = [
            LabeledScore(3, "severe"),
            LabeledScore(3, "severe"),
            LabeledScore(0, "non_severe"),
            LabeledScore(20, "non_severe"),
        ]
        dist = ScoreDistribution.from_labeled_scores(records, 20)
        assert dist.n_pos == 2 and dist.n_neg == 2
        assert sorted(dist.to_labeled_scores()) == sorted(records)

    def test_score_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            ScoreDistribution.from_labeled_scores(
                [LabeledScore(21, "severe")], 20
            )

    def test_unknown_label(self):
        with pytest.raises(ValidationError):
            ScoreDistribution.from_labeled_scores(
                [LabeledScore(3, "bad")], 20
            )

    def test_negative_counts_rejected(self):
        with pytest.raises(ValidationError):
            ScoreDistribution(np.array([-1, 2]), np.array([0, 0]))


class TestConfusion:
    def test_published_operating_point(self, anchors_dist):
        assert confusion(anchors_dist, 10).as_tuple() == (129, 140, 151, 661)

    def test_extremes(self, anchors_dist):
        assert confusion(anchors_dist, 0).as_tuple() == (269, 0, 812, 0)
        assert confusion(anchors_dist, 21).as_tuple() == (0, 269, 0, 812)

    def test_class_conservation_everywhere(self, anchors_dist):
        for cutoff in range(0, 22):
            cm = confusion(anchors_dist, cutoff)
            assert cm.tp + cm.fn == 269
            assert cm.fp + cm.tn == 812

    @pytest.mark.parametrize("bad", [-1, 22])
    def test_cutoff_range(self, anchors_dist, bad):
        with pytest.raises(OutOfRangeError):
            confusion(anchors_dist, bad)

    def test_cutoff_must_be_integer(self, anchors_dist):
        with pytest.raises(OutOfRangeError):
            confusion(anchors_dist, 9.5)


class TestRatios:
    def test_cutoff_10_quoted_rates(self, anchors_dist):
        row = metrics(confusion(anchors_dist, 10), 10)
        assert row.sensitivity == pytest.approx(0.4796, abs=5e-4)
        assert row.specificity == pytest.approx(0.8140, abs=5e-4)
        assert row.accuracy == pytest.approx(0.731, abs=1e-3)
        assert row.sensitivity == 129 / 269
        assert row.specificity == 661 / 812
        assert row.accuracy == 790 / 1081

    def test_complements_are_exact_floats(self, anchors_dist):
        for row in sweep(anchors_dist):
            if row.sensitivity is not None:
                assert row.fnr == 1.0 - row.sensitivity
            if row.specificity is not None:
                assert row.fpr == 1.0 - row.specificity

    def test_undefined_ratios_are_none(self):
        empty_pos = ScoreDistribution(
            np.zeros(21, dtype=int), np.full(21, 2, dtype=int)
        )
        row = metrics(confusion(empty_pos, 10), 10)
        assert row.sensitivity is None
        assert row.fnr is None
        assert row.specificity is not None
        cm_no_predictions = confusion(empty_pos, 21)
        row21 = metrics(cm_no_predictions, 21)
        assert row21.precision is None

    def test_f_measure_and_g_mean_hand_case(self):
        dist = ScoreDistribution.from_labeled_scores(
            [
                LabeledScore(12, "severe"),
                LabeledScore(8, "severe"),
                LabeledScore(11, "non_severe"),
                LabeledScore(3, "non_severe"),
                LabeledScore(2, "non_severe"),
            ],
            20,
        )
        row = metrics(confusion(dist, 10), 10)
        # tp 1, fn 1, fp 1, tn 2
        assert row.precision == 0.5
        assert row.sensitivity == 0.5
        assert row.f_measure == pytest.approx(0.5)
        assert row.g_mean == pytest.approx((0.5 * (2 / 3)) ** 0.5)
        assert row.npv == pytest.approx(2 / 3)

    def test_format_ratio(self):
        assert format_ratio(None) == "n/a"
        assert format_ratio(0.4795539033457249) == "0.479554"
        assert format_ratio(1.0) == "1.000000"
        assert format_ratio(0.25, places=2) == "0.25"


class TestSweep:
    def test_covers_all_cutoffs(self, anchors_dist):
        rows = sweep(anchors_dist)
        assert [row.cutoff for row in rows] == list(range(0, 22))

    def test_monotone_counts(self, anchors_dist):
        rows = sweep(anchors_dist)
        for earlier, later in itertools.pairwise(rows):
            assert later.tp <= earlier.tp
            assert later.fp <= earlier.fp

    def test_single_class_distribution_allowed(self):
        only_neg = ScoreDistribution(
            np.zeros(21, dtype=int), np.full(21, 1, dtype=int)
        )
        rows = sweep(only_neg)
        assert all(row.sensitivity is None for row in rows)

    def test_csv_write_deterministic(self, anchors_dist, tmp_path):
        rows = sweep(anchors_dist)
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        write_sweep_csv(rows, first)
        write_sweep_csv(rows, second)
        assert first.read_bytes() == second.read_bytes()
        header = first.read_text().splitlines()[0]
        assert header == ",".join(SWEEP_CSV_COLUMNS)

    def test_wire_dict_types(self, anchors_dist):
        wire = row_as_wire_dict(sweep(anchors_dist)[10])
        assert wire["tp"] == 129 and isinstance(wire["tp"], int)
        assert wire["sensitivity"] == "0.479554"
        assert wire["cutoff"] == 10


class TestAuc:
    def test_anchor_value_near_published(self, anchors_dist):
        assert auc(sweep(anchors_dist)) == pytest.approx(0.69, abs=0.05)

    def test_equals_pairwise_concordance_on_anchors(self, anchors_dist):
        trapezoid = auc(sweep(anchors_dist))
        assert trapezoid == pytest.approx(
            auc_pairwise_oracle(anchors_dist), abs=1e-12
        )

    def test_matches_pairwise_oracle_on_random_distributions(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            dist = random_distribution(rng)
            trapezoid = auc(sweep(dist))
            oracle = auc_pairwise_oracle(dist)
            assert trapezoid == pytest.approx(oracle, abs=0.01)

    def test_perfect_separation(self):
        pos = np.zeros(21, dtype=int)
        neg = np.zeros(21, dtype=int)
        pos[15] = 5
        neg[5] = 5
        assert auc(sweep(ScoreDistribution(pos, neg))) == pytest.approx(1.0)

    def test_requires_two_defined_points(self):
        only_neg = ScoreDistribution(
            np.zeros(21, dtype=int), np.full(21, 1, dtype=int)
        )
        with pytest.raises(DegenerateDataError):
            auc(sweep(only_neg))


class TestAccuracyParadox:
    def test_flagged_at_published_cutoff(self, anchors_dist):
        row = metrics(confusion(anchors_dist, 10), 10)
        flagged, explanation = accuracy_paradox_flag(row, anchors_dist)
        assert flagged
        assert "73.1%" in explanation
        assert "24.9%" in explanation

    def test_not_flagged_when_sensitivity_high(self, anchors_dist):
        row = metrics(confusion(anchors_dist, 3), 3)
        assert row.sensitivity > 0.6
        flagged, _ = accuracy_paradox_flag(row, anchors_dist)
        assert not flagged

    def test_not_flagged_on_balanced_data(self):
        pos = np.zeros(21, dtype=int)
        neg = np.zeros(21, dtype=int)
        pos[12] = 40
        pos[5] = 60
        neg[4] = 100
        dist = ScoreDistribution(pos, neg)
        row = metrics(confusion(dist, 10), 10)
        assert row.accuracy >= 0.7 and row.sensitivity < 0.6
        flagged, _ = accuracy_paradox_flag(row, dist)
        assert not flagged  # minority share 0.5, not imbalanced
