"""Anchor reconstruction, cohort CSV i/o, synthetic generation."""

import numpy as np
import pytest

from epvaudit.cohort import (
    ANCHORS,
    SyntheticCohortConfig,
    anchor_provenance,
    generate_synthetic,
    load_cohort,
    reconstruct_anchor_cohort,
    synthetic_config_from_dict,
    write_matrix_csv,
    write_score_cohort_csv,
)
from epvaudit.errors import CohortFormatError, ValidationError
from epvaudit.metrics import LabeledScore, confusion
from epvaudit.psychometrics import LABEL_NON_SEVERE, LABEL_SEVERE, ResponseMatrix


def at_or_above(counts: np.ndarray, cutoff: int) -> int:
    return int(counts[cutoff:].sum())


class TestAnchorReconstruction:
    def test_class_totals(self, anchors_dist):
        assert anchors_dist.n_pos == 269
        assert anchors_dist.n_neg == 812

    def test_published_confusion_reproduced_exactly(self, anchors_dist):
        assert confusion(anchors_dist, 10).as_tuple() == (129, 140, 151, 661)

    def test_quoted_rate_anchors_within_one_count(self, anchors_dist):
        # counts derived in-test from the quoted rates, independently of
        # the anchor table the module ships: cutoff 6 quotes sensitivity
        # 83.27% and specificity 45.32%; cutoff 12 quotes 29% of severe
        # kept and a 6% false-positive rate
        cm6 = confusion(anchors_dist, 6)
        assert abs(cm6.tp - round(0.8327 * 269)) <= 1
        assert abs(cm6.tn - round(0.4532 * 812)) <= 1
        cm12 = confusion(anchors_dist, 12)
        assert abs(cm12.tp - round(0.29 * 269)) <= 1
        assert abs(cm12.fp - round(0.06 * 812)) <= 1

    def test_anchor_table_consistent_with_distribution(self, anchors_dist):
        for anchor in ANCHORS:
            if anchor.cutoff > 20:
                continue
            assert (
                at_or_above(anchors_dist.pos_counts, anchor.cutoff)
                == anchor.severe_at_or_above
            )
            assert (
                at_or_above(anchors_dist.neg_counts, anchor.cutoff)
                == anchor.nonsevere_at_or_above
            )

    def test_equal_split_convention_between_anchors(self, anchors_dist):
        # within each segment the per-score counts differ by at most 1,
        # with the heavier scores at the low end
        for current, following in zip(ANCHORS, ANCHORS[1:]):
            lo, hi = current.cutoff, min(following.cutoff, 21)
            for counts in (anchors_dist.pos_counts, anchors_dist.neg_counts):
                segment = counts[lo:hi].tolist()
                assert max(segment) - min(segment) <= 1
                assert segment == sorted(segment, reverse=True)

    def test_deterministic(self):
        first = reconstruct_anchor_cohort()
        second = reconstruct_anchor_cohort()
        assert np.array_equal(first.pos_counts, second.pos_counts)
        assert np.array_equal(first.neg_counts, second.neg_counts)

    def test_provenance_notes_cover_every_anchor(self):
        notes = anchor_provenance()
        assert len(notes) == len(ANCHORS)
        assert any("tp 129" in note for note in notes)


class TestScoreFormCsv:
    def test_round_trip(self, tmp_path, anchors_dist, epv):
        path = tmp_path / "cohort.csv"
        write_score_cohort_csv(anchors_dist.to_labeled_scores(), path)
        loaded = load_cohort(path, epv)
        assert isinstance(loaded, list)
        assert len(loaded) == 1081
        assert sorted(loaded) == sorted(anchors_dist.to_labeled_scores())

    def test_label_normalization(self, tmp_path, epv):
        path = tmp_path / "cohort.csv"
        path.write_text(
            "score,label\n3, Severe \n4,NON-SEVERE\n"
        )
        loaded = load_cohort(path, epv)
        assert loaded == [
            LabeledScore(3, "severe"),
            LabeledScore(4, "non_severe"),
        ]

    @pytest.mark.parametrize(
        "body,fragment",
        [
            ("score,label\n3,maybe\n", "line 2"),
            ("score,label\n21,severe\n", "line 2"),
            ("score,label\nx,severe\n", "line 2"),
            ("score,label\n3,severe,extra\n", "line 2"),
            ("score,label\n3,severe\n-1,severe\n", "line 3"),
        ],
    )
    def test_row_addressed_errors(self, tmp_path, epv, body, fragment):
        path = tmp_path / "bad.csv"
        path.write_text(body)
        with pytest.raises(CohortFormatError) as err:
            load_cohort(path, epv)
        assert fragment in str(err.value)

    def test_empty_file(self, tmp_path, epv):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(CohortFormatError):
            load_cohort(path, epv)

    def test_unknown_header(self, tmp_path, epv):
        path = tmp_path / "odd.csv"
        path.write_text("points,outcome\n1,severe\n")
        with pytest.raises(CohortFormatError) as err:
            load_cohort(path, epv)
        assert "header" in str(err.value)


class TestItemFormCsv:
    def test_round_trip(self, tmp_path, epv):
        config = SyntheticCohortConfig(
            n_severe=8,
            n_nonsevere=12,
            severe_rates=(0.7,) * 20,
            nonsevere_rates=(0.2,) * 20,
            seed=5,
        )
        matrix = generate_synthetic(config, epv)
        path = tmp_path / "matrix.csv"
        write_matrix_csv(matrix, path)
        loaded = load_cohort(path, epv)
        assert isinstance(loaded, ResponseMatrix)
        assert np.array_equal(loaded.values, matrix.values)
        assert np.array_equal(loaded.labels, matrix.labels)

    def test_value_above_item_maximum(self, tmp_path, epv):
        header = ",".join(f"item_{i}" for i in range(1, 21)) + ",label"
        row = ",".join(["0"] * 19 + ["2"]) + ",severe"
        path = tmp_path / "bad.csv"
        path.write_text(f"{header}\n{row}\n")
        with pytest.raises(CohortFormatError) as err:
            load_cohort(path, epv)
        assert "line 2" in str(err.value) and "item_20" in str(err.value)

    def test_wrong_column_count(self, tmp_path, epv):
        header = ",".join(f"item_{i}" for i in range(1, 21)) + ",label"
        path = tmp_path / "bad.csv"
        path.write_text(f"{header}\n0,1,severe\n")
        with pytest.raises(CohortFormatError) as err:
            load_cohort(path, epv)
        assert "line 2" in str(err.value)


class TestSyntheticGeneration:
    def test_seeded_reproducibility(self, epv):
        config = SyntheticCohortConfig(
            n_severe=40, n_nonsevere=60,
            severe_rates=(0.6,) * 20, nonsevere_rates=(0.3,) * 20,
        )
        first = generate_synthetic(config, epv, seed=123)
        second = generate_synthetic(config, epv, seed=123)
        assert np.array_equal(first.values, second.values)
        third = generate_synthetic(config, epv, seed=124)
        assert not np.array_equal(first.values, third.values)

    def test_label_blocks_and_shape(self, epv):
        config = SyntheticCohortConfig(
            n_severe=10, n_nonsevere=15,
            severe_rates=(0.5,) * 20, nonsevere_rates=(0.5,) * 20,
            seed=1,
        )
        matrix = generate_synthetic(config, epv)
        assert matrix.values.shape == (25, 20)
        assert list(matrix.labels[:10]) == [LABEL_SEVERE] * 10
        assert list(matrix.labels[10:]) == [LABEL_NON_SEVERE] * 15

    def test_rates_are_respected(self, epv):
        config = SyntheticCohortConfig(
            n_severe=4000, n_nonsevere=4000,
            severe_rates=(0.6,) * 20, nonsevere_rates=(0.3,) * 20,
            seed=2,
        )
        matrix = generate_synthetic(config, epv)
        severe_rate = matrix.class_rows(LABEL_SEVERE).mean()
        nonsevere_rate = matrix.class_rows(LABEL_NON_SEVERE).mean()
        assert severe_rate == pytest.approx(0.6, abs=0.01)
        assert nonsevere_rate == pytest.approx(0.3, abs=0.01)

    def test_affirmative_scores_item_maximum_on_graded_scale(self, epv_r):
        config = SyntheticCohortConfig(
            n_severe=30, n_nonsevere=30,
            severe_rates=(1.0,) * 20, nonsevere_rates=(0.0,) * 20,
            seed=3,
        )
        matrix = generate_synthetic(config, epv_r)
        maxima = np.array([item.max_points for item in epv_r.items])
        assert np.array_equal(
            matrix.class_rows(LABEL_SEVERE),
            np.tile(maxima, (30, 1)),
        )
        assert matrix.class_rows(LABEL_NON_SEVERE).sum() == 0

    def test_seed_required_somewhere(self, epv):
        config = SyntheticCohortConfig(
            n_severe=5, n_nonsevere=5,
            severe_rates=(0.5,) * 20, nonsevere_rates=(0.5,) * 20,
        )
        with pytest.raises(ValidationError):
            generate_synthetic(config, epv)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SyntheticCohortConfig(0, 5, (0.5,) * 20, (0.5,) * 20)
        with pytest.raises(ValidationError):
            SyntheticCohortConfig(5, 5, (1.5,) * 20, (0.5,) * 20)

    def test_rate_count_must_match_scale(self, epv):
        config = SyntheticCohortConfig(
            n_severe=5, n_nonsevere=5,
            severe_rates=(0.5,) * 19, nonsevere_rates=(0.5,) * 19, seed=1,
        )
        with pytest.raises(ValidationError):
            generate_synthetic(config, epv)


class TestConfigFromDict:
    def test_scalar_rates_broadcast(self):
        config = synthetic_config_from_dict(
            {
                "n_severe": 3,
                "n_nonsevere": 4,
                "severe_rates": 0.7,
                "nonsevere_rates": 0.1,
                "seed": 9,
            }
        )
        assert config.severe_rates == (0.7,) * 20
        assert config.seed == 9

    def test_explicit_rate_lists(self):
        rates = [0.1 * (i % 10) for i in range(20)]
        config = synthetic_config_from_dict(
            {
                "n_severe": 3,
                "n_nonsevere": 4,
                "severe_rates": rates,
                "nonsevere_rates": 0.2,
            }
        )
        assert config.severe_rates == tuple(rates)
        assert config.seed is None

    @pytest.mark.parametrize(
        "raw",
        [
            "not a mapping",
            {"n_severe": 3},
            {"n_severe": 3, "n_nonsevere": 4, "severe_rates": [0.5] * 19,
             "nonsevere_rates": 0.5},
            {"n_severe": "three", "n_nonsevere": 4, "severe_rates": 0.5,
             "nonsevere_rates": 0.5},
        ],
    )
    def test_malformed(self, raw):
        with pytest.raises(ValidationError):
            synthetic_config_from_dict(raw)
