"""Scoring and audit workbench for a 20-item partner-violence risk scale.

Layers, innermost first:

  scale           item definitions, scoring with missing-item imputation
  psychometrics   alpha, t, chi-squared, item discrimination
  metrics         confusion matrices, cutoff sweeps, ROC area, paradox flag
  cohort          cohort i/o, anchor-constrained reconstruction, synthesis
  feedback        biased-recording retraining-loop simulator
  estimators      fit/transform/predict wrappers over the kernel
  audit           report assembly and rendering
  cli / api       batch and HTTP bindings
"""

from .errors import (
    AllMissingError,
    AssessmentError,
    CohortFormatError,
    DegenerateDataError,
    EpvAuditError,
    OutOfRangeError,
    ScaleConfigError,
    ValidationError,
)
from .scale import (
    Assessment,
    ItemResponse,
    ScaleDefinition,
    ScoreResult,
    builtin_scale,
    classify_tier,
    load_assessment,
    load_scale,
    load_scale_file,
    score,
)
from .psychometrics import (
    ResponseMatrix,
    TestReport,
    chi_squared,
    cronbach_alpha,
    item_discrimination,
    two_sample_t,
)
# the row-building function `metrics.metrics` stays on its submodule:
# re-exporting it here would shadow the `epvaudit.metrics` module itself
from .metrics import (
    ConfusionMatrix,
    LabeledScore,
    MetricsRow,
    ScoreDistribution,
    accuracy_paradox_flag,
    auc,
    confusion,
    format_ratio,
    sweep,
    write_sweep_csv,
)
from .cohort import (
    SyntheticCohortConfig,
    generate_synthetic,
    load_cohort,
    reconstruct_anchor_cohort,
)
from .feedback import (
    FeedbackConfig,
    FeedbackTrace,
    drift_report,
    run_feedback,
)
from .estimators import CutoffClassifier, RateGapWeights, ScaleScorer
from .audit import (
    AuditReport,
    build_audit,
    case_disclosure,
    write_roc_csv,
    write_tradeoff_csv,
)

__version__ = "1.0.0"

__all__ = [
    "AllMissingError",
    "Assessment",
    "AssessmentError",
    "AuditReport",
    "CohortFormatError",
    "ConfusionMatrix",
    "CutoffClassifier",
    "DegenerateDataError",
    "EpvAuditError",
    "FeedbackConfig",
    "FeedbackTrace",
    "ItemResponse",
    "LabeledScore",
    "MetricsRow",
    "OutOfRangeError",
    "RateGapWeights",
    "ResponseMatrix",
    "ScaleConfigError",
    "ScaleDefinition",
    "ScaleScorer",
    "ScoreDistribution",
    "ScoreResult",
    "SyntheticCohortConfig",
    "TestReport",
    "ValidationError",
    "accuracy_paradox_flag",
    "auc",
    "build_audit",
    "builtin_scale",
    "case_disclosure",
    "chi_squared",
    "classify_tier",
    "confusion",
    "cronbach_alpha",
    "drift_report",
    "format_ratio",
    "generate_synthetic",
    "item_discrimination",
    "load_assessment",
    "load_cohort",
    "load_scale",
    "load_scale_file",
    "reconstruct_anchor_cohort",
    "run_feedback",
    "score",
    "sweep",
    "two_sample_t",
    "write_roc_csv",
    "write_sweep_csv",
    "write_tradeoff_csv",
]
