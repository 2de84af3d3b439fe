"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``code`` so the CLI and the
HTTP service can map failures without string matching.
"""

from __future__ import annotations


class EpvAuditError(Exception):
    """Base class; anything raised on purpose by this package."""

    code = "internal-error"


class ValidationError(EpvAuditError):
    """Bad input supplied by a caller (CLI exit 1, HTTP 4xx)."""

    code = "validation-error"


class ScaleConfigError(ValidationError):
    code = "scale-config"


class AssessmentError(ValidationError):
    code = "assessment-invalid"


class AllMissingError(AssessmentError):
    """Every item unanswered: scoring is refused, never reported as 0."""

    code = "all-missing-blocked"


class OutOfRangeError(ValidationError):
    code = "out-of-range"


class CohortFormatError(ValidationError):
    code = "cohort-format"


class DegenerateDataError(ValidationError):
    """Statistic undefined for the given data (zero variance, one class...)."""

    code = "degenerate-data"
