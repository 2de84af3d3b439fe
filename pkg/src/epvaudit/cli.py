"""Command-line workbench binding.

Thin dispatch only: every number printed or written here comes straight
out of a library call, so CLI output can be cross-checked against
direct module use. Exit codes: 0 success, 1 input/usage error, 2
internal assertion failure. All randomness takes an explicit --seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import yaml

from . import audit as audit_mod
from . import cohort as cohort_mod
from . import feedback as feedback_mod
from . import metrics as metrics_mod
from . import psychometrics as psych_mod
from . import scale as scale_mod
from .errors import EpvAuditError, ValidationError
from .psychometrics import LABEL_NON_SEVERE, LABEL_SEVERE, ResponseMatrix


class UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the exit-code contract
    # reserves 2 for internal assertions, so route usage errors to 1
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _scale_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--scale", choices=scale_mod.BUILTIN_SCALES, default="epv",
        help="built-in scale definition (default: epv)",
    )
    group.add_argument(
        "--scale-file", metavar="FILE",
        help="custom scale definition file (YAML)",
    )


def _cohort_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--anchors", action="store_true",
        help="use the reconstructed published-anchor distribution",
    )
    group.add_argument(
        "--cohort", metavar="FILE",
        help="labeled cohort CSV (score form or item form)",
    )


def _resolve_scale(args) -> scale_mod.ScaleDefinition:
    if getattr(args, "scale_file", None):
        return scale_mod.load_scale_file(args.scale_file)
    return scale_mod.builtin_scale(getattr(args, "scale", "epv"))


def _resolve_distribution(args, scale) -> metrics_mod.ScoreDistribution:
    if args.anchors:
        if scale.scale_id != "EPV":
            raise ValidationError(
                "the anchor distribution is defined for the EPV scale only"
            )
        return cohort_mod.reconstruct_anchor_cohort()
    loaded = cohort_mod.load_cohort(args.cohort, scale)
    if isinstance(loaded, ResponseMatrix):
        records = [
            metrics_mod.LabeledScore(int(total), str(label))
            for total, label in zip(loaded.totals(), loaded.labels)
        ]
    else:
        records = loaded
    return metrics_mod.ScoreDistribution.from_labeled_scores(
        records, scale.max_total
    )


def _provenance(args) -> list[str]:
    if args.anchors:
        return cohort_mod.anchor_provenance()
    return [f"cohort loaded from {args.cohort}"]


def _dump_json(document: dict, out_path: str | None) -> None:
    text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- subcommand handlers -----------------------------------------------------


def _cmd_score(args) -> int:
    scale = _resolve_scale(args)
    assessment = scale_mod.load_assessment(args.assessment)
    result = scale_mod.score(scale, assessment)
    print(f"total: {result.imputed_total}")
    print(f"tier: {result.tier}")
    print()
    print(audit_mod.case_disclosure(result, scale, case_id=assessment.case_id))
    return 0


def _cmd_sweep(args) -> int:
    scale = _resolve_scale(args)
    dist = _resolve_distribution(args, scale)
    rows = metrics_mod.sweep(dist)
    metrics_mod.write_sweep_csv(rows, args.out)
    return 0


def _cmd_audit(args) -> int:
    scale = _resolve_scale(args)
    dist = _resolve_distribution(args, scale)
    rows = metrics_mod.sweep(dist)
    report = audit_mod.build_audit(
        dist, rows, args.cost_ratio, scale, provenance=_provenance(args)
    )
    markdown = audit_mod.audit_to_markdown(report)
    if args.out_md:
        with open(args.out_md, "w", encoding="utf-8", newline="") as fh:
            fh.write(markdown)
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8", newline="") as fh:
            fh.write(audit_mod.audit_to_json(report))
    if args.plot_tradeoff:
        audit_mod.write_tradeoff_csv(rows, args.plot_tradeoff)
    if args.plot_roc:
        audit_mod.write_roc_csv(rows, args.plot_roc)
    if not (args.out_md or args.out_json):
        sys.stdout.write(markdown)
    return 0


def _cmd_reconstruct(args) -> int:
    dist = cohort_mod.reconstruct_anchor_cohort()
    cohort_mod.write_score_cohort_csv(dist.to_labeled_scores(), args.out)
    return 0


def _cmd_generate(args) -> int:
    scale = _resolve_scale(args)
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh.read())
    config = cohort_mod.synthetic_config_from_dict(raw, len(scale.items))
    matrix = cohort_mod.generate_synthetic(config, scale, seed=args.seed)
    cohort_mod.write_matrix_csv(matrix, args.out)
    return 0


def _cmd_psych(args) -> int:
    scale = _resolve_scale(args)
    loaded = cohort_mod.load_cohort(args.matrix, scale)
    if not isinstance(loaded, ResponseMatrix):
        raise ValidationError(
            "psych needs the per-item matrix form "
            "(item_1,...,item_N,label), not score form"
        )
    totals = loaded.totals()
    severe_totals = totals[loaded.labels == LABEL_SEVERE]
    nonsevere_totals = totals[loaded.labels == LABEL_NON_SEVERE]
    t_report = psych_mod.two_sample_t(severe_totals, nonsevere_totals)
    discrimination = psych_mod.item_discrimination(loaded)
    document = {
        "schema_version": "1",
        "cases": int(loaded.n_cases),
        "items": int(loaded.n_items),
        "cronbach_alpha": psych_mod.cronbach_alpha(loaded),
        "total_score_t": {
            "statistic": t_report.statistic,
            "degrees_of_freedom": t_report.degrees_of_freedom,
            "significant_at_05": t_report.significant_at_05,
            "assumption_notes": t_report.assumption_notes,
        },
        "item_discrimination": [
            {
                "item_id": d.item_id,
                "chi_squared": d.report.statistic,
                "degrees_of_freedom": d.report.degrees_of_freedom,
                "significant_at_05": d.report.significant_at_05,
                "rate_severe": d.rate_severe,
                "rate_non_severe": d.rate_non_severe,
                "rate_gap": d.rate_gap,
            }
            for d in discrimination
        ],
    }
    _dump_json(document, args.out)
    return 0


def _cmd_simulate(args) -> int:
    scale = _resolve_scale(args)
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh.read())
    if not isinstance(raw, dict):
        raise ValidationError("simulate config must be a mapping")
    raw = dict(raw)
    raw["seed"] = args.seed
    config = feedback_mod.feedback_config_from_dict(raw, len(scale.items))
    trace = feedback_mod.run_feedback(config, scale)
    _dump_json(feedback_mod.trace_to_dict(trace), args.out)
    if args.drift_out:
        _dump_json(feedback_mod.drift_report(trace), args.drift_out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="epv-audit",
        description=(
            "Scoring and audit workbench for a 20-item partner-violence "
            "risk scale."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_score = sub.add_parser(
        "score", help="score one assessment file and print the disclosure"
    )
    p_score.add_argument("assessment", help="assessment JSON file")
    _scale_options(p_score)
    p_score.set_defaults(handler=_cmd_score)

    p_sweep = sub.add_parser(
        "sweep", help="write the full cutoff-sweep CSV for a cohort"
    )
    _cohort_options(p_sweep)
    _scale_options(p_sweep)
    p_sweep.add_argument("--out", required=True, metavar="FILE")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_audit = sub.add_parser(
        "audit", help="build the audit report for a cohort"
    )
    _cohort_options(p_audit)
    _scale_options(p_audit)
    p_audit.add_argument(
        "--cost-ratio", required=True, type=float,
        help="cost of one false negative in false positives (required; "
        "there is no defensible default)",
    )
    p_audit.add_argument("--out-md", metavar="FILE")
    p_audit.add_argument("--out-json", metavar="FILE")
    p_audit.add_argument(
        "--plot-tradeoff", metavar="FILE",
        help="write cutoff,sensitivity,specificity,accuracy CSV",
    )
    p_audit.add_argument(
        "--plot-roc", metavar="FILE", help="write fpr,tpr CSV"
    )
    p_audit.set_defaults(handler=_cmd_audit)

    p_reconstruct = sub.add_parser(
        "reconstruct",
        help="write the canonical anchor-consistent cohort as score,label CSV",
    )
    p_reconstruct.add_argument("--out", required=True, metavar="FILE")
    p_reconstruct.set_defaults(handler=_cmd_reconstruct)

    p_generate = sub.add_parser(
        "generate", help="generate a synthetic item-level cohort CSV"
    )
    p_generate.add_argument("--config", required=True, metavar="FILE")
    p_generate.add_argument("--seed", required=True, type=int)
    p_generate.add_argument("--out", required=True, metavar="FILE")
    _scale_options(p_generate)
    p_generate.set_defaults(handler=_cmd_generate)

    p_psych = sub.add_parser(
        "psych",
        help="internal-consistency and discrimination tests on a matrix CSV",
    )
    p_psych.add_argument("--matrix", required=True, metavar="FILE")
    p_psych.add_argument("--out", metavar="FILE")
    _scale_options(p_psych)
    p_psych.set_defaults(handler=_cmd_psych)

    p_sim = sub.add_parser(
        "simulate", help="run the feedback-loop simulator from a config file"
    )
    p_sim.add_argument("--config", required=True, metavar="FILE")
    p_sim.add_argument(
        "--seed", required=True, type=int,
        help="run seed (overrides any seed in the config file)",
    )
    p_sim.add_argument("--out", metavar="FILE")
    p_sim.add_argument(
        "--drift-out", metavar="FILE", help="also write the drift summary"
    )
    _scale_options(p_sim)
    p_sim.set_defaults(handler=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        sys.stderr.write(exc.usage)
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except EpvAuditError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error[io]: {exc}\n")
        return 1
    except AssertionError as exc:
        sys.stderr.write(f"internal assertion failed: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        sys.stderr.write(f"internal error: {exc!r}\n")
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
