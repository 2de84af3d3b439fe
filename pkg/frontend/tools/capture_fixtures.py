"""Capture test fixtures for the UI from the real scoring service and CLI.

Run from the repository root with the Python package installed:

    python3 frontend/tools/capture_fixtures.py

Writes frontend/tests/fixtures/service.json containing, verbatim:
  - the scale document,
  - the anchor cohort registration, sweep, and what-if responses at
    cutoffs 0, 6, 10 and 12,
  - twenty scripted assessments, each with the service /score response
    and the total/tier lines printed by the command line for the same
    assessment file.

UI tests replay these instead of stubbing shapes by hand, so the parity
checks pin the interface to genuine service behavior.
"""

import contextlib
import io
import json
import re
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from epvaudit.api import create_app
from epvaudit.cli import main as cli_main

OUT_PATH = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "service.json"

WHATIF_CUTOFFS = (0, 6, 10, 12)


def scripted_assessments() -> list[dict]:
    """Twenty deterministic cases spanning tiers, boundaries and
    missingness patterns."""

    def body(name: str, points_by_id: dict) -> dict:
        return {
            "name": name,
            "body": {
                "case_id": name,
                "scale_id": "epv",
                "responses": [
                    {"item_id": i, "points": points_by_id.get(i, 0)}
                    for i in range(1, 21)
                ],
            },
        }

    cases = [
        body("all-zero", {}),
        body("all-one", {i: 1 for i in range(1, 21)}),
        body("tier-low-top", {i: 1 for i in range(1, 5)}),
        body("tier-moderate-bottom", {i: 1 for i in range(1, 6)}),
        body("tier-moderate-top", {i: 1 for i in range(1, 10)}),
        body("tier-high-bottom", {i: 1 for i in range(1, 11)}),
        body("single-item", {7: 1}),
        body("published-cutoff", {i: 1 for i in range(3, 13)}),
        body(
            "half-missing-prorates",
            {**{i: (1 if i <= 4 else 0) for i in range(1, 11)},
             **{i: None for i in range(11, 21)}},
        ),
        body("one-missing", {1: 1, 2: 1, 20: None}),
        body("five-missing", {**{i: 1 for i in range(1, 7)},
                              **{i: None for i in range(7, 12)}}),
        body(
            "fifteen-missing",
            {**{i: 1 for i in range(1, 6)}, **{i: None for i in range(6, 21)}},
        ),
        body("alternating", {i: i % 2 for i in range(1, 21)}),
        body("sparse-missing", {3: 1, 9: None, 15: 1, 18: None}),
        body("high-with-gap", {**{i: 1 for i in range(1, 15)}, 4: None}),
        body("round-half-up", {**{i: None for i in range(1, 13)},
                               **{i: {13: 1, 14: 0, 15: 1, 16: 0}.get(i, 0)
                                  for i in range(13, 21)}}),
        body("only-category-tail", {i: 1 for i in range(16, 21)}),
        body("two-thirds", {**{i: 1 for i in range(1, 9)},
                            **{i: None for i in range(15, 21)}}),
        body("near-max-missing", {**{i: None for i in range(1, 20)}, 20: 1}),
        body("boundary-probe", {**{i: 1 for i in range(1, 10)}, 19: None}),
    ]
    assert len(cases) == 20
    names = [case["name"] for case in cases]
    assert len(set(names)) == 20
    return cases


def cli_total_tier(assessment_body: dict) -> dict:
    with tempfile.NamedTemporaryFile(
        "w", suffix=".json", delete=False
    ) as handle:
        json.dump(assessment_body, handle)
        path = handle.name
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout):
        code = cli_main(["score", path])
    assert code == 0, f"cli score failed for {assessment_body['case_id']}"
    text = stdout.getvalue()
    total = re.search(r"^total: (\d+)$", text, re.M)
    tier = re.search(r"^tier: (\w+)$", text, re.M)
    assert total and tier, text
    return {"total": int(total.group(1)), "tier": tier.group(1)}


def main() -> None:
    client = TestClient(create_app())

    scale = client.get("/scale/epv")
    scale.raise_for_status()
    cohort = client.post("/cohorts", json={"source": "anchors"})
    cohort.raise_for_status()
    cohort_id = cohort.json()["cohort_id"]
    sweep = client.get(f"/cohorts/{cohort_id}/sweep")
    sweep.raise_for_status()

    whatif = {}
    for cutoff in WHATIF_CUTOFFS:
        response = client.get(
            f"/cohorts/{cohort_id}/whatif", params={"cutoff": cutoff}
        )
        response.raise_for_status()
        whatif[str(cutoff)] = response.json()

    assessments = []
    for case in scripted_assessments():
        scored = client.post("/score", json=case["body"])
        scored.raise_for_status()
        assessments.append(
            {
                "name": case["name"],
                "body": case["body"],
                "service": scored.json(),
                "cli": cli_total_tier(case["body"]),
            }
        )

    fixture = {
        "scale": scale.json(),
        "cohort": cohort.json(),
        "sweep": sweep.json(),
        "whatif": whatif,
        "assessments": assessments,
    }
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT_PATH} ({OUT_PATH.stat().st_size} bytes)")


if __name__ == "__main__":
    sys.exit(main())
