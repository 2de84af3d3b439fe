"""HTTP service checks.

Every numeric field is compared against the library function the
endpoint wraps, so the service can reshape but never recompute.
"""

import json

import pytest
from fastapi.testclient import TestClient

from epvaudit.api import create_app
from epvaudit.audit import (
    RELATIVE_RISK_BANNER,
    audit_to_dict,
    build_audit,
)
from epvaudit.cohort import anchor_provenance
from epvaudit.metrics import (
    auc,
    confusion,
    format_ratio,
    row_as_wire_dict,
    sweep,
)
from epvaudit.metrics import metrics as metrics_row
from epvaudit.scale import builtin_scale, score

from conftest import make_assessment


@pytest.fixture()
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def assessment_body(points_by_id, case_id="api-case"):
    return {
        "case_id": case_id,
        "responses": [
            {"item_id": i, "points": points_by_id.get(i, 0)}
            for i in range(1, 21)
        ],
    }


class TestScaleEndpoint:
    def test_builtin_scale_document(self, client):
        response = client.get("/scale/epv")
        assert response.status_code == 200
        document = response.json()
        assert document["schema_version"] == "1"
        assert document["scale_id"] == "EPV"
        assert document["max_total"] == 20
        assert len(document["items"]) == 20
        assert document["items"][0]["max_points"] == 1
        categories = {item["category"] for item in document["items"]}
        assert len(categories) == 5

    def test_unknown_scale_is_404(self, client):
        response = client.get("/scale/nope")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "scale-config"


class TestScoreEndpoint:
    def test_matches_library_scoring(self, client, epv):
        points = {i: (1 if i <= 4 else 0) for i in range(1, 11)}
        points.update({i: None for i in range(11, 21)})
        response = client.post("/score", json=assessment_body(points))
        assert response.status_code == 200
        document = response.json()
        result = score(epv, make_assessment(points, case_id="api-case"))
        assert document["total"] == result.imputed_total == 8
        assert document["tier"] == result.tier == "moderate"
        assert document["answered_points"] == result.answered_points
        assert document["answered_max"] == result.answered_max
        assert document["completeness"] == format_ratio(result.completeness)
        assert document["warnings"] == list(result.warnings)
        assert document["relative_risk_banner"] == RELATIVE_RISK_BANNER
        assert "imputation applied" in document["disclosure"]
        assert len(document["contributions"]) == 20
        assert document["contributions"][10]["missing"] is True

    def test_complete_case_has_no_warnings(self, client):
        response = client.post("/score", json=assessment_body({1: 1, 2: 1}))
        document = response.json()
        assert document["total"] == 2
        assert document["tier"] == "low"
        assert document["warnings"] == []

    def test_all_missing_maps_to_422(self, client):
        body = assessment_body({i: None for i in range(1, 21)})
        response = client.post("/score", json=body)
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "all-missing-blocked"

    def test_malformed_assessment_maps_to_422(self, client):
        response = client.post("/score", json={"responses": "nope"})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "assessment-invalid"

    def test_points_above_item_max_map_to_422(self, client):
        response = client.post("/score", json=assessment_body({1: 5}))
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "assessment-invalid"

    def test_unknown_scale_id_maps_to_404(self, client):
        body = assessment_body({}) | {"scale_id": "mystery"}
        response = client.post("/score", json=body)
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "scale-config"


class TestCohortEndpoints:
    def test_anchor_cohort_registration(self, client):
        response = client.post("/cohorts", json={"source": "anchors"})
        assert response.status_code == 200
        document = response.json()
        assert document["cohort_id"] == "anchors"
        assert document["n_severe"] == 269
        assert document["n_non_severe"] == 812
        assert document["max_total"] == 20

    def test_upload_ids_are_content_addressed(self, client):
        scores = [
            {"score": 12, "label": "severe"},
            {"score": 3, "label": "non_severe"},
        ]
        body = {"source": "upload", "scores": scores}
        first = client.post("/cohorts", json=body).json()
        second = client.post("/cohorts", json=body).json()
        assert first["cohort_id"] == second["cohort_id"]
        assert first["cohort_id"].startswith("u-")
        shuffled = client.post(
            "/cohorts", json={"source": "upload", "scores": scores[::-1]}
        ).json()
        assert shuffled["cohort_id"] == first["cohort_id"]

    def test_bad_source_rejected(self, client):
        response = client.post("/cohorts", json={"source": "???"})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "validation-error"

    def test_malformed_upload_rejected(self, client):
        response = client.post(
            "/cohorts",
            json={"source": "upload", "scores": [{"score": "12"}]},
        )
        assert response.status_code == 422

    def test_unknown_cohort_is_404(self, client):
        response = client.get("/cohorts/ghost/sweep")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "not-found"


class TestSweepEndpoint:
    def test_matches_library_sweep(self, client, anchors_dist):
        client.post("/cohorts", json={"source": "anchors"})
        response = client.get("/cohorts/anchors/sweep")
        assert response.status_code == 200
        document = response.json()
        rows = sweep(anchors_dist)
        assert document["rows"] == [row_as_wire_dict(row) for row in rows]
        assert document["auc"] == format_ratio(auc(rows))
        row10 = document["rows"][10]
        assert row10["tp"] == 129
        assert row10["sensitivity"] == "0.479554"

    def test_identical_requests_identical_bytes(self, client):
        client.post("/cohorts", json={"source": "anchors"})
        first = client.get("/cohorts/anchors/sweep")
        second = client.get("/cohorts/anchors/sweep")
        assert first.content == second.content


class TestWhatIfEndpoint:
    def test_matches_library_metrics(self, client, anchors_dist):
        client.post("/cohorts", json={"source": "anchors"})
        response = client.get("/cohorts/anchors/whatif", params={"cutoff": 10})
        assert response.status_code == 200
        document = response.json()
        cm = confusion(anchors_dist, 10)
        assert document["confusion"] == {
            "tp": cm.tp, "fn": cm.fn, "fp": cm.fp, "tn": cm.tn,
        }
        assert document["metrics"] == row_as_wire_dict(metrics_row(cm, 10))
        assert document["flags"]["fn_majority"] is True
        assert document["flags"]["accuracy_paradox"] is True
        assert "73.1%" in document["flags"]["accuracy_paradox_explanation"]

    def test_cutoff_zero_flags_everyone(self, client):
        client.post("/cohorts", json={"source": "anchors"})
        document = client.get(
            "/cohorts/anchors/whatif", params={"cutoff": 0}
        ).json()
        assert document["confusion"] == {
            "tp": 269, "fn": 0, "fp": 812, "tn": 0,
        }
        assert document["metrics"]["specificity"] == "0.000000"
        assert document["metrics"]["npv"] == "n/a"

    def test_out_of_range_cutoff_maps_to_400(self, client):
        client.post("/cohorts", json={"source": "anchors"})
        response = client.get(
            "/cohorts/anchors/whatif", params={"cutoff": 99}
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "out-of-range"

    def test_missing_cutoff_param_maps_to_422(self, client):
        client.post("/cohorts", json={"source": "anchors"})
        response = client.get("/cohorts/anchors/whatif")
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "invalid-request"


class TestAuditEndpoint:
    def test_matches_library_document(self, client, anchors_dist, epv):
        client.post("/cohorts", json={"source": "anchors"})
        response = client.post(
            "/audit", json={"cohort_id": "anchors", "cost_ratio": 3}
        )
        assert response.status_code == 200
        document = response.json()
        report = build_audit(
            anchors_dist, None, 3.0, epv, provenance=anchor_provenance()
        )
        expected = audit_to_dict(report)
        expected["cohort_id"] = "anchors"
        # normalize via JSON: the wire trip turns tuples into lists
        assert document == json.loads(json.dumps(expected))

    def test_missing_cost_ratio_rejected(self, client):
        client.post("/cohorts", json={"source": "anchors"})
        response = client.post("/audit", json={"cohort_id": "anchors"})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "validation-error"

    def test_unknown_cohort_is_404(self, client):
        response = client.post(
            "/audit", json={"cohort_id": "ghost", "cost_ratio": 3}
        )
        assert response.status_code == 404


class TestErrorEnvelope:
    def test_error_bodies_share_the_schema(self, client):
        for response in (
            client.get("/scale/nope"),
            client.get("/cohorts/ghost/sweep"),
            client.post("/cohorts", json={"source": "???"}),
        ):
            body = response.json()
            assert body["schema_version"] == "1"
            assert set(body["error"]) == {"code", "message"}
