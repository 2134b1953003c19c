import json
import random

import pytest
from fastapi.testclient import TestClient

from geoquorum import analytics
from geoquorum.config import AppConfig
from geoquorum.service import create_app
from geoquorum.store import load_export_jsonl

from conftest import TEST_KEY, signed, submission_body
from wire_checks import coordinate_findings, found_forbidden_keys


@pytest.fixture()
def client():
    app = create_app(AppConfig(shared_key=TEST_KEY.decode(), k=5), rng=random.Random(7))
    with TestClient(app) as c:
        c.catalog = app.state.service.catalog
        yield c


def sa_tags(catalog, n, offset=0):
    survey = catalog.survey("sexual-activity")
    multi = [t.tag_id for q in survey.questions if q.multi_select for t in q.tags]
    return multi[offset:offset + n]


def submit(client, body: bytes, key: bytes = TEST_KEY):
    return client.post("/api/v1/reports", content=body, headers=signed(body, key))


class TestAuthGate:
    def test_unsigned_submit_rejected(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 3), bloomington)
        resp = client.post("/api/v1/reports", content=body)
        assert resp.status_code == 401
        assert resp.json()["code"] == "BAD_MAC"

    def test_replayed_request_rejected(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 3), bloomington)
        headers = signed(body)
        first = client.post("/api/v1/reports", content=body, headers=headers)
        assert first.status_code == 202
        second = client.post("/api/v1/reports", content=body, headers=headers)
        assert second.status_code == 401
        assert second.json()["code"] == "REPLAY"

    def test_stale_request_rejected(self, client, bloomington):
        import time
        body = submission_body(client.catalog, sa_tags(client.catalog, 3), bloomington)
        headers = signed(body, now=time.time() - 4000)
        resp = client.post("/api/v1/reports", content=body, headers=headers)
        assert resp.status_code == 401
        assert resp.json()["code"] == "STALE"

    def test_tampered_body_rejected(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 3), bloomington)
        headers = signed(body)
        resp = client.post("/api/v1/reports", content=body + b" ", headers=headers)
        assert resp.status_code == 401
        assert resp.json()["code"] == "BAD_MAC"

    def test_public_routes_need_no_credentials(self, client):
        for path in ("/api/v1/schema", "/api/v1/reports/public",
                     "/api/v1/aggregates/tag-counts", "/api/v1/export", "/health"):
            assert client.get(path).status_code == 200

    def test_schema_install_requires_auth(self, client, tiny_catalog):
        body = json.dumps(tiny_catalog.as_json()).encode()
        assert client.post("/api/v1/schema", content=body).status_code == 401


class TestSubmitFlow:
    def test_below_threshold_pending(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 16), bloomington)
        resp = submit(client, body)
        assert resp.status_code == 202
        assert resp.json() == {"status": "pending"}

    def test_fifth_report_releases_batch(self, client, bloomington):
        for i in range(4):
            body = submission_body(client.catalog, sa_tags(client.catalog, 4, offset=i), bloomington)
            assert submit(client, body).status_code == 202
        body = submission_body(client.catalog, sa_tags(client.catalog, 4, offset=4), bloomington)
        resp = submit(client, body)
        assert resp.status_code == 200
        assert resp.json() == {"status": "released"}
        export = client.get("/api/v1/export").text.strip().splitlines()
        assert len(export) == 5
        assert len({json.loads(line)["released_at"] for line in export}) == 1

    def test_validation_violations_itemized(self, client, bloomington):
        body = submission_body(client.catalog, ["not-a-tag"], bloomington)
        resp = submit(client, body)
        assert resp.status_code == 400
        codes = {v["code"] for v in resp.json()["violations"]}
        assert "unknown-tag" in codes

    def test_lat_field_rejected(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 2), bloomington,
                               lat=39.16, lon=-86.52)
        resp = submit(client, body)
        assert resp.status_code == 400
        elements = {v["element"] for v in resp.json()["violations"]}
        assert {"lat", "lon"} <= elements

    def test_malformed_body_is_parse_error(self, client):
        body = b"{this is not json"
        resp = submit(client, body)
        assert resp.status_code == 400
        assert resp.json()["error"] == "parse"

    def test_response_never_reveals_pool_state(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 5), bloomington)
        resp = submit(client, body)
        assert set(resp.json().keys()) == {"status"}


class TestSchemaRoutes:
    def test_get_schema_shape(self, client):
        doc = client.get("/api/v1/schema").json()
        assert doc["version"] == client.catalog.version
        assert len(doc["surveys"]) == 8
        first = doc["surveys"][0]
        assert {"id", "name", "questions"} <= set(first.keys())

    def test_install_and_hot_swap(self, client, tiny_catalog, bloomington):
        body = json.dumps(tiny_catalog.as_json()).encode()
        resp = client.post("/api/v1/schema", content=body, headers=signed(body))
        assert resp.status_code == 200
        assert resp.json()["version"] == tiny_catalog.version
        assert client.get("/api/v1/schema").json()["version"] == tiny_catalog.version
        # submissions now validate against the new catalog
        sub = submission_body(tiny_catalog, ["favorite-red"], bloomington)
        assert submit(client, sub).status_code == 202

    def test_invalid_catalog_rejected(self, client):
        bad = json.dumps([{"id": "s", "name": "S", "questions": [
            {"id": "q", "text": "q", "tags": [{"id": "t", "label": "only"}]}
        ]}]).encode()
        resp = client.post("/api/v1/schema", content=bad, headers=signed(bad))
        assert resp.status_code == 400
        assert {v["code"] for v in resp.json()["violations"]} == {"too-few-tags"}


class TestPublicReads:
    def fill(self, client, bloomington, batches=2):
        for b in range(batches):
            for i in range(5):
                body = submission_body(
                    client.catalog, sa_tags(client.catalog, 3, offset=b * 5 + i), bloomington
                )
                submit(client, body)

    def test_pagination_ordering(self, client, bloomington):
        self.fill(client, bloomington)
        page1 = client.get("/api/v1/reports/public", params={"page": 1, "page_size": 7}).json()
        page2 = client.get("/api/v1/reports/public", params={"page": 2, "page_size": 7}).json()
        assert page1["total"] == 10
        ids = [r["report_id"] for r in page1["reports"] + page2["reports"]]
        assert len(ids) == 10
        keys = [(r["released_at"], r["report_id"]) for r in page1["reports"] + page2["reports"]]
        assert keys == sorted(keys)

    def test_export_empty_store(self, client):
        assert client.get("/api/v1/export").text == ""
        csv_text = client.get("/api/v1/export", params={"format": "csv"}).text
        assert csv_text.splitlines()[0].startswith("report_id,tags,country")

    def test_export_formats_and_stability(self, client, bloomington):
        self.fill(client, bloomington, batches=1)
        a = client.get("/api/v1/export").text
        b = client.get("/api/v1/export").text
        assert a == b and len(a.strip().splitlines()) == 5
        csv_text = client.get("/api/v1/export", params={"format": "csv"}).text
        assert len(csv_text.strip().splitlines()) == 6  # header + 5


class TestAggregatesEndpoint:
    def test_unknown_aggregate_404(self, client):
        assert client.get("/api/v1/aggregates/nope").status_code == 404

    def test_pipeline_equivalence_tag_counts(self, client, bloomington):
        TestPublicReads().fill(client, bloomington)
        api_counts = client.get("/api/v1/aggregates/tag-counts").json()["counts"]
        exported = load_export_jsonl(client.get("/api/v1/export").text.splitlines())
        offline = analytics.tag_counts(exported)
        assert api_counts == dict(sorted(offline.items()))

    def test_cooccurrence_params(self, client, bloomington):
        TestPublicReads().fill(client, bloomington)
        resp = client.get("/api/v1/aggregates/cooccurrence",
                          params={"question_a": "sa-activity", "question_b": "sa-relationship"})
        assert resp.status_code == 200
        assert {"question_a", "question_b", "base", "cells"} <= set(resp.json().keys())

    def test_geometric_null_route(self, client):
        doc = client.get("/api/v1/aggregates/geometric-null",
                         params={"n_max": 5, "total": 1000}).json()
        assert doc["counts"] == {"1": 516, "2": 258, "3": 129, "4": 65, "5": 32}

    def test_geography_route(self, client, bloomington):
        TestPublicReads().fill(client, bloomington, batches=1)
        doc = client.get("/api/v1/aggregates/geography").json()
        assert doc["rows"] == [{"name": "usa", "count": 5}]


class TestResponseSurface:
    PUBLIC_GETS = [
        "/health",
        "/api/v1/schema",
        "/api/v1/reports/public",
        "/api/v1/aggregates/tag-counts",
        "/api/v1/aggregates/tags-per-report",
        "/api/v1/aggregates/surveys-per-report",
        "/api/v1/aggregates/geography",
        "/api/v1/aggregates/geometric-null",
    ]

    def test_no_forbidden_keys_and_no_pending_leakage(self, client, bloomington):
        # one full batch plus a sub-k remainder that must stay invisible
        TestPublicReads().fill(client, bloomington, batches=1)
        marker_tags = sa_tags(client.catalog, 1, offset=30)
        body = submission_body(client.catalog, marker_tags, bloomington)
        assert submit(client, body).status_code == 202

        for path in self.PUBLIC_GETS:
            doc = client.get(path).json()
            assert found_forbidden_keys(doc) == set(), path
        export_lines = client.get("/api/v1/export").text.strip().splitlines()
        assert len(export_lines) == 5  # the pending 6th is nowhere
        page = client.get("/api/v1/reports/public").json()
        assert page["total"] == 5
        counts = client.get("/api/v1/aggregates/tag-counts").json()["counts"]
        assert marker_tags[0] not in counts  # pending reports invisible to analytics

    def test_accepted_wire_payload_carries_no_coordinates(self, client, bloomington):
        body = submission_body(client.catalog, sa_tags(client.catalog, 16), bloomington)
        assert submit(client, body).status_code in (200, 202)
        assert coordinate_findings(json.loads(body)) == []

    def test_fuzzed_coordinate_payloads_all_rejected(self, client, bloomington):
        rng = random.Random(13)
        coordish_keys = ["lat", "lon", "latitude", "longitude", "lng", "coords",
                         "position", "geo", "geo_point", "location"]
        for trial in range(40):
            doc = json.loads(submission_body(client.catalog,
                                             sa_tags(client.catalog, 3), bloomington))
            key = rng.choice(coordish_keys)
            value = rng.choice([
                rng.uniform(-90, 90),
                [rng.uniform(-90, 90), rng.uniform(-180, 180)],
                f"{rng.uniform(-90, 90):.6f},{rng.uniform(-180, 180):.6f}",
            ])
            if trial % 2 == 0:
                doc[key] = value
            else:
                doc["designation"][key] = value
            body = json.dumps(doc).encode()
            resp = submit(client, body)
            assert resp.status_code == 400, (key, value)

    def test_coordinates_inside_designation_strings_rejected(self, client):
        doc = {
            "schema_version": client.catalog.version,
            "selections": sa_tags(client.catalog, 2),
            "designation": {"country": "39.16,-86.52", "resolution": "country"},
        }
        body = json.dumps(doc).encode()
        resp = submit(client, body)
        assert resp.status_code == 400


class TestFailureMapping:
    def test_storage_failure_is_503(self, client, bloomington, monkeypatch):
        from geoquorum.release import StorageError

        def boom(report, now):
            raise StorageError("disk gone")

        monkeypatch.setattr(client.app.state.service.engine, "enqueue", boom)
        body = submission_body(client.catalog, sa_tags(client.catalog, 2), bloomington)
        resp = submit(client, body)
        assert resp.status_code == 503
        assert resp.json() == {"error": "storage"}

    def test_filtered_tag_counts_params(self, client, bloomington):
        TestPublicReads().fill(client, bloomington, batches=1)
        full = client.get("/api/v1/aggregates/tag-counts").json()["counts"]
        same = client.get("/api/v1/aggregates/tag-counts",
                          params={"country": "usa", "province": "indiana"}).json()["counts"]
        other = client.get("/api/v1/aggregates/tag-counts",
                           params={"country": "italy"}).json()["counts"]
        assert same == full
        assert other == {}
        by_survey = client.get("/api/v1/aggregates/tag-counts",
                               params={"survey": "flirting"}).json()["counts"]
        assert by_survey == {}  # all filled reports used sexual-activity tags
