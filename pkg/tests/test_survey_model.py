import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from geoquorum.geo import GeoDesignation
from geoquorum.survey import (Catalog, PayloadError, ReportSubmission, SurveySchema,
                              check_submission, parse_catalog, parse_submission,
                              surveys_in_report, validate_catalog, validate_schema,
                              validate_submission)

from conftest import make_question, submission_body


def codes(violations):
    return {v.code for v in violations}


class TestCatalogValidation:
    def test_default_catalog_is_clean(self, default_catalog):
        assert validate_catalog(default_catalog) == []
        assert len(default_catalog.surveys) == 8

    def test_question_with_one_tag_rejected(self):
        s = SurveySchema("s", "S", (make_question("q", "s", ["only"]),))
        assert "too-few-tags" in codes(validate_schema(s))

    def test_duplicate_tag_id_rejected(self):
        q1 = make_question("q1", "s", ["a", "b"])
        q2 = make_question("q1", "s2", ["a", "b"])  # same qid -> same tag ids
        cat = Catalog(surveys=(
            SurveySchema("s", "S", (q1,)),
            SurveySchema("s2", "T", (q2,)),
        ))
        found = codes(validate_catalog(cat))
        assert "duplicate-tag-id" in found

    def test_duplicate_survey_name_rejected(self):
        q1 = make_question("q1", "s", ["a", "b"])
        q2 = make_question("q2", "s2", ["c", "d"])
        cat = Catalog(surveys=(
            SurveySchema("s", "Same", (q1,)),
            SurveySchema("s2", "Same", (q2,)),
        ))
        assert "duplicate-survey-name" in codes(validate_catalog(cat))

    def test_survey_without_questions_rejected(self):
        assert "no-questions" in codes(validate_schema(SurveySchema("s", "S", ())))

    def test_catalog_version_tracks_content(self, tiny_catalog):
        surveys = tiny_catalog.surveys
        altered = Catalog(surveys=surveys[:1])
        assert altered.version != tiny_catalog.version

    def test_catalog_roundtrip_through_interchange_json(self, tiny_catalog):
        doc = json.dumps(tiny_catalog.as_json())
        again = parse_catalog(doc)
        assert again.version == tiny_catalog.version
        assert again.as_json() == tiny_catalog.as_json()


class TestSubmissionValidation:
    def _sub(self, catalog, selections, version=None):
        return ReportSubmission(
            selections=frozenset(selections),
            designation=GeoDesignation("usa", "indiana"),
            schema_version=version if version is not None else catalog.version,
        )

    def test_valid_sixteen_tag_report(self, default_catalog):
        survey = default_catalog.survey("sexual-activity")
        multi_tags = [t.tag_id for q in survey.questions if q.multi_select for t in q.tags]
        sub = self._sub(default_catalog, multi_tags[:16])
        assert validate_submission(sub, default_catalog) == []

    def test_empty_selections(self, tiny_catalog):
        sub = self._sub(tiny_catalog, [])
        assert "empty-selections" in codes(validate_submission(sub, tiny_catalog))

    def test_unknown_tag(self, tiny_catalog):
        sub = self._sub(tiny_catalog, ["favorite-red", "nope"])
        assert "unknown-tag" in codes(validate_submission(sub, tiny_catalog))

    def test_single_select_cardinality(self, tiny_catalog):
        sub = self._sub(tiny_catalog, ["brightness-dim", "brightness-bright"])
        assert "single-select" in codes(validate_submission(sub, tiny_catalog))

    def test_multi_select_allows_many(self, tiny_catalog):
        sub = self._sub(tiny_catalog, ["favorite-red", "favorite-green", "favorite-blue"])
        assert validate_submission(sub, tiny_catalog) == []

    def test_schema_version_mismatch(self, tiny_catalog):
        sub = self._sub(tiny_catalog, ["favorite-red"], version="stale")
        assert "schema-version-mismatch" in codes(validate_submission(sub, tiny_catalog))

    def test_order_insensitive_and_deterministic(self, tiny_catalog):
        a = self._sub(tiny_catalog, ["favorite-red", "kind-circle"])
        b = self._sub(tiny_catalog, ["kind-circle", "favorite-red"])
        r1 = validate_submission(a, tiny_catalog)
        r2 = validate_submission(b, tiny_catalog)
        r3 = validate_submission(a, tiny_catalog)
        assert r1 == r2 == r3 == []


class TestPayloadParsing:
    def test_unknown_top_level_field(self, tiny_catalog, bloomington):
        body = submission_body(tiny_catalog, ["favorite-red"], bloomington, comment="hello")
        _, violations = check_submission(body, tiny_catalog)
        assert ("unknown-field", "comment") in [(v.code, v.element) for v in violations]

    def test_unknown_designation_field(self, tiny_catalog, bloomington):
        doc = json.loads(submission_body(tiny_catalog, ["favorite-red"], bloomington))
        doc["designation"]["lat"] = 39.1
        _, violations = check_submission(json.dumps(doc), tiny_catalog)
        assert ("unknown-field", "designation.lat") in [(v.code, v.element) for v in violations]

    def test_malformed_json_is_parse_error(self, tiny_catalog):
        with pytest.raises(PayloadError):
            parse_submission(b"{not json")

    def test_selections_must_be_array(self, tiny_catalog):
        with pytest.raises(PayloadError):
            parse_submission(json.dumps({
                "schema_version": "x",
                "selections": "favorite-red",
                "designation": {"country": "usa", "resolution": "country"},
            }))

    def test_valid_body_roundtrips(self, tiny_catalog, bloomington):
        body = submission_body(tiny_catalog, ["favorite-red", "kind-circle"], bloomington)
        sub, violations = check_submission(body, tiny_catalog)
        assert violations == []
        assert sub.selections == {"favorite-red", "kind-circle"}
        assert sub.designation == bloomington

    @settings(max_examples=60, deadline=None,
              suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(
        key=st.text(min_size=1, max_size=20).filter(
            lambda s: s not in ("schema_version", "selections", "designation")),
        value=st.one_of(st.text(max_size=40), st.floats(allow_nan=False), st.integers()),
    )
    def test_fuzzed_extra_fields_always_rejected(self, tiny_catalog, key, value):
        # no payload with an injected field may pass validation: that is the
        # only path by which user-authored text could reach storage
        body = {
            "schema_version": tiny_catalog.version,
            "selections": ["favorite-red"],
            "designation": {"country": "usa", "resolution": "country"},
            key: value,
        }
        sub, violations = check_submission(json.dumps(body), tiny_catalog)
        assert sub is None
        assert "unknown-field" in codes(violations)


class TestSurveysInReport:
    def test_single_survey(self, tiny_catalog):
        assert surveys_in_report(["favorite-red", "brightness-dim"], tiny_catalog) == {"colors"}

    def test_two_surveys(self, tiny_catalog):
        got = surveys_in_report(["favorite-red", "kind-circle"], tiny_catalog)
        assert got == {"colors", "shapes"}

    def test_unknown_tag_raises(self, tiny_catalog):
        with pytest.raises(KeyError):
            surveys_in_report(["nope"], tiny_catalog)

    def test_bounds(self, tiny_catalog):
        got = surveys_in_report(["favorite-red", "kind-circle", "kind-square"], tiny_catalog)
        assert 1 <= len(got) <= len(tiny_catalog.surveys)
