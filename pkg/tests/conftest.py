import json

import pytest

from geoquorum.auth import sign_headers
from geoquorum.geo import GeoDesignation
from geoquorum.survey import Catalog, Question, SurveySchema, Tag, load_default_catalog

TEST_KEY = b"test-shared-key"


def make_question(qid, survey_id, labels, multi=True, text=None):
    return Question(
        question_id=qid,
        text=text or qid,
        survey_id=survey_id,
        tags=tuple(Tag(f"{qid}-{lb}", lb, qid) for lb in labels),
        multi_select=multi,
    )


@pytest.fixture(scope="session")
def default_catalog():
    return load_default_catalog()


@pytest.fixture()
def tiny_catalog():
    colors = SurveySchema(
        survey_id="colors",
        name="Colors",
        questions=(
            make_question("favorite", "colors", ["red", "green", "blue"]),
            make_question("brightness", "colors", ["dim", "bright"], multi=False),
        ),
    )
    shapes = SurveySchema(
        survey_id="shapes",
        name="Shapes",
        questions=(
            make_question("kind", "shapes", ["circle", "square", "triangle", "hexagon"]),
        ),
    )
    return Catalog(surveys=(colors, shapes))


@pytest.fixture()
def bloomington():
    return GeoDesignation("usa", "indiana", "bloomington")


def submission_body(catalog, selections, designation, **extra) -> bytes:
    doc = {
        "schema_version": catalog.version,
        "selections": sorted(selections),
        "designation": designation.as_dict(),
    }
    doc.update(extra)
    # as_dict carries explicit None for absent levels; the wire format omits them
    doc["designation"] = {k: v for k, v in doc["designation"].items() if v is not None}
    return json.dumps(doc).encode("utf-8")


def signed(body: bytes, key: bytes = TEST_KEY, **kwargs) -> dict:
    return sign_headers(key, body, **kwargs)
