"""Survey catalog model: surveys contain questions, questions contain tags.

A report is a set of selected tag ids plus a coarse location. Everything a
client may submit is an id defined by the catalog; there is deliberately no
field anywhere in these types that can carry user-authored text.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

from .geo import GeoDesignation, designation_from_payload

MAX_ID_LEN = 80

SUBMISSION_FIELDS = {"schema_version", "selections", "designation"}
DESIGNATION_FIELDS = {"country", "province", "city", "resolution"}


class PayloadError(ValueError):
    """Submission payload is structurally malformed (not merely invalid)."""


@dataclass(frozen=True)
class Tag:
    tag_id: str
    label: str
    question_id: str


@dataclass(frozen=True)
class Question:
    question_id: str
    text: str
    survey_id: str
    tags: tuple[Tag, ...]
    multi_select: bool = True


@dataclass(frozen=True)
class SurveySchema:
    survey_id: str
    name: str
    questions: tuple[Question, ...]

    def tag_ids(self) -> set[str]:
        return {t.tag_id for q in self.questions for t in q.tags}


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    element: str = ""

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "element": self.element}


@dataclass
class Catalog:
    """Immutable-after-load set of surveys plus a content-derived version."""

    surveys: tuple[SurveySchema, ...]
    version: str = ""
    _tag_index: dict[str, Tag] = field(default_factory=dict, repr=False)
    _question_index: dict[str, Question] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.version:
            self.version = catalog_version(self.surveys)
        for s in self.surveys:
            for q in s.questions:
                self._question_index[q.question_id] = q
                for t in q.tags:
                    # last-writer wins here; duplicates are reported by validate_catalog
                    self._tag_index[t.tag_id] = t

    def tag(self, tag_id: str) -> Tag | None:
        return self._tag_index.get(tag_id)

    def question(self, question_id: str) -> Question | None:
        return self._question_index.get(question_id)

    def survey(self, survey_id: str) -> SurveySchema | None:
        for s in self.surveys:
            if s.survey_id == survey_id:
                return s
        return None

    def survey_of_tag(self, tag_id: str) -> str | None:
        t = self._tag_index.get(tag_id)
        if t is None:
            return None
        return self._question_index[t.question_id].survey_id

    def as_json(self) -> list[dict]:
        return [
            {
                "id": s.survey_id,
                "name": s.name,
                "questions": [
                    {
                        "id": q.question_id,
                        "text": q.text,
                        "multi_select": q.multi_select,
                        "tags": [{"id": t.tag_id, "label": t.label} for t in q.tags],
                    }
                    for q in s.questions
                ],
            }
            for s in self.surveys
        ]


@dataclass(frozen=True)
class ReportSubmission:
    """A validated inbound report: tag ids, a coarse designation, nothing else."""

    selections: frozenset[str]
    designation: GeoDesignation
    schema_version: str


def catalog_version(surveys: Iterable[SurveySchema]) -> str:
    """Content-addressed version: any catalog edit yields a new version string."""
    canon = json.dumps(
        Catalog(surveys=tuple(surveys), version="unversioned").as_json(),
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def parse_catalog(doc) -> Catalog:
    """Build a Catalog from the interchange form: a top-level array of surveys."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, list):
        raise PayloadError("catalog document must be a top-level array of surveys")
    surveys = []
    for s in doc:
        questions = []
        for q in s.get("questions", []):
            tags = tuple(
                Tag(tag_id=str(t["id"]), label=str(t["label"]), question_id=str(q["id"]))
                for t in q.get("tags", [])
            )
            questions.append(
                Question(
                    question_id=str(q["id"]),
                    text=str(q["text"]),
                    survey_id=str(s["id"]),
                    tags=tags,
                    multi_select=bool(q.get("multi_select", True)),
                )
            )
        surveys.append(
            SurveySchema(survey_id=str(s["id"]), name=str(s["name"]), questions=tuple(questions))
        )
    return Catalog(surveys=tuple(surveys))


def load_default_catalog() -> Catalog:
    data = resources.files("geoquorum.data").joinpath("catalog.json").read_text("utf-8")
    return parse_catalog(data)


def validate_schema(survey: SurveySchema) -> list[Violation]:
    """Per-survey invariants; violations are data for the caller, not exceptions."""
    out: list[Violation] = []
    if not survey.survey_id:
        out.append(Violation("empty-id", "survey id must be non-empty", survey.name))
    if not survey.questions:
        out.append(Violation("no-questions", "survey needs at least 1 question", survey.survey_id))
    seen_q: set[str] = set()
    for q in survey.questions:
        if q.question_id in seen_q:
            out.append(Violation("duplicate-question-id", "duplicate question id", q.question_id))
        seen_q.add(q.question_id)
        if len(q.tags) < 2:
            out.append(
                Violation("too-few-tags", "question needs >=2 tags", q.question_id)
            )
        for t in q.tags:
            if not t.label.strip():
                out.append(Violation("empty-label", "tag label must be non-empty", t.tag_id))
            if t.question_id != q.question_id:
                out.append(
                    Violation("tag-question-mismatch", "tag owned by another question", t.tag_id)
                )
    return out


def validate_catalog(catalog: Catalog) -> list[Violation]:
    """Catalog-wide invariants: per-survey rules plus cross-survey uniqueness."""
    out: list[Violation] = []
    names: set[str] = set()
    tag_owner: dict[str, str] = {}
    for s in catalog.surveys:
        out.extend(validate_schema(s))
        if s.name in names:
            out.append(Violation("duplicate-survey-name", "duplicate survey name", s.name))
        names.add(s.name)
        for q in s.questions:
            for t in q.tags:
                if t.tag_id in tag_owner:
                    out.append(Violation("duplicate-tag-id", "duplicate tag id", t.tag_id))
                else:
                    tag_owner[t.tag_id] = q.question_id
    return out


def _require_str(value, name: str) -> str:
    if not isinstance(value, str):
        raise PayloadError(f"field {name!r} must be a string")
    if len(value) > MAX_ID_LEN:
        raise PayloadError(f"field {name!r} exceeds {MAX_ID_LEN} characters")
    return value


def parse_submission(payload) -> tuple[ReportSubmission, list[Violation]]:
    """Strict parse of a raw submission payload.

    Unknown fields are reported as violations (they are how free text or raw
    coordinates would be smuggled in); structural garbage raises PayloadError.
    """
    if isinstance(payload, (bytes, str)):
        try:
            payload = json.loads(payload)
        except json.JSONDecodeError as e:
            raise PayloadError(f"body is not valid JSON: {e}") from e
    if not isinstance(payload, Mapping):
        raise PayloadError("submission must be a JSON object")

    violations: list[Violation] = []
    for key in payload:
        if key not in SUBMISSION_FIELDS:
            violations.append(Violation("unknown-field", "unknown field", str(key)))

    raw_desig = payload.get("designation")
    if not isinstance(raw_desig, Mapping):
        raise PayloadError("designation must be a JSON object")
    for key in raw_desig:
        if key not in DESIGNATION_FIELDS:
            violations.append(Violation("unknown-field", "unknown field", f"designation.{key}"))

    selections = payload.get("selections")
    if not isinstance(selections, (list, tuple)):
        raise PayloadError("selections must be an array of tag ids")
    tag_ids = frozenset(_require_str(t, "selections[]") for t in selections)

    version = _require_str(payload.get("schema_version", ""), "schema_version")

    try:
        designation = designation_from_payload(
            {k: v for k, v in raw_desig.items() if k in DESIGNATION_FIELDS}
        )
    except ValueError as e:
        raise PayloadError(str(e)) from e

    return ReportSubmission(tag_ids, designation, version), violations


def validate_submission(sub: ReportSubmission, catalog: Catalog) -> list[Violation]:
    """Semantic checks against the catalog; order-insensitive over selections."""
    out: list[Violation] = []
    if sub.schema_version != catalog.version:
        out.append(
            Violation("schema-version-mismatch", "submission built against a different catalog",
                      sub.schema_version)
        )
    if not sub.selections:
        out.append(Violation("empty-selections", "at least one tag must be selected"))
    per_question: dict[str, int] = {}
    for tag_id in sorted(sub.selections):
        tag = catalog.tag(tag_id)
        if tag is None:
            out.append(Violation("unknown-tag", "tag not in catalog", tag_id))
            continue
        per_question[tag.question_id] = per_question.get(tag.question_id, 0) + 1
    for qid, n in sorted(per_question.items()):
        q = catalog.question(qid)
        if q is not None and not q.multi_select and n > 1:
            out.append(
                Violation("single-select", "question allows at most one tag", qid)
            )
    return out


def check_submission(payload, catalog: Catalog) -> tuple[ReportSubmission | None, list[Violation]]:
    """Parse + validate in one step; PayloadError propagates, violations collect."""
    sub, violations = parse_submission(payload)
    violations.extend(validate_submission(sub, catalog))
    if violations:
        return None, violations
    return sub, []


def surveys_in_report(selections: Iterable[str], catalog: Catalog) -> set[str]:
    """Distinct surveys owning the selected tags. Unknown tags are an error."""
    out: set[str] = set()
    for tag_id in selections:
        sid = catalog.survey_of_tag(tag_id)
        if sid is None:
            raise KeyError(f"unknown tag id: {tag_id}")
        out.add(sid)
    return out
