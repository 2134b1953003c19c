"""Pydantic request/response models for the HTTP API.

The submission model exists for clients and OpenAPI docs; the server parses
the raw body itself so the MAC covers exact bytes and unknown fields are
rejected with itemized violations rather than a framework 422.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict


class DesignationModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    country: str
    province: str | None = None
    city: str | None = None
    resolution: Literal["country", "province", "city"]


class SubmissionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: str
    selections: list[str]
    designation: DesignationModel


class SubmitResponse(BaseModel):
    status: Literal["pending", "released"]


class ViolationModel(BaseModel):
    code: str
    message: str
    element: str = ""


class ValidationErrorResponse(BaseModel):
    error: Literal["validation"] = "validation"
    violations: list[ViolationModel]


class ParseErrorResponse(BaseModel):
    error: Literal["parse"] = "parse"
    detail: str


class AuthErrorResponse(BaseModel):
    error: Literal["auth"] = "auth"
    code: str


class SchemaResponse(BaseModel):
    version: str
    surveys: list[dict]


class PublicReportModel(BaseModel):
    report_id: str
    tags: list[str]
    country: str
    province: str | None
    city: str | None
    resolution: str
    released_at: str


class PublicReportsPage(BaseModel):
    page: int
    page_size: int
    total: int
    reports: list[PublicReportModel]


class GeographyRow(BaseModel):
    name: str
    count: int


class GeographyResponse(BaseModel):
    level: str
    within_country: str | None = None
    rows: list[GeographyRow]
