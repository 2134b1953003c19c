"""HTTP service: authenticated ingestion, open reads.

Every mutating route goes through shared-key MAC verification; every read
route is public. Nothing served here ever exposes pending reports, pool
counts, or any per-report submission time.
"""

from __future__ import annotations

import csv
import io
import json
import random
import secrets
import time

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from . import analytics
from .auth import AuthConfig, NonceCache, verify_request
from .config import AppConfig
from .release import PendingReport, ReleaseEngine, ReleasePolicy, StorageError
from .store import (EXPORT_CSV_HEADER, MemoryStore, SqliteStore, export_csv_rows,
                    export_jsonl, public_report_dict)
from .survey import (Catalog, PayloadError, check_submission, load_default_catalog,
                     parse_catalog, validate_catalog)
from .wire import (AuthErrorResponse, ParseErrorResponse, PublicReportsPage, SchemaResponse,
                   SubmitResponse, ValidationErrorResponse)


class ServiceState:
    def __init__(self, config: AppConfig, rng: random.Random | None = None):
        self.config = config
        self.store = SqliteStore(config.store_path) if config.store_path else MemoryStore()
        self.auth = AuthConfig(
            shared_key=config.shared_key.encode("utf-8"),
            replay_window=config.replay_window,
            nonce_cache_capacity=config.nonce_cache_capacity,
        )
        self.nonces = NonceCache(config.nonce_cache_capacity)
        policy = ReleasePolicy(
            k=config.k,
            k_city=config.k_city,
            k_province=config.k_province,
            k_country=config.k_country,
            granularity_seconds=config.granularity_seconds,
            escalation_after=config.escalation_after,
        )
        self.engine = ReleaseEngine(self.store, policy, rng=rng)
        self.catalog = self._load_catalog()

    def _load_catalog(self) -> Catalog:
        stored = self.store.load_catalog()
        if stored is not None:
            return parse_catalog(stored)
        if self.config.catalog_path:
            with open(self.config.catalog_path, "r", encoding="utf-8") as f:
                return parse_catalog(f.read())
        return load_default_catalog()

    def install_catalog(self, catalog: Catalog) -> None:
        self.store.save_catalog(json.dumps(catalog.as_json()))
        self.catalog = catalog


def _auth_failure(reason: str) -> JSONResponse:
    return JSONResponse(status_code=401, content=AuthErrorResponse(code=reason).model_dump())


def _violations_response(violations) -> JSONResponse:
    body = ValidationErrorResponse(
        violations=[v.as_dict() for v in violations]
    )
    return JSONResponse(status_code=400, content=body.model_dump())


def create_app(config: AppConfig | None = None, *, rng: random.Random | None = None) -> FastAPI:
    state = ServiceState(config or AppConfig(), rng=rng)
    app = FastAPI(title="geoquorum", version="0.1.0")
    app.state.service = state
    # the companion web app lives on another origin; the data is open and
    # auth is header-MAC (no cookies), so wildcard CORS is safe here
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["Content-Type", "X-Auth-Timestamp", "X-Auth-Nonce", "X-Auth-MAC"],
    )

    def check_auth(request: Request, body: bytes):
        return verify_request(request.headers, body, state.auth, now=time.time(),
                              nonce_cache=state.nonces)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/v1/reports", response_model=SubmitResponse, status_code=202, responses={
        200: {"model": SubmitResponse},
        400: {"model": ValidationErrorResponse},
        401: {"model": AuthErrorResponse},
    })
    async def submit_report(request: Request):
        body = await request.body()
        auth = check_auth(request, body)
        if not auth.ok:
            return _auth_failure(auth.reason)
        try:
            sub, violations = check_submission(body, state.catalog)
        except PayloadError as e:
            return JSONResponse(status_code=400,
                                content=ParseErrorResponse(detail=str(e)).model_dump())
        if violations:
            return _violations_response(violations)
        report = PendingReport(
            report_id=secrets.token_hex(16),
            selections=sub.selections,
            designation=sub.designation,
        )
        try:
            batch = state.engine.enqueue(report, now=time.time())
        except StorageError:
            return JSONResponse(status_code=503, content={"error": "storage"})
        if batch is not None:
            return JSONResponse(status_code=200,
                                content=SubmitResponse(status="released").model_dump())
        return JSONResponse(status_code=202,
                            content=SubmitResponse(status="pending").model_dump())

    @app.post("/api/v1/schema", response_model=SchemaResponse)
    async def install_schema(request: Request):
        body = await request.body()
        auth = check_auth(request, body)
        if not auth.ok:
            return _auth_failure(auth.reason)
        try:
            catalog = parse_catalog(body)
        except (PayloadError, json.JSONDecodeError, KeyError, TypeError) as e:
            return JSONResponse(status_code=400,
                                content=ParseErrorResponse(detail=str(e)).model_dump())
        violations = validate_catalog(catalog)
        if violations:
            return _violations_response(violations)
        state.install_catalog(catalog)
        return SchemaResponse(version=catalog.version, surveys=catalog.as_json())

    @app.get("/api/v1/schema", response_model=SchemaResponse)
    def get_schema():
        return SchemaResponse(version=state.catalog.version, surveys=state.catalog.as_json())

    @app.get("/api/v1/reports/public", response_model=PublicReportsPage)
    def public_reports(page: int = Query(1, ge=1), page_size: int = Query(100, ge=1, le=1000)):
        total = state.store.public_count()
        rows = state.store.public_page((page - 1) * page_size, page_size)
        return PublicReportsPage(
            page=page, page_size=page_size, total=total,
            reports=[public_report_dict(r) for r in rows],
        )

    @app.get("/api/v1/aggregates/{name}")
    def aggregate(name: str,
                  country: str | None = None,
                  province: str | None = None,
                  city: str | None = None,
                  survey: str | None = None,
                  question_a: str | None = None,
                  question_b: str | None = None,
                  level: str = "country",
                  n_max: int = 8,
                  total: int | None = None):
        reports = list(state.store.iter_public())
        try:
            if name == "tag-counts":
                report_filter = None
                if any(v is not None for v in (country, province, city, survey)):
                    report_filter = analytics.ReportFilter(
                        country=country, province=province, city=city, survey_id=survey
                    )
                counts = analytics.tag_counts(
                    reports, report_filter=report_filter, catalog=state.catalog
                )
                return {"counts": dict(sorted(counts.items()))}
            if name == "cooccurrence":
                if not question_a or not question_b:
                    return JSONResponse(status_code=400, content={
                        "error": "parse", "detail": "question_a and question_b are required"})
                table = analytics.cooccurrence(reports, state.catalog, question_a, question_b)
                return table.as_dict()
            if name == "tags-per-report":
                return analytics.tags_per_report(reports).as_dict()
            if name == "surveys-per-report":
                hist = analytics.surveys_per_report(reports, state.catalog)
                return {"histogram": {str(k): v for k, v in sorted(hist.items())}}
            if name == "geometric-null":
                counts = analytics.geometric_null(
                    n_max, total if total is not None else len(reports)
                )
                return {"counts": {str(k): v for k, v in counts.items()}}
            if name == "geography":
                rows = analytics.geography_counts(reports, level=level, within_country=country)
                return {"level": level, "within_country": country,
                        "rows": [{"name": n, "count": c} for n, c in rows]}
        except (KeyError, ValueError) as e:
            return JSONResponse(status_code=400, content={"error": "parse", "detail": str(e)})
        return JSONResponse(status_code=404, content={"error": "unknown-aggregate", "name": name})

    @app.get("/api/v1/export")
    def export(format: str = "jsonl"):
        if format == "jsonl":
            def lines():
                for line in export_jsonl(state.store):
                    yield line + "\n"
            return StreamingResponse(lines(), media_type="application/jsonl")
        if format == "csv":
            def csv_stream():
                buf = io.StringIO()
                writer = csv.writer(buf, lineterminator="\n")
                writer.writerow(EXPORT_CSV_HEADER)
                yield buf.getvalue()
                buf.seek(0)
                buf.truncate(0)
                for row in export_csv_rows(state.store):
                    writer.writerow(row)
                    yield buf.getvalue()
                    buf.seek(0)
                    buf.truncate(0)
            return StreamingResponse(csv_stream(), media_type="text/csv")
        return JSONResponse(status_code=400,
                            content={"error": "parse", "detail": f"unknown format: {format}"})

    return app
