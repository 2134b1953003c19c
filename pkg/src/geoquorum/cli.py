"""Command-line entry point: run the service, or act as a thin client of it.

Network-facing commands sign requests with the configured shared key;
offline commands (gen-fixture, simulate, aggregate --from) run the same
code paths the service uses, against local files.
"""

from __future__ import annotations

import csv
import json
import sys

import click
import httpx

from . import analytics
from .auth import sign_headers
from .config import AppConfig, load_config
from .fixtures import FixtureSpec, FixtureSpecError, fixture_jsonl, generate_fixture
from .simulate import latency_report_csv_rows, load_simulation_config, simulate
from .store import SqliteStore, load_export_jsonl
from .survey import load_default_catalog, parse_catalog, validate_catalog


def _config(config_path: str | None, **overrides) -> AppConfig:
    return load_config(config_path, overrides=overrides)


@click.group()
def main():
    """Anonymous geo-tagged survey reports with k-anonymous batch release."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--store", "store_path", default=None, help="SQLite path (default in-memory)")
def serve(config_path, host, port, store_path):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    cfg = _config(config_path, host=host, port=port, store_path=store_path)
    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port)


@main.command("load-schema")
@click.argument("catalog_file", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--url", default=None, help="POST to a running service instead of a local store")
@click.option("--store", "store_path", default=None, help="write into this SQLite store")
def load_schema(catalog_file, config_path, url, store_path):
    """Validate a catalog file and install it for serving."""
    with open(catalog_file, "r", encoding="utf-8") as f:
        raw = f.read()
    catalog = parse_catalog(raw)
    violations = validate_catalog(catalog)
    if violations:
        for v in violations:
            click.echo(f"violation: {v.code} {v.element}: {v.message}", err=True)
        sys.exit(1)
    cfg = _config(config_path, store_path=store_path)
    if url:
        body = json.dumps(catalog.as_json()).encode("utf-8")
        headers = sign_headers(cfg.shared_key.encode("utf-8"), body)
        resp = httpx.post(f"{url.rstrip('/')}/api/v1/schema", content=body, headers=headers)
        resp.raise_for_status()
        click.echo(json.dumps({"version": resp.json()["version"]}))
        return
    if not cfg.store_path:
        raise click.UsageError("load-schema needs --url or a SQLite store (--store/config)")
    store = SqliteStore(cfg.store_path)
    store.save_catalog(json.dumps(catalog.as_json()))
    store.close()
    click.echo(json.dumps({"version": catalog.version, "store": cfg.store_path}))


@main.command("gen-fixture")
@click.argument("spec_file", type=click.Path(exists=True))
@click.option("-o", "--output", required=True, type=click.Path())
@click.option("--summary", "summary_path", type=click.Path(), default=None,
              help="also write generator bookkeeping JSON")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
def gen_fixture(spec_file, output, summary_path, catalog_path):
    """Generate a synthetic released-report file from a marginals spec."""
    with open(spec_file, "r", encoding="utf-8") as f:
        spec = FixtureSpec.from_json(f.read())
    catalog = _load_catalog(catalog_path)
    try:
        reports, book = generate_fixture(spec, catalog)
    except FixtureSpecError as e:
        click.echo(str(e), err=True)
        sys.exit(1)
    with open(output, "w", encoding="utf-8") as f:
        for line in fixture_jsonl(reports):
            f.write(line + "\n")
    if summary_path:
        with open(summary_path, "w", encoding="utf-8") as f:
            json.dump(book.__dict__, f, indent=1, default=str)
    click.echo(json.dumps({"reports": len(reports), "mean_tags": round(book.mean_tags, 3)}))


@main.command("simulate")
@click.argument("config_file", type=click.Path(exists=True))
@click.option("-o", "--output", type=click.Path(), default=None, help="write JSON report")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="write CSV report")
def simulate_cmd(config_file, output, csv_path):
    """Run the limbo-latency simulation described by a config file."""
    with open(config_file, "r", encoding="utf-8") as f:
        model, policy, horizon = load_simulation_config(f.read())
    report = simulate(model, policy, horizon)
    doc = report.as_dict()
    if output:
        with open(output, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=1)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            for row in latency_report_csv_rows(report):
                writer.writerow(row)
    if not output and not csv_path:
        click.echo(json.dumps(doc, indent=1))


def _load_catalog(path: str | None):
    if path:
        with open(path, "r", encoding="utf-8") as f:
            return parse_catalog(f.read())
    return load_default_catalog()


def _reports_from(source_file: str | None, url: str | None):
    if source_file:
        with open(source_file, "r", encoding="utf-8") as f:
            return load_export_jsonl(f)
    if url:
        resp = httpx.get(f"{url.rstrip('/')}/api/v1/export", params={"format": "jsonl"})
        resp.raise_for_status()
        return load_export_jsonl(resp.text.splitlines())
    raise click.UsageError("provide --from <export.jsonl> or --url <service>")


def _aggregate_csv_rows(name, out):
    if name == "tag-counts":
        yield ["tag", "count"]
        for tag, count in out["counts"].items():
            yield [tag, str(count)]
    elif name == "cooccurrence":
        yield ["tag_a", "tag_b", "count", "percent_given_b"]
        for cell in out["cells"]:
            yield [cell["tag_a"], cell["tag_b"], str(cell["count"]),
                   str(cell["percent_given_b"])]
    elif name == "tags-per-report":
        yield ["tags", "cumulative_fraction"]
        for point in out["cdf"]:
            yield [str(point["value"]), f"{point['cumulative']:.6f}"]
    elif name in ("surveys-per-report", "geometric-null"):
        yield ["n_surveys", "count"]
        for n, count in out.get("histogram", out.get("counts", {})).items():
            yield [str(n), str(count)]
    else:
        yield ["name", "count"]
        for row in out["rows"]:
            yield [row["name"], str(row["count"])]


@main.command()
@click.argument("name", type=click.Choice(
    ["tag-counts", "cooccurrence", "tags-per-report", "surveys-per-report",
     "geometric-null", "geography"]))
@click.option("--from", "source_file", type=click.Path(exists=True), default=None)
@click.option("--url", default=None)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--country", default=None)
@click.option("--province", default=None)
@click.option("--survey", default=None)
@click.option("--question-a", default=None)
@click.option("--question-b", default=None)
@click.option("--level", default="country")
@click.option("--n-max", type=int, default=8)
@click.option("--total", type=int, default=None)
@click.option("--csv", "as_csv", is_flag=True, help="emit a CSV table instead of JSON")
def aggregate(name, source_file, url, catalog_path, country, province, survey,
              question_a, question_b, level, n_max, total, as_csv):
    """Compute an aggregate from an export file or a running service."""
    if url and not source_file:
        params = {k: v for k, v in {
            "country": country, "province": province, "survey": survey,
            "question_a": question_a, "question_b": question_b,
            "level": level, "n_max": n_max, "total": total,
        }.items() if v is not None}
        resp = httpx.get(f"{url.rstrip('/')}/api/v1/aggregates/{name}", params=params)
        resp.raise_for_status()
        out = resp.json()
    else:
        reports = _reports_from(source_file, url)
        catalog = _load_catalog(catalog_path)
        if name == "tag-counts":
            report_filter = None
            if any(v is not None for v in (country, province, survey)):
                report_filter = analytics.ReportFilter(country=country, province=province,
                                                       survey_id=survey)
            out = {"counts": dict(sorted(analytics.tag_counts(
                reports, report_filter=report_filter, catalog=catalog).items()))}
        elif name == "cooccurrence":
            if not question_a or not question_b:
                raise click.UsageError("cooccurrence needs --question-a and --question-b")
            out = analytics.cooccurrence(reports, catalog, question_a, question_b).as_dict()
        elif name == "tags-per-report":
            out = analytics.tags_per_report(reports).as_dict()
        elif name == "surveys-per-report":
            hist = analytics.surveys_per_report(reports, catalog)
            out = {"histogram": {str(k): v for k, v in sorted(hist.items())}}
        elif name == "geometric-null":
            out = {"counts": {str(k): v for k, v in analytics.geometric_null(
                n_max, total if total is not None else len(reports)).items()}}
        else:
            rows = analytics.geography_counts(reports, level=level, within_country=country)
            out = {"level": level, "within_country": country,
                   "rows": [{"name": n, "count": c} for n, c in rows]}
    if as_csv:
        writer = csv.writer(click.get_text_stream("stdout"), lineterminator="\n")
        for row in _aggregate_csv_rows(name, out):
            writer.writerow(row)
    else:
        click.echo(json.dumps(out, indent=1))


@main.command()
@click.option("-o", "--output", required=True, type=click.Path())
@click.option("--url", default=None)
@click.option("--store", "store_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl")
def export(output, url, store_path, fmt):
    """Download (or read locally) the full public report set."""
    if url:
        resp = httpx.get(f"{url.rstrip('/')}/api/v1/export", params={"format": fmt})
        resp.raise_for_status()
        with open(output, "w", encoding="utf-8") as f:
            f.write(resp.text)
        click.echo(json.dumps({"written": output}))
        return
    if not store_path:
        raise click.UsageError("provide --url or --store")
    from .store import EXPORT_CSV_HEADER, export_csv_rows, export_jsonl

    store = SqliteStore(store_path)
    with open(output, "w", encoding="utf-8", newline="") as f:
        if fmt == "jsonl":
            for line in export_jsonl(store):
                f.write(line + "\n")
        else:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(EXPORT_CSV_HEADER)
            for row in export_csv_rows(store):
                writer.writerow(row)
    store.close()
    click.echo(json.dumps({"written": output}))


if __name__ == "__main__":
    main()
