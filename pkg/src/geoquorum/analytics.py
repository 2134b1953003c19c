"""Aggregate statistics over released reports.

Everything here is a pure function of the public report set, so running on a
live store and on its export must produce identical output. Pending reports
are invisible to analytics by construction: they are never handed in.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .release import PublicReport
from .survey import Catalog, surveys_in_report


@dataclass(frozen=True)
class ReportFilter:
    """Restrict to reports under a designation and/or tags of one survey."""

    country: str | None = None
    province: str | None = None
    city: str | None = None
    survey_id: str | None = None

    def matches(self, report: PublicReport) -> bool:
        d = report.designation
        if self.country is not None and d.country != self.country:
            return False
        if self.province is not None and d.province != self.province:
            return False
        if self.city is not None and d.city != self.city:
            return False
        return True


@dataclass
class CooccurrenceTable:
    question_a: str
    question_b: str
    cells: dict[tuple[str, str], int]
    base: int
    b_totals: dict[str, int] = field(default_factory=dict)

    def cell(self, tag_a: str, tag_b: str) -> int:
        return self.cells.get((tag_a, tag_b), 0)

    def given_percentages(self) -> dict[tuple[str, str], float]:
        """Share of base reports selecting tag_b that also selected tag_a."""
        return {
            (a, b): (count / self.b_totals[b] if self.b_totals.get(b) else 0.0)
            for (a, b), count in self.cells.items()
        }

    def as_dict(self) -> dict:
        pct = self.given_percentages()
        return {
            "question_a": self.question_a,
            "question_b": self.question_b,
            "base": self.base,
            "cells": [
                {
                    "tag_a": a,
                    "tag_b": b,
                    "count": count,
                    "percent_given_b": round(100.0 * pct[(a, b)], 2),
                }
                for (a, b), count in sorted(self.cells.items())
            ],
        }


@dataclass
class DistributionSummary:
    count: int
    mean: float | None
    percentiles: dict[int, float]
    cdf: list[tuple[int, float]]  # (value, cumulative fraction), monotone, ends at 1.0

    def fraction_over(self, threshold: int) -> float:
        if self.count == 0:
            return 0.0
        covered = 0.0
        for value, cum in self.cdf:
            if value <= threshold:
                covered = cum
            else:
                break
        return 1.0 - covered

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "percentiles": {str(k): v for k, v in self.percentiles.items()},
            "cdf": [{"value": v, "cumulative": c} for v, c in self.cdf],
        }


def tag_counts(reports: Iterable[PublicReport], *, report_filter: ReportFilter | None = None,
               catalog: Catalog | None = None) -> dict[str, int]:
    """Per-tag report counts (a tag counts once per report containing it)."""
    survey_tags: set[str] | None = None
    if report_filter is not None and report_filter.survey_id is not None:
        if catalog is None:
            raise ValueError("survey filter requires a catalog")
        survey = catalog.survey(report_filter.survey_id)
        if survey is None:
            raise KeyError(f"unknown survey: {report_filter.survey_id}")
        survey_tags = survey.tag_ids()
    counts: Counter[str] = Counter()
    for r in reports:
        if report_filter is not None and not report_filter.matches(r):
            continue
        for tag in r.selections:
            if survey_tags is None or tag in survey_tags:
                counts[tag] += 1
    return dict(counts)


def cooccurrence(reports: Iterable[PublicReport], catalog: Catalog,
                 question_a: str, question_b: str) -> CooccurrenceTable:
    """Pairwise tag counts between two questions, conditioned per report."""
    if question_a == question_b:
        raise ValueError("questions must differ")
    qa = catalog.question(question_a)
    qb = catalog.question(question_b)
    if qa is None:
        raise KeyError(f"unknown question: {question_a}")
    if qb is None:
        raise KeyError(f"unknown question: {question_b}")
    tags_a = {t.tag_id for t in qa.tags}
    tags_b = {t.tag_id for t in qb.tags}

    cells: Counter[tuple[str, str]] = Counter()
    b_totals: Counter[str] = Counter()
    base = 0
    for r in reports:
        sel_a = r.selections & tags_a
        sel_b = r.selections & tags_b
        if not sel_a or not sel_b:
            continue
        base += 1
        for b in sel_b:
            b_totals[b] += 1
        for a in sel_a:
            for b in sel_b:
                cells[(a, b)] += 1
    return CooccurrenceTable(question_a, question_b, dict(cells), base, dict(b_totals))


def tags_per_report(reports: Iterable[PublicReport]) -> DistributionSummary:
    sizes = sorted(len(r.selections) for r in reports)
    n = len(sizes)
    if n == 0:
        return DistributionSummary(count=0, mean=None, percentiles={}, cdf=[])
    mean = sum(sizes) / n
    cdf: list[tuple[int, float]] = []
    seen = 0
    for v in sizes:
        seen += 1
        if cdf and cdf[-1][0] == v:
            cdf[-1] = (v, seen / n)
        else:
            cdf.append((v, seen / n))
    percentiles = {}
    for p in (25, 50, 75, 90, 95, 99):
        idx = min(n - 1, max(0, int(p / 100 * n + 0.5) - 1))
        percentiles[p] = float(sizes[idx])
    return DistributionSummary(count=n, mean=mean, percentiles=percentiles, cdf=cdf)


def surveys_per_report(reports: Iterable[PublicReport], catalog: Catalog) -> dict[int, int]:
    """Histogram of how many distinct surveys each report answered."""
    hist: Counter[int] = Counter()
    for r in reports:
        hist[len(surveys_in_report(r.selections, catalog))] += 1
    return dict(hist)


def geometric_null(n_max: int, total: int) -> dict[int, int]:
    """Half-as-many-per-extra-survey null model, apportioned to integers.

    count(n) is proportional to 2^-n; largest-remainder rounding keeps the
    counts integral and summing exactly to total.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if total < 0:
        raise ValueError("total must be >= 0")
    weights = [Fraction(1, 2 ** n) for n in range(1, n_max + 1)]
    denom = sum(weights)
    quotas = [total * w / denom for w in weights]
    counts = [int(q) for q in quotas]
    remainder = total - sum(counts)
    by_remainder = sorted(range(n_max), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in by_remainder[:remainder]:
        counts[i] += 1
    return {n + 1: counts[n] for n in range(n_max)}


def geography_counts(reports: Iterable[PublicReport], level: str = "country",
                     within_country: str | None = None) -> list[tuple[str, int]]:
    """Ranked (name, count) table at country level or province level in one country."""
    counts: Counter[str] = Counter()
    if level == "country":
        for r in reports:
            counts[r.designation.country] += 1
    elif level == "province":
        if within_country is None:
            raise ValueError("province level requires within_country")
        for r in reports:
            d = r.designation
            if d.country == within_country and d.province is not None:
                counts[d.province] += 1
    else:
        raise ValueError(f"unknown level: {level}")
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))

