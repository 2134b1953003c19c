"""Synthetic report generation with exact marginals.

Given target counts per country/province/city, per survey, a tags-per-report
distribution target and optional co-occurrence seeding, produce a
deterministic-under-seed set of released reports. Count targets are hit
exactly; distribution targets are calibrated against the actual tag capacity
of each report's surveys so the realized statistics land on the requested
values instead of drifting under clamping.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from statistics import NormalDist

from .geo import GeoDesignation
from .release import PublicReport
from .store import public_report_dict
from .survey import Catalog, Question

_PHI = NormalDist()


class FixtureSpecError(ValueError):
    """Inconsistent generation spec; message lists every conflict found."""

    def __init__(self, conflicts: list[str]):
        super().__init__("inconsistent fixture spec:\n" + "\n".join(f"- {c}" for c in conflicts))
        self.conflicts = conflicts


@dataclass(frozen=True)
class CityTarget:
    name: str
    count: int


@dataclass(frozen=True)
class ProvinceTarget:
    name: str
    count: int
    cities: tuple[CityTarget, ...] = ()


@dataclass(frozen=True)
class CountryTarget:
    name: str
    count: int
    provinces: tuple[ProvinceTarget, ...] = ()


@dataclass(frozen=True)
class TagsTarget:
    mean: float = 16.39
    tail_threshold: int = 80
    tail_fraction: float | None = 0.01


@dataclass(frozen=True)
class CooccurrenceTarget:
    question_a: str
    tag_a: str
    question_b: str
    tag_b: str
    base: int
    pairs: int


@dataclass(frozen=True)
class FixtureSpec:
    total_reports: int
    countries: tuple[CountryTarget, ...]
    survey_counts: dict[str, int]
    tags: TagsTarget = TagsTarget()
    cooccurrence: tuple[CooccurrenceTarget, ...] = ()
    start_date: str = "2026-01-01"
    days: int = 120
    seed: int = 0

    @classmethod
    def from_json(cls, doc) -> "FixtureSpec":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        countries = tuple(
            CountryTarget(
                name=c["name"],
                count=int(c["count"]),
                provinces=tuple(
                    ProvinceTarget(
                        name=p["name"],
                        count=int(p["count"]),
                        cities=tuple(
                            CityTarget(name=ci["name"], count=int(ci["count"]))
                            for ci in p.get("cities", [])
                        ),
                    )
                    for p in c.get("provinces", [])
                ),
            )
            for c in doc["countries"]
        )
        tags_doc = doc.get("tags_per_report", {})
        tags = TagsTarget(
            mean=float(tags_doc.get("mean", 16.39)),
            tail_threshold=int(tags_doc.get("tail_threshold", 80)),
            tail_fraction=(
                float(tags_doc["tail_fraction"]) if tags_doc.get("tail_fraction") is not None
                else None
            ),
        )
        cooc = tuple(
            CooccurrenceTarget(
                question_a=t["question_a"], tag_a=t["tag_a"],
                question_b=t["question_b"], tag_b=t["tag_b"],
                base=int(t["base"]), pairs=int(t["pairs"]),
            )
            for t in doc.get("cooccurrence", [])
        )
        return cls(
            total_reports=int(doc["total_reports"]),
            countries=countries,
            survey_counts={str(k): int(v) for k, v in doc["surveys"].items()},
            tags=tags,
            cooccurrence=cooc,
            start_date=str(doc.get("start_date", "2026-01-01")),
            days=int(doc.get("days", 120)),
            seed=int(doc.get("seed", 0)),
        )


@dataclass
class FixtureBookkeeping:
    """Generator-side ground truth, for checking the output independently."""

    total_reports: int = 0
    surveys_per_report: dict[int, int] = field(default_factory=dict)
    survey_counts: dict[str, int] = field(default_factory=dict)
    country_counts: dict[str, int] = field(default_factory=dict)
    province_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    total_selections: int = 0
    mean_tags: float = 0.0
    frac_over_threshold: float = 0.0
    cooccurrence_achieved: list[dict] = field(default_factory=list)


def _validate_spec(spec: FixtureSpec, catalog: Catalog) -> list[str]:
    conflicts: list[str] = []
    if spec.total_reports < 0:
        conflicts.append("total_reports must be >= 0")
    country_sum = sum(c.count for c in spec.countries)
    if country_sum != spec.total_reports:
        conflicts.append(
            f"country counts sum to {country_sum}, expected total_reports={spec.total_reports}"
        )
    for c in spec.countries:
        psum = sum(p.count for p in c.provinces)
        if psum > c.count:
            conflicts.append(f"province counts for {c.name} sum to {psum} > country count {c.count}")
        for p in c.provinces:
            csum = sum(ci.count for ci in p.cities)
            if csum > p.count:
                conflicts.append(
                    f"city counts for {c.name}/{p.name} sum to {csum} > province count {p.count}"
                )
    n_surveys = len(spec.survey_counts)
    total_slots = sum(spec.survey_counts.values())
    for sid, count in spec.survey_counts.items():
        if catalog.survey(sid) is None:
            conflicts.append(f"unknown survey in spec: {sid}")
        if count < 0:
            conflicts.append(f"negative count for survey {sid}")
        if count > spec.total_reports:
            conflicts.append(
                f"survey {sid} count {count} exceeds total_reports {spec.total_reports}"
            )
    if spec.total_reports > 0:
        if total_slots < spec.total_reports:
            conflicts.append(
                f"survey counts sum to {total_slots} < total_reports {spec.total_reports};"
                " every report answers at least one survey"
            )
        if n_surveys and total_slots > spec.total_reports * n_surveys:
            conflicts.append("survey counts exceed total capacity of distinct surveys per report")
    if spec.tags.mean < 1:
        conflicts.append("tags_per_report.mean must be >= 1")
    if spec.tags.tail_fraction is not None and not 0 <= spec.tags.tail_fraction < 0.5:
        conflicts.append("tail_fraction must be in [0, 0.5)")
    if spec.days < 1:
        conflicts.append("days must be >= 1")
    for t in spec.cooccurrence:
        qa, qb = catalog.question(t.question_a), catalog.question(t.question_b)
        if qa is None or qb is None:
            conflicts.append(f"unknown question in cooccurrence target: {t.question_a}/{t.question_b}")
            continue
        if qa.survey_id != qb.survey_id:
            conflicts.append("cooccurrence target questions must belong to one survey")
            continue
        if t.tag_a not in {x.tag_id for x in qa.tags} or t.tag_b not in {x.tag_id for x in qb.tags}:
            conflicts.append(f"cooccurrence tags not owned by target questions: {t.tag_a}/{t.tag_b}")
        if t.pairs > t.base:
            conflicts.append(f"cooccurrence pairs {t.pairs} > base {t.base}")
        owner_count = spec.survey_counts.get(qa.survey_id, 0)
        if t.base > owner_count:
            conflicts.append(
                f"cooccurrence base {t.base} exceeds survey count {owner_count} for {qa.survey_id}"
            )
    return conflicts


def _geometric_multiplicities(n: int, slots: int, n_surveys: int, rng: random.Random) -> list[int]:
    """Per-report survey multiplicities: geometric-shaped, summing exactly to slots."""
    if slots == n:
        out = [1] * n
        rng.shuffle(out)
        return out
    mean_m = slots / n

    def geo_mean(r: float) -> float:
        weights = [r ** (k - 1) for k in range(1, n_surveys + 1)]
        return sum(k * w for k, w in zip(range(1, n_surveys + 1), weights)) / sum(weights)

    lo, hi = 1e-9, 60.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if geo_mean(mid) < mean_m:
            lo = mid
        else:
            hi = mid
    r = (lo + hi) / 2
    weights = [r ** (k - 1) for k in range(1, n_surveys + 1)]
    total_w = sum(weights)
    quotas = [n * w / total_w for w in weights]
    counts = [int(q) for q in quotas]
    for i in sorted(range(n_surveys), key=lambda i: (-(quotas[i] - counts[i]), i))[: n - sum(counts)]:
        counts[i] += 1
    # rounding can perturb the slot total by a few; repair with single-step moves
    slot_sum = sum((k + 1) * c for k, c in enumerate(counts))
    while slot_sum < slots:
        k = max((k for k in range(n_surveys - 1) if counts[k] > 0),
                key=lambda k: counts[k])
        counts[k] -= 1
        counts[k + 1] += 1
        slot_sum += 1
    while slot_sum > slots:
        k = max((k for k in range(1, n_surveys) if counts[k] > 0),
                key=lambda k: counts[k])
        counts[k] -= 1
        counts[k - 1] += 1
        slot_sum -= 1
    out = [k + 1 for k, c in enumerate(counts) for _ in range(c)]
    rng.shuffle(out)
    return out


def _assign_surveys(multiplicities: list[int], survey_counts: dict[str, int]) -> list[tuple[str, ...]]:
    """Realize exact per-survey report counts for the given multiplicities."""
    order = {sid: i for i, sid in enumerate(survey_counts)}
    remaining = dict(survey_counts)
    assigned: list[tuple[str, ...] | None] = [None] * len(multiplicities)
    for idx in sorted(range(len(multiplicities)), key=lambda i: -multiplicities[i]):
        m = multiplicities[idx]
        available = sorted(
            (s for s, c in remaining.items() if c > 0),
            key=lambda s: (-remaining[s], order[s]),
        )
        if len(available) < m:
            raise FixtureSpecError(
                [f"cannot place a report answering {m} distinct surveys; counts too concentrated"]
            )
        chosen = tuple(available[:m])
        for s in chosen:
            remaining[s] -= 1
        assigned[idx] = chosen
    return assigned  # type: ignore[return-value]


def _expand_designations(spec: FixtureSpec) -> list[GeoDesignation]:
    out: list[GeoDesignation] = []
    for c in spec.countries:
        placed_c = 0
        for p in c.provinces:
            placed_p = 0
            for ci in p.cities:
                out.extend([GeoDesignation(c.name, p.name, ci.name)] * ci.count)
                placed_p += ci.count
            out.extend([GeoDesignation(c.name, p.name)] * (p.count - placed_p))
            placed_c += p.count
        out.extend([GeoDesignation(c.name)] * (c.count - placed_c))
    return out


def _capped_mean(mu: float, sigma: float, cap: float) -> float:
    """E[min(X, cap)] for X ~ lognormal(mu, sigma)."""
    lncap = math.log(cap)
    body = math.exp(mu + sigma * sigma / 2) * _PHI.cdf((lncap - mu - sigma * sigma) / sigma)
    return body + cap * (1 - _PHI.cdf((lncap - mu) / sigma))


def _calibrate(target: TagsTarget, caps: Counter, n: int) -> tuple[float, float]:
    """Find lognormal (mu, sigma) whose capacity-clamped stats hit the targets."""
    conflicts: list[str] = []
    if target.tail_fraction:
        thr = target.tail_threshold
        n_big = sum(c for cap, c in caps.items() if cap > thr)
        if n_big == 0:
            raise FixtureSpecError(
                [f"tail target over {thr} tags is unreachable: no report has capacity above it"]
            )
        if target.mean >= thr:
            raise FixtureSpecError(["tags mean target must be below the tail threshold"])
        p = min(0.45, target.tail_fraction * n / n_big)
        m0 = target.mean
        mu = sigma = 0.0
        for _ in range(60):
            z = _PHI.inv_cdf(1 - p)
            disc = z * z - 2 * (math.log(thr) - math.log(m0))
            if disc <= 0:
                raise FixtureSpecError(
                    ["tags mean and tail targets are jointly unreachable (no lognormal fits)"]
                )
            sigma = z - math.sqrt(disc)
            mu = math.log(thr) - z * sigma
            mean_est = sum(c * _capped_mean(mu, sigma, cap) for cap, c in caps.items()) / n
            tail_p = 1 - _PHI.cdf((math.log(thr) - mu) / sigma)
            frac_est = tail_p * n_big / n
            m0 *= target.mean / mean_est
            p = min(0.45, p * target.tail_fraction / max(frac_est, 1e-12))
        mean_est = sum(c * _capped_mean(mu, sigma, cap) for cap, c in caps.items()) / n
        if abs(mean_est - target.mean) > 0.05 * target.mean:
            conflicts.append(
                f"could not calibrate tag distribution: reachable mean {mean_est:.2f}"
                f" vs target {target.mean:.2f} (capacities too small?)"
            )
        if conflicts:
            raise FixtureSpecError(conflicts)
        return mu, sigma
    sigma = 0.8
    mu = math.log(target.mean) - sigma * sigma / 2
    for _ in range(40):
        mean_est = sum(c * _capped_mean(mu, sigma, cap) for cap, c in caps.items()) / n
        mu += math.log(target.mean / mean_est)
    return mu, sigma


def _question_capacity(q: Question) -> int:
    return len(q.tags) if q.multi_select else 1


def generate_fixture(spec: FixtureSpec, catalog: Catalog) -> tuple[list[PublicReport], FixtureBookkeeping]:
    conflicts = _validate_spec(spec, catalog)
    if conflicts:
        raise FixtureSpecError(conflicts)
    rng = random.Random(spec.seed)
    n = spec.total_reports
    book = FixtureBookkeeping(total_reports=n)
    if n == 0:
        return [], book

    designations = _expand_designations(spec)
    rng.shuffle(designations)

    multiplicities = _geometric_multiplicities(
        n, sum(spec.survey_counts.values()), len(spec.survey_counts), rng
    )
    surveys_by_report = _assign_surveys(multiplicities, spec.survey_counts)

    # co-occurrence roles: per target, which reports form the base and the pair
    roles: list[dict[int, str]] = []
    for t in spec.cooccurrence:
        survey_id = catalog.question(t.question_a).survey_id
        eligible = [i for i in range(n) if survey_id in surveys_by_report[i]]
        if len(eligible) < t.base:
            raise FixtureSpecError(
                [f"cooccurrence base {t.base} exceeds the {len(eligible)} reports"
                 f" assigned to survey {survey_id}"]
            )
        base_idx = rng.sample(eligible, t.base)
        pair_idx = set(rng.sample(base_idx, t.pairs))
        role_map: dict[int, str] = {i: "excluded" for i in eligible}
        for i in base_idx:
            role_map[i] = "pair" if i in pair_idx else "base"
        roles.append(role_map)

    # per-report tag capacity, after co-occurrence question carve-outs
    constrained: dict[int, list[tuple[CooccurrenceTarget, str]]] = {}
    for t, role_map in zip(spec.cooccurrence, roles):
        for i, role in role_map.items():
            constrained.setdefault(i, []).append((t, role))

    def report_capacity(i: int) -> int:
        cap = 0
        removed_q: set[str] = set()
        add = 0
        for t, role in constrained.get(i, []):
            removed_q.update((t.question_a, t.question_b))
            if role in ("base", "pair"):
                add += 2
        for sid in surveys_by_report[i]:
            for q in catalog.survey(sid).questions:
                if q.question_id in removed_q:
                    continue
                cap += _question_capacity(q)
        return cap + add

    caps = Counter(report_capacity(i) for i in range(n))
    mu, sigma = _calibrate(spec.tags, caps, n)

    start = datetime.fromisoformat(spec.start_date).replace(tzinfo=timezone.utc)
    start_epoch = int(start.timestamp()) // 86400 * 86400

    reports: list[PublicReport] = []
    total_sel = 0
    over = 0
    for i in range(n):
        carved: set[str] = set()
        required: list[str] = []
        covered_surveys: set[str] = set()
        for t, role in constrained.get(i, []):
            qa, qb = catalog.question(t.question_a), catalog.question(t.question_b)
            carved.update((qa.question_id, qb.question_id))
            if role == "pair":
                required += [t.tag_a, t.tag_b]
                covered_surveys.add(qa.survey_id)
            elif role == "base":
                la, lb = len(qa.tags), len(qb.tags)
                named = (
                    next(k for k, x in enumerate(qa.tags) if x.tag_id == t.tag_a) * lb
                    + next(k for k, x in enumerate(qb.tags) if x.tag_id == t.tag_b)
                )
                j = rng.randrange(la * lb - 1)
                if j >= named:
                    j += 1
                required += [qa.tags[j // lb].tag_id, qb.tags[j % lb].tag_id]
                covered_surveys.add(qa.survey_id)

        pool: list[str] = []
        survey_slices: dict[str, tuple[int, int]] = {}
        for sid in surveys_by_report[i]:
            lo = len(pool)
            for q in catalog.survey(sid).questions:
                if q.question_id in carved:
                    continue
                if q.multi_select:
                    pool.extend(t.tag_id for t in q.tags)
                else:
                    pool.append(rng.choice(q.tags).tag_id)
            survey_slices[sid] = (lo, len(pool))

        seeds: list[str] = []
        for sid in surveys_by_report[i]:
            if sid in covered_surveys:
                continue
            lo, hi = survey_slices[sid]
            if lo == hi:
                raise FixtureSpecError(
                    [f"survey {sid} has no selectable tags left for report generation"]
                )
            seeds.append(pool[rng.randrange(lo, hi)])

        lower = max(1, len(seeds) + len(required))
        cap = len(pool) + len(required)
        want = round(rng.lognormvariate(mu, sigma))
        want = max(lower, min(cap, want))
        chosen = set(seeds)
        extras_needed = want - len(seeds) - len(required)
        if extras_needed > 0:
            candidates = [t for t in pool if t not in chosen]
            chosen.update(rng.sample(candidates, extras_needed))
        chosen.update(required)

        released = float(start_epoch + rng.randrange(spec.days) * 86400)
        report_id = f"{rng.getrandbits(128):032x}"
        reports.append(PublicReport(report_id, frozenset(chosen), designations[i], released))
        total_sel += len(chosen)
        if len(chosen) > spec.tags.tail_threshold:
            over += 1

    reports.sort(key=lambda r: (r.released_at, r.report_id))

    book.surveys_per_report = dict(sorted(Counter(multiplicities).items()))
    book.survey_counts = dict(Counter(s for owned in surveys_by_report for s in owned))
    book.country_counts = dict(Counter(d.country for d in designations))
    prov: dict[str, dict[str, int]] = {}
    for d in designations:
        if d.province is not None:
            prov.setdefault(d.country, Counter())[d.province] += 1
    book.province_counts = {c: dict(v) for c, v in prov.items()}
    book.total_selections = total_sel
    book.mean_tags = total_sel / n
    book.frac_over_threshold = over / n
    for t, role_map in zip(spec.cooccurrence, roles):
        book.cooccurrence_achieved.append({
            "question_a": t.question_a, "tag_a": t.tag_a,
            "question_b": t.question_b, "tag_b": t.tag_b,
            "base": sum(1 for r in role_map.values() if r in ("base", "pair")),
            "pairs": sum(1 for r in role_map.values() if r == "pair"),
        })
    return reports, book


def fixture_jsonl(reports: list[PublicReport]):
    for r in reports:
        yield json.dumps(public_report_dict(r), sort_keys=True, separators=(",", ":"))
