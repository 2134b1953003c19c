"""Discrete-event simulation of the release pipeline.

Poisson arrivals per designation drive a real release engine over a virtual
clock; the simulator keeps its own arrival times (the engine never sees
them) and reports how long reports sat in limbo before their batch went out.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field

from .geo import GeoDesignation
from .release import PendingReport, ReleasePolicy, ReleaseEngine
from .store import MemoryStore

DAY = 86400.0


@dataclass(frozen=True)
class DesignationRate:
    designation: GeoDesignation
    rate_per_day: float

    def __post_init__(self):
        if self.rate_per_day < 0:
            raise ValueError("rate must be >= 0")


@dataclass(frozen=True)
class ArrivalModel:
    rates: tuple[DesignationRate, ...]
    seed: int = 0


@dataclass
class DesignationStats:
    designation: dict
    arrivals: int = 0
    released: int = 0
    pending_at_horizon: int = 0
    mean_latency_days: float | None = None
    median_latency_days: float | None = None
    max_latency_days: float | None = None
    fraction_pending: float = 0.0


@dataclass
class LatencyReport:
    horizon_days: float
    seed: int
    k: int
    per_designation: dict[str, DesignationStats] = field(default_factory=dict)
    total_arrivals: int = 0
    total_released: int = 0
    total_pending: int = 0
    mean_latency_days: float | None = None

    def as_dict(self) -> dict:
        return {
            "horizon_days": self.horizon_days,
            "seed": self.seed,
            "k": self.k,
            "total_arrivals": self.total_arrivals,
            "total_released": self.total_released,
            "total_pending": self.total_pending,
            "mean_latency_days": self.mean_latency_days,
            "per_designation": {
                key: {
                    "designation": s.designation,
                    "arrivals": s.arrivals,
                    "released": s.released,
                    "pending_at_horizon": s.pending_at_horizon,
                    "mean_latency_days": s.mean_latency_days,
                    "median_latency_days": s.median_latency_days,
                    "max_latency_days": s.max_latency_days,
                    "fraction_pending": s.fraction_pending,
                }
                for key, s in sorted(self.per_designation.items())
            },
        }


def load_simulation_config(doc) -> tuple[ArrivalModel, ReleasePolicy, float]:
    """Parse {designations, k/k_*, granularity?, escalation_after?, horizon_days, seed}."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    rates = tuple(
        DesignationRate(
            designation=GeoDesignation(
                country=d["country"], province=d.get("province"), city=d.get("city")
            ),
            rate_per_day=float(d["rate_per_day"]),
        )
        for d in doc["designations"]
    )
    policy = ReleasePolicy(
        k=int(doc.get("k", 5)),
        k_city=doc.get("k_city"),
        k_province=doc.get("k_province"),
        k_country=doc.get("k_country"),
        granularity_seconds=int(doc.get("granularity_seconds", 86400)),
        escalation_after=doc.get("escalation_after"),
    )
    model = ArrivalModel(rates=rates, seed=int(doc.get("seed", 0)))
    return model, policy, float(doc["horizon_days"])


def simulate(model: ArrivalModel, policy: ReleasePolicy, horizon_days: float,
             seed: int | None = None) -> LatencyReport:
    """Run arrivals against a fresh engine; single-threaded for determinism."""
    if horizon_days <= 0:
        raise ValueError("horizon must be positive")
    run_seed = model.seed if seed is None else seed
    rng = random.Random(run_seed)
    engine = ReleaseEngine(MemoryStore(), policy, rng=random.Random(rng.getrandbits(64)))
    horizon = horizon_days * DAY

    # (time, tiebreak, rate_index); escalation sweeps ride the same clock
    events: list[tuple[float, int, int]] = []
    tiebreak = 0
    for idx, r in enumerate(model.rates):
        if r.rate_per_day <= 0:
            continue
        t = rng.expovariate(r.rate_per_day / DAY)
        heapq.heappush(events, (t, tiebreak, idx))
        tiebreak += 1
    if policy.escalation_after is not None:
        heapq.heappush(events, (float(policy.granularity_seconds), tiebreak, -1))
        tiebreak += 1

    arrival_time: dict[str, float] = {}
    origin: dict[str, str] = {}
    latencies: dict[str, list[float]] = {r.designation.key(): [] for r in model.rates}
    stats = {
        r.designation.key(): DesignationStats(designation=r.designation.as_dict())
        for r in model.rates
    }
    counter = 0

    def record_batch(batch, now: float):
        for pub in batch.reports:
            okey = origin.pop(pub.report_id)
            latencies[okey].append((now - arrival_time.pop(pub.report_id)) / DAY)
            stats[okey].released += 1

    while events:
        t, _, idx = heapq.heappop(events)
        if t > horizon:
            break
        if idx == -1:
            result = engine.escalate_stale(now=t)
            for batch in result.batches:
                record_batch(batch, t)
            heapq.heappush(events, (t + policy.granularity_seconds, tiebreak, -1))
            tiebreak += 1
            continue
        rate = model.rates[idx]
        key = rate.designation.key()
        counter += 1
        report_id = f"sim-{run_seed}-{counter}"
        arrival_time[report_id] = t
        origin[report_id] = key
        stats[key].arrivals += 1
        batch = engine.enqueue(
            PendingReport(report_id, frozenset(("sim-activity",)), rate.designation), now=t
        )
        if batch is not None:
            record_batch(batch, t)
        heapq.heappush(events, (t + rng.expovariate(rate.rate_per_day / DAY), tiebreak, idx))
        tiebreak += 1

    all_lat: list[float] = []
    report = LatencyReport(horizon_days=horizon_days, seed=run_seed, k=policy.k)
    for key, s in stats.items():
        lat = sorted(latencies[key])
        s.pending_at_horizon = s.arrivals - s.released
        s.fraction_pending = (s.pending_at_horizon / s.arrivals) if s.arrivals else 0.0
        if lat:
            s.mean_latency_days = sum(lat) / len(lat)
            s.median_latency_days = lat[len(lat) // 2]
            s.max_latency_days = lat[-1]
        all_lat.extend(lat)
        report.per_designation[key] = s
    report.total_arrivals = sum(s.arrivals for s in stats.values())
    report.total_released = sum(s.released for s in stats.values())
    report.total_pending = report.total_arrivals - report.total_released
    if all_lat:
        report.mean_latency_days = sum(all_lat) / len(all_lat)
    return report


def latency_report_csv_rows(report: LatencyReport):
    yield ["designation", "arrivals", "released", "pending_at_horizon",
           "mean_latency_days", "median_latency_days", "max_latency_days", "fraction_pending"]
    for key, s in sorted(report.per_designation.items()):
        yield [
            key, str(s.arrivals), str(s.released), str(s.pending_at_horizon),
            "" if s.mean_latency_days is None else f"{s.mean_latency_days:.6f}",
            "" if s.median_latency_days is None else f"{s.median_latency_days:.6f}",
            "" if s.max_latency_days is None else f"{s.max_latency_days:.6f}",
            f"{s.fraction_pending:.6f}",
        ]
