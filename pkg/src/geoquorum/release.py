"""Geo-temporal k-anonymous release.

Incoming reports wait, timestamp-less, in a pool keyed by their exact
designation. When a pool reaches the k threshold for its resolution, the
whole pool drains into one batch: every report gets the same truncated
release timestamp and the batch order is a fresh random permutation. Arrival
times and arrival order are destroyed by construction; the only time that
survives anywhere is the shared, truncated released_at.

Optionally, pools that have sat unreleased for too long can be escalated:
their reports are coarsened one resolution level and re-pooled under the
parent designation, trading location precision for release liveness.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .geo import GeoDesignation, Resolution, coarsen

if TYPE_CHECKING:
    from .store import StateStore


@dataclass(frozen=True)
class ReleasePolicy:
    k: int = 5
    k_city: int | None = None
    k_province: int | None = None
    k_country: int | None = None
    granularity_seconds: int = 86400
    escalation_after: int | None = None  # granularity units a pool may sit before coarsening

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.granularity_seconds <= 0:
            raise ValueError("granularity must be positive")
        for name in ("k_city", "k_province", "k_country"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.escalation_after is not None and self.escalation_after < 1:
            raise ValueError("escalation_after must be >= 1")

    def effective_k(self, resolution: Resolution) -> int:
        override = {
            Resolution.CITY: self.k_city,
            Resolution.PROVINCE: self.k_province,
            Resolution.COUNTRY: self.k_country,
        }[resolution]
        return override if override is not None else self.k

    def truncate(self, now: float) -> float:
        return (int(now) // self.granularity_seconds) * self.granularity_seconds


@dataclass(frozen=True)
class PendingReport:
    # no timestamp field: arrival time must be unrepresentable on this type
    report_id: str
    selections: frozenset[str]
    designation: GeoDesignation


@dataclass(frozen=True)
class PublicReport:
    report_id: str
    selections: frozenset[str]
    designation: GeoDesignation
    released_at: float  # epoch seconds, truncated to policy granularity


@dataclass(frozen=True)
class ReleaseBatch:
    designation: GeoDesignation
    reports: tuple[PublicReport, ...]
    released_at: float


@dataclass(frozen=True)
class EscalationMove:
    report_id: str
    source: GeoDesignation
    target: GeoDesignation


@dataclass
class EscalationResult:
    moves: list[EscalationMove] = field(default_factory=list)
    batches: list[ReleaseBatch] = field(default_factory=list)


class StorageError(RuntimeError):
    """Store-level failure; the affected report stays unacknowledged."""


class ReleaseEngine:
    """Pool, threshold-check and drain. Linearizable per designation key."""

    def __init__(self, store: "StateStore", policy: ReleasePolicy,
                 rng: random.Random | None = None):
        self.store = store
        self.policy = policy
        self._rng = rng if rng is not None else random.Random()
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, key: str) -> threading.Lock:
        with self._locks_guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = threading.Lock()
            return lock

    def enqueue(self, report: PendingReport, now: float) -> ReleaseBatch | None:
        """Add to the report's pool; drain the whole pool if it reached k.

        The check-and-drain is atomic per designation, so concurrent
        submitters cannot observe or create a sub-k release.
        """
        key = report.designation.key()
        with self._lock_for(key):
            self.store.add_pending(report, pool_since=self.policy.truncate(now))
            pool = self.store.pool_reports(key)
            k = self.policy.effective_k(report.designation.resolution)
            if len(pool) < k:
                return None
            return self._drain(key, report.designation, pool, now)

    def _drain(self, key: str, designation: GeoDesignation,
               pool: list[PendingReport], now: float) -> ReleaseBatch:
        released_at = self.policy.truncate(now)
        shuffled = list(pool)
        self._rng.shuffle(shuffled)
        batch = ReleaseBatch(
            designation=designation,
            reports=tuple(
                PublicReport(r.report_id, r.selections, r.designation, released_at)
                for r in shuffled
            ),
            released_at=released_at,
        )
        self.store.publish_batch(key, batch)
        return batch

    def pending_count(self, designation: GeoDesignation) -> int:
        """Pool size for operators only; never expose this on a public surface."""
        return self.store.pending_count(designation.key())

    def escalate_stale(self, now: float) -> EscalationResult:
        """Coarsen every over-age pool one level and re-pool under the parent.

        No-op unless the policy enables escalation. COUNTRY pools have no
        parent and stay put.
        """
        result = EscalationResult()
        if self.policy.escalation_after is None:
            return result
        max_age = self.policy.escalation_after * self.policy.granularity_seconds
        for key, pool_since in sorted(self.store.pools().items()):
            if now - pool_since <= max_age:
                continue
            with self._lock_for(key):
                pool = self.store.pool_reports(key)
                if not pool:
                    continue
                resolution = pool[0].designation.resolution
                parent_res = resolution.parent()
                if parent_res is None:
                    continue
                self.store.remove_pool(key)
            for report in pool:
                target = coarsen(report.designation, parent_res)
                moved = PendingReport(report.report_id, report.selections, target)
                result.moves.append(EscalationMove(report.report_id, report.designation, target))
                batch = self.enqueue(moved, now)
                if batch is not None:
                    result.batches.append(batch)
        return result

    def serialize_state(self) -> dict:
        """Full engine state for audit: must contain no per-report time anywhere."""
        return self.store.serialize_state()
