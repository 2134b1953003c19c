"""Persistence for the release pipeline.

The pending table carries report_id, selections and designation only: there
is no time column to subpoena. Pool age lives on the pool row (one value per
designation, already truncated), which is the minimum the escalation feature
needs. The public table is append-only and adds the shared released_at.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from datetime import datetime, timezone
from typing import Iterator

from .geo import GeoDesignation
from .release import PendingReport, PublicReport, ReleaseBatch, StorageError


def released_at_str(released_at: float) -> str:
    """ISO-8601 date for day-granularity stamps, full timestamp otherwise."""
    dt = datetime.fromtimestamp(released_at, tz=timezone.utc)
    if released_at % 86400 == 0:
        return dt.date().isoformat()
    return dt.isoformat().replace("+00:00", "Z")


def public_report_dict(r: PublicReport) -> dict:
    d = r.designation
    return {
        "report_id": r.report_id,
        "tags": sorted(r.selections),
        "country": d.country,
        "province": d.province,
        "city": d.city,
        "resolution": d.resolution.value,
        "released_at": released_at_str(r.released_at),
    }


class StateStore:
    """Interface. All methods must be safe under concurrent callers."""

    def add_pending(self, report: PendingReport, pool_since: float) -> None:
        raise NotImplementedError

    def pool_reports(self, key: str) -> list[PendingReport]:
        raise NotImplementedError

    def pending_count(self, key: str) -> int:
        raise NotImplementedError

    def pools(self) -> dict[str, float]:
        raise NotImplementedError

    def remove_pool(self, key: str) -> None:
        raise NotImplementedError

    def publish_batch(self, key: str, batch: ReleaseBatch) -> None:
        raise NotImplementedError

    def public_count(self) -> int:
        raise NotImplementedError

    def public_page(self, offset: int, limit: int) -> list[PublicReport]:
        raise NotImplementedError

    def iter_public(self) -> Iterator[PublicReport]:
        raise NotImplementedError

    def save_catalog(self, doc: str) -> None:
        raise NotImplementedError

    def load_catalog(self) -> str | None:
        raise NotImplementedError

    def serialize_state(self) -> dict:
        raise NotImplementedError


def _pending_dict(r: PendingReport) -> dict:
    return {
        "report_id": r.report_id,
        "selections": sorted(r.selections),
        "designation": r.designation.as_dict(),
    }


class MemoryStore(StateStore):
    def __init__(self):
        self._lock = threading.RLock()
        self._pending: dict[str, list[PendingReport]] = {}
        self._pools: dict[str, float] = {}
        self._public: list[PublicReport] = []
        self._public_ids: set[str] = set()
        self._catalog: str | None = None

    def add_pending(self, report, pool_since):
        with self._lock:
            if report.report_id in self._public_ids:
                raise StorageError(f"report id already public: {report.report_id}")
            key = report.designation.key()
            if key not in self._pending:
                self._pending[key] = []
                self._pools[key] = pool_since
            self._pending[key].append(report)

    def pool_reports(self, key):
        with self._lock:
            return list(self._pending.get(key, []))

    def pending_count(self, key):
        with self._lock:
            return len(self._pending.get(key, []))

    def pools(self):
        with self._lock:
            return dict(self._pools)

    def remove_pool(self, key):
        with self._lock:
            self._pending.pop(key, None)
            self._pools.pop(key, None)

    def publish_batch(self, key, batch):
        with self._lock:
            for r in batch.reports:
                if r.report_id in self._public_ids:
                    raise StorageError(f"report id already public: {r.report_id}")
            self._pending.pop(key, None)
            self._pools.pop(key, None)
            for r in batch.reports:
                self._public.append(r)
                self._public_ids.add(r.report_id)

    def public_count(self):
        with self._lock:
            return len(self._public)

    def _ordered_public(self) -> list[PublicReport]:
        return sorted(self._public, key=lambda r: (r.released_at, r.report_id))

    def public_page(self, offset, limit):
        with self._lock:
            return self._ordered_public()[offset:offset + limit]

    def iter_public(self):
        with self._lock:
            snapshot = self._ordered_public()
        yield from snapshot

    def save_catalog(self, doc):
        with self._lock:
            self._catalog = doc

    def load_catalog(self):
        with self._lock:
            return self._catalog

    def serialize_state(self):
        with self._lock:
            return {
                "pending": {
                    key: [_pending_dict(r) for r in reports]
                    for key, reports in sorted(self._pending.items())
                },
                "pools": dict(sorted(self._pools.items())),
                "public": [public_report_dict(r) for r in self._ordered_public()],
            }


_SCHEMA = """
CREATE TABLE IF NOT EXISTS pending (
    rowid INTEGER PRIMARY KEY AUTOINCREMENT,
    report_id TEXT UNIQUE NOT NULL,
    selections TEXT NOT NULL,
    country TEXT NOT NULL,
    province TEXT,
    city TEXT,
    pool_key TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_pending_pool ON pending (pool_key);
CREATE TABLE IF NOT EXISTS pools (
    pool_key TEXT PRIMARY KEY,
    pool_since REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS public (
    report_id TEXT PRIMARY KEY,
    selections TEXT NOT NULL,
    country TEXT NOT NULL,
    province TEXT,
    city TEXT,
    released_at REAL NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_public_order ON public (released_at, report_id);
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
"""


class SqliteStore(StateStore):
    """Embedded single-file store; one serialized connection is plenty here."""

    def __init__(self, path: str):
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.executescript(_SCHEMA)
        self._conn.commit()

    def close(self):
        self._conn.close()

    @staticmethod
    def _row_to_pending(row) -> PendingReport:
        report_id, selections, country, province, city = row
        return PendingReport(
            report_id=report_id,
            selections=frozenset(json.loads(selections)),
            designation=GeoDesignation(country=country, province=province, city=city),
        )

    @staticmethod
    def _row_to_public(row) -> PublicReport:
        report_id, selections, country, province, city, released_at = row
        return PublicReport(
            report_id=report_id,
            selections=frozenset(json.loads(selections)),
            designation=GeoDesignation(country=country, province=province, city=city),
            released_at=released_at,
        )

    def add_pending(self, report, pool_since):
        d = report.designation
        with self._lock:
            try:
                with self._conn:
                    self._conn.execute(
                        "INSERT OR IGNORE INTO pools (pool_key, pool_since) VALUES (?, ?)",
                        (d.key(), pool_since),
                    )
                    self._conn.execute(
                        "INSERT INTO pending (report_id, selections, country, province, city, pool_key)"
                        " VALUES (?, ?, ?, ?, ?, ?)",
                        (report.report_id, json.dumps(sorted(report.selections)),
                         d.country, d.province, d.city, d.key()),
                    )
            except sqlite3.Error as e:
                raise StorageError(str(e)) from e

    def pool_reports(self, key):
        with self._lock:
            rows = self._conn.execute(
                "SELECT report_id, selections, country, province, city FROM pending"
                " WHERE pool_key = ? ORDER BY rowid",
                (key,),
            ).fetchall()
        return [self._row_to_pending(r) for r in rows]

    def pending_count(self, key):
        with self._lock:
            (n,) = self._conn.execute(
                "SELECT COUNT(*) FROM pending WHERE pool_key = ?", (key,)
            ).fetchone()
        return n

    def pools(self):
        with self._lock:
            rows = self._conn.execute("SELECT pool_key, pool_since FROM pools").fetchall()
        return dict(rows)

    def remove_pool(self, key):
        with self._lock:
            with self._conn:
                self._conn.execute("DELETE FROM pending WHERE pool_key = ?", (key,))
                self._conn.execute("DELETE FROM pools WHERE pool_key = ?", (key,))

    def publish_batch(self, key, batch):
        with self._lock:
            try:
                with self._conn:
                    self._conn.execute("DELETE FROM pending WHERE pool_key = ?", (key,))
                    self._conn.execute("DELETE FROM pools WHERE pool_key = ?", (key,))
                    for r in batch.reports:
                        d = r.designation
                        self._conn.execute(
                            "INSERT INTO public (report_id, selections, country, province, city, released_at)"
                            " VALUES (?, ?, ?, ?, ?, ?)",
                            (r.report_id, json.dumps(sorted(r.selections)),
                             d.country, d.province, d.city, r.released_at),
                        )
            except sqlite3.Error as e:
                raise StorageError(str(e)) from e

    def public_count(self):
        with self._lock:
            (n,) = self._conn.execute("SELECT COUNT(*) FROM public").fetchone()
        return n

    _PUBLIC_COLS = "report_id, selections, country, province, city, released_at"

    def public_page(self, offset, limit):
        with self._lock:
            rows = self._conn.execute(
                f"SELECT {self._PUBLIC_COLS} FROM public"
                " ORDER BY released_at, report_id LIMIT ? OFFSET ?",
                (limit, offset),
            ).fetchall()
        return [self._row_to_public(r) for r in rows]

    def iter_public(self):
        with self._lock:
            rows = self._conn.execute(
                f"SELECT {self._PUBLIC_COLS} FROM public ORDER BY released_at, report_id"
            ).fetchall()
        for row in rows:
            yield self._row_to_public(row)

    def save_catalog(self, doc):
        with self._lock:
            with self._conn:
                self._conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('catalog', ?)"
                    " ON CONFLICT(key) DO UPDATE SET value = excluded.value",
                    (doc,),
                )

    def load_catalog(self):
        with self._lock:
            row = self._conn.execute("SELECT value FROM meta WHERE key = 'catalog'").fetchone()
        return row[0] if row else None

    def serialize_state(self):
        with self._lock:
            pending: dict[str, list[dict]] = {}
            rows = self._conn.execute(
                "SELECT report_id, selections, country, province, city, pool_key"
                " FROM pending ORDER BY pool_key, rowid"
            ).fetchall()
            for report_id, selections, country, province, city, pool_key in rows:
                r = self._row_to_pending((report_id, selections, country, province, city))
                pending.setdefault(pool_key, []).append(_pending_dict(r))
            return {
                "pending": pending,
                "pools": self.pools(),
                "public": [public_report_dict(r) for r in self.iter_public()],
            }


def export_jsonl(store: StateStore) -> Iterator[str]:
    """Stream the public table, one stable JSON object per line."""
    for r in store.iter_public():
        yield json.dumps(public_report_dict(r), sort_keys=True, separators=(",", ":"))


EXPORT_CSV_HEADER = ["report_id", "tags", "country", "province", "city", "resolution", "released_at"]


def export_csv_rows(store: StateStore) -> Iterator[list[str]]:
    for r in store.iter_public():
        d = public_report_dict(r)
        yield [
            d["report_id"],
            " ".join(d["tags"]),
            d["country"],
            d["province"] or "",
            d["city"] or "",
            d["resolution"],
            d["released_at"],
        ]


def load_export_jsonl(lines) -> list[PublicReport]:
    """Parse an export file back into report objects for offline analytics."""
    out = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        released = doc["released_at"]
        if len(released) == 10:  # bare date
            ts = datetime.fromisoformat(released).replace(tzinfo=timezone.utc).timestamp()
        else:
            ts = datetime.fromisoformat(released.replace("Z", "+00:00")).timestamp()
        out.append(
            PublicReport(
                report_id=doc["report_id"],
                selections=frozenset(doc["tags"]),
                designation=GeoDesignation(
                    country=doc["country"], province=doc.get("province"), city=doc.get("city")
                ),
                released_at=ts,
            )
        )
    return out
