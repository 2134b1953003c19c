"""Shared-key request authentication.

One app-wide key: the goal is to price out bulk scripted junk, not to
identify users (per-user keys would recreate the identity this platform
refuses to have). A request is signed over timestamp, nonce and exact body
bytes; verification is constant-time and replays inside the window are
rejected by a nonce cache.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
import time
from dataclasses import dataclass

HEADER_TIMESTAMP = "X-Auth-Timestamp"
HEADER_NONCE = "X-Auth-Nonce"
HEADER_MAC = "X-Auth-MAC"

MIN_NONCE_HEX_LEN = 32  # >= 16 random bytes, hex encoded

BAD_MAC = "BAD_MAC"
STALE = "STALE"
REPLAY = "REPLAY"


@dataclass(frozen=True)
class AuthConfig:
    shared_key: bytes
    replay_window: float = 300.0
    nonce_cache_capacity: int = 100_000

    def __post_init__(self):
        if not self.shared_key:
            raise ValueError("shared key must be non-empty")
        if self.replay_window <= 0:
            raise ValueError("replay window must be positive")


@dataclass(frozen=True)
class AuthResult:
    ok: bool
    reason: str | None = None


class NonceCache:
    """Concurrent seen-nonce set with time-based eviction and a capacity bound."""

    def __init__(self, capacity: int = 100_000):
        self.capacity = capacity
        self._lock = threading.Lock()
        self._expiry: dict[str, float] = {}

    def check_and_add(self, nonce: str, now: float, ttl: float) -> bool:
        """True if the nonce was unseen (and is now recorded)."""
        with self._lock:
            expiry = self._expiry.get(nonce)
            if expiry is not None and expiry > now:
                return False
            self._evict(now)
            self._expiry[nonce] = now + ttl
            return True

    def _evict(self, now: float):
        if len(self._expiry) < self.capacity:
            return
        expired = [n for n, exp in self._expiry.items() if exp <= now]
        for n in expired:
            del self._expiry[n]
        # still full: drop soonest-to-expire first; a refused replay beats unbounded growth
        while len(self._expiry) >= self.capacity:
            oldest = min(self._expiry, key=self._expiry.get)
            del self._expiry[oldest]

    def __len__(self):
        with self._lock:
            return len(self._expiry)


def compute_mac(key: bytes, timestamp_str: str, nonce: str, body: bytes) -> str:
    """Lowercase hex HMAC-SHA-256 over timestamp, nonce and body, newline-joined."""
    msg = timestamp_str.encode("ascii") + b"\n" + nonce.encode("ascii") + b"\n" + body
    return hmac.new(key, msg, hashlib.sha256).hexdigest()


def sign_headers(key: bytes, body: bytes, now: float | None = None,
                 nonce: str | None = None) -> dict[str, str]:
    """Client-side helper producing the three auth headers for a request."""
    ts = str(int(now if now is not None else time.time()))
    nonce = nonce if nonce is not None else secrets.token_hex(16)
    return {
        HEADER_TIMESTAMP: ts,
        HEADER_NONCE: nonce,
        HEADER_MAC: compute_mac(key, ts, nonce, body),
    }


def verify_request(headers, body: bytes, cfg: AuthConfig, now: float,
                   nonce_cache: NonceCache) -> AuthResult:
    """Check MAC, freshness, then replay. Only accepted nonces are recorded."""
    ts = headers.get(HEADER_TIMESTAMP)
    nonce = headers.get(HEADER_NONCE)
    mac = headers.get(HEADER_MAC)
    if not ts or not nonce or not mac:
        return AuthResult(False, BAD_MAC)
    if len(nonce) < MIN_NONCE_HEX_LEN or any(c not in "0123456789abcdef" for c in nonce.lower()):
        return AuthResult(False, BAD_MAC)
    try:
        expected = compute_mac(cfg.shared_key, ts, nonce, body)
    except UnicodeEncodeError:
        return AuthResult(False, BAD_MAC)
    if not hmac.compare_digest(expected, mac.lower()):
        return AuthResult(False, BAD_MAC)
    try:
        ts_val = int(ts)
    except ValueError:
        return AuthResult(False, BAD_MAC)
    if abs(now - ts_val) > cfg.replay_window:
        return AuthResult(False, STALE)
    if not nonce_cache.check_and_add(nonce.lower(), now, 2 * cfg.replay_window):
        return AuthResult(False, REPLAY)
    return AuthResult(True)
