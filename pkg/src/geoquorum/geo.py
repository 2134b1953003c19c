"""Geographic designations and the coordinate-isolation boundary.

Raw coordinates exist only on this module's Coordinates type and inside a
Geocoder. Report types hold a GeoDesignation: three optional name strings and
a resolution. There is no representation for a lat/lon pair past this point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Mapping, Protocol

MAX_NAME_LEN = 64


class Resolution(str, Enum):
    COUNTRY = "country"
    PROVINCE = "province"
    CITY = "city"

    @property
    def depth(self) -> int:
        return {"country": 1, "province": 2, "city": 3}[self.value]

    def parent(self) -> "Resolution | None":
        if self is Resolution.CITY:
            return Resolution.PROVINCE
        if self is Resolution.PROVINCE:
            return Resolution.COUNTRY
        return None


class GeoError(ValueError):
    pass


class UnknownLocationError(GeoError):
    """Coordinates outside geocoder coverage; the submission must be blocked."""


class GeocoderUnavailableError(GeoError):
    """Transient geocoder failure; safe to retry."""


@dataclass(frozen=True)
class Coordinates:
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise GeoError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise GeoError(f"longitude out of range: {self.lon}")


def _norm(name: str, what: str) -> str:
    """Designations are case-folded and trimmed so spelling variants pool together."""
    if not isinstance(name, str):
        raise GeoError(f"{what} must be a string")
    cleaned = name.strip().casefold()
    if not cleaned:
        raise GeoError(f"{what} must be non-empty")
    if len(cleaned) > MAX_NAME_LEN:
        raise GeoError(f"{what} exceeds {MAX_NAME_LEN} characters")
    # digits in a place name are how coordinates would sneak past the
    # designation-only channel, so they are banned outright
    if any(ch.isdigit() for ch in cleaned):
        raise GeoError(f"{what} must not contain digits")
    return cleaned


@dataclass(frozen=True)
class GeoDesignation:
    country: str
    province: str | None = None
    city: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "country", _norm(self.country, "country"))
        if self.province is not None:
            object.__setattr__(self, "province", _norm(self.province, "province"))
        if self.city is not None:
            object.__setattr__(self, "city", _norm(self.city, "city"))
        if self.city is not None and self.province is None:
            raise GeoError("city requires a province")

    @property
    def resolution(self) -> Resolution:
        if self.city is not None:
            return Resolution.CITY
        if self.province is not None:
            return Resolution.PROVINCE
        return Resolution.COUNTRY

    def key(self) -> str:
        """Exact pooling key: one pool per designation at its own resolution."""
        return "|".join(p for p in (self.country, self.province, self.city) if p is not None)

    def as_dict(self) -> dict:
        return {
            "country": self.country,
            "province": self.province,
            "city": self.city,
            "resolution": self.resolution.value,
        }


def designation_from_payload(raw: Mapping) -> GeoDesignation:
    """Build a designation from wire fields, enforcing the stated resolution."""
    res = raw.get("resolution")
    if res is not None:
        try:
            res = Resolution(str(res))
        except ValueError:
            raise GeoError(f"unknown resolution: {res!r}")
    d = GeoDesignation(
        country=raw.get("country", ""),
        province=raw.get("province"),
        city=raw.get("city"),
    )
    if res is not None and d.resolution is not res:
        raise GeoError(
            f"designation fields imply {d.resolution.value!r} but resolution says {res.value!r}"
        )
    return d


def coarsen(d: GeoDesignation, r: Resolution) -> GeoDesignation:
    """Drop fields finer than r. Refinement is impossible: precision cannot be invented."""
    if r.depth > d.resolution.depth:
        raise GeoError(f"cannot refine {d.resolution.value} designation to {r.value}")
    return GeoDesignation(
        country=d.country,
        province=d.province if r.depth >= 2 else None,
        city=d.city if r.depth >= 3 else None,
    )


class Geocoder(Protocol):
    """Maps coordinates to a (country, province, city) triple. Sees nothing else."""

    def locate(self, coords: Coordinates) -> tuple[str, str, str]: ...


@dataclass(frozen=True)
class GeoBox:
    country: str
    province: str
    city: str
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def contains(self, coords: Coordinates) -> bool:
        return (
            self.lat_min <= coords.lat <= self.lat_max
            and self.lon_min <= coords.lon <= self.lon_max
        )


class StubGeocoder:
    """Offline geocoder over a bounding-box table; first match in document order wins."""

    def __init__(self, boxes: list[GeoBox]):
        self.boxes = list(boxes)

    @classmethod
    def from_json(cls, doc) -> "StubGeocoder":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        boxes = [
            GeoBox(
                country=str(b["country"]),
                province=str(b["province"]),
                city=str(b["city"]),
                lat_min=float(b["lat_min"]),
                lat_max=float(b["lat_max"]),
                lon_min=float(b["lon_min"]),
                lon_max=float(b["lon_max"]),
            )
            for b in doc
        ]
        return cls(boxes)

    @classmethod
    def default(cls) -> "StubGeocoder":
        data = resources.files("geoquorum.data").joinpath("geoboxes.json").read_text("utf-8")
        return cls.from_json(data)

    def locate(self, coords: Coordinates) -> tuple[str, str, str]:
        for box in self.boxes:
            if box.contains(coords):
                return box.country, box.province, box.city
        raise UnknownLocationError(f"no coverage for ({coords.lat}, {coords.lon})")


class HttpGeocoder:
    """Client for a remote geocoding service; the report server never uses this.

    The provider response mapping is deployment-specific: the endpoint must
    return JSON with country/province/city keys.
    """

    def __init__(self, url: str, client=None, timeout: float = 5.0):
        import httpx

        self.url = url
        self._client = client or httpx.Client(timeout=timeout)

    def locate(self, coords: Coordinates) -> tuple[str, str, str]:
        import httpx

        try:
            resp = self._client.get(self.url, params={"lat": coords.lat, "lon": coords.lon})
        except httpx.HTTPError as e:
            raise GeocoderUnavailableError(str(e)) from e
        if resp.status_code == 404:
            raise UnknownLocationError(f"no coverage for ({coords.lat}, {coords.lon})")
        if resp.status_code >= 500:
            raise GeocoderUnavailableError(f"geocoder returned {resp.status_code}")
        doc = resp.json()
        return str(doc["country"]), str(doc["province"]), str(doc["city"])


def reverse_geocode(coords: Coordinates, geocoder: Geocoder) -> GeoDesignation:
    """Full CITY-resolution designation for a point, via the coordinate channel."""
    country, province, city = geocoder.locate(coords)
    return GeoDesignation(country=country, province=province, city=city)
