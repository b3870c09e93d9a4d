"""Sentiment aggregation by location type, hour, weekday and rush-hour window.

Bins keep an exact (rational) running sum of compound scores, so bins built
from corpus shards merge to exactly the same sums as bins built in one pass.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .preprocess import CleanDoc
from .sentiment import SentimentResult

log = logging.getLogger(__name__)

RUSH_WINDOWS = ((7, 9), (17, 19))  # local hours, half-open
WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
MAX_TZ_OFFSET = 14 * 60


class LocationType(str, enum.Enum):
    COMMERCIAL = "Commercial"
    HIGHWAY = "Highway"
    MAJOR_ROAD = "MajorRoad"
    RESIDENTIAL = "Residential"
    URBAN_CORE = "UrbanCore"

    @property
    def display(self) -> str:
        return _DISPLAY[self]


_DISPLAY = {
    LocationType.COMMERCIAL: "Commercial Areas",
    LocationType.HIGHWAY: "Highway Locations",
    LocationType.MAJOR_ROAD: "Major Roads",
    LocationType.RESIDENTIAL: "Residential Areas",
    LocationType.URBAN_CORE: "Urban Core",
}


# ---------------------------------------------------------------- geometry

Point = tuple[float, float]  # (lat, lon)


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    return (
        _orient(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0 > o2) or (o1 < 0 < o2)) and ((o3 > 0 > o4) or (o3 < 0 < o4)):
        return True
    return (
        (o1 == 0 and _on_segment(c, a, b))
        or (o2 == 0 and _on_segment(d, a, b))
        or (o3 == 0 and _on_segment(a, c, d))
        or (o4 == 0 and _on_segment(b, c, d))
    )


def is_simple(ring: Sequence[Point]) -> bool:
    n = len(ring)
    edges = [(ring[i], ring[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            # adjacent edges share a vertex by construction
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(*edges[i], *edges[j]):
                return False
    return True


def point_in_polygon(pt: Point, ring: Sequence[Point]) -> bool:
    """Ray casting; points on the boundary count as inside."""
    n = len(ring)
    inside = False
    y, x = pt
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        if _on_segment(pt, a, b):
            return True
        (ya, xa), (yb, xb) = a, b
        if (ya > y) != (yb > y):
            x_cross = xa + (y - ya) * (xb - xa) / (yb - ya)
            if x < x_cross:
                inside = not inside
    return inside


@dataclass(frozen=True)
class Zone:
    ring: tuple[Point, ...]
    location_type: LocationType

    def __post_init__(self):
        ring = tuple((float(a), float(b)) for a, b in self.ring)
        if len(ring) > 1 and ring[0] == ring[-1]:
            ring = ring[:-1]
        if len(ring) < 3:
            raise ValueError("zone polygon needs at least 3 distinct vertices")
        if not is_simple(ring):
            raise ValueError("zone polygon is self-intersecting")
        object.__setattr__(self, "ring", ring)


@dataclass(frozen=True)
class ZoneConfig:
    zones: tuple[Zone, ...] = ()
    default_type: LocationType | None = None

    @classmethod
    def from_geojson(cls, obj: Mapping | str | Path, default_type: str | None = None) -> "ZoneConfig":
        """Read Polygon features carrying a ``location_type`` property (outer ring only)."""
        if not isinstance(obj, Mapping):
            obj = json.loads(Path(obj).read_text(encoding="utf-8"))
        if obj.get("type") != "FeatureCollection":
            raise ValueError("zone file must be a GeoJSON FeatureCollection")
        zones = []
        for n, feat in enumerate(obj.get("features", [])):
            geom = feat.get("geometry") or {}
            if geom.get("type") != "Polygon":
                raise ValueError(f"zone feature {n}: geometry must be a Polygon")
            props = feat.get("properties") or {}
            try:
                ltype = LocationType(props["location_type"])
            except (KeyError, ValueError):
                raise ValueError(f"zone feature {n}: bad location_type") from None
            outer = geom["coordinates"][0]
            zones.append(Zone(tuple((lat, lon) for lon, lat, *_ in outer), ltype))
        default = LocationType(default_type) if default_type else None
        return cls(tuple(zones), default)


_warned_empty = False


def classify_location(lat: float, lon: float, zones: ZoneConfig) -> LocationType | None:
    """First containing zone in config order, else the default type, else None."""
    global _warned_empty
    if not zones.zones and zones.default_type is None and not _warned_empty:
        log.warning("no zones and no default location type: every point is unclassified")
        _warned_empty = True
    for zone in zones.zones:
        if point_in_polygon((lat, lon), zone.ring):
            return zone.location_type
    return zones.default_type


# ---------------------------------------------------------------- time


@dataclass(frozen=True)
class TimeBin:
    hour: int
    weekday: str
    rush: bool


def is_rush_hour(hour: int) -> bool:
    return any(lo <= hour < hi for lo, hi in RUSH_WINDOWS)


def local_time(created_at: datetime, tz_offset: int) -> datetime:
    if abs(tz_offset) > MAX_TZ_OFFSET:
        raise ValueError(f"tz offset {tz_offset} min outside +/-14h")
    return created_at + timedelta(minutes=tz_offset)


def bin_temporal(created_at: datetime, tz_offset: int) -> TimeBin:
    """Local hour, weekday and rush flag; ``tz_offset`` is minutes east of UTC."""
    local = local_time(created_at, tz_offset)
    return TimeBin(local.hour, WEEKDAYS[local.weekday()], is_rush_hour(local.hour))


# ---------------------------------------------------------------- bins


@dataclass
class Bin:
    count: int = 0
    total: Fraction = field(default_factory=Fraction)

    def add(self, x: float) -> None:
        self.count += 1
        self.total += Fraction(x)

    @property
    def sum_compound(self) -> float:
        return float(self.total)

    @property
    def mean_compound(self) -> float:
        return float(self.total / self.count)


BinKey = tuple  # ("location", LocationType) | ("hour", h) | ("weekday", d) | ("rush", b) | ("cell", d, h)


@dataclass
class BinTable:
    bins: dict[BinKey, Bin] = field(default_factory=dict)

    def add(self, key: BinKey, compound: float) -> None:
        self.bins.setdefault(key, Bin()).add(compound)

    def merge(self, other: "BinTable") -> "BinTable":
        out = BinTable({k: Bin(b.count, b.total) for k, b in self.bins.items()})
        for k, b in other.bins.items():
            mine = out.bins.setdefault(k, Bin())
            mine.count += b.count
            mine.total += b.total
        return out

    def dimension(self, name: str) -> dict:
        return {k[1:] if len(k) > 2 else k[1]: b for k, b in self.bins.items() if k[0] == name}

    def __eq__(self, other):
        if not isinstance(other, BinTable):
            return NotImplemented
        return {k: (b.count, b.total) for k, b in self.bins.items()} == {
            k: (b.count, b.total) for k, b in other.bins.items()
        }


@dataclass
class Aggregation:
    bins: BinTable
    features: list[dict]

    def geojson(self) -> dict:
        return {"type": "FeatureCollection", "features": self.features}

    def merge(self, other: "Aggregation") -> "Aggregation":
        return Aggregation(self.bins.merge(other.bins), self.features + other.features)


def aggregate_bins(
    docs: Iterable[CleanDoc],
    sentiments: Mapping[str, SentimentResult],
    zones: ZoneConfig,
    tz_offset: int,
    topics: Mapping[str, int] | None = None,
) -> Aggregation:
    """Temporal bins over all docs, location bins over geotagged docs only."""
    topics = topics or {}
    table = BinTable()
    features = []
    for doc in docs:
        res = sentiments.get(doc.uid)
        if res is None:
            raise KeyError(f"no sentiment for document {doc.uid!r}")
        tb = bin_temporal(doc.created_at, tz_offset)
        table.add(("hour", tb.hour), res.compound)
        table.add(("weekday", tb.weekday), res.compound)
        table.add(("rush", tb.rush), res.compound)
        table.add(("cell", tb.weekday, tb.hour), res.compound)
        if doc.geo is None:
            continue
        lat, lon = doc.geo
        ltype = classify_location(lat, lon, zones)
        if ltype is not None:
            table.add(("location", ltype), res.compound)
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [lon, lat]},
                "properties": {
                    "post_id": doc.post_id,
                    "platform": doc.platform.value,
                    "compound": res.compound,
                    "label": res.label.value,
                    "topic_id": topics.get(doc.uid),
                    "local_hour": tb.hour,
                    "location_type": ltype.value if ltype else None,
                },
            }
        )
    return Aggregation(table, features)


def spatial_rows(table: BinTable) -> list[list]:
    by_type = table.dimension("location")
    rows = []
    for ltype in LocationType:
        b = by_type.get(ltype)
        if b is not None:
            rows.append([ltype.value, ltype.display, b.count, f"{b.mean_compound:.3f}"])
    return rows


def temporal_rows(table: BinTable) -> list[list]:
    cells = table.dimension("cell")
    rows = []
    for day in WEEKDAYS:
        for hour in range(24):
            b = cells.get((day, hour))
            if b is not None:
                rows.append([day, hour, int(is_rush_hour(hour)), b.count, f"{b.mean_compound:.3f}"])
    return rows


def temporal_summary_rows(table: BinTable) -> list[list]:
    rows = []
    rush = table.dimension("rush")
    for flag, name in ((True, "rush"), (False, "non_rush")):
        if flag in rush:
            rows.append(["rush", name, rush[flag].count, f"{rush[flag].mean_compound:.3f}"])
    days = table.dimension("weekday")
    for day in WEEKDAYS:
        if day in days:
            rows.append(["weekday", day, days[day].count, f"{days[day].mean_compound:.3f}"])
    hours = table.dimension("hour")
    for hour in range(24):
        if hour in hours:
            rows.append(["hour", str(hour), hours[hour].count, f"{hours[hour].mean_compound:.3f}"])
    return rows
