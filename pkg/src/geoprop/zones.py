"""Zones (spatial analysis units) and their loaders.

A zone has an opaque string id, a centroid, an optional polygon ring, and a
mapping of numeric attributes. Zone sets are loaded from GeoJSON feature
collections (point or polygon features, feature property ``id`` required)
or from CSV with header ``id,lon,lat[,attr...]``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InputError
from .geo import GeoPoint, PlanarPoint, Point, normalize_ring, point_distance, point_in_ring, ring_centroid


@dataclass(frozen=True)
class Zone:
    id: str
    centroid: Point
    polygon: tuple[Point, ...] | None = None
    attributes: Mapping[str, float] = field(default_factory=dict)


def _make_point(x: float, y: float, planar: bool) -> Point:
    if planar:
        return PlanarPoint(x, y)
    return GeoPoint(x, y)


def validate_zones(zones: Sequence[Zone]) -> None:
    seen: set[str] = set()
    for z in zones:
        if z.id in seen:
            raise InputError(f"duplicate zone id {z.id!r}")
        seen.add(z.id)


def zones_by_id(zones: Sequence[Zone]) -> dict[str, Zone]:
    validate_zones(zones)
    return {z.id: z for z in zones}


def load_zones_csv(path: str | Path, planar: bool = False) -> list[Zone]:
    path = Path(path)
    zones: list[Zone] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty zones file") from None
        if len(header) < 3 or header[0] != "id":
            raise InputError(f"{path}: expected header id,lon,lat[,attr...]")
        attr_names = header[3:]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 3:
                raise InputError(f"{path}:{lineno}: expected at least 3 columns")
            try:
                centroid = _make_point(float(row[1]), float(row[2]), planar)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            attrs: dict[str, float] = {}
            for name, cell in zip(attr_names, row[3:]):
                cell = cell.strip()
                if cell == "":
                    continue  # missing value
                try:
                    attrs[name] = float(cell)
                except ValueError:
                    raise InputError(f"{path}:{lineno}: non-numeric value {cell!r} for {name!r}") from None
            zones.append(Zone(id=row[0], centroid=centroid, attributes=attrs))
    validate_zones(zones)
    return zones


def load_zones_geojson(path: str | Path, planar: bool = False) -> list[Zone]:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if data.get("type") != "FeatureCollection":
        raise InputError(f"{path}: expected a GeoJSON FeatureCollection")
    zones: list[Zone] = []
    for k, feature in enumerate(data.get("features", [])):
        props = feature.get("properties") or {}
        if "id" not in props:
            raise InputError(f"{path}: feature {k} lacks the required 'id' property")
        zid = str(props["id"])
        attrs = {
            name: float(value)
            for name, value in props.items()
            if name != "id" and isinstance(value, (int, float)) and not isinstance(value, bool)
        }
        geom = feature.get("geometry") or {}
        gtype = geom.get("type")
        coords = geom.get("coordinates")
        try:
            if gtype == "Point":
                centroid = _make_point(float(coords[0]), float(coords[1]), planar)
                zones.append(Zone(id=zid, centroid=centroid, attributes=attrs))
            elif gtype == "Polygon":
                ring = normalize_ring(tuple(_make_point(float(x), float(y), planar) for x, y in coords[0]))
                cx, cy = ring_centroid(ring)
                zones.append(Zone(id=zid, centroid=_make_point(cx, cy, planar), polygon=ring, attributes=attrs))
            else:
                raise InputError(f"{path}: feature {zid!r} has unsupported geometry type {gtype!r}")
        except ValueError as exc:
            raise InputError(f"{path}: feature {zid!r}: {exc}") from None
    validate_zones(zones)
    return zones


def load_zones(path: str | Path, planar: bool = False) -> list[Zone]:
    """Dispatch on file suffix: .csv, or .json/.geojson."""
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return load_zones_csv(path, planar=planar)
    if suffix in (".json", ".geojson"):
        return load_zones_geojson(path, planar=planar)
    raise InputError(f"{path}: unrecognized zones format (use .csv, .json or .geojson)")


def assign_zone(p: Point, zones: Sequence[Zone]) -> str | None:
    """Resolve a point to a zone id.

    With polygons: the first zone (in id order) whose ring contains the
    point, boundary inclusive; None when no polygon contains it. Without
    polygons: the nearest centroid, ties broken by smaller id. Zone sets
    mixing polygon and centroid-only zones are rejected.
    """
    if not zones:
        raise InputError("assign_zone requires a non-empty zone set")
    have_poly = [z.polygon is not None for z in zones]
    if any(have_poly) and not all(have_poly):
        raise InputError("zone set mixes polygon and centroid-only zones")
    ordered = sorted(zones, key=lambda z: z.id)
    if all(have_poly):
        for z in ordered:
            assert z.polygon is not None
            if point_in_ring(p, z.polygon):
                return z.id
        return None
    best: tuple[float, str] | None = None
    for z in ordered:
        d = point_distance(p, z.centroid)
        if best is None or d < best[0]:
            best = (d, z.id)
    assert best is not None
    return best[1]
