"""Coordinate types, distances, and point-in-polygon tests.

Two coordinate flavors are supported and never mixed within one dataset:
geographic lon/lat degrees (distances via haversine on a sphere of radius
6,371,000 m) and already-projected planar meters (plain Euclidean).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    """Geographic coordinate, axis order (lon, lat), in degrees."""

    lon: float
    lat: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise ValueError(f"non-finite coordinate ({self.lon}, {self.lat})")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")

    @property
    def xy(self) -> tuple[float, float]:
        return (self.lon, self.lat)


@dataclass(frozen=True)
class PlanarPoint:
    """Projected coordinate in meters (x east, y north). No range limits."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate ({self.x}, {self.y})")

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


Point = GeoPoint | PlanarPoint


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters.

    Exactly symmetric in its arguments and zero iff the coordinate pairs
    are identical.
    """
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlmb = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def euclidean_distance(a: PlanarPoint, b: PlanarPoint) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def point_distance(a: Point, b: Point) -> float:
    """Distance in meters between two points of the same coordinate flavor."""
    if isinstance(a, GeoPoint) and isinstance(b, GeoPoint):
        return haversine_distance(a, b)
    if isinstance(a, PlanarPoint) and isinstance(b, PlanarPoint):
        return euclidean_distance(a, b)
    raise TypeError("cannot mix geographic and planar coordinates")


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if cross != 0.0:
        return False
    return min(x1, x2) <= px <= max(x1, x2) and min(y1, y2) <= py <= max(y1, y2)


def point_in_ring(p: Point, ring: tuple[Point, ...]) -> bool:
    """Even-odd ray-casting containment test; ring boundary counts as inside.

    The ring is an open sequence of vertices (no repeated closing vertex).
    Coordinates are treated as planar, which is the usual convention for
    city-scale lon/lat polygons.
    """
    px, py = p.xy
    n = len(ring)
    inside = False
    for k in range(n):
        x1, y1 = ring[k].xy
        x2, y2 = ring[(k + 1) % n].xy
        if _on_segment(px, py, x1, y1, x2, y2):
            return True
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside


def _orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _orient(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d2 = _orient(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    d3 = _orient(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d4 = _orient(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    # Collinear overlap / endpoint touching.
    for d, a, b, c in ((d1, q1, q2, p1), (d2, q1, q2, p2), (d3, p1, p2, q1), (d4, p1, p2, q2)):
        if d == 0 and _on_segment(c[0], c[1], a[0], a[1], b[0], b[1]):
            return True
    return False


def normalize_ring(points: tuple[Point, ...]) -> tuple[Point, ...]:
    """Validate a polygon ring and return it open (closing vertex dropped).

    Rejects rings with fewer than 3 distinct vertices and rings whose
    non-adjacent edges intersect.
    """
    pts = list(points)
    if len(pts) >= 2 and pts[0].xy == pts[-1].xy:
        pts = pts[:-1]
    distinct = {p.xy for p in pts}
    if len(distinct) < 3:
        raise ValueError("degenerate polygon: fewer than 3 distinct vertices")
    n = len(pts)
    for i in range(n):
        a1, a2 = pts[i].xy, pts[(i + 1) % n].xy
        for j in range(i + 1, n):
            # Skip edges sharing a vertex (adjacent, incl. the wrap pair).
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = pts[j].xy, pts[(j + 1) % n].xy
            if _segments_intersect(a1, a2, b1, b2):
                raise ValueError("self-intersecting polygon ring")
    return tuple(pts)


def ring_centroid(ring: tuple[Point, ...]) -> tuple[float, float]:
    """Area-weighted centroid (shoelace); vertex mean for zero-area rings."""
    n = len(ring)
    area2 = 0.0
    cx = 0.0
    cy = 0.0
    for k in range(n):
        x1, y1 = ring[k].xy
        x2, y2 = ring[(k + 1) % n].xy
        w = x1 * y2 - x2 * y1
        area2 += w
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    if area2 == 0.0:
        xs = [p.xy[0] for p in ring]
        ys = [p.xy[1] for p in ring]
        return (sum(xs) / n, sum(ys) / n)
    return (cx / (3.0 * area2), cy / (3.0 * area2))
