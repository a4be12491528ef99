"""Distance features from coordinates, street polylines, and centroids.

Distances are great-circle (haversine, sphere radius 6,371,000 m).
Point-to-segment distances are solved in a local tangent plane centered
at the query point (equirectangular scaling), good to well under 0.1%
for the city-scale segments this package targets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ContractError

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ContractError(f"latitude {self.latitude} out of [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ContractError(f"longitude {self.longitude} out of [-180, 180]")


@dataclass(frozen=True)
class Polyline:
    name: str
    vertices: tuple[GeoPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(self.vertices) < 2:
            raise ContractError(f"polyline {self.name!r} needs at least 2 vertices")


@dataclass(frozen=True)
class CentroidSet:
    centroids: dict[str, GeoPoint]

    def __post_init__(self):
        if not self.centroids:
            raise ContractError("centroid set is empty")


@dataclass(frozen=True)
class Polygon:
    name: str
    vertices: tuple[GeoPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(self.vertices) < 3:
            raise ContractError(f"polygon {self.name!r} needs at least 3 vertices")


def haversine(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters."""
    lat1 = math.radians(a.latitude)
    lat2 = math.radians(b.latitude)
    # differencing in degrees first avoids cancellation for nearby points
    dlat = math.radians(b.latitude - a.latitude)
    dlon = math.radians(b.longitude - a.longitude)
    s = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(s)))


def _to_local_plane(p: GeoPoint, origin: GeoPoint) -> tuple[float, float]:
    """Equirectangular projection centered at ``origin``, meters."""
    scale = math.cos(math.radians(origin.latitude))
    x = math.radians(p.longitude - origin.longitude) * scale * EARTH_RADIUS_M
    y = math.radians(p.latitude - origin.latitude) * EARTH_RADIUS_M
    return x, y


def _segment_distance(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / length_sq
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_to_polyline_distance(p: GeoPoint, line: Polyline) -> float:
    """Distance in meters from a point to the nearest polyline segment.

    Never exceeds the haversine distance to any vertex: when the
    perpendicular foot clamps to a segment end, the exact great-circle
    vertex distance replaces the planar approximation.
    """
    best = math.inf
    for a, b in zip(line.vertices, line.vertices[1:]):
        ax, ay = _to_local_plane(a, p)
        bx, by = _to_local_plane(b, p)
        best = min(best, _segment_distance(0.0, 0.0, ax, ay, bx, by))
    for v in line.vertices:
        best = min(best, haversine(p, v))
    return best


def nearest_centroid(p: GeoPoint, centroids: CentroidSet) -> str:
    """Label of the closest centroid; ties go to the smaller label."""
    best_label = None
    best_dist = math.inf
    for label in sorted(centroids.centroids):
        d = haversine(p, centroids.centroids[label])
        if d < best_dist:
            best_label, best_dist = label, d
    return best_label


def point_in_polygon(p: GeoPoint, polygon: Polygon) -> bool:
    """Even-odd ray casting in (longitude, latitude) coordinates."""
    x, y = p.longitude, p.latitude
    inside = False
    verts = polygon.vertices
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i].longitude, verts[i].latitude
        x2, y2 = verts[(i + 1) % n].longitude, verts[(i + 1) % n].latitude
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


@dataclass(frozen=True)
class GeoFeatures:
    """Named geography for one city: streets as polylines, reference
    points, neighborhood centroids, and boundary polygons."""

    polylines: dict[str, Polyline]
    points: dict[str, GeoPoint]
    centroids: CentroidSet | None
    polygons: dict[str, Polygon]


def load_features(path) -> GeoFeatures:
    """Read the feature file: JSON with [lat, lon] coordinate pairs.

    Schema::

        {
          "polylines": {"name": [[lat, lon], ...], ...},
          "points":    {"name": [lat, lon], ...},
          "centroids": {"name": [lat, lon], ...},
          "polygons":  {"name": [[lat, lon], ...], ...}
        }

    Every section is optional.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    polylines = {
        name: Polyline(name, tuple(GeoPoint(lat, lon) for lat, lon in coords))
        for name, coords in raw.get("polylines", {}).items()
    }
    points = {name: GeoPoint(lat, lon) for name, (lat, lon) in raw.get("points", {}).items()}
    centroid_map = {
        name: GeoPoint(lat, lon) for name, (lat, lon) in raw.get("centroids", {}).items()
    }
    polygons = {
        name: Polygon(name, tuple(GeoPoint(lat, lon) for lat, lon in coords))
        for name, coords in raw.get("polygons", {}).items()
    }
    return GeoFeatures(
        polylines=polylines,
        points=points,
        centroids=CentroidSet(centroid_map) if centroid_map else None,
        polygons=polygons,
    )
