import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnkit.errors import ContractError
from bnkit.spatial import (
    CentroidSet,
    GeoPoint,
    Polygon,
    Polyline,
    haversine,
    load_features,
    nearest_centroid,
    point_in_polygon,
    point_to_polyline_distance,
)

from oracles import polyline_distance_by_sampling as brute_force_polyline_distance

latitudes = st.floats(min_value=-60.0, max_value=60.0)
longitudes = st.floats(min_value=-179.0, max_value=179.0)


class TestGeoPoint:
    def test_range_validation(self):
        with pytest.raises(ContractError):
            GeoPoint(91.0, 0.0)
        with pytest.raises(ContractError):
            GeoPoint(0.0, 181.0)


class TestHaversine:
    def test_coincident_points(self):
        p = GeoPoint(40.0, -3.0)
        assert haversine(p, p) == 0.0

    def test_one_degree_of_latitude(self):
        # R * pi / 180 of arc
        d = haversine(GeoPoint(0.0, 0.0), GeoPoint(1.0, 0.0))
        assert d == pytest.approx(111_194.9, abs=0.1)

    @given(latitudes, longitudes, latitudes, longitudes)
    @settings(max_examples=80)
    def test_symmetric_and_nonnegative(self, lat1, lon1, lat2, lon2):
        a, b = GeoPoint(lat1, lon1), GeoPoint(lat2, lon2)
        assert haversine(a, b) == haversine(b, a)
        assert haversine(a, b) >= 0.0


class TestPointToPolyline:
    def test_point_on_vertex_is_zero(self):
        line = Polyline("l", (GeoPoint(40.0, -3.0), GeoPoint(40.1, -3.0)))
        assert point_to_polyline_distance(GeoPoint(40.0, -3.0), line) == 0.0

    def test_perpendicular_foot_beats_endpoints(self):
        # west-east segment, point offset north of its midpoint
        line = Polyline("l", (GeoPoint(40.0, -3.2), GeoPoint(40.0, -3.0)))
        p = GeoPoint(40.05, -3.1)
        d = point_to_polyline_distance(p, line)
        d_ends = min(haversine(p, v) for v in line.vertices)
        assert d < d_ends
        assert d == pytest.approx(haversine(p, GeoPoint(40.0, -3.1)), rel=1e-3)

    def test_interior_vertex_is_nearest(self):
        line = Polyline(
            "bend",
            (GeoPoint(40.0, -3.2), GeoPoint(40.05, -3.1), GeoPoint(40.0, -3.0)),
        )
        p = GeoPoint(40.09, -3.1)  # directly above the bend vertex
        d = point_to_polyline_distance(p, line)
        assert d == pytest.approx(haversine(p, line.vertices[1]), rel=1e-3)

    def test_never_exceeds_vertex_distance(self, rng):
        for _ in range(40):
            lat0 = float(rng.uniform(-55, 55))
            lon0 = float(rng.uniform(-170, 170))
            vertices = tuple(
                GeoPoint(lat0 + float(rng.uniform(-0.1, 0.1)), lon0 + float(rng.uniform(-0.1, 0.1)))
                for _ in range(int(rng.integers(2, 6)))
            )
            line = Polyline("r", vertices)
            p = GeoPoint(lat0 + float(rng.uniform(-0.1, 0.1)), lon0 + float(rng.uniform(-0.1, 0.1)))
            d = point_to_polyline_distance(p, line)
            assert d <= min(haversine(p, v) for v in vertices) + 1e-9

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(12):
            lat0 = float(rng.uniform(-50, 50))
            lon0 = float(rng.uniform(-160, 160))
            vertices = tuple(
                GeoPoint(lat0 + float(rng.uniform(-0.05, 0.05)), lon0 + float(rng.uniform(-0.05, 0.05)))
                for _ in range(int(rng.integers(2, 5)))
            )
            line = Polyline("r", vertices)
            p = GeoPoint(lat0 + float(rng.uniform(0.02, 0.08)), lon0 + float(rng.uniform(0.02, 0.08)))
            ours = point_to_polyline_distance(p, line)
            oracle = brute_force_polyline_distance(p, line, samples=4000)
            assert ours == pytest.approx(oracle, rel=1e-3)

    def test_densifying_changes_little(self, rng):
        vertices = (GeoPoint(40.0, -3.3), GeoPoint(40.08, -3.15), GeoPoint(40.0, -3.0))
        dense = [vertices[0]]
        for a, b in zip(vertices, vertices[1:]):
            dense.append(GeoPoint((a.latitude + b.latitude) / 2, (a.longitude + b.longitude) / 2))
            dense.append(b)
        p = GeoPoint(40.2, -3.18)
        d1 = point_to_polyline_distance(p, Polyline("orig", vertices))
        d2 = point_to_polyline_distance(p, Polyline("dense", tuple(dense)))
        assert d2 <= d1 * (1 + 1e-3)


class TestNearestCentroid:
    def test_single_centroid(self):
        cs = CentroidSet({"only": GeoPoint(40.0, -3.0)})
        assert nearest_centroid(GeoPoint(41.0, -4.0), cs) == "only"

    def test_coincident_point_wins(self):
        cs = CentroidSet({"X": GeoPoint(40.0, -3.0), "Y": GeoPoint(41.0, -3.0)})
        assert nearest_centroid(GeoPoint(40.0, -3.0), cs) == "X"

    def test_tie_breaks_lexicographically(self):
        # two centroids at the same location tie exactly
        cs = CentroidSet({"B": GeoPoint(40.5, -3.5), "A": GeoPoint(40.5, -3.5)})
        assert nearest_centroid(GeoPoint(40.0, -3.0), cs) == "A"

    def test_empty_set_rejected(self):
        with pytest.raises(ContractError):
            CentroidSet({})


class TestPointInPolygon:
    def test_square(self):
        square = Polygon(
            "sq",
            (GeoPoint(0.0, 0.0), GeoPoint(0.0, 2.0), GeoPoint(2.0, 2.0), GeoPoint(2.0, 0.0)),
        )
        assert point_in_polygon(GeoPoint(1.0, 1.0), square)
        assert not point_in_polygon(GeoPoint(3.0, 1.0), square)
        assert not point_in_polygon(GeoPoint(-0.5, 1.0), square)


class TestLoadFeatures:
    def test_full_file(self, tmp_path):
        path = tmp_path / "features.json"
        path.write_text(
            """
            {
              "polylines": {"street": [[40.0, -3.1], [40.0, -3.0]]},
              "centroids": {"hood": [40.05, -3.05]},
              "polygons": {"city": [[39.9, -3.2], [39.9, -2.9], [40.1, -2.9], [40.1, -3.2]]},
              "points": {"centre": [40.0, -3.05]}
            }
            """,
            encoding="utf-8",
        )
        features = load_features(path)
        assert "street" in features.polylines
        assert features.points["centre"].latitude == 40.0
        assert features.centroids is not None
        assert "city" in features.polygons
