#include <gtest/gtest.h>

#include <random>

#include "quakesim/geo.hpp"
#include "quakesim/geojson.hpp"

using namespace quakesim;
using namespace quakesim::geo;

namespace {

std::vector<GeoPoint> uniform_points(std::size_t n, const BBox& bb, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GeoPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({rng.uniform(bb.lon_min, bb.lon_max), rng.uniform(bb.lat_min, bb.lat_max)});
  }
  return pts;
}

// Monte Carlo estimate of |region ∩ annulus| / |region| on the sphere,
// sampling the region in lon/lat with cos(lat) weights.
double band_fraction_mc(const Polygon& region, const GeoPoint& c, double outer, double inner, int n) {
  Rng rng(7);
  const auto bb = region.bbox();
  double in = 0.0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const GeoPoint p{rng.uniform(bb.lon_min, bb.lon_max), rng.uniform(bb.lat_min, bb.lat_max)};
    if (!region.contains(p)) continue;
    const double w = std::cos(deg2rad(p.lat));
    total += w;
    const double d = haversine_km(c, p);
    if (d >= inner && d < outer) in += w;
  }
  return in / total;
}

}  // namespace

TEST(Haversine, IdentityAndQuarterCircles) {
  EXPECT_DOUBLE_EQ(haversine_km({10, 50}, {10, 50}), 0.0);
  const double quarter = kPi * kEarthRadiusKm / 2.0;
  EXPECT_NEAR(haversine_km({0, 0}, {0, 90}), 10007.54, 0.01);
  EXPECT_NEAR(haversine_km({0, 0}, {90, 0}), quarter, 1e-6);
  EXPECT_DOUBLE_EQ(haversine_km({-70, 45}, {-123, 49}), haversine_km({-123, 49}, {-70, 45}));
}

TEST(Voronoi, SingleGeneratorIsWholeWindow) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const std::vector<GeoPoint> pts{{0.3, 0.6}};
  const auto vd = voronoi_tessellate(pts, w);
  ASSERT_EQ(vd.size(), 1u);
  EXPECT_NEAR(vd.cells[0].area(), 1.0, 1e-12);
}

TEST(Voronoi, SymmetricPairSplitsEvenly) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const std::vector<GeoPoint> pts{{0.25, 0.5}, {0.75, 0.5}};
  const auto vd = voronoi_tessellate(pts, w);
  EXPECT_NEAR(vd.cells[0].area(), 0.5, 1e-12);
  EXPECT_NEAR(vd.cells[1].area(), 0.5, 1e-12);
}

TEST(Voronoi, PartitionAndOwnership) {
  const auto w = SpatialWindow::rectangle(-80, 40, -60, 55);
  const auto pts = uniform_points(100, w.bbox, 42);
  const auto vd = voronoi_tessellate(pts, w);
  double total = 0.0;
  for (const auto& c : vd.cells) total += c.area();
  EXPECT_NEAR(total / w.area(), 1.0, 1e-6);

  Rng rng(3);
  for (std::size_t i = 0; i < vd.size(); ++i) {
    EXPECT_TRUE(vd.cells[i].contains(pts[i]));
    const auto bb = vd.cells[i].bbox();
    int checked = 0;
    for (int k = 0; k < 200 && checked < 5; ++k) {
      const GeoPoint p{rng.uniform(bb.lon_min, bb.lon_max), rng.uniform(bb.lat_min, bb.lat_max)};
      if (!vd.cells[i].contains(p)) continue;
      ++checked;
      const double di = norm(to_vec(p) - to_vec(pts[i]));
      for (std::size_t j = 0; j < pts.size(); ++j) {
        EXPECT_LE(di, norm(to_vec(p) - to_vec(pts[j])) + 1e-9);
      }
    }
  }
}

TEST(Voronoi, WindowWithHole) {
  const Polygon poly(Ring{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {Ring{{1, 1}, {3, 1}, {3, 3}, {1, 3}}});
  const SpatialWindow w(poly);
  EXPECT_NEAR(w.area(), 12.0, 1e-12);
  const std::vector<GeoPoint> pts{{0.5, 0.5}, {3.5, 3.5}, {0.5, 3.5}};
  const auto vd = voronoi_tessellate(pts, w);
  double total = 0.0;
  for (const auto& c : vd.cells) total += c.area();
  EXPECT_NEAR(total, 12.0, 1e-9);
}

TEST(Voronoi, Errors) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const std::vector<GeoPoint> dup{{0.5, 0.5}, {0.2, 0.2}, {0.5, 0.5}};
  try {
    voronoi_tessellate(dup, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateGenerator);
  }
  const std::vector<GeoPoint> outside{{1.5, 0.5}};
  try {
    voronoi_tessellate(outside, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfWindow);
  }
}

TEST(CirclePolygon, SmallCircleArea) {
  const GeoPoint c{-75, 45};
  const auto poly = circle_polygon(c, 1.0, 64);
  const AzimuthalEqualArea proj(c);
  std::vector<Vec2> ring;
  for (const auto& p : poly.exterior) ring.push_back(proj(p));
  EXPECT_NEAR(std::abs(signed_area(std::span<const Vec2>(ring))), kPi, 0.01 * kPi);
}

TEST(CirclePolygon, VerticesOnCircle) {
  const GeoPoint c{-123, 47};
  const auto poly = circle_polygon(c, 200.0, 64);
  ASSERT_EQ(poly.exterior.size(), 64u);
  for (const auto& p : poly.exterior) EXPECT_NEAR(haversine_km(c, p), 200.0, 0.2);
}

TEST(CirclePolygon, InscribedMonotone) {
  const GeoPoint c{0, 0};
  const double r = 50.0;
  const AzimuthalEqualArea proj(c);
  auto projected_area = [&](int n) {
    std::vector<Vec2> ring;
    for (const auto& p : circle_polygon(c, r, n).exterior) ring.push_back(proj(p));
    return std::abs(signed_area(std::span<const Vec2>(ring)));
  };
  const double a8 = projected_area(8);
  const double a256 = projected_area(256);
  EXPECT_LT(a8, a256);
  EXPECT_LT(a256, kPi * r * r);
}

TEST(CirclePolygon, RejectsNonPositiveRadius) {
  try {
    circle_polygon({0, 0}, 0.0, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidRadius);
  }
}

TEST(BandAreaFraction, ContainmentAndDisjoint) {
  const auto region = Polygon::rectangle(-75.1, 45.0, -75.0, 45.1);
  EXPECT_NEAR(band_area_fraction(region, {-75.05, 45.05}, 100.0, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(band_area_fraction(region, {-75.05, 45.05}, 1000.0, 500.0), 0.0, 1e-12);
  EXPECT_NEAR(band_area_fraction(region, {-60.0, 45.05}, 100.0, 0.0), 0.0, 1e-12);
}

TEST(BandAreaFraction, BisectedSquareMatchesMonteCarlo) {
  // Circle centred far to the west whose boundary passes through the square's centre.
  const auto region = Polygon::rectangle(-75.1, 44.95, -74.9, 45.05);
  const GeoPoint centre{-77.0, 45.0};
  const double r = haversine_km(centre, {-75.0, 45.0});
  const double f = band_area_fraction(region, centre, r, 0.0);
  EXPECT_NEAR(f, 0.5, 0.01);
  EXPECT_NEAR(f, band_fraction_mc(region, centre, r, 0.0, 200000), 0.01);
}

TEST(BandAreaFraction, NestedBandsSum) {
  const auto region = Polygon::rectangle(-74.0, 45.0, -73.0, 46.0);
  const GeoPoint c{-73.8, 45.2};
  const std::vector<double> radii{0, 10, 25, 40, 60, 80, 120};
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) sum += band_area_fraction(region, c, radii[i + 1], radii[i]);
  EXPECT_NEAR(sum, band_area_fraction(region, c, radii.back(), 0.0), 1e-3);
  EXPECT_NEAR(band_area_fraction(region, c, 30.0, 10.0), band_fraction_mc(region, c, 30.0, 10.0, 200000), 0.01);
}

TEST(BandAreaFraction, Errors) {
  const auto region = Polygon::rectangle(0, 0, 1, 1);
  EXPECT_THROW(band_area_fraction(region, {0, 0}, 1.0, 2.0), Error);
  const Polygon flat(Ring{{0, 0}, {1, 0}, {2, 0}});
  try {
    band_area_fraction(flat, {0, 0}, 10.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroAreaRegion);
  }
}

TEST(GeoJson, PolygonRoundTrip) {
  const Polygon poly(Ring{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {Ring{{1, 1}, {2, 1}, {2, 2}}});
  const auto j = geojson::feature(poly, {{"csd_id", "A1"}});
  const auto back = geojson::polygon_from_json(j);
  EXPECT_NEAR(back.area(), poly.area(), 1e-12);
  ASSERT_EQ(back.holes.size(), 1u);
  const auto fc = geojson::feature_collection({j});
  const auto named = geojson::features_from_json(fc, "csd_id");
  ASSERT_EQ(named.size(), 1u);
  EXPECT_EQ(named[0].id, "A1");
}
