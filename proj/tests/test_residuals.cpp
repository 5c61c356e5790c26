#include <gtest/gtest.h>

#include <sstream>

#include "quakesim/residuals.hpp"

using namespace quakesim;
using namespace quakesim::residuals;
using geo::GeoPoint;
using geo::SpatialWindow;
using stpp::HomogeneousIntensity;

namespace {

stpp::PointPattern poisson_pattern(std::size_t n, const SpatialWindow& w, std::uint64_t seed) {
  Rng rng(seed);
  stpp::PointPattern p;
  p.window = w;
  p.period = {1, 20};
  while (p.events.size() < n) {
    const GeoPoint x{rng.uniform(w.bbox.lon_min, w.bbox.lon_max), rng.uniform(w.bbox.lat_min, w.bbox.lat_max)};
    if (w.contains(x)) p.events.push_back({x, 1 + static_cast<int>(rng() % 20)});
  }
  return p;
}

double sample_variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(VoronoiRaw, SinglePoint) {
  const auto w = SpatialWindow::rectangle(0, 0, 2, 3);
  stpp::PointPattern p;
  p.window = w;
  p.period = {1, 1};
  p.events = {{{1, 1}, 1}};
  const auto rs = voronoi_raw(p, HomogeneousIntensity{0.1});
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_NEAR(rs.values[0], 1.0 - 0.1 * 6.0, 1e-12);
}

TEST(VoronoiRaw, ExactMassCellIsZero) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  stpp::PointPattern p;
  p.window = w;
  p.period = {1, 1};
  p.events = {{{0.25, 0.5}, 1}, {{0.75, 0.5}, 1}};
  const auto rs = voronoi_raw(p, HomogeneousIntensity{2.0});
  EXPECT_NEAR(rs.values[0], 0.0, 1e-12);
  EXPECT_NEAR(rs.values[1], 0.0, 1e-12);
}

TEST(VoronoiRaw, HomogeneousMassBalance) {
  const auto w = SpatialWindow::rectangle(-100, 40, -60, 60);
  const auto p = poisson_pattern(200, w, 1);
  const auto m = stpp::fit_homogeneous(p);
  const auto rs = voronoi_raw(p, m.spatial_margin());
  for (double v : rs.values) EXPECT_LE(v, 1.0);
  EXPECT_NEAR(rs.score, 0.0, 1e-9);
}

TEST(VoronoiRaw, KernelSumMatchesWindowIntegral) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto p = poisson_pattern(80, w, 2);
  const auto m = stpp::fit_kernel(p, 0.2);
  const auto lam = m.spatial_margin();
  const auto rs = voronoi_raw(p, lam);
  for (double v : rs.values) EXPECT_LE(v, 1.0);
  EXPECT_NEAR(rs.score, 80.0 - lam.integral(w.boundary), 1e-6);
}

TEST(VoronoiPearson, HomogeneousAlgebra) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  stpp::PointPattern p;
  p.window = w;
  p.period = {1, 1};
  p.events = {{{0.2, 0.3}, 1}, {{0.7, 0.6}, 1}, {{0.4, 0.9}, 1}};
  const double lam = 4.0;
  const auto rs = voronoi_pearson(p, HomogeneousIntensity{lam});
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_NEAR(rs.values[i], 1.0 / std::sqrt(lam) - std::sqrt(lam) * rs.cell_areas[i], 1e-12);
  }
  const auto one = voronoi_pearson(stpp::PointPattern{{{{0.5, 0.5}, 1}}, w, {1, 1}}, HomogeneousIntensity{1.0});
  EXPECT_NEAR(one.values[0], 0.0, 1e-12);
}

TEST(VoronoiPearson, ZeroIntensityAtEvent) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const std::vector<GeoPoint> support{{0.1, 0.1}};
  const stpp::SpatialKernelIntensity k(support, 0.05);
  stpp::PointPattern p;
  p.window = w;
  p.period = {1, 1};
  p.events = {{{0.1, 0.1}, 1}, {{0.9, 0.9}, 1}};
  try {
    voronoi_pearson(p, k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroIntensityAtEvent);
    EXPECT_EQ(e.details(), "1");
  }
}

TEST(VoronoiPearson, VarianceNearOneOnDegreeScaleWindow) {
  // Var(r) ≈ Var(λ|C|)/λ, so the window is sized for λ̂ ≈ 0.28 per square degree.
  const auto w = SpatialWindow::rectangle(-120, 40, -75, 80);
  int inside = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = poisson_pattern(500, w, 1000 + static_cast<std::uint64_t>(rep));
    const auto rs = voronoi_pearson(p, stpp::fit_homogeneous(p).spatial_margin());
    const double v = sample_variance(rs.values);
    if (v >= 0.5 && v <= 1.5) ++inside;
  }
  EXPECT_GE(inside, 90);
}

TEST(VoronoiDeviance, IdenticalModelsAndAntisymmetry) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto p = poisson_pattern(60, w, 3);
  const auto m1 = stpp::fit_kernel(p, 0.25).spatial_margin();
  const auto m2 = stpp::fit_homogeneous(p).spatial_margin();
  const auto vd = tessellate(p);
  const auto same = voronoi_deviance(vd, m1, m1);
  for (double v : same.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(same.score, 0.0);
  const auto a = voronoi_deviance(vd, m1, m2);
  const auto b = voronoi_deviance(vd, m2, m1);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values[i], -b.values[i]);
}

TEST(VoronoiDeviance, ScaledHomogeneousAlgebra) {
  const auto w = SpatialWindow::rectangle(0, 0, 2, 2);
  const auto p = poisson_pattern(30, w, 4);
  const double l2 = 3.0;
  const auto rs = voronoi_deviance(p, HomogeneousIntensity{std::exp(1.0) * l2}, HomogeneousIntensity{l2});
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_NEAR(rs.values[i], 1.0 - (std::exp(1.0) - 1.0) * l2 * rs.cell_areas[i], 1e-12);
  }
}

TEST(VoronoiDeviance, ScoreIsSpatialLikelihoodRatio) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto p = poisson_pattern(70, w, 5);
  const auto m1 = stpp::fit_kernel(p, 0.3).spatial_margin();
  const auto m2 = stpp::fit_kernel(p, 0.5).spatial_margin();
  const auto rs = voronoi_deviance(p, m1, m2);
  double ll = 0.0;
  for (const auto& e : p.events) ll += std::log(m1.at(e.location)) - std::log(m2.at(e.location));
  ll -= m1.integral(w.boundary) - m2.integral(w.boundary);
  EXPECT_NEAR(rs.score, ll, 1e-6);
}

TEST(Pixel, RawEmptyPixelAndRefinement) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  stpp::PointPattern p;
  p.window = w;
  p.period = {1, 1};
  p.events = {{{0.1, 0.1}, 1}, {{0.15, 0.2}, 1}};
  const double lam = 5.0;
  const auto g4 = PixelGrid::over(w, 4, 4);
  const auto rs = pixel_residuals(p, g4, Kind::Raw, HomogeneousIntensity{lam});
  EXPECT_NEAR(rs.values[g4.index_of({0.9, 0.9})], -lam / 16.0, 1e-12);
  EXPECT_NEAR(rs.values[g4.index_of({0.1, 0.1})], 2.0 - lam / 16.0, 1e-12);

  const auto q = poisson_pattern(50, w, 6);
  const auto lamk = stpp::fit_kernel(q, 0.2).spatial_margin();
  const double whole = 50.0 - lamk.integral(w.boundary);
  for (int m : {1, 3, 8}) {
    EXPECT_NEAR(pixel_residuals(q, PixelGrid::over(w, m, m), Kind::Raw, lamk).score, whole, 1e-8);
  }
}

TEST(Pixel, DevianceIdenticalAndPearsonHomogeneous) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto q = poisson_pattern(40, w, 7);
  const auto m = stpp::fit_kernel(q, 0.3).spatial_margin();
  const auto g = PixelGrid::over(w, 5, 5);
  const auto d = pixel_residuals(q, g, Kind::Deviance, m, &m);
  for (double v : d.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(pixel_residuals(q, g, Kind::Deviance, m), Error);

  const HomogeneousIntensity h{40.0};
  const auto pr = pixel_residuals(q, g, Kind::Pearson, h);
  std::vector<int> counts(g.pixels.size(), 0);
  for (const auto& e : q.events) ++counts[g.index_of(e.location)];
  for (std::size_t k = 0; k < g.pixels.size(); ++k) {
    EXPECT_NEAR(pr.values[k], counts[k] / std::sqrt(40.0) - std::sqrt(40.0) * 0.04, 1e-12);
  }
}

TEST(NTest, DominanceAndCalibration) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto p = poisson_pattern(40, w, 8);
  const auto m = stpp::fit_homogeneous(p);
  EXPECT_LT(n_test(p, m.scaled(3.0), 200, 1), 0.05);
  EXPECT_GT(n_test(p, m.scaled(0.3), 200, 1), 0.95);
  const double f = n_test(p, m, 400, 2);
  EXPECT_GT(f, 0.05);
  EXPECT_LT(f, 0.95);
  EXPECT_EQ(n_test(p, m, 50, 3), n_test(p, m, 50, 3));
}

TEST(LTest, CalibrationAndRejection) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto base = poisson_pattern(60, w, 9);
  const auto model = stpp::fit_kernel(base, 0.3);
  const stpp::LocationSampler sampler(model.spatial(), w);
  Rng rng(77);
  const auto sim = stpp::simulate_pattern(model, sampler, rng);
  const double f = l_test(sim, model, 400, 4);
  EXPECT_GT(f, 0.05);
  EXPECT_LT(f, 0.95);

  // Events outside the kernel support have zero likelihood.
  const std::vector<GeoPoint> support{{0.1, 0.1}, {0.12, 0.1}};
  stpp::PointPattern tight;
  tight.window = w;
  tight.period = {1, 5};
  tight.events = {{{0.1, 0.1}, 1}, {{0.12, 0.1}, 3}};
  const auto narrow = stpp::fit_kernel(tight, 0.05);
  stpp::PointPattern far;
  far.window = w;
  far.period = {1, 5};
  far.events = {{{0.9, 0.9}, 2}};
  EXPECT_EQ(l_test(far, narrow, 100, 5), 0.0);

  const double one = l_test(sim, model, 1, 6);
  EXPECT_TRUE(one == 0.0 || one == 1.0);
}

TEST(Export, CsvHeaderAndRows) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto p = poisson_pattern(5, w, 10);
  const auto rs = voronoi_raw(p, HomogeneousIntensity{5.0});
  std::ostringstream out;
  write_csv(out, rs);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cell_id,kind,value,cell_area,generator_lon,generator_lat");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind(std::to_string(rows) + ",raw,", 0), 0u);
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}
