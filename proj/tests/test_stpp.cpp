#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "quakesim/integrate.hpp"
#include "quakesim/stpp.hpp"

using namespace quakesim;
using namespace quakesim::stpp;
using geo::GeoPoint;
using geo::Polygon;
using geo::SpatialWindow;

namespace {

PointPattern uniform_pattern(std::size_t n, const SpatialWindow& w, std::uint64_t seed, Period period = {1, 10}) {
  Rng rng(seed);
  PointPattern p;
  p.window = w;
  p.period = period;
  while (p.events.size() < n) {
    const GeoPoint x{rng.uniform(w.bbox.lon_min, w.bbox.lon_max), rng.uniform(w.bbox.lat_min, w.bbox.lat_max)};
    if (!w.contains(x)) continue;
    const int year = period.start + static_cast<int>(rng() % static_cast<std::uint64_t>(period.length()));
    p.events.push_back({x, year});
  }
  return p;
}

PointPattern clustered_pattern(std::size_t n, const SpatialWindow& w, std::uint64_t seed) {
  Rng rng(seed);
  PointPattern p;
  p.window = w;
  p.period = {1, 10};
  const std::vector<GeoPoint> centres{{0.3, 0.3}, {0.7, 0.7}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centres[i % 2];
    p.events.push_back({{c.lon + rng.normal(0, 0.02), c.lat + rng.normal(0, 0.02)}, 1 + static_cast<int>(i % 10)});
  }
  return p;
}

// Direct evaluation of Σ k_h by brute force, independent of the bucket index.
double brute_kernel(const std::vector<GeoPoint>& pts, double h, const GeoPoint& x) {
  double s = 0.0;
  for (const auto& p : pts) {
    const double u = std::hypot(x.lon - p.lon, x.lat - p.lat) / h;
    if (u < 1.0) s += 3.0 / kPi * (1 - u * u) * (1 - u * u);
  }
  return s / (h * h);
}

}  // namespace

TEST(Silverman, FormulaValue) {
  EXPECT_NEAR(silverman_rule(1.0, 0.9 * 1.34, 100), 0.3225, 1e-4);
  // Tie between the two branches.
  EXPECT_DOUBLE_EQ(silverman_rule(2.0, 2.0 * 1.34, 50), 0.9 * 2.0 * std::pow(50.0, -0.2));
}

TEST(Silverman, ScaleEquivariance) {
  const std::vector<double> t{1, 2, 2, 3, 5, 8, 13, 21, 34};
  std::vector<double> t2;
  for (double x : t) t2.push_back(2 * x);
  EXPECT_NEAR(silverman_bandwidth(t2), 2 * silverman_bandwidth(t), 1e-12);
}

TEST(Silverman, ZeroSpread) {
  const std::vector<double> t{4, 4, 4, 4};
  try {
    silverman_bandwidth(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroSpread);
  }
}

TEST(SpatialKernel, PointValues) {
  const std::vector<GeoPoint> one{{0, 0}};
  EXPECT_NEAR(SpatialKernelIntensity(one, 1.0).at({0, 0}), 3.0 / kPi, 1e-15);
  EXPECT_NEAR(SpatialKernelIntensity(one, 2.0).at({0, 0}), 3.0 / (4.0 * kPi), 1e-15);
  EXPECT_EQ(SpatialKernelIntensity(one, 1.0).at({1.0, 0}), 0.0);
  EXPECT_EQ(SpatialKernelIntensity(one, 1.0).at({0.8, 0.9}), 0.0);
}

TEST(SpatialKernel, MatchesBruteForce) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(300, w, 11);
  const auto pts = pat.locations();
  const SpatialKernelIntensity k(pts, 0.13);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint x{rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
    EXPECT_NEAR(k.at(x), brute_kernel(pts, 0.13, x), 1e-9);
  }
}

TEST(SpatialKernel, MassConservation) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(50, w, 2);
  const auto pts = pat.locations();
  const SpatialKernelIntensity k(pts, 0.2);
  const auto big = Polygon::rectangle(-1, -1, 2, 2);
  EXPECT_NEAR(k.integral(big) / 50.0, 1.0, 1e-4);
  EXPECT_LE(k.integral(w.boundary), 50.0);
}

TEST(SpatialKernel, IntegralMatchesMidpointOracle) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(40, w, 9);
  const auto pts = pat.locations();
  const SpatialKernelIntensity k(pts, 0.17);
  const Polygon region(geo::Ring{{0.1, 0.1}, {0.8, 0.2}, {0.6, 0.5}, {0.9, 0.9}, {0.2, 0.7}});
  const double exact = k.integral(region);
  const double oracle = integrate::midpoint_grid([&](geo::Vec2 v) { return brute_kernel(pts, 0.17, {v.x, v.y}); },
                                                 region, 1e-5);
  EXPECT_NEAR(exact, oracle, 2e-3 * oracle);
  const double sq = k.sqrt_integral(region);
  const double sq_oracle = integrate::midpoint_grid(
      [&](geo::Vec2 v) { return std::sqrt(brute_kernel(pts, 0.17, {v.x, v.y})); }, region, 1e-5);
  EXPECT_NEAR(sq, sq_oracle, 2e-3 * sq_oracle);
}

TEST(SpatialKernel, IntegralAdditive) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(60, w, 4);
  const auto pts = pat.locations();
  const SpatialKernelIntensity k(pts, 0.15);
  const auto left = Polygon::rectangle(0, 0, 0.37, 1);
  const auto right = Polygon::rectangle(0.37, 0, 1, 1);
  EXPECT_NEAR(k.integral(left) + k.integral(right), k.integral(w.boundary), 1e-8);
}

TEST(SpatialKernel, HoleIsExcluded) {
  const std::vector<GeoPoint> one{{0.5, 0.5}};
  const SpatialKernelIntensity k(one, 0.3);
  const Polygon with_hole(geo::Ring{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {geo::Ring{{0.4, 0.4}, {0.6, 0.4}, {0.6, 0.6}, {0.4, 0.6}}});
  const auto hole = Polygon::rectangle(0.4, 0.4, 0.6, 0.6);
  EXPECT_NEAR(k.integral(with_hole) + k.integral(hole), 1.0, 1e-9);
}

TEST(Homogeneous, RateAndMass) {
  const auto w = SpatialWindow::rectangle(0, 0, 5, 1);
  const auto pat = uniform_pattern(10, w, 1, {2000, 2009});
  const auto m = fit_homogeneous(pat);
  EXPECT_EQ(m.kind(), 'P');
  EXPECT_NEAR(m.spatial().homogeneous()->rate, 2.0, 1e-12);
  EXPECT_NEAR(integrate_intensity(m, w.boundary), 10.0, 1e-12);
  EXPECT_NEAR(m.mass(), 10.0, 1e-12);
  const auto sq = Polygon::rectangle(0, 0, 2, 1);
  EXPECT_NEAR(integrate_intensity(m.spatial(), sq), 4.0, 1e-12);

  PointPattern empty;
  empty.window = w;
  empty.period = {1, 2};
  EXPECT_THROW(fit_homogeneous(empty), Error);
}

TEST(KernelModel, MassIsN) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(80, w, 8, {1900, 1949});
  const auto m = fit_kernel(pat, 0.2);
  EXPECT_EQ(m.kind(), 'H');
  EXPECT_NEAR(m.mass(), 80.0, 1e-9);
  EXPECT_NEAR(m.spatial_margin().integral(w.boundary), 80.0, 1e-9);
  EXPECT_GT(m.at({0.5, 0.5}, 1920), 0.0);
}

TEST(Bandwidth, SingletonGrid) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(30, w, 3);
  EXPECT_DOUBLE_EQ(select_bandwidth(pat, BandwidthMethod::Lcv, {0.4}).h, 0.4);
  EXPECT_DOUBLE_EQ(select_bandwidth(pat, BandwidthMethod::Mse, {0.4}).h, 0.4);
}

TEST(Bandwidth, ScaleEquivariance) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(60, w, 21);
  const double c = 3.0;
  PointPattern scaled = pat;
  scaled.window = SpatialWindow::rectangle(0, 0, c, c);
  for (auto& e : scaled.events) e.location = {e.location.lon * c, e.location.lat * c};
  const auto grid = default_bandwidth_grid(pat);
  std::vector<double> grid_c;
  for (double h : grid) grid_c.push_back(h * c);
  for (auto method : {BandwidthMethod::Lcv, BandwidthMethod::Mse}) {
    const double h1 = select_bandwidth(pat, method, grid).h;
    const double h2 = select_bandwidth(scaled, method, grid_c).h;
    EXPECT_NEAR(h2, c * h1, 1e-9 * h2);
  }
}

TEST(Bandwidth, RelabelingInvariance) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(50, w, 31);
  PointPattern rev = pat;
  std::reverse(rev.events.begin(), rev.events.end());
  const auto grid = default_bandwidth_grid(pat);
  for (auto method : {BandwidthMethod::Lcv, BandwidthMethod::Mse}) {
    EXPECT_DOUBLE_EQ(select_bandwidth(pat, method, grid).h, select_bandwidth(rev, method, grid).h);
  }
}

TEST(Bandwidth, ClusteredSelectsSmaller) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto clustered = clustered_pattern(100, w, 5);
  const auto uniform = uniform_pattern(100, w, 5);
  const auto grid = default_bandwidth_grid(uniform);
  const double hc = select_bandwidth(clustered, BandwidthMethod::Lcv, grid).h;
  const double hu = select_bandwidth(uniform, BandwidthMethod::Lcv, grid).h;
  EXPECT_LE(hc, hu);
}

TEST(Bandwidth, IsolatedPoints) {
  const auto w = SpatialWindow::rectangle(0, 0, 10, 10);
  PointPattern p;
  p.window = w;
  p.period = {1, 1};
  p.events = {{{1, 1}, 1}, {{1.01, 1}, 1}, {{9, 9}, 1}};
  try {
    select_bandwidth(p, BandwidthMethod::Lcv, {0.05, 0.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IsolatedPoints);
    EXPECT_EQ(e.details(), "2");
  }
}

TEST(Bandwidth, DefaultGridSpan) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto pat = uniform_pattern(40, w, 6);
  const auto locs = pat.locations();
  const auto grid = default_bandwidth_grid(pat);
  ASSERT_EQ(grid.size(), 32u);
  EXPECT_NEAR(grid.front(), 0.1 * mean_nearest_neighbour(locs), 1e-12);
  EXPECT_NEAR(grid.back(), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Simulation, Deterministic) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto m = fit_kernel(uniform_pattern(40, w, 1), 0.2);
  const auto a = simulate_catalog(m, 200, 99);
  const auto b = simulate_catalog(m, 200, 99);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].year, b[i].year);
    EXPECT_EQ(a[i].location, b[i].location);
  }
  const auto c = simulate_catalog(m, 200, 100);
  EXPECT_FALSE(a.size() == c.size() && a.front().location == c.front().location);
}

TEST(Simulation, PoissonMeanCount) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto m = fit_homogeneous(uniform_pattern(10, w, 1));
  const int years = 100000;
  const double nu = 1.16;
  const auto cat = simulate_catalog(m, years, 7, {nu});
  const double mean = static_cast<double>(cat.size()) / years;
  EXPECT_NEAR(mean, nu, 3.0 * std::sqrt(nu / years));
}

TEST(Simulation, HomogeneousLocationsUniform) {
  const auto w = SpatialWindow::rectangle(-80, 40, -60, 50);
  const auto m = fit_homogeneous(uniform_pattern(10, w, 1));
  const auto cat = simulate_catalog(m, 4000, 17, {1.0});
  // One-dimensional KS statistic per coordinate, Bonferroni over two tests.
  auto ks = [&](auto coord, double lo, double hi) {
    std::vector<double> u;
    for (const auto& e : cat) u.push_back((coord(e.location) - lo) / (hi - lo));
    std::sort(u.begin(), u.end());
    double d = 0.0;
    const double n = static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
    }
    return d * std::sqrt(n);
  };
  const double crit = 1.73;  // Kolmogorov 0.995 quantile
  EXPECT_LT(ks([](const GeoPoint& p) { return p.lon; }, -80, -60), crit);
  EXPECT_LT(ks([](const GeoPoint& p) { return p.lat; }, 40, 50), crit);
}

TEST(Simulation, KernelHistogramMatchesCellMasses) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const auto m = fit_kernel(clustered_pattern(60, w, 3), 0.15);
  const auto cat = simulate_catalog(m, 5000, 23, {1.0});
  const int g = 4;
  std::vector<double> obs(g * g, 0.0), expct(g * g, 0.0);
  const double total_mass = m.spatial().integral(w.boundary);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const auto cell = Polygon::rectangle(double(i) / g, double(j) / g, double(i + 1) / g, double(j + 1) / g);
      expct[i * g + j] = m.spatial().integral(cell) / total_mass * static_cast<double>(cat.size());
    }
  }
  for (const auto& e : cat) {
    const int i = std::min(g - 1, static_cast<int>(e.location.lon * g));
    const int j = std::min(g - 1, static_cast<int>(e.location.lat * g));
    obs[i * g + j] += 1;
  }
  double chi2 = 0.0;
  int dof = -1;
  for (int k = 0; k < g * g; ++k) {
    if (expct[k] < 5.0) continue;
    chi2 += (obs[k] - expct[k]) * (obs[k] - expct[k]) / expct[k];
    ++dof;
  }
  const boost::math::chi_squared dist(dof);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(Simulation, SamplerSetupError) {
  const auto w = SpatialWindow::rectangle(0, 0, 1, 1);
  const LocationSampler ok(HomogeneousIntensity{1.0}, w);
  try {
    LocationSampler bad(HomogeneousIntensity{0.0}, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SimulationSetupError);
  }
}
