#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "quakesim/geo.hpp"
#include "quakesim/stpp.hpp"

namespace quakesim::residuals {

using geo::Polygon;
using stpp::PointPattern;
using stpp::SeparableIntensityModel;
using stpp::SpatialModel;

enum class Kind { Raw, Pearson, Deviance };

constexpr std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Raw: return "raw";
    case Kind::Pearson: return "pearson";
    case Kind::Deviance: return "deviance";
  }
  return "raw";
}

/// One residual per cell. For Voronoi residuals `generators[i]` is the event
/// owning cell i; for pixel residuals it is the pixel centre.
struct ResidualSet {
  Kind kind = Kind::Raw;
  std::vector<Polygon> cells;
  std::vector<geo::GeoPoint> generators;
  std::vector<double> values;
  std::vector<double> cell_areas;
  /// Σ values by compensated sequential summation.
  double score = 0.0;

  std::size_t size() const { return values.size(); }
};

namespace detail {

inline ResidualSet make_set(Kind kind, std::vector<Polygon> cells, std::vector<geo::GeoPoint> gens) {
  ResidualSet rs;
  rs.kind = kind;
  rs.cells = std::move(cells);
  rs.generators = std::move(gens);
  rs.values.assign(rs.cells.size(), 0.0);
  rs.cell_areas.reserve(rs.cells.size());
  for (const auto& c : rs.cells) rs.cell_areas.push_back(c.area());
  return rs;
}

inline void finish(ResidualSet& rs) {
  KahanSum s;
  for (double v : rs.values) s.add(v);
  rs.score = s.value();
}

inline double positive_intensity(const SpatialModel& m, const geo::GeoPoint& x, std::size_t index) {
  const double v = m.at(x);
  require(v > 0.0, ErrorCode::ZeroIntensityAtEvent, "intensity vanishes at an event", std::to_string(index));
  return v;
}

}  // namespace detail

inline geo::VoronoiDiagram tessellate(const PointPattern& pattern) {
  const auto locs = pattern.locations();
  return geo::voronoi_tessellate(locs, pattern.window);
}

/// r_i = 1 − ∫_{C_i} λ̂.
inline ResidualSet voronoi_raw(const geo::VoronoiDiagram& vd, const SpatialModel& model) {
  auto rs = detail::make_set(Kind::Raw, vd.cells, vd.generators);
  for (std::size_t i = 0; i < vd.size(); ++i) rs.values[i] = 1.0 - model.integral(vd.cells[i]);
  detail::finish(rs);
  return rs;
}

/// r_i = λ̂(x_i)^(−1/2) − ∫_{C_i} √λ̂.
inline ResidualSet voronoi_pearson(const geo::VoronoiDiagram& vd, const SpatialModel& model) {
  auto rs = detail::make_set(Kind::Pearson, vd.cells, vd.generators);
  for (std::size_t i = 0; i < vd.size(); ++i) {
    const double lam = detail::positive_intensity(model, vd.generators[i], i);
    rs.values[i] = 1.0 / std::sqrt(lam) - model.sqrt_integral(vd.cells[i]);
  }
  detail::finish(rs);
  return rs;
}

/// r_i = [log λ̂₁(x_i) − ∫_{C_i} λ̂₁] − [log λ̂₂(x_i) − ∫_{C_i} λ̂₂], on one
/// shared tessellation. The score Σ r_i is a log-likelihood ratio.
inline ResidualSet voronoi_deviance(const geo::VoronoiDiagram& vd, const SpatialModel& model1,
                                    const SpatialModel& model2) {
  auto rs = detail::make_set(Kind::Deviance, vd.cells, vd.generators);
  for (std::size_t i = 0; i < vd.size(); ++i) {
    const double l1 = detail::positive_intensity(model1, vd.generators[i], i);
    const double l2 = detail::positive_intensity(model2, vd.generators[i], i);
    const double a = std::log(l1) - model1.integral(vd.cells[i]);
    const double b = std::log(l2) - model2.integral(vd.cells[i]);
    rs.values[i] = a - b;
  }
  detail::finish(rs);
  return rs;
}

inline ResidualSet voronoi_raw(const PointPattern& p, const SpatialModel& m) { return voronoi_raw(tessellate(p), m); }
inline ResidualSet voronoi_pearson(const PointPattern& p, const SpatialModel& m) {
  return voronoi_pearson(tessellate(p), m);
}
inline ResidualSet voronoi_deviance(const PointPattern& p, const SpatialModel& m1, const SpatialModel& m2) {
  return voronoi_deviance(tessellate(p), m1, m2);
}

// ---------------------------------------------------------------------------
// Pixel residuals

/// Regular nx × ny partition of the window's bounding box, each pixel
/// clipped to the window.
struct PixelGrid {
  geo::BBox bbox;
  int nx = 1;
  int ny = 1;
  std::vector<Polygon> pixels;  // row-major in (ix, iy): index = ix * ny + iy

  static PixelGrid over(const geo::SpatialWindow& window, int nx, int ny) {
    require(nx >= 1 && ny >= 1, ErrorCode::InvalidArgument, "pixel grid needs at least one cell");
    PixelGrid g;
    g.bbox = window.bbox;
    g.nx = nx;
    g.ny = ny;
    const double dx = g.bbox.width() / nx;
    const double dy = g.bbox.height() / ny;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const double x0 = g.bbox.lon_min + i * dx;
        const double x1 = i + 1 == nx ? g.bbox.lon_max : x0 + dx;
        const double y0 = g.bbox.lat_min + j * dy;
        const double y1 = j + 1 == ny ? g.bbox.lat_max : y0 + dy;
        auto clip = [&](geo::Ring r) {
          r = geo::clip_halfplane(r, {-1, 0}, -x0);
          r = geo::clip_halfplane(r, {1, 0}, x1);
          r = geo::clip_halfplane(r, {0, -1}, -y0);
          return geo::clip_halfplane(r, {0, 1}, y1);
        };
        Polygon px;
        px.exterior = clip(window.boundary.exterior);
        for (const auto& h : window.boundary.holes) {
          auto c = clip(h);
          if (c.size() >= 3) px.holes.push_back(std::move(c));
        }
        g.pixels.push_back(std::move(px));
      }
    }
    return g;
  }

  std::size_t index_of(const geo::GeoPoint& p) const {
    const int i = std::clamp(static_cast<int>((p.lon - bbox.lon_min) / bbox.width() * nx), 0, nx - 1);
    const int j = std::clamp(static_cast<int>((p.lat - bbox.lat_min) / bbox.height() * ny), 0, ny - 1);
    return static_cast<std::size_t>(i * ny + j);
  }

  geo::GeoPoint centre(std::size_t k) const {
    const int i = static_cast<int>(k) / ny;
    const int j = static_cast<int>(k) % ny;
    return {bbox.lon_min + (i + 0.5) * bbox.width() / nx, bbox.lat_min + (j + 0.5) * bbox.height() / ny};
  }
};

inline ResidualSet pixel_residuals(const PointPattern& pattern, const PixelGrid& grid, Kind kind,
                                   const SpatialModel& model1, const SpatialModel* model2 = nullptr) {
  require(kind != Kind::Deviance || model2 != nullptr, ErrorCode::InvalidArgument,
          "deviance residuals need two models");
  std::vector<geo::GeoPoint> centres;
  for (std::size_t k = 0; k < grid.pixels.size(); ++k) centres.push_back(grid.centre(k));
  auto rs = detail::make_set(kind, grid.pixels, centres);

  std::vector<std::vector<std::size_t>> members(grid.pixels.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) members[grid.index_of(pattern.events[i].location)].push_back(i);

  for (std::size_t k = 0; k < grid.pixels.size(); ++k) {
    const auto& px = grid.pixels[k];
    switch (kind) {
      case Kind::Raw:
        rs.values[k] = static_cast<double>(members[k].size()) - model1.integral(px);
        break;
      case Kind::Pearson: {
        double s = 0.0;
        for (auto i : members[k]) s += 1.0 / std::sqrt(detail::positive_intensity(model1, pattern.events[i].location, i));
        rs.values[k] = s - (px.empty() ? 0.0 : model1.sqrt_integral(px));
        break;
      }
      case Kind::Deviance: {
        double a = 0.0;
        double b = 0.0;
        for (auto i : members[k]) {
          a += std::log(detail::positive_intensity(model1, pattern.events[i].location, i));
          b += std::log(detail::positive_intensity(*model2, pattern.events[i].location, i));
        }
        rs.values[k] = (a - model1.integral(px)) - (b - model2->integral(px));
        break;
      }
    }
  }
  detail::finish(rs);
  return rs;
}

// ---------------------------------------------------------------------------
// Simulation-based tests

/// Fraction of s simulated totals strictly below the observed count.
inline double n_test(const PointPattern& pattern, const SeparableIntensityModel& model, int s, std::uint64_t seed) {
  require(s >= 1, ErrorCode::InvalidArgument, "need at least one simulation");
  const auto observed = static_cast<std::int64_t>(pattern.size());
  int below = 0;
  for (int k = 0; k < s; ++k) {
    Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(k), StreamPurpose::Count);
    if (rng.poisson(model.mass()) < observed) ++below;
  }
  return static_cast<double>(below) / s;
}

/// ℓ = Σ log λ(x_i, t_i) − ∫_{A×T} λ; −∞ when some event has zero intensity.
inline double log_likelihood(const PointPattern& pattern, const SeparableIntensityModel& model) {
  KahanSum s;
  for (const auto& e : pattern.events) {
    const double v = model.at(e.location, e.year);
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    s.add(std::log(v));
  }
  return s.value() - model.mass();
}

/// Fraction of simulated log-likelihoods strictly below the observed one.
inline double l_test(const PointPattern& pattern, const SeparableIntensityModel& model, int s, std::uint64_t seed) {
  require(s >= 1, ErrorCode::InvalidArgument, "need at least one simulation");
  const double observed = log_likelihood(pattern, model);
  const stpp::LocationSampler sampler(model.spatial(), model.window());
  int below = 0;
  for (int k = 0; k < s; ++k) {
    Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(k), StreamPurpose::Location);
    const auto sim = stpp::simulate_pattern(model, sampler, rng);
    if (log_likelihood(sim, model) < observed) ++below;
  }
  return static_cast<double>(below) / s;
}

// ---------------------------------------------------------------------------
// Export

inline void write_csv(std::ostream& out, const ResidualSet& rs) {
  out << "cell_id,kind,value,cell_area,generator_lon,generator_lat\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    out << i << ',' << to_string(rs.kind) << ',' << rs.values[i] << ',' << rs.cell_areas[i] << ','
        << rs.generators[i].lon << ',' << rs.generators[i].lat << '\n';
  }
}

}  // namespace quakesim::residuals
