#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "quakesim/core.hpp"
#include "quakesim/geo.hpp"
#include "quakesim/integrate.hpp"

namespace quakesim::stpp {

using geo::GeoPoint;
using geo::Polygon;
using geo::SpatialWindow;
using geo::Vec2;

struct Event {
  GeoPoint location;
  int year = 0;
};

/// Inclusive range of integer years.
struct Period {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int y) const { return y >= start && y <= end; }
};

struct PointPattern {
  std::vector<Event> events;
  SpatialWindow window;
  Period period;

  std::size_t size() const { return events.size(); }

  std::vector<GeoPoint> locations() const {
    std::vector<GeoPoint> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.location);
    return out;
  }

  std::vector<double> years() const {
    std::vector<double> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(static_cast<double>(e.year));
    return out;
  }

  void validate() const {
    require(!events.empty(), ErrorCode::InvalidArgument, "point pattern is empty");
    require(period.end >= period.start, ErrorCode::InvalidArgument, "period end before start");
    for (std::size_t i = 0; i < events.size(); ++i) {
      geo::validate(events[i].location);
      require(window.contains(events[i].location), ErrorCode::OutOfWindow, "event outside window",
              std::to_string(i));
      require(period.contains(events[i].year), ErrorCode::InvalidArgument, "event outside period",
              std::to_string(i));
    }
  }
};

// ---------------------------------------------------------------------------
// Quartic kernel

/// k(u) = (3/π)(1 − u²)² on [0, 1], a radially symmetric bivariate density.
struct QuarticKernel {
  static double value(double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return (3.0 / kPi) * w * w;
  }

  /// ∫_0^ρ k(s) s ds; saturates at 1/(2π).
  static double radial_mass(double rho) {
    if (rho >= 1.0) return 1.0 / (2.0 * kPi);
    const double w = 1.0 - rho * rho;
    return (1.0 - w * w * w) / (2.0 * kPi);
  }

  /// (k * k)(d): self-convolution of the unit kernel at separation d.
  static double self_convolution(double d) {
    static const std::vector<double> table = build_convolution_table();
    if (d >= 2.0) return 0.0;
    const double pos = d / kConvStep;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= table.size()) return table.back();
    const double f = pos - static_cast<double>(i);
    return table[i] * (1.0 - f) + table[i + 1] * f;
  }

 private:
  static constexpr double kConvStep = 1.0 / 512.0;

  static std::vector<double> build_convolution_table() {
    using boost::math::quadrature::gauss;
    std::vector<double> out;
    const std::size_t n = static_cast<std::size_t>(2.0 / kConvStep) + 1;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = static_cast<double>(k) * kConvStep;
      if (d >= 2.0) {
        out.push_back(0.0);
        continue;
      }
      // Polar coordinates around the first kernel's centre; integrate the
      // second kernel over φ ∈ [0, φmax(r)] and double for symmetry.
      auto radial = [d](double r) {
        if (r <= 0.0) return 0.0;
        double phimax = kPi;
        if (d > 0.0) {
          const double c = (r * r + d * d - 1.0) / (2.0 * r * d);
          if (c >= 1.0) return 0.0;
          phimax = c <= -1.0 ? kPi : std::acos(c);
        } else if (r >= 1.0) {
          return 0.0;
        }
        auto inner = [r, d](double phi) {
          return value(std::sqrt(std::max(0.0, r * r + d * d - 2.0 * r * d * std::cos(phi))));
        };
        return 2.0 * value(r) * r * gauss<double, 30>::integrate(inner, 0.0, phimax);
      };
      out.push_back(gauss<double, 30>::integrate(radial, 0.0, 1.0));
    }
    return out;
  }
};

/// Uniform bucket grid for fixed-radius neighbour queries.
class PointIndex {
 public:
  PointIndex() = default;
  PointIndex(std::vector<Vec2> pts, double cell) : pts_(std::move(pts)), cell_(cell) {
    if (pts_.empty()) return;
    x0_ = y0_ = std::numeric_limits<double>::infinity();
    double x1 = -x0_, y1 = -y0_;
    for (const auto& p : pts_) {
      x0_ = std::min(x0_, p.x);
      y0_ = std::min(y0_, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    nx_ = std::max<long>(1, std::min<long>(4096, static_cast<long>((x1 - x0_) / cell_) + 1));
    ny_ = std::max<long>(1, std::min<long>(4096, static_cast<long>((y1 - y0_) / cell_) + 1));
    cell_x_ = std::max(cell_, (x1 - x0_) / static_cast<double>(nx_) * (1.0 + 1e-12));
    cell_y_ = std::max(cell_, (y1 - y0_) / static_cast<double>(ny_) * (1.0 + 1e-12));
    start_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
    std::vector<std::size_t> bucket(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      bucket[i] = static_cast<std::size_t>(cell_of(pts_[i]));
      ++start_[bucket[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    order_.resize(pts_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts_.size(); ++i) order_[fill[bucket[i]]++] = i;
  }

  const std::vector<Vec2>& points() const { return pts_; }

  /// Calls fn(index, distance) for each point within `radius` of q.
  template <typename Fn>
  void for_each_within(Vec2 q, double radius, Fn&& fn) const {
    if (pts_.empty()) return;
    const long ix0 = clampx(static_cast<long>(std::floor((q.x - radius - x0_) / cell_x_)));
    const long ix1 = clampx(static_cast<long>(std::floor((q.x + radius - x0_) / cell_x_)));
    const long iy0 = clampy(static_cast<long>(std::floor((q.y - radius - y0_) / cell_y_)));
    const long iy1 = clampy(static_cast<long>(std::floor((q.y + radius - y0_) / cell_y_)));
    if (q.x + radius < x0_ || q.y + radius < y0_) return;
    if (q.x - radius > x0_ + cell_x_ * nx_ || q.y - radius > y0_ + cell_y_ * ny_) return;
    for (long ix = ix0; ix <= ix1; ++ix) {
      for (long iy = iy0; iy <= iy1; ++iy) {
        const auto c = static_cast<std::size_t>(ix * ny_ + iy);
        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
          const std::size_t i = order_[k];
          const double d = geo::norm(pts_[i] - q);
          if (d < radius) fn(i, d);
        }
      }
    }
  }

 private:
  long clampx(long v) const { return std::clamp<long>(v, 0, nx_ - 1); }
  long clampy(long v) const { return std::clamp<long>(v, 0, ny_ - 1); }
  long cell_of(Vec2 p) const {
    const long ix = clampx(static_cast<long>((p.x - x0_) / cell_x_));
    const long iy = clampy(static_cast<long>((p.y - y0_) / cell_y_));
    return ix * ny_ + iy;
  }

  std::vector<Vec2> pts_;
  double cell_ = 1.0;
  double cell_x_ = 1.0, cell_y_ = 1.0;
  double x0_ = 0.0, y0_ = 0.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

// ---------------------------------------------------------------------------
// Spatial intensities

/// Constant rate everywhere (model "P").
struct HomogeneousIntensity {
  double rate = 0.0;

  double at(const GeoPoint&) const { return rate; }
  double integral(const Polygon& region) const { return rate * region.area(); }
  double sqrt_integral(const Polygon& region) const { return std::sqrt(rate) * region.area(); }
  double upper_bound(const geo::BBox&) const { return rate; }
};

/// λ̂_X(x) = scale · Σ_i k_h(‖x − x_i‖), with no edge correction.
class SpatialKernelIntensity {
 public:
  SpatialKernelIntensity() = default;
  SpatialKernelIntensity(std::span<const GeoPoint> support, double bandwidth, double scale = 1.0)
      : h_(bandwidth), scale_(scale) {
    require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorCode::InvalidArgument,
            "bandwidth must be positive");
    require(!support.empty(), ErrorCode::InvalidArgument, "kernel needs support points");
    std::vector<Vec2> pts;
    pts.reserve(support.size());
    for (const auto& p : support) pts.push_back(geo::to_vec(p));
    index_ = PointIndex(std::move(pts), bandwidth);
  }

  double bandwidth() const { return h_; }
  double scale() const { return scale_; }
  std::size_t size() const { return index_.points().size(); }
  const std::vector<Vec2>& support() const { return index_.points(); }

  SpatialKernelIntensity scaled(double factor) const {
    SpatialKernelIntensity out = *this;
    out.scale_ *= factor;
    return out;
  }

  double at(const GeoPoint& x) const { return at(geo::to_vec(x), std::nullopt); }

  /// Leave-one-out estimate at support point `skip`.
  double leave_one_out(std::size_t skip) const { return at(index_.points()[skip], skip); }

  /// Integral over the whole plane: scale · n.
  double total_mass() const { return scale_ * static_cast<double>(size()); }

  /// ∫_region λ̂ computed kernel by kernel with an exact radial
  /// decomposition over polygon edges.
  double integral(const Polygon& region) const {
    if (region.empty()) return 0.0;
    double s = ring_integral(region.exterior);
    for (const auto& h : region.holes) s -= ring_integral(h);
    return scale_ * s;
  }

  /// ∫_region √λ̂ by adaptive cubature.
  double sqrt_integral(const Polygon& region, double rel_tol = 1e-6) const {
    return integrate::over_polygon([this](Vec2 x) { return std::sqrt(at(x, std::nullopt)); }, region,
                                   rel_tol, 9);
  }

  /// Upper bound on λ̂ over an axis-aligned box: each kernel evaluated at its
  /// minimum distance to the box.
  double upper_bound(const geo::BBox& box) const {
    const Vec2 c{0.5 * (box.lon_min + box.lon_max), 0.5 * (box.lat_min + box.lat_max)};
    const double half_diag = 0.5 * box.diagonal();
    double s = 0.0;
    index_.for_each_within(c, h_ + half_diag, [&](std::size_t i, double) {
      const Vec2 p = index_.points()[i];
      const double dx = std::max({box.lon_min - p.x, 0.0, p.x - box.lon_max});
      const double dy = std::max({box.lat_min - p.y, 0.0, p.y - box.lat_max});
      s += QuarticKernel::value(std::hypot(dx, dy) / h_);
    });
    return scale_ * s / (h_ * h_);
  }

 private:
  double at(Vec2 x, std::optional<std::size_t> skip) const {
    double s = 0.0;
    index_.for_each_within(x, h_, [&](std::size_t i, double d) {
      if (skip && *skip == i) return;
      s += QuarticKernel::value(d / h_);
    });
    return scale_ * s / (h_ * h_);
  }

  /// Σ_i ∫_{ring} k_h(‖x − x_i‖) dx with the ring's orientation made positive.
  double ring_integral(const geo::Ring& ring) const {
    const std::size_t m = ring.size();
    if (m < 3) return 0.0;
    const auto bb = geo::bbox_of(ring);
    const Vec2 c{0.5 * (bb.lon_min + bb.lon_max), 0.5 * (bb.lat_min + bb.lat_max)};
    const double orient = geo::signed_area(ring) >= 0.0 ? 1.0 : -1.0;
    double total = 0.0;
    index_.for_each_within(c, h_ + 0.5 * bb.diagonal() + 1e-12, [&](std::size_t i, double) {
      const Vec2 p = index_.points()[i];
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        s += edge_term(geo::to_vec(ring[k]) - p, geo::to_vec(ring[(k + 1) % m]) - p);
      }
      total += s;
    });
    return orient * total;
  }

  /// Signed ∫ over the triangle (origin, a, b) of the unit-mass kernel k_h,
  /// written as ∫ G(ρ(θ)) dθ with G the radial mass function.
  double edge_term(Vec2 a, Vec2 b) const {
    const double sweep = std::atan2(geo::cross(a, b), geo::dot(a, b));
    if (sweep == 0.0) return 0.0;
    const Vec2 d = b - a;
    const double len2 = geo::dot(d, d);
    // Closest approach of the segment to the kernel centre.
    double t = len2 > 0.0 ? -geo::dot(a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dmin = geo::norm(a + t * d);
    if (dmin >= h_) return sweep / (2.0 * kPi);
    const double num = geo::cross(a, d);
    const double th_a = std::atan2(a.y, a.x);
    auto integrand = [&](double s) {
      const double th = th_a + s * sweep;
      const Vec2 dir{std::cos(th), std::sin(th)};
      const double den = geo::cross(dir, d);
      const double rho = den != 0.0 ? num / den : 0.0;
      return QuarticKernel::radial_mass(std::abs(rho) / h_);
    };
    // Split at the parameters where the ray length crosses h.
    std::vector<double> cuts{0.0, 1.0};
    const double qa = len2;
    const double qb = 2.0 * geo::dot(a, d);
    const double qc = geo::dot(a, a) - h_ * h_;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa > 0.0 && disc > 0.0) {
      for (double sgn : {-1.0, 1.0}) {
        const double tt = (-qb + sgn * std::sqrt(disc)) / (2.0 * qa);
        if (tt > 0.0 && tt < 1.0) {
          const Vec2 q = a + tt * d;
          const double ang = std::atan2(geo::cross(a, q), geo::dot(a, q));
          cuts.push_back(ang / sweep);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] <= cuts[k]) continue;
      s += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, cuts[k], cuts[k + 1],
                                                                         8, 1e-11);
    }
    return s * sweep;
  }

  double h_ = 1.0;
  double scale_ = 1.0;
  PointIndex index_;
};

/// Tagged spatial intensity: homogeneous ("P") or kernel ("H").
class SpatialModel {
 public:
  SpatialModel() = default;
  SpatialModel(HomogeneousIntensity h) : impl_(h) {}
  SpatialModel(SpatialKernelIntensity k) : impl_(std::move(k)) {}

  bool is_homogeneous() const { return std::holds_alternative<HomogeneousIntensity>(impl_); }
  char kind() const { return is_homogeneous() ? 'P' : 'H'; }

  double at(const GeoPoint& x) const {
    return std::visit([&](const auto& m) { return m.at(x); }, impl_);
  }
  double integral(const Polygon& region) const {
    return std::visit([&](const auto& m) { return m.integral(region); }, impl_);
  }
  double sqrt_integral(const Polygon& region) const {
    return std::visit([&](const auto& m) { return m.sqrt_integral(region); }, impl_);
  }
  double upper_bound(const geo::BBox& box) const {
    return std::visit([&](const auto& m) { return m.upper_bound(box); }, impl_);
  }

  SpatialModel scaled(double factor) const {
    if (const auto* h = std::get_if<HomogeneousIntensity>(&impl_)) {
      return HomogeneousIntensity{h->rate * factor};
    }
    return std::get<SpatialKernelIntensity>(impl_).scaled(factor);
  }

  const HomogeneousIntensity* homogeneous() const { return std::get_if<HomogeneousIntensity>(&impl_); }
  const SpatialKernelIntensity* kernel() const { return std::get_if<SpatialKernelIntensity>(&impl_); }

 private:
  std::variant<HomogeneousIntensity, SpatialKernelIntensity> impl_{HomogeneousIntensity{}};
};

// ---------------------------------------------------------------------------
// Temporal intensity

/// R's default (type 7) sample quantile.
inline double sample_quantile(std::vector<double> xs, double p) {
  require(!xs.empty(), ErrorCode::InvalidArgument, "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double sample_sd(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

/// h_T = 0.9 · min(sd, IQR / 1.34) · n^(−1/5).
inline double silverman_rule(double sd, double iqr, std::size_t n) {
  return 0.9 * std::min(sd, iqr / 1.34) * std::pow(static_cast<double>(n), -0.2);
}

inline double silverman_bandwidth(std::span<const double> times) {
  require(times.size() >= 2, ErrorCode::InvalidArgument, "need at least two times");
  const double sd = sample_sd(times);
  std::vector<double> v(times.begin(), times.end());
  const double iqr = sample_quantile(v, 0.75) - sample_quantile(v, 0.25);
  require(sd > 0.0, ErrorCode::ZeroSpread, "sample has no spread");
  // IQR can vanish for heavily tied samples while sd does not.
  if (iqr <= 0.0) return silverman_rule(sd, 1.34 * sd, times.size());
  return silverman_rule(sd, iqr, times.size());
}

class TemporalKernelIntensity {
 public:
  TemporalKernelIntensity() = default;
  TemporalKernelIntensity(std::vector<double> times, double bandwidth)
      : times_(std::move(times)), h_(bandwidth) {
    require(bandwidth > 0.0, ErrorCode::InvalidArgument, "temporal bandwidth must be positive");
  }

  double bandwidth() const { return h_; }

  double at(double t) const {
    double s = 0.0;
    for (double ti : times_) {
      const double z = (t - ti) / h_;
      s += std::exp(-0.5 * z * z);
    }
    return s / (h_ * std::sqrt(2.0 * kPi));
  }

 private:
  std::vector<double> times_;
  double h_ = 1.0;
};

// ---------------------------------------------------------------------------
// Separable model

/// λ(x, t) = c · λ_X(x) · λ_T(t), with c chosen so that the model puts mass
/// n on A × T (time is discrete: one unit per integer year).
class SeparableIntensityModel {
 public:
  SeparableIntensityModel() = default;
  SeparableIntensityModel(SpatialModel spatial, std::optional<TemporalKernelIntensity> temporal,
                          SpatialWindow window, Period period, double target_mass)
      : spatial_(std::move(spatial)),
        temporal_(std::move(temporal)),
        window_(std::move(window)),
        period_(period) {
    spatial_mass_ = spatial_.integral(window_.boundary);
    temporal_mass_ = 0.0;
    for (int y = period_.start; y <= period_.end; ++y) temporal_mass_ += temporal_at(y);
    require(spatial_mass_ > 0.0 && temporal_mass_ > 0.0, ErrorCode::SimulationSetupError,
            "model has no mass on the window");
    normalization_ = target_mass / (spatial_mass_ * temporal_mass_);
  }

  char kind() const { return spatial_.kind(); }
  const SpatialModel& spatial() const { return spatial_; }
  const std::optional<TemporalKernelIntensity>& temporal() const { return temporal_; }
  const SpatialWindow& window() const { return window_; }
  const Period& period() const { return period_; }
  double normalization() const { return normalization_; }

  double temporal_at(int year) const { return temporal_ ? temporal_->at(year) : 1.0; }

  double at(const GeoPoint& x, int year) const {
    return normalization_ * spatial_.at(x) * temporal_at(year);
  }

  /// ∫_{A×T} λ.
  double mass() const { return normalization_ * spatial_mass_ * temporal_mass_; }
  double annual_rate() const { return mass() / period_.length(); }

  /// Spatial margin λ_A(x) = Σ_{t∈T} λ(x, t).
  SpatialModel spatial_margin() const { return spatial_.scaled(normalization_ * temporal_mass_); }

  /// Probability of each year in the period under λ_T.
  std::vector<double> year_weights() const {
    std::vector<double> w;
    for (int y = period_.start; y <= period_.end; ++y) w.push_back(temporal_at(y) / temporal_mass_);
    return w;
  }

  SeparableIntensityModel scaled(double factor) const {
    SeparableIntensityModel out = *this;
    out.normalization_ *= factor;
    return out;
  }

 private:
  SpatialModel spatial_;
  std::optional<TemporalKernelIntensity> temporal_;
  SpatialWindow window_;
  Period period_;
  double spatial_mass_ = 0.0;
  double temporal_mass_ = 0.0;
  double normalization_ = 1.0;
};

inline SeparableIntensityModel fit_homogeneous(const PointPattern& pattern) {
  require(!pattern.events.empty(), ErrorCode::InvalidArgument, "point pattern is empty");
  const double n = static_cast<double>(pattern.size());
  return SeparableIntensityModel(HomogeneousIntensity{n / pattern.window.area()}, std::nullopt,
                                 pattern.window, pattern.period, n);
}

/// Kernel model "H": quartic spatial kernel with bandwidth h and a Gaussian
/// temporal kernel with Silverman's bandwidth (constant in time when the
/// years have no spread).
inline SeparableIntensityModel fit_kernel(const PointPattern& pattern, double h) {
  pattern.validate();
  const auto locs = pattern.locations();
  std::optional<TemporalKernelIntensity> temporal;
  if (pattern.size() >= 2) {
    const auto years = pattern.years();
    try {
      temporal = TemporalKernelIntensity(years, silverman_bandwidth(years));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroSpread) throw;
    }
  }
  return SeparableIntensityModel(SpatialKernelIntensity(locs, h), std::move(temporal), pattern.window,
                                 pattern.period, static_cast<double>(pattern.size()));
}

inline double integrate_intensity(const SpatialModel& model, const Polygon& region) {
  return model.integral(region);
}

inline double integrate_intensity(const SeparableIntensityModel& model, const Polygon& region,
                                  std::optional<Period> period = std::nullopt) {
  const Period p = period.value_or(model.period());
  double tm = 0.0;
  for (int y = p.start; y <= p.end; ++y) tm += model.temporal_at(y);
  return model.normalization() * model.spatial().integral(region) * tm;
}

// ---------------------------------------------------------------------------
// Bandwidth selection

enum class BandwidthMethod { Mse, Lcv };

inline double mean_nearest_neighbour(std::span<const GeoPoint> pts) {
  require(pts.size() >= 2, ErrorCode::InvalidArgument, "need at least two points");
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i != j) best = std::min(best, geo::norm(geo::to_vec(pts[i]) - geo::to_vec(pts[j])));
    }
    s += best;
  }
  return s / static_cast<double>(pts.size());
}

/// 32 log-spaced candidates on [0.1 · mean NN distance, 2 · window diagonal].
inline std::vector<double> default_bandwidth_grid(const PointPattern& pattern, int count = 32) {
  const auto locs = pattern.locations();
  const double lo = 0.1 * mean_nearest_neighbour(locs);
  const double hi = 2.0 * pattern.window.bbox.diagonal();
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  return grid;
}

/// Cross-validated likelihood Σ log λ₋ₗ(xₗ) − ∫_A λ̂.
inline double lcv_score(const PointPattern& pattern, double h) {
  const auto locs = pattern.locations();
  const SpatialKernelIntensity k(locs, h);
  double s = 0.0;
  for (std::size_t l = 0; l < locs.size(); ++l) s += std::log(k.leave_one_out(l));
  return s - k.integral(pattern.window.boundary);
}

/// Least-squares cross-validation ∫ λ̂² − 2 Σ λ₋ₗ(xₗ), with the quadratic
/// term taken over the plane via the kernel self-convolution.
inline double lscv_score(const PointPattern& pattern, double h) {
  const auto locs = pattern.locations();
  const SpatialKernelIntensity k(locs, h);
  const auto& pts = k.support();
  const double h2 = h * h;
  double quad = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    quad += QuarticKernel::self_convolution(0.0);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = geo::norm(pts[i] - pts[j]) / h;
      if (d < 2.0) quad += 2.0 * QuarticKernel::self_convolution(d);
    }
  }
  quad /= h2;
  double loo = 0.0;
  for (std::size_t l = 0; l < pts.size(); ++l) loo += k.leave_one_out(l);
  return quad - 2.0 * loo;
}

struct BandwidthSelection {
  double h = 0.0;
  std::vector<double> grid;
  std::vector<double> scores;
};

inline BandwidthSelection select_bandwidth(const PointPattern& pattern, BandwidthMethod method,
                                           std::vector<double> grid) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "bandwidth grid is empty");
  require(pattern.size() >= 2, ErrorCode::InvalidArgument, "need at least two events");
  for (double h : grid) require(h > 0.0, ErrorCode::InvalidArgument, "bandwidth candidates must be positive");
  std::sort(grid.begin(), grid.end());
  BandwidthSelection out;
  out.grid = grid;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double score = method == BandwidthMethod::Lcv ? lcv_score(pattern, grid[i]) : lscv_score(pattern, grid[i]);
    out.scores.push_back(score);
    if (!std::isfinite(score)) continue;
    if (!best) {
      best = i;
    } else if (method == BandwidthMethod::Lcv ? score > out.scores[*best] : score < out.scores[*best]) {
      best = i;
    }
  }
  if (!best) {
    // Every candidate leaves some event with zero leave-one-out intensity.
    const auto locs = pattern.locations();
    const SpatialKernelIntensity k(locs, grid.back());
    std::string isolated;
    for (std::size_t l = 0; l < locs.size(); ++l) {
      if (k.leave_one_out(l) <= 0.0) isolated += (isolated.empty() ? "" : ",") + std::to_string(l);
    }
    throw Error(ErrorCode::IsolatedPoints, "no bandwidth yields a finite criterion", isolated);
  }
  out.h = grid[*best];
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

/// Rejection sampler for locations with density ∝ λ_X on the window, using a
/// piecewise-constant majorant over a grid of the window's bounding box.
class LocationSampler {
 public:
  LocationSampler(SpatialModel model, SpatialWindow window, int grid = 64)
      : model_(std::move(model)), window_(std::move(window)), grid_(grid) {
    const auto& bb = window_.bbox;
    dx_ = bb.width() / grid_;
    dy_ = bb.height() / grid_;
    bounds_.resize(static_cast<std::size_t>(grid_ * grid_));
    cumulative_.resize(bounds_.size());
    double acc = 0.0;
    for (int i = 0; i < grid_; ++i) {
      for (int j = 0; j < grid_; ++j) {
        const geo::BBox cell{bb.lon_min + i * dx_, bb.lon_min + (i + 1) * dx_, bb.lat_min + j * dy_,
                             bb.lat_min + (j + 1) * dy_};
        const double b = model_.upper_bound(cell);
        require(std::isfinite(b) && b >= 0.0, ErrorCode::SimulationSetupError, "majorant not finite");
        bounds_[static_cast<std::size_t>(i * grid_ + j)] = b;
        acc += b;
        cumulative_[static_cast<std::size_t>(i * grid_ + j)] = acc;
      }
    }
    require(acc > 0.0, ErrorCode::SimulationSetupError, "majorant vanishes on the window");
  }

  GeoPoint draw(Rng& rng) const {
    const auto& bb = window_.bbox;
    for (long attempt = 0; attempt < 100'000'000L; ++attempt) {
      const double u = rng.uniform() * cumulative_.back();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto c = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
          it - cumulative_.begin(), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
      const auto i = static_cast<int>(c) / grid_;
      const auto j = static_cast<int>(c) % grid_;
      const GeoPoint p{bb.lon_min + (i + rng.uniform()) * dx_, bb.lat_min + (j + rng.uniform()) * dy_};
      const double accept = rng.uniform() * bounds_[c];
      if (!window_.contains(p)) continue;
      if (accept < model_.at(p)) return p;
    }
    throw Error(ErrorCode::SimulationSetupError, "rejection sampler failed to accept");
  }

 private:
  SpatialModel model_;
  SpatialWindow window_;
  int grid_;
  double dx_ = 0.0, dy_ = 0.0;
  std::vector<double> bounds_;
  std::vector<double> cumulative_;
};

struct SimulatedEvent {
  std::int64_t event_id = 0;
  int year = 0;
  GeoPoint location;
};

struct CatalogOptions {
  /// Annual Poisson rate; defaults to model mass / |T|.
  std::optional<double> annual_rate;
};

/// Years are labelled 1..n_years; each year draws from its own keyed
/// substream, so output does not depend on evaluation order.
inline std::vector<SimulatedEvent> simulate_catalog(const SeparableIntensityModel& model, int n_years,
                                                    std::uint64_t seed, const CatalogOptions& opts = {}) {
  require(n_years >= 1, ErrorCode::InvalidArgument, "n_years must be at least 1");
  const double nu = opts.annual_rate.value_or(model.annual_rate());
  require(nu >= 0.0 && std::isfinite(nu), ErrorCode::InvalidArgument, "annual rate must be non-negative");
  const LocationSampler sampler(model.spatial(), model.window());
  std::vector<SimulatedEvent> out;
  std::int64_t next_id = 1;
  for (int y = 1; y <= n_years; ++y) {
    Rng count_rng = Rng::keyed(seed, static_cast<std::uint64_t>(y), StreamPurpose::Count);
    const auto k = count_rng.poisson(nu);
    Rng loc_rng = Rng::keyed(seed, static_cast<std::uint64_t>(y), StreamPurpose::Location);
    for (std::int64_t e = 0; e < k; ++e) out.push_back({next_id++, y, sampler.draw(loc_rng)});
  }
  return out;
}

/// One realization of the model over its own window and period.
inline PointPattern simulate_pattern(const SeparableIntensityModel& model, const LocationSampler& sampler,
                                     Rng& rng) {
  PointPattern p;
  p.window = model.window();
  p.period = model.period();
  const auto count = rng.poisson(model.mass());
  const auto weights = model.year_weights();
  std::discrete_distribution<int> year_dist(weights.begin(), weights.end());
  for (std::int64_t i = 0; i < count; ++i) {
    const GeoPoint x = sampler.draw(rng);
    p.events.push_back({x, model.period().start + year_dist(rng)});
  }
  return p;
}

}  // namespace quakesim::stpp
