#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "quakesim/core.hpp"
#include "quakesim/csv.hpp"
#include "quakesim/geo.hpp"

namespace quakesim::hazard {

using geo::GeoPoint;

/// Annual exceedance probabilities of the hazard grid, in column order.
inline constexpr std::array<double, 8> kExceedanceProbs{0.02, 0.01375, 0.0100, 0.00445,
                                                        0.0021, 0.0010, 0.0005, 0.000404};
inline constexpr std::array<const char*, 8> kPgaColumns{
    "pga_p0_02", "pga_p0_01375", "pga_p0_01", "pga_p0_00445",
    "pga_p0_0021", "pga_p0_001", "pga_p0_0005", "pga_p0_000404"};

inline constexpr double kGravityCm = 980.665;
inline constexpr double kEastLongitude = -100.0;
inline constexpr double kWaldSd = 1.08;

inline bool is_east(const GeoPoint& p) { return p.lon > kEastLongitude; }

struct HazardSite {
  GeoPoint location;
  /// PGA in g at each of kExceedanceProbs.
  std::array<double, 8> pga{};

  void validate() const {
    for (std::size_t i = 0; i < pga.size(); ++i) {
      require(std::isfinite(pga[i]) && pga[i] > 0.0, ErrorCode::InvalidSite, "PGA must be positive");
      if (i > 0) {
        require(pga[i] > pga[i - 1], ErrorCode::InvalidSite, "PGA must increase as probability falls",
                std::to_string(location.lon) + "," + std::to_string(location.lat));
      }
    }
  }
};

struct SiteGpdFit {
  double u = 0.0;
  double sigma = 1.0;
  double xi = 0.0;
  double lambda = 0.02;
  double rms_error = 0.0;
  int iterations = 0;

  /// Return level exceeded with annual probability p.
  double quantile(double p) const {
    const double L = std::log(lambda / p);
    return u + sigma * expm1_over(xi, L);
  }

  /// Upper end of the excess support (infinite when xi >= 0).
  double upper_bound() const {
    return xi < 0.0 ? u - sigma / xi : std::numeric_limits<double>::infinity();
  }

  /// (e^{ξL} − 1)/ξ, continuous at ξ = 0.
  static double expm1_over(double xi, double L) {
    const double z = xi * L;
    if (std::abs(z) < 1e-5) return L * (1.0 + z / 2.0 + z * z / 6.0);
    return std::expm1(z) / xi;
  }

  /// d/dξ of expm1_over.
  static double expm1_over_dxi(double xi, double L) {
    const double z = xi * L;
    if (std::abs(z) < 1e-5) return L * L * (0.5 + z / 3.0 + z * z / 8.0);
    return (L * std::exp(z) * xi - std::expm1(z)) / (xi * xi);
  }
};

/// Fits (σ, ξ) of ĝ(p) = u + (σ/ξ)[(p/λ)^(−ξ) − 1] to the seven quantiles
/// below p = 0.02 by Levenberg-Marquardt, with u = PGA(0.02) and λ = 0.02.
inline SiteGpdFit fit_site_gpd(const HazardSite& site, int max_iterations = 500) {
  site.validate();
  SiteGpdFit fit;
  fit.u = site.pga[0];
  fit.lambda = kExceedanceProbs[0];
  std::array<double, 7> L{};
  std::array<double, 7> y{};
  for (std::size_t i = 0; i < 7; ++i) {
    L[i] = std::log(fit.lambda / kExceedanceProbs[i + 1]);
    y[i] = site.pga[i + 1] - fit.u;
  }

  // Start: exponential tail (ξ = 0) matched to the mean excess per unit of
  // log return period.
  double sl = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    sl += L[i];
    sy += y[i];
  }
  double sigma = sy / sl;
  double xi = 0.0;

  auto sse = [&](double s, double x) {
    double e = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      const double r = y[i] - s * SiteGpdFit::expm1_over(x, L[i]);
      e += r * r;
    }
    return e;
  };

  double mu = 1e-3;
  double cur = sse(sigma, xi);
  int it = 0;
  bool converged = false;
  for (; it < max_iterations; ++it) {
    // Normal equations J^T J δ = J^T r for the two parameters.
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      const double e = SiteGpdFit::expm1_over(xi, L[i]);
      const double j1 = e;
      const double j2 = sigma * SiteGpdFit::expm1_over_dxi(xi, L[i]);
      const double r = y[i] - sigma * e;
      a11 += j1 * j1;
      a12 += j1 * j2;
      a22 += j2 * j2;
      g1 += j1 * r;
      g2 += j2 * r;
    }
    if (std::hypot(g1, g2) <= 1e-15 * (1.0 + cur)) {
      converged = true;
      break;
    }
    bool stepped = false;
    for (int tries = 0; tries < 60; ++tries) {
      const double b11 = a11 * (1.0 + mu);
      const double b22 = a22 * (1.0 + mu);
      const double det = b11 * b22 - a12 * a12;
      if (det <= 0.0 || !std::isfinite(det)) {
        mu *= 10.0;
        continue;
      }
      const double d1 = (b22 * g1 - a12 * g2) / det;
      const double d2 = (b11 * g2 - a12 * g1) / det;
      const double ns = sigma + d1;
      const double nx = xi + d2;
      const double next = ns > 0.0 ? sse(ns, nx) : std::numeric_limits<double>::infinity();
      if (std::isfinite(next) && next <= cur) {
        const double step = std::abs(d1) / std::max(sigma, 1e-300) + std::abs(d2);
        sigma = ns;
        xi = nx;
        const double prev = cur;
        cur = next;
        mu = std::max(mu / 10.0, 1e-15);
        stepped = true;
        if (step < 1e-13 || prev - cur <= 1e-16 * prev) converged = true;
        break;
      }
      mu *= 10.0;
    }
    if (!stepped || cur == 0.0) converged = true;
    if (converged) break;
  }
  require(converged, ErrorCode::FitDiverged, "site GPD fit did not converge",
          std::to_string(site.location.lon) + "," + std::to_string(site.location.lat));

  fit.sigma = sigma;
  fit.xi = xi;
  fit.iterations = it;
  double e = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double r = site.pga[i] - fit.quantile(kExceedanceProbs[i]);
    e += r * r;
  }
  fit.rms_error = std::sqrt(e / 8.0);
  return fit;
}

struct NearestSite {
  std::size_t index = 0;
  double distance_km = 0.0;
  /// Distance floored at 1 km for the attenuation relations.
  double clamped_km = 1.0;
};

inline NearestSite nearest_site(const GeoPoint& epicenter, std::span<const HazardSite> grid) {
  require(!grid.empty(), ErrorCode::EmptyGrid, "hazard grid is empty");
  NearestSite best;
  best.distance_km = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = geo::haversine_km(epicenter, grid[i].location);
    if (d < best.distance_km) {
      best.index = i;
      best.distance_km = d;
    }
  }
  best.clamped_km = std::max(1.0, best.distance_km);
  return best;
}

/// MMI = 3.66 log₁₀(PGA) − 1.66 (+ noise), PGA in cm/s², clamped to [1, 12].
inline double wald_mmi(double pga_cm_s2, double noise_sd = 0.0, Rng* rng = nullptr) {
  require(pga_cm_s2 > 0.0 && std::isfinite(pga_cm_s2), ErrorCode::InvalidPga, "PGA must be positive");
  double mmi = 3.66 * std::log10(pga_cm_s2) - 1.66;
  if (noise_sd > 0.0 && rng != nullptr) mmi += rng->normal(0.0, noise_sd);
  return std::clamp(mmi, 1.0, 12.0);
}

/// Moment magnitude from felt intensity at distance d (km).
inline double bakun_magnitude(double mmi, double d_km, bool east, double noise_sd = 0.0, Rng* rng = nullptr) {
  require(d_km >= 1.0, ErrorCode::InvalidDistance, "distance must be at least 1 km", std::to_string(d_km));
  double m = east ? (mmi - 1.41 + 0.00345 * d_km + 2.08 * std::log10(d_km)) / 1.68
                  : (mmi - 5.07 + 3.69 * std::log10(d_km)) / 1.09;
  if (noise_sd > 0.0 && rng != nullptr) m += rng->normal(0.0, noise_sd);
  return m;
}

/// Felt intensity of magnitude M at distance d (forward form of the above,
/// no noise, no clamp).
inline double bakun_intensity(double magnitude, double d_km, bool east) {
  require(d_km >= 1.0, ErrorCode::InvalidDistance, "distance must be at least 1 km", std::to_string(d_km));
  return east ? 1.68 * magnitude + 1.41 - 0.00345 * d_km - 2.08 * std::log10(d_km)
              : 1.09 * magnitude + 5.07 - 3.69 * std::log10(d_km);
}

/// Distance at which magnitude M is felt at intensity `level`; may fall
/// below 1 km for levels near the epicentral intensity.
inline double isoseismal_radius(double magnitude, int level, bool east, double cap_km = 5000.0) {
  double r = 0.0;
  if (!east) {
    r = std::pow(10.0, (1.09 * magnitude - level + 5.07) / 3.69);
  } else {
    const double target = 1.68 * magnitude - level + 1.41;
    auto f = [](double x) { return 0.00345 * x + 2.08 * std::log10(x); };
    if (f(cap_km) < target) {
      r = std::numeric_limits<double>::infinity();
    } else {
      double lo = 1e-9;
      double hi = cap_km;
      if (f(lo) >= target) return lo;
      for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
      }
      r = 0.5 * (lo + hi);
    }
  }
  require(r <= cap_km, ErrorCode::RadiusOverflow, "isoseismal radius exceeds cap",
          std::to_string(magnitude) + "@" + std::to_string(level));
  return r;
}

struct Ring {
  int mmi_level = 6;
  double radius_km = 0.0;
};

/// Radii for integer levels mmi_top, mmi_top − 1, ..., 6.
inline std::vector<Ring> isoseismal_radii(double magnitude, int mmi_top, bool east, double cap_km = 5000.0) {
  require(mmi_top >= 6, ErrorCode::InvalidArgument, "top MMI level must be at least 6");
  require(magnitude > 6.0, ErrorCode::InvalidArgument, "magnitude must exceed 6");
  std::vector<Ring> out;
  for (int level = mmi_top; level >= 6; --level) out.push_back({level, isoseismal_radius(magnitude, level, east, cap_km)});
  return out;
}

struct NoiseConfig {
  double wald_sd = kWaldSd;
  double bakun_sd_east = 0.0;
  double bakun_sd_west = 0.0;

  static NoiseConfig off() { return {0.0, 0.0, 0.0}; }
};

struct ShakeSample {
  double pga_cm_s2 = 0.0;
  double mmi_epicenter = 0.0;
  double magnitude = 0.0;
  bool east = false;
  double distance_to_site_km = 1.0;
};

/// Draws PGA = u + GPD(σ, ξ) excess and converts it to MMI and magnitude,
/// redrawing until the magnitude exceeds 6.
inline ShakeSample simulate_site_pga(const SiteGpdFit& fit, double d_km, bool east, Rng& rng,
                                     const NoiseConfig& noise = {}, int max_tries = 10000) {
  require(fit.sigma > 0.0, ErrorCode::InvalidArgument, "GPD scale must be positive");
  require(d_km >= 1.0, ErrorCode::InvalidDistance, "distance must be at least 1 km");
  const double bakun_sd = east ? noise.bakun_sd_east : noise.bakun_sd_west;
  for (int t = 0; t < max_tries; ++t) {
    const double v = 1.0 - rng.uniform();  // (0, 1]
    const double excess = fit.sigma * SiteGpdFit::expm1_over(fit.xi, -std::log(v));
    const double pga_cm = (fit.u + excess) * kGravityCm;
    const double mmi = wald_mmi(pga_cm, noise.wald_sd, &rng);
    const double m = bakun_magnitude(mmi, d_km, east, bakun_sd, &rng);
    if (m > 6.0) return {pga_cm, mmi, m, east, d_km};
  }
  throw Error(ErrorCode::SignificanceUnreachable, "no draw reached magnitude 6 at this site",
              "tries=" + std::to_string(max_tries) + " d_km=" + std::to_string(d_km));
}

// ---------------------------------------------------------------------------
// Grid I/O

inline std::vector<HazardSite> read_grid(std::istream& in, const std::string& source = "<stream>") {
  const auto t = csv::Table::parse(in, source);
  std::vector<std::string> cols{"lon", "lat"};
  for (const auto* c : kPgaColumns) cols.emplace_back(c);
  t.require_columns(cols);
  std::vector<HazardSite> out;
  out.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    HazardSite s;
    s.location = {t.num(r, "lon"), t.num(r, "lat")};
    geo::validate(s.location);
    for (std::size_t i = 0; i < 8; ++i) s.pga[i] = t.num(r, kPgaColumns[i]);
    s.validate();
    out.push_back(s);
  }
  require(!out.empty(), ErrorCode::EmptyGrid, "hazard grid is empty", source);
  return out;
}

inline std::vector<HazardSite> read_grid_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::NotFound, "cannot open file", path);
  return read_grid(in, path);
}

inline void write_grid(std::ostream& out, std::span<const HazardSite> grid) {
  out << "lon,lat";
  for (const auto* c : kPgaColumns) out << ',' << c;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& s : grid) {
    out << s.location.lon << ',' << s.location.lat;
    for (double v : s.pga) out << ',' << v;
    out << '\n';
  }
}

}  // namespace quakesim::hazard
