#pragma once

// Tail modelling of annual losses: peaks-over-threshold GPD fits, return
// levels and PML quantiles, the compound Poisson-GPD maximum, correlation
// matrices and the two country-wide capital aggregations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "quakesim/core.hpp"
#include "quakesim/lossengine.hpp"

namespace quakesim::evt {

namespace detail {

// log1p(w)/w, continuous at 0
inline double log1p_ratio(double w) { return std::abs(w) < 1e-8 ? 1.0 - 0.5 * w : std::log1p(w) / w; }

// (e^{ξL} − 1)/ξ, continuous at ξ = 0
inline double box_cox(double log_x, double xi) {
  const double a = xi * log_x;
  return std::abs(a) < 1e-300 ? log_x : std::expm1(a) / xi;
}

inline double quantile_type7(std::vector<double> xs, double p) {
  require(!xs.empty(), ErrorCode::InvalidArgument, "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GPD maximum likelihood

/// Log-likelihood of excesses under G_{ξ,σ}; −∞ outside the support.
inline double gpd_loglik(std::span<const double> y, double sigma, double xi) {
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  double l = 0.0;
  for (double v : y) {
    const double t = v / sigma;
    const double w = xi * t;
    if (!(1.0 + w > 0.0)) return -std::numeric_limits<double>::infinity();
    // (1 + 1/ξ) log(1 + w) written to survive ξ → 0
    l -= std::log1p(w) + t * detail::log1p_ratio(w);
  }
  return l - static_cast<double>(y.size()) * std::log(sigma);
}

/// Method-of-moments start (σ, ξ); only meaningful for ξ < 1/2.
inline std::pair<double, double> gpd_moments(std::span<const double> y) {
  require(y.size() >= 2, ErrorCode::InvalidArgument, "need two excesses for moments");
  const double n = static_cast<double>(y.size());
  const double m = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double v = 0.0;
  for (double x : y) v += (x - m) * (x - m);
  v /= n - 1.0;
  const double r = m * m / v;
  return {0.5 * m * (1.0 + r), 0.5 * (1.0 - r)};
}

/// Observed information (negative Hessian of the log-likelihood) in (σ, ξ).
/// Returns {I_σσ, I_σξ, I_ξξ}.
inline std::array<double, 3> gpd_observed_information(std::span<const double> y, double sigma, double xi) {
  double hss = 0.0, hsx = 0.0, hxx = 0.0;
  for (double v : y) {
    const double t = v / sigma;
    const double w = xi * t;
    const double z = 1.0 + w;
    hss += (1.0 - (xi + 1.0) * t * (2.0 + w) / (z * z)) / (sigma * sigma);
    hsx += (t / z - (xi + 1.0) * t * t / (z * z)) / sigma;
    if (std::abs(w) < 1e-2) {
      // power series in ξ at fixed t; the exact form cancels badly near 0
      double term = 0.0, ak = 1.0, tk = t * t;
      for (int k = 0; k < 14; ++k) {
        const double sign = k % 2 ? -1.0 : 1.0;
        term += sign * (k + 1) * ak * tk * (1.0 - (k + 2.0) / (k + 3.0) * t);
        ak *= xi;
        tk *= t;
      }
      hxx += term;
    } else {
      const double h = std::log1p(w) - w / z;
      hxx += -2.0 * h / (xi * xi * xi) + (1.0 + 1.0 / xi) * t * t / (z * z);
    }
  }
  return {-hss, -hsx, -hxx};
}

struct GpdFit {
  double sigma = 0.0;
  double xi = 0.0;
  double se_sigma = std::numeric_limits<double>::quiet_NaN();
  double se_xi = std::numeric_limits<double>::quiet_NaN();
  double loglik = 0.0;
};

inline constexpr double kXiLower = -0.9;
inline constexpr double kXiUpper = 2.0;

/// GPD MLE for excesses over a threshold, with ξ restricted to [lo, hi].
/// Interior optimum through the one-dimensional profile in θ = ξ/σ, where
/// the conditional MLE is ξ(θ) = mean log(1 + θy); boundary optima by
/// maximizing over σ with ξ pinned.
inline GpdFit fit_gpd_mle(std::span<const double> y, double xi_lo = kXiLower, double xi_hi = kXiUpper) {
  require(y.size() >= 2, ErrorCode::InvalidArgument, "need at least two excesses");
  for (double v : y) require(v >= 0.0 && std::isfinite(v), ErrorCode::InvalidArgument, "excesses must be >= 0");
  const double n = static_cast<double>(y.size());
  const double ymax = *std::max_element(y.begin(), y.end());
  require(ymax > 0.0, ErrorCode::FitDiverged, "all excesses are zero");

  // θ = (e^v − 1)/ymax keeps 1 + θy > 0 for every v
  auto profile = [&](double v) {
    const double c = std::expm1(v);
    double s = 0.0;
    for (double x : y) {
      const double r = x / ymax;
      const double w = r == 1.0 ? c : c * r;
      s += x * detail::log1p_ratio(w);
    }
    const double sigma = s / n;
    const double xi = c / ymax * sigma;
    return std::array<double, 3>{sigma, xi, -n * std::log(sigma) - n * (1.0 + xi)};
  };
  auto xi_at = [&](double v) { return profile(v)[1]; };

  double v_lo = -1.0, v_hi = 1.0;
  while (xi_at(v_lo) > xi_lo && v_lo > -30.0) v_lo *= 2.0;
  while (xi_at(v_hi) < xi_hi && v_hi < 600.0) v_hi *= 2.0;
  auto solve = [&](double a, double b, double target) {  // ξ(v) is increasing
    for (int i = 0; i < 200 && b - a > 1e-12 * (1.0 + std::abs(a)); ++i) {
      const double m = 0.5 * (a + b);
      (xi_at(m) < target ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  if (xi_at(v_lo) < xi_lo) v_lo = solve(v_lo, 0.0, xi_lo);
  if (xi_at(v_hi) > xi_hi) v_hi = solve(0.0, v_hi, xi_hi);

  constexpr int kGrid = 64;
  int best = 0;
  double best_l = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double l = profile(v_lo + (v_hi - v_lo) * i / kGrid)[2];
    if (l > best_l) best_l = l, best = i;
  }
  const double a = v_lo + (v_hi - v_lo) * std::max(0, best - 1) / kGrid;
  const double b = v_lo + (v_hi - v_lo) * std::min(kGrid, best + 1) / kGrid;
  std::uintmax_t iters = 200;
  const auto [v_star, neg_l] = boost::math::tools::brent_find_minima([&](double v) { return -profile(v)[2]; }, a, b, 50, iters);
  const auto p = profile(v_star);

  GpdFit fit;
  fit.sigma = p[0];
  fit.xi = std::clamp(p[1], xi_lo, xi_hi);
  fit.loglik = gpd_loglik(y, fit.sigma, fit.xi);

  // ξ pinned at a bound, σ free
  for (double xb : {xi_lo, xi_hi}) {
    const double s_min = xb < 0.0 ? -xb * ymax : 0.0;
    const double lo = std::log(std::max(s_min, 1e-300)) + 1e-9;
    const double hi = std::log(std::max(ymax, p[0]) * 1e3 + s_min);
    std::uintmax_t it = 200;
    const auto [ls, nl] =
        boost::math::tools::brent_find_minima([&](double u) { return -gpd_loglik(y, std::exp(u), xb); }, lo, hi, 50, it);
    const double l = -nl;
    if (l > fit.loglik) {
      fit.sigma = std::exp(ls);
      fit.xi = xb;
      fit.loglik = l;
    }
  }
  require(std::isfinite(fit.loglik) && fit.sigma > 0.0, ErrorCode::FitDiverged, "GPD likelihood did not converge");

  const auto info = gpd_observed_information(y, fit.sigma, fit.xi);
  const double det = info[0] * info[2] - info[1] * info[1];
  if (det > 0.0 && info[0] > 0.0) {
    fit.se_sigma = std::sqrt(info[2] / det);
    fit.se_xi = std::sqrt(info[0] / det);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Peaks over threshold

struct PotFit {
  double u = 0.0;
  double sigma = 1.0;
  double xi = 0.0;
  double lambda = 0.0;  // exceedances per year
  double se_sigma = std::numeric_limits<double>::quiet_NaN();
  double se_xi = std::numeric_limits<double>::quiet_NaN();
  double se_lambda = std::numeric_limits<double>::quiet_NaN();
  int n_exceed = 0;
  int n_years = 0;
  double threshold_quantile = 0.0;
  double loglik = 0.0;
};

inline constexpr int kMinExceedances = 30;

/// Fits a marked Poisson process to the positive entries of an annual
/// series. Zero years only enter through n_years. Without an explicit
/// threshold quantile, 0.95 is tried first and 0.9 when that leaves fewer
/// than 30 exceedances.
inline PotFit fit_pot(std::span<const double> series, int n_years, std::optional<double> threshold_quantile = {},
                      int min_exceed = kMinExceedances) {
  std::vector<double> pos;
  for (double v : series) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument, "annual values must be finite and >= 0");
    if (v > 0.0) pos.push_back(v);
  }
  require(n_years > 0 && static_cast<std::size_t>(n_years) >= pos.size(), ErrorCode::InvalidArgument,
          "n_years must cover the series");
  const std::vector<double> qs = threshold_quantile ? std::vector<double>{*threshold_quantile} : std::vector<double>{0.95, 0.9};
  for (double q : qs) require(q > 0.0 && q < 1.0, ErrorCode::InvalidArgument, "threshold quantile must be in (0,1)");
  int seen = 0;
  for (double q : qs) {
    if (pos.empty()) break;
    const double u = detail::quantile_type7(pos, q);
    std::vector<double> y;
    for (double v : pos)
      if (v > u) y.push_back(v - u);
    seen = static_cast<int>(y.size());
    if (seen < min_exceed) continue;
    const auto g = fit_gpd_mle(y);
    PotFit f;
    f.u = u;
    f.sigma = g.sigma;
    f.xi = g.xi;
    f.se_sigma = g.se_sigma;
    f.se_xi = g.se_xi;
    f.n_exceed = seen;
    f.n_years = n_years;
    f.lambda = static_cast<double>(seen) / n_years;
    f.se_lambda = std::sqrt(f.lambda / n_years);
    f.threshold_quantile = q;
    f.loglik = g.loglik;
    return f;
  }
  throw Error(ErrorCode::TooFewExceedances, "fewer than " + std::to_string(min_exceed) + " exceedances",
              std::to_string(seen));
}

/// Level exceeded on average once every m observations when a fraction
/// pr_exceed of observations exceed u. m·pr = 1 returns u itself.
inline double gpd_return_level(const PotFit& f, double m, double pr_exceed) {
  const double mp = m * pr_exceed;
  require(mp >= 1.0, ErrorCode::BelowThresholdReturn, "return period falls below the threshold",
          std::to_string(mp));
  return f.u + f.sigma * detail::box_cox(std::log(mp), f.xi);
}

/// λ / (−ln(1−ε)); below 1 the PML sits under the threshold.
inline double pml_ratio(const PotFit& f, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must be in (0,1)");
  return f.lambda / -std::log1p(-epsilon);
}

inline bool pml_below_threshold(const PotFit& f, double epsilon) { return pml_ratio(f, epsilon) < 1.0; }

/// The (1−ε) quantile of the compound Poisson-GPD annual maximum. When the
/// ratio drops below 1 the formula leaves the fitted tail; u is returned and
/// pml_below_threshold reports it.
inline double pml_quantile(const PotFit& f, double epsilon) {
  require(f.lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
  const double r = pml_ratio(f, epsilon);
  if (r < 1.0) return f.u;
  return f.u + f.sigma * detail::box_cox(std::log(r), f.xi);
}

/// Lower (type 1) empirical quantile at 1−ε of annual maxima, zeros included.
inline double empirical_pml(std::span<const double> annual_maxima, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must be in (0,1)");
  const double n = static_cast<double>(annual_maxima.size());
  require(n * epsilon >= 1.0 - 1e-9, ErrorCode::InsufficientYears, "series shorter than 1/epsilon",
          std::to_string(annual_maxima.size()));
  std::vector<double> v(annual_maxima.begin(), annual_maxima.end());
  double np = n * (1.0 - epsilon);
  if (std::abs(np - std::round(np)) < 1e-9 * n) np = std::round(np);
  const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(np))) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

struct GevParams {
  double mu = 0.0;
  double psi = 1.0;
  double xi = 0.0;
};

/// GEV law of the largest of N ~ Poisson(λ) excesses from G_{ξ,σ}.
inline GevParams compound_gev_params(double sigma, double xi, double lambda) {
  require(sigma > 0.0 && lambda > 0.0, ErrorCode::InvalidArgument, "sigma and lambda must be positive");
  return {sigma * detail::box_cox(std::log(lambda), xi), sigma * std::pow(lambda, xi), xi};
}

inline double gev_cdf(const GevParams& g, double x) {
  const double s = (x - g.mu) / g.psi;
  if (std::abs(g.xi) < 1e-300) return std::exp(-std::exp(-s));
  const double z = 1.0 + g.xi * s;
  if (z <= 0.0) return g.xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(g.xi * s) / g.xi));
}

inline double compound_max_cdf(double sigma, double xi, double lambda, double x) {
  return gev_cdf(compound_gev_params(sigma, xi, lambda), x);
}

// ---------------------------------------------------------------------------
// Dependence

enum class CorrelationMethod { Pearson, Kendall };

inline std::string to_string(CorrelationMethod m) { return m == CorrelationMethod::Pearson ? "pearson" : "kendall"; }

inline CorrelationMethod parse_correlation_method(const std::string& s) {
  if (s == "pearson") return CorrelationMethod::Pearson;
  if (s == "kendall") return CorrelationMethod::Kendall;
  throw Error(ErrorCode::InvalidArgument, "unknown correlation method", s);
}

/// Pearson coefficient; nullopt when either series is constant.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "need two aligned series");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace detail {

// sorts v ascending and returns the number of strict inversions
inline std::int64_t count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::int64_t inv = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inv += static_cast<std::int64_t>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return inv;
}

template <class It, class Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    auto run = first;
    std::int64_t t = 0;
    while (run != last && eq(*run, *first)) ++run, ++t;
    total += t * (t - 1) / 2;
    first = run;
  }
  return total;
}

}  // namespace detail

/// Kendall's tau-b in O(n log n) (Knight's merge-sort count), ties kept.
/// nullopt when either series is constant.
inline std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "need two aligned series");
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> xy(n);
  for (std::size_t i = 0; i < n; ++i) xy[i] = {x[i], y[i]};
  std::sort(xy.begin(), xy.end());
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const auto n1 = detail::tied_pairs(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const auto n3 = detail::tied_pairs(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a == b; });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = xy[i].second;
  const auto swaps = detail::count_inversions(ys);
  const auto n2 = detail::tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });
  if (n1 == n0 || n2 == n0) return std::nullopt;
  const long double s = static_cast<long double>(n0 - n1 - n2 + n3) - 2.0L * swaps;
  const long double d = std::sqrt(static_cast<long double>(n0 - n1) * static_cast<long double>(n0 - n2));
  return std::clamp(static_cast<double>(s / d), -1.0, 1.0);
}

struct CorrelationMatrix {
  CorrelationMethod method = CorrelationMethod::Pearson;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> entries;
  std::vector<std::string> diagnostics;  // pairs left at 0 because a series is constant

  std::size_t size() const { return labels.size(); }
  double operator()(std::size_t i, std::size_t j) const { return entries[i][j]; }

  static CorrelationMatrix from_rows(CorrelationMethod m, std::vector<std::string> labels,
                                     std::vector<std::vector<double>> rows) {
    require(rows.size() == labels.size(), ErrorCode::LabelMismatch, "matrix and labels differ in size");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == labels.size(), ErrorCode::LabelMismatch, "matrix is not square");
      require(std::abs(rows[i][i] - 1.0) < 1e-9, ErrorCode::InvalidArgument, "diagonal must be 1", labels[i]);
      for (std::size_t j = 0; j < i; ++j)
        require(std::abs(rows[i][j] - rows[j][i]) < 1e-9 && std::abs(rows[i][j]) <= 1.0, ErrorCode::InvalidArgument,
                "matrix must be symmetric with entries in [-1,1]", labels[i] + "," + labels[j]);
    }
    return {m, std::move(labels), std::move(rows), {}};
  }
};

inline CorrelationMatrix correlation_matrix(const std::vector<std::string>& labels,
                                            const std::vector<std::vector<double>>& series, CorrelationMethod method) {
  require(labels.size() == series.size(), ErrorCode::LabelMismatch, "one series per label");
  CorrelationMatrix c;
  c.method = method;
  c.labels = labels;
  const std::size_t k = labels.size();
  c.entries.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    require(series[i].size() >= 2 && series[i].size() == series[0].size(), ErrorCode::InvalidArgument,
            "series must be aligned with at least two years", labels[i]);
    c.entries[i][i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      const auto r = method == CorrelationMethod::Pearson ? pearson(series[i], series[j])
                                                          : kendall_tau_b(series[i], series[j]);
      if (!r) c.diagnostics.push_back(labels[j] + "," + labels[i]);
      c.entries[i][j] = c.entries[j][i] = r.value_or(0.0);
    }
  }
  return c;
}

inline void write_correlation_csv(std::ostream& out, const CorrelationMatrix& c) {
  out << to_string(c.method);
  for (const auto& l : c.labels) out << ',' << l;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << c.labels[i];
    for (std::size_t j = 0; j < c.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", c(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Capital aggregation

/// The regulator's power-1.5 combination of East and West PMLs.
inline double osfi_mct(double east, double west) {
  require(east >= 0.0 && west >= 0.0, ErrorCode::InvalidArgument, "PMLs must be >= 0");
  return std::pow(std::pow(east, 1.5) + std::pow(west, 1.5), 1.0 / 1.5);
}

/// √(Σ_{r,s} ρ_rs PML_r PML_s). A slightly negative radicand from a
/// non-PSD (rounded) matrix is clamped to 0.
inline double corr_mct(const std::vector<std::string>& labels, std::span<const double> pml, const CorrelationMatrix& corr) {
  require(labels == corr.labels && pml.size() == labels.size(), ErrorCode::LabelMismatch,
          "PML labels do not match the correlation matrix");
  double s = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < pml.size(); ++r) {
    require(pml[r] >= 0.0, ErrorCode::InvalidArgument, "PMLs must be >= 0", labels[r]);
    for (std::size_t c = 0; c < pml.size(); ++c) {
      s += corr(r, c) * pml[r] * pml[c];
      scale += std::abs(corr(r, c)) * pml[r] * pml[c];
    }
  }
  if (s < 0.0) {
    require(s >= -1e-9 * scale, ErrorCode::InvalidArgument, "correlation matrix is far from positive semidefinite");
    s = 0.0;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Reports over a simulated run

inline std::vector<std::string> province_labels() {
  return {exposure::kProvinces.begin(), exposure::kProvinces.end()};
}

/// Annual maxima of single-event amounts per province and region.
struct AnnualMaxima {
  std::array<std::vector<double>, loss::kProvinceCount> province;
  std::array<std::vector<double>, loss::kRegionCount> region;  // East, West, Total
  int n_years = 0;

  static AnnualMaxima from_years(const std::vector<loss::YearRow>& years, bool claims) {
    AnnualMaxima a;
    a.n_years = static_cast<int>(years.size());
    for (const auto& y : years) {
      for (std::size_t p = 0; p < loss::kProvinceCount; ++p)
        a.province[p].push_back((claims ? y.max_event_claim[p] : y.max_event_loss[p]).dollars());
      for (std::size_t g = 0; g < loss::kRegionCount; ++g)
        a.region[g].push_back((claims ? y.max_region_claim[g] : y.max_region_loss[g]).dollars());
    }
    return a;
  }
};

struct PmlSet {
  std::array<double, loss::kProvinceCount> province{};
  std::array<double, loss::kRegionCount> region{};  // East, West, Total
  double osfi = 0.0;
  std::optional<double> pearson;
  std::optional<double> kendall;
};

struct MctReport {
  double epsilon = 0.0;
  PmlSet simulated;  // empirical quantiles
  PmlSet estimated;  // fitted tails
  std::vector<std::string> warnings;
};

struct MctAnalysis {
  bool claims = false;
  std::array<std::optional<PotFit>, loss::kProvinceCount> province_fits;
  std::array<std::optional<PotFit>, loss::kRegionCount> region_fits;
  std::optional<CorrelationMatrix> pearson;
  std::optional<CorrelationMatrix> kendall;
  std::vector<MctReport> reports;
  std::vector<std::string> warnings;
};

/// Per-area PML by both routes for each ε, then OSFI and the correlation
/// aggregates. Areas without enough exceedances for a tail fit fall back to
/// the empirical value for the estimated row, with a warning.
inline MctAnalysis mct_analysis(const AnnualMaxima& a, std::span<const double> epsilons,
                                std::span<const CorrelationMethod> methods, bool claims = false) {
  require(a.n_years >= 2, ErrorCode::InsufficientYears, "need at least two simulated years");
  require(!epsilons.empty(), ErrorCode::InvalidArgument, "no epsilon requested");
  MctAnalysis out;
  out.claims = claims;
  const auto labels = province_labels();
  auto try_fit = [&](const std::vector<double>& s, const std::string& name) -> std::optional<PotFit> {
    try {
      return fit_pot(s, a.n_years);
    } catch (const Error& e) {
      out.warnings.push_back(name + ": " + e.what());
      return std::nullopt;
    }
  };
  for (std::size_t p = 0; p < loss::kProvinceCount; ++p) out.province_fits[p] = try_fit(a.province[p], labels[p]);
  for (std::size_t g = 0; g < loss::kRegionCount; ++g)
    out.region_fits[g] = try_fit(a.region[g], std::string(loss::kRegions[g]));

  const std::vector<std::vector<double>> series(a.province.begin(), a.province.end());
  for (auto m : methods) {
    auto c = correlation_matrix(labels, series, m);
    (m == CorrelationMethod::Pearson ? out.pearson : out.kendall) = std::move(c);
  }

  for (double eps : epsilons) {
    MctReport r;
    r.epsilon = eps;
    auto estimate = [&](const std::optional<PotFit>& f, double empirical, const std::string& name) {
      if (!f) return empirical;
      if (pml_below_threshold(*f, eps)) r.warnings.push_back(name + ": PML below the fitted threshold");
      return pml_quantile(*f, eps);
    };
    for (std::size_t p = 0; p < loss::kProvinceCount; ++p) {
      r.simulated.province[p] = empirical_pml(a.province[p], eps);
      r.estimated.province[p] = estimate(out.province_fits[p], r.simulated.province[p], labels[p]);
    }
    for (std::size_t g = 0; g < loss::kRegionCount; ++g) {
      r.simulated.region[g] = empirical_pml(a.region[g], eps);
      r.estimated.region[g] = estimate(out.region_fits[g], r.simulated.region[g], std::string(loss::kRegions[g]));
    }
    for (PmlSet* s : {&r.simulated, &r.estimated}) {
      s->osfi = osfi_mct(s->region[0], s->region[1]);
      if (out.pearson) s->pearson = corr_mct(labels, s->province, *out.pearson);
      if (out.kendall) s->kendall = corr_mct(labels, s->province, *out.kendall);
    }
    out.reports.push_back(std::move(r));
  }
  return out;
}

/// One row per ε in the published layout: x = 1/ε, then the provinces,
/// East, West and the three country-wide figures. Amounts in CAD.
inline void write_pml_csv(std::ostream& out, const std::vector<MctReport>& reports, bool estimated) {
  out << 'x';
  for (auto p : exposure::kProvinces) out << ',' << p;
  out << ",East,West,OSFI,Pearson,Kendall\n";
  char buf[64];
  auto money = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    const auto& s = estimated ? r.estimated : r.simulated;
    std::snprintf(buf, sizeof buf, "%.10g", 1.0 / r.epsilon);
    out << buf;
    for (double v : s.province) out << ',' << money(v);
    out << ',' << money(s.region[0]) << ',' << money(s.region[1]) << ',' << money(s.osfi) << ','
        << (s.pearson ? money(*s.pearson) : "") << ',' << (s.kendall ? money(*s.kendall) : "") << '\n';
  }
}

}  // namespace quakesim::evt
