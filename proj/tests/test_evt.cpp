#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "quakesim/canada_tables.hpp"
#include "quakesim/evt.hpp"
#include "quakesim/synthetic.hpp"

using namespace quakesim;
using namespace quakesim::evt;

namespace {

double gpd_draw(Rng& rng, double sigma, double xi) {
  const double u = rng.uniform();
  return std::abs(xi) < 1e-12 ? -sigma * std::log(u) : sigma / xi * (std::pow(u, -xi) - 1.0);
}

std::vector<double> gpd_sample(std::uint64_t seed, std::size_t n, double sigma, double xi) {
  Rng rng = Rng::keyed(seed, StreamPurpose::Test);
  std::vector<double> y(n);
  for (auto& v : y) v = gpd_draw(rng, sigma, xi);
  return y;
}

// direct textbook density sum, no rearrangement
double loglik_oracle(const std::vector<double>& y, double s, double xi) {
  double l = 0;
  for (double v : y)
    l += xi == 0.0 ? -std::log(s) - v / s : -std::log(s) - (1 + 1 / xi) * std::log(1 + xi * v / s);
  return l;
}

double tau_b_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) {
        ++tx;
      } else if (b == 0) {
        ++ty;
      } else if (a * b > 0) {
        ++c;
      } else {
        ++d;
      }
    }
  return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

PotFit tail(double u, double sigma, double xi, double lambda) {
  PotFit f;
  f.u = u;
  f.sigma = sigma;
  f.xi = xi;
  f.lambda = lambda;
  return f;
}

std::vector<std::string> provinces() { return province_labels(); }

}  // namespace

TEST(GpdLikelihood, MatchesTextbookForm) {
  // bounded sample (max < 5) so ξ = −0.2 at σ = 1.7 keeps every point in support
  const auto y = gpd_sample(1, 200, 1.0, -0.2);
  for (double xi : {0.25, -0.2, 0.0, 1.3})
    EXPECT_NEAR(gpd_loglik(y, 1.7, xi), loglik_oracle(y, 1.7, xi), 1e-9 * std::abs(loglik_oracle(y, 1.7, xi)));
  EXPECT_NEAR(gpd_loglik(y, 1.7, 1e-12), loglik_oracle(y, 1.7, 0.0), 1e-8);
  EXPECT_EQ(gpd_loglik(y, 0.1, -0.9), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(gpd_loglik(y, -1.0, 0.1), -std::numeric_limits<double>::infinity());
}

TEST(GpdLikelihood, InformationMatchesFiniteDifferences) {
  for (double xi : {0.2, -0.3, 0.7, 1e-7, 0.0, 3e-3}) {
    // negative shapes need data inside the support −σ/ξ = 7
    const auto y = xi < 0 ? gpd_sample(2, 300, 1.5, -0.3) : gpd_sample(2, 300, 2.0, 0.2);
    const double s = 2.1, h = 1e-4;
    auto l = [&](double a, double b) { return gpd_loglik(y, a, b); };
    const double hss = (l(s + h, xi) - 2 * l(s, xi) + l(s - h, xi)) / (h * h);
    const double hxx = (l(s, xi + h) - 2 * l(s, xi) + l(s, xi - h)) / (h * h);
    const double hsx = (l(s + h, xi + h) - l(s + h, xi - h) - l(s - h, xi + h) + l(s - h, xi - h)) / (4 * h * h);
    const auto info = gpd_observed_information(y, s, xi);
    EXPECT_NEAR(info[0], -hss, 1e-4 * std::abs(hss) + 1e-3) << xi;
    EXPECT_NEAR(info[1], -hsx, 1e-4 * std::abs(hsx) + 1e-3) << xi;
    EXPECT_NEAR(info[2], -hxx, 1e-4 * std::abs(hxx) + 1e-3) << xi;
  }
}

TEST(GpdMle, RecoversParametersWithinReportedErrors) {
  int ok = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto y = gpd_sample(100 + r, 5000, 2.0, 0.2);
    const auto f = fit_gpd_mle(y);
    ASSERT_TRUE(std::isfinite(f.se_sigma) && std::isfinite(f.se_xi));
    if (std::abs(f.sigma - 2.0) <= 3 * f.se_sigma && std::abs(f.xi - 0.2) <= 3 * f.se_xi) ++ok;
  }
  EXPECT_GE(ok, 18);
}

TEST(GpdMle, StationaryAndBeatsMomentStart) {
  for (double xi : {0.2, -0.3, 0.0, 0.45}) {
    const auto y = gpd_sample(7, 2000, 1.0, xi);
    const auto f = fit_gpd_mle(y);
    const auto [s0, x0] = gpd_moments(y);
    EXPECT_GE(f.loglik, gpd_loglik(y, s0, x0) - 1e-9) << xi;
    // no better point nearby
    for (double ds : {-1e-3, 1e-3})
      for (double dx : {-1e-3, 1e-3}) EXPECT_LE(gpd_loglik(y, f.sigma * (1 + ds), f.xi + dx), f.loglik + 1e-9);
  }
}

TEST(GpdMle, ExponentialDataGivesXiNearZero) {
  const auto y = gpd_sample(11, 4000, 3.0, 0.0);
  const auto f = fit_gpd_mle(y);
  EXPECT_LT(std::abs(f.xi), 3 * f.se_xi);
  EXPECT_NEAR(f.sigma, 3.0, 3 * f.se_sigma);
}

TEST(GpdMle, ShapeStaysInsideSearchRange) {
  const auto heavy = gpd_sample(12, 3000, 1.0, 3.5);
  EXPECT_DOUBLE_EQ(fit_gpd_mle(heavy).xi, kXiUpper);
  // uniform excesses sit at ξ = −1, outside the range
  Rng rng(3);
  std::vector<double> uni(3000);
  for (auto& v : uni) v = rng.uniform();
  const auto f = fit_gpd_mle(uni);
  EXPECT_DOUBLE_EQ(f.xi, kXiLower);
  EXPECT_GT(f.sigma, 0.9 * *std::max_element(uni.begin(), uni.end()));
}

TEST(Pot, ThresholdQuantileAndRate) {
  // 2000 years, 300 positive: 95% quantile leaves 15, so 90% is used
  Rng rng(9);
  std::vector<double> s(2000, 0.0);
  for (int i = 0; i < 300; ++i) s[static_cast<std::size_t>(i * 6)] = 1.0 + gpd_draw(rng, 1.0, 0.1);
  const auto f = fit_pot(s, 2000);
  EXPECT_DOUBLE_EQ(f.threshold_quantile, 0.9);
  EXPECT_EQ(f.n_exceed, 30);
  EXPECT_DOUBLE_EQ(f.lambda, 30.0 / 2000);
  EXPECT_DOUBLE_EQ(f.se_lambda, std::sqrt(f.lambda / 2000));
  // zero years are not data: fitting only the positives gives the same tail
  std::vector<double> pos;
  for (double v : s)
    if (v > 0) pos.push_back(v);
  const auto g = fit_pot(pos, 2000);
  EXPECT_DOUBLE_EQ(g.u, f.u);
  EXPECT_DOUBLE_EQ(g.sigma, f.sigma);
}

TEST(Pot, TooFewExceedances) {
  std::vector<double> s(1000, 0.0);
  for (int i = 0; i < 100; ++i) s[static_cast<std::size_t>(i)] = i + 1.0;
  try {
    fit_pot(s, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewExceedances);
  }
  EXPECT_THROW(fit_pot(std::vector<double>(50, 0.0), 50), Error);
  // a fixed quantile does not fall back
  std::vector<double> big(400);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = 1.0 + static_cast<double>(i);
  EXPECT_THROW(fit_pot(big, 400, 0.95), Error);
  EXPECT_NO_THROW(fit_pot(big, 400, 0.9));
}

TEST(ReturnLevel, ClosedFormAndLimits) {
  EXPECT_NEAR(gpd_return_level(tail(0, 1, 1, 0), 100, 0.1), 9.0, 1e-12);
  const double a = gpd_return_level(tail(2, 1.5, 0.0, 0), 500, 0.05);
  EXPECT_NEAR(a, 2 + 1.5 * std::log(25.0), 1e-12);
  EXPECT_NEAR(gpd_return_level(tail(2, 1.5, 1e-8, 0), 500, 0.05), a, 1e-6 * a);
  EXPECT_DOUBLE_EQ(gpd_return_level(tail(2, 1.5, 0.3, 0), 10, 0.1), 2.0);
  try {
    gpd_return_level(tail(2, 1.5, 0.3, 0), 5, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BelowThresholdReturn);
  }
}

TEST(PmlQuantile, FormulaValues) {
  EXPECT_NEAR(pml_quantile(tail(0, 1, 0.1, 0.01), 1.0 / 500), 1.745, 1e-3);
  // bracket zero
  const double eps = -std::expm1(-0.3);
  for (double xi : {-0.4, 0.0, 0.5}) EXPECT_NEAR(pml_quantile(tail(5, 2, xi, 0.3), eps), 5.0, 1e-12);
  const double g = pml_quantile(tail(1, 2, 0.0, 3), 0.002);
  EXPECT_NEAR(g, 1 + 2 * std::log(3 / -std::log1p(-0.002)), 1e-12);
  EXPECT_NEAR(pml_quantile(tail(1, 2, 1e-9, 3), 0.002), g, 1e-6 * g);
  EXPECT_TRUE(pml_below_threshold(tail(1, 2, 0.2, 0.001), 0.002));
  EXPECT_DOUBLE_EQ(pml_quantile(tail(1, 2, 0.2, 0.001), 0.002), 1.0);
  EXPECT_THROW(pml_quantile(tail(1, 2, 0.2, 0.0), 0.002), Error);
}

TEST(PmlQuantile, IncreasingInRateAndScale) {
  for (double xi : {-0.3, 0.0, 0.4}) {
    double prev = -1;
    for (double lam = 0.01; lam < 20; lam *= 1.7) {
      const double v = pml_quantile(tail(0, 1, xi, lam), 0.002);
      EXPECT_GT(v, prev);
      prev = v;
    }
    prev = -1;
    for (double s = 0.1; s < 50; s *= 1.9) {
      const double v = pml_quantile(tail(0, s, xi, 2.0), 0.002);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(PmlQuantile, MatchesSimulatedAnnualMaxima) {
  // compound Poisson-GPD years, largest excess per year (0 when none)
  for (double xi : {-0.2, 0.1, 0.3}) {
    const double lam = 5.0;
    Rng rng = Rng::keyed(31, static_cast<int>(xi * 10 + 5), StreamPurpose::Test);
    std::vector<double> years(100000);
    for (auto& m : years) {
      const auto k = rng.poisson(lam);
      m = 0;
      for (std::int64_t i = 0; i < k; ++i) m = std::max(m, gpd_draw(rng, 1.0, xi));
    }
    const double eps = 0.01;
    const double theory = pml_quantile(tail(0, 1, xi, lam), eps);
    EXPECT_NEAR(empirical_pml(years, eps), theory, 0.05 * theory) << xi;
  }
}

TEST(EmpiricalPml, LowerQuantileConvention) {
  std::vector<double> v(1000, 0.0);
  std::fill(v.begin() + 500, v.end(), 1.0);
  EXPECT_DOUBLE_EQ(empirical_pml(v, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(empirical_pml(std::vector<double>(600, 4.5), 1.0 / 500), 4.5);
  std::vector<double> r(1000);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(999 - i);
  // 998th smallest of 0..999
  EXPECT_DOUBLE_EQ(empirical_pml(r, 1.0 / 500), 997.0);
  try {
    empirical_pml(std::vector<double>(499, 1.0), 1.0 / 500);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientYears);
  }
}

TEST(CompoundMax, GevParameters) {
  const auto one = compound_gev_params(2.5, 0.3, 1.0);
  EXPECT_NEAR(one.mu, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(one.psi, 2.5);
  const auto lim = compound_gev_params(2.0, 1e-10, 7.0);
  EXPECT_NEAR(lim.mu, 2.0 * std::log(7.0), 1e-8);
  EXPECT_NEAR(lim.psi, 2.0, 1e-8);
}

TEST(CompoundMax, EqualsPoissonThinningAboveZero) {
  // P(max ≤ x) = exp(−λ Ḡ(x)) for x ≥ 0
  for (double xi : {-0.3, 0.0, 0.2}) {
    for (double x : {0.0, 0.3, 1.0, 2.5}) {
      if (xi < 0 && x >= -1 / xi) continue;
      const double surv = xi == 0 ? std::exp(-x) : std::pow(1 + xi * x, -1 / xi);
      EXPECT_NEAR(compound_max_cdf(1.0, xi, 3.0, x), std::exp(-3.0 * surv), 1e-12) << xi << ' ' << x;
    }
  }
}

TEST(CompoundMax, ValidCdf) {
  for (double xi : {-0.4, 0.0, 0.2}) {
    double prev = 0;
    for (double x = -20; x <= 60; x += 0.25) {
      const double c = compound_max_cdf(1.3, xi, 3.0, x);
      EXPECT_GE(c, prev - 1e-15);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      prev = c;
    }
    EXPECT_LT(compound_max_cdf(1.3, xi, 3.0, -50), 1e-6);
    EXPECT_GT(compound_max_cdf(1.3, xi, 3.0, 1e4), 1 - 1e-6);
  }
  // support edges clamp
  EXPECT_EQ(compound_max_cdf(1.0, 0.5, 3.0, -1e6), 0.0);
  EXPECT_EQ(compound_max_cdf(1.0, -0.5, 3.0, 1e6), 1.0);
}

TEST(CompoundMax, MonteCarloSupNorm) {
  Rng rng(77);
  const int n = 200000;
  std::vector<double> m;
  m.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto k = rng.poisson(3.0);
    double v = -1;  // no exceedance: below every x ≥ 0
    for (std::int64_t j = 0; j < k; ++j) v = std::max(v, gpd_draw(rng, 1.0, 0.2));
    m.push_back(v);
  }
  std::sort(m.begin(), m.end());
  double sup = 0;
  for (double x = 0; x <= 30; x += 0.05) {
    const double ecdf = static_cast<double>(std::upper_bound(m.begin(), m.end(), x) - m.begin()) / n;
    sup = std::max(sup, std::abs(ecdf - compound_max_cdf(1.0, 0.2, 3.0, x)));
  }
  EXPECT_LT(sup, 0.01);
}

TEST(Correlation, KendallMatchesQuadraticOracle) {
  Rng rng(4);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x(700), y(700);
    for (std::size_t i = 0; i < x.size(); ++i) {
      // zero-inflated with ties, as annual losses are
      x[i] = rng.uniform() < 0.6 ? 0.0 : std::round(rng.uniform() * 20);
      y[i] = rng.uniform() < 0.5 ? 0.0 : std::round(x[i] * 0.5 + rng.uniform() * 10);
    }
    EXPECT_NEAR(*kendall_tau_b(x, y), tau_b_oracle(x, y), 1e-12);
  }
}

TEST(Correlation, TrivialCases) {
  std::vector<double> x{0, 1, 5, 2, 9, 3}, y{1, 2, 8, 3, 100, 4};
  EXPECT_DOUBLE_EQ(*kendall_tau_b(x, y), 1.0);
  EXPECT_NEAR(*pearson(x, x), 1.0, 1e-15);
  EXPECT_NEAR(*kendall_tau_b(x, x), 1.0, 1e-15);
  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  EXPECT_DOUBLE_EQ(*kendall_tau_b(x, neg), -1.0);
  EXPECT_FALSE(pearson(x, std::vector<double>(6, 2.0)));
  EXPECT_FALSE(kendall_tau_b(std::vector<double>(6, 0.0), y));
}

TEST(Correlation, IndependentSeriesNearZero) {
  Rng rng(8);
  const std::size_t n = 100000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform() < 0.7 ? 0 : rng.uniform();
    b[i] = a[i];
  }
  std::mt19937_64 g(1);
  std::shuffle(b.begin(), b.end(), g);
  EXPECT_LT(std::abs(*pearson(a, b)), 0.02);
  EXPECT_LT(std::abs(*kendall_tau_b(a, b)), 0.02);
}

TEST(Correlation, MatrixShapeAndDiagnostics) {
  const std::vector<std::string> labels{"A", "B", "C"};
  const std::vector<std::vector<double>> s{{0, 1, 2, 3}, {0, 0, 0, 0}, {3, 1, 2, 0}};
  for (auto m : {CorrelationMethod::Pearson, CorrelationMethod::Kendall}) {
    const auto c = correlation_matrix(labels, s, m);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(c(i, i), 1.0);
      for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(c(i, j), c(j, i));
    }
    EXPECT_EQ(c(0, 1), 0.0);
    EXPECT_EQ(c.diagnostics.size(), 2u);
    EXPECT_LT(c(0, 2), 0.0);
  }
  EXPECT_THROW(correlation_matrix(labels, {{0, 1}}, CorrelationMethod::Pearson), Error);
  std::ostringstream out;
  write_correlation_csv(out, correlation_matrix(labels, s, CorrelationMethod::Kendall));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "kendall,A,B,C");
}

TEST(Osfi, PublishedRows) {
  EXPECT_NEAR(osfi_mct(234.4, 38.1), 244.6, 0.1);
  EXPECT_NEAR(osfi_mct(36.3, 2.0), 36.6, 0.1);
  EXPECT_DOUBLE_EQ(osfi_mct(7.5, 0.0), 7.5);
  EXPECT_THROW(osfi_mct(-1, 2), Error);
}

TEST(Osfi, BoundsSymmetryMonotone) {
  Rng rng(10);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.uniform() * 100, b = rng.uniform() * 100;
    const double v = osfi_mct(a, b);
    EXPECT_GE(v, std::max(a, b) - 1e-12);
    EXPECT_LE(v, a + b + 1e-12);
    EXPECT_DOUBLE_EQ(v, osfi_mct(b, a));
    EXPECT_GT(osfi_mct(a + 1, b), v);
    EXPECT_GT(osfi_mct(a, b + 1), v);
  }
}

TEST(CorrMct, TrivialMatrices) {
  const std::vector<std::string> l{"a", "b"};
  const auto id = CorrelationMatrix::from_rows(CorrelationMethod::Pearson, l, {{1, 0}, {0, 1}});
  const auto ones = CorrelationMatrix::from_rows(CorrelationMethod::Pearson, l, {{1, 1}, {1, 1}});
  const std::vector<double> pml{3, 4};
  EXPECT_DOUBLE_EQ(corr_mct(l, pml, id), 5.0);
  EXPECT_DOUBLE_EQ(corr_mct(l, pml, ones), 7.0);
  try {
    corr_mct({"a", "c"}, pml, id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LabelMismatch);
  }
}

TEST(CorrMct, PublishedCountryWideFigures) {
  const auto l = provinces();
  auto m = [&](const std::vector<std::vector<double>>& rows, CorrelationMethod k) {
    return CorrelationMatrix::from_rows(k, l, rows);
  };
  const auto& loss = canada::kLossPml500;
  const auto& claims = canada::kClaimsPml500;
  EXPECT_NEAR(corr_mct(l, loss.province, m(canada::loss_pearson(), CorrelationMethod::Pearson)), loss.pearson, 0.5);
  EXPECT_NEAR(corr_mct(l, loss.province, m(canada::loss_kendall(), CorrelationMethod::Kendall)), loss.kendall, 1.0);
  EXPECT_NEAR(corr_mct(l, claims.province, m(canada::claims_pearson(), CorrelationMethod::Pearson)), claims.pearson, 0.5);
  EXPECT_NEAR(corr_mct(l, claims.province, m(canada::claims_kendall(), CorrelationMethod::Kendall)), claims.kendall, 1.0);
  EXPECT_NEAR(osfi_mct(loss.east, loss.west), loss.osfi, 0.1);
  EXPECT_NEAR(osfi_mct(claims.east, claims.west), claims.osfi, 0.1);
}

TEST(CorrMct, BetweenIndependenceAndComonotone) {
  Rng rng(12);
  const std::size_t k = 6;
  std::vector<std::string> l;
  for (std::size_t i = 0; i < k; ++i) l.push_back(std::string(1, static_cast<char>('a' + i)));
  for (int rep = 0; rep < 200; ++rep) {
    // Gram matrix of non-negative unit vectors: PSD with entries in [0,1]
    std::vector<std::vector<double>> v(k, std::vector<double>(4));
    for (auto& r : v) {
      double n = 0;
      for (auto& e : r) n += (e = rng.uniform()) * e;
      for (auto& e : r) e /= std::sqrt(n);
    }
    std::vector<std::vector<double>> c(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double d = 0;
        for (std::size_t t = 0; t < 4; ++t) d += v[i][t] * v[j][t];
        c[i][j] = i == j ? 1.0 : std::min(1.0, d);
      }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j) c[i][j] = c[j][i];
    std::vector<double> pml(k);
    double sum = 0, sq = 0;
    for (auto& p : pml) {
      p = rng.uniform() * 10;
      sum += p;
      sq += p * p;
    }
    const double v_mct = corr_mct(l, pml, CorrelationMatrix::from_rows(CorrelationMethod::Pearson, l, c));
    EXPECT_GE(v_mct, std::sqrt(sq) - 1e-9);
    EXPECT_LE(v_mct, sum + 1e-9);
  }
}

TEST(CorrMct, ClampsTinyNegativeRadicand) {
  const std::vector<std::string> l{"a", "b"};
  const auto anti = CorrelationMatrix::from_rows(CorrelationMethod::Pearson, l, {{1, -1}, {-1, 1}});
  EXPECT_EQ(corr_mct(l, std::vector<double>{2, 2}, anti), 0.0);
}

TEST(MctAnalysis, SyntheticRunIsConsistent) {
  loss::BatchConfig cfg;
  cfg.n_years = 1200;
  cfg.seed = 21;
  cfg.annual_rate = 3.0;
  const auto run = loss::run_batch(synthetic::inputs(), cfg);
  const auto maxima = AnnualMaxima::from_years(run.annual, false);
  const std::vector<double> eps{1.0 / 100, 1.0 / 500};
  const std::vector<CorrelationMethod> methods{CorrelationMethod::Pearson, CorrelationMethod::Kendall};
  const auto a = mct_analysis(maxima, eps, methods);
  ASSERT_EQ(a.reports.size(), 2u);
  ASSERT_TRUE(a.region_fits[2].has_value());
  for (const auto& r : a.reports) {
    for (const PmlSet* s : {&r.simulated, &r.estimated}) {
      EXPECT_DOUBLE_EQ(s->osfi, osfi_mct(s->region[0], s->region[1]));
      ASSERT_TRUE(s->pearson && s->kendall);
      for (double v : s->province) EXPECT_GE(v, 0.0);
      EXPECT_GE(s->region[2], std::max(s->region[0], s->region[1]));
    }
  }
  for (std::size_t p = 0; p < loss::kProvinceCount; ++p)
    EXPECT_GE(a.reports[1].simulated.province[p], a.reports[0].simulated.province[p]);
  EXPECT_GE(a.reports[1].simulated.osfi, a.reports[0].simulated.osfi);
  // fitted tail of the whole country tracks the empirical quantile
  EXPECT_NEAR(a.reports[0].estimated.region[2], a.reports[0].simulated.region[2],
              0.25 * a.reports[0].simulated.region[2]);

  std::ostringstream out;
  write_pml_csv(out, a.reports, false);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "x,NL,PE,NS,NB,QC,ON,MB,SK,BC,YT,NT,AB,NU,East,West,OSFI,Pearson,Kendall");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
