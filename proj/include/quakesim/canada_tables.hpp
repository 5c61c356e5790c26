#pragma once

// Published Canada-wide figures from a 100,000-year national run: the
// correlation matrices between provinces and the 1-in-500 simulated PML row
// (CAD billions). Provinces are in exposure::kProvinces order. Used as
// fixtures for the capital formulas.

#include <array>
#include <vector>

namespace quakesim::canada {

/// Pearson correlation of simulated financial losses.
inline const std::vector<std::vector<double>>& loss_pearson() {
  static const std::vector<std::vector<double>> m{
      {1.00, 0.38, 0.32, 0.31, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.38, 1.00, 0.81, 0.91, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.32, 0.81, 1.00, 0.82, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.31, 0.91, 0.82, 1.00, 0.03, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.03, 1.00, 0.69, 0.64, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.00, 0.69, 1.00, 0.64, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.00, 0.64, 0.64, 1.00, 0.03, 0.00, 0.03, 0.02, 0.00, 0.02},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.03, 1.00, 0.04, 0.02, 0.02, 0.08, 0.02},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.04, 1.00, 0.66, 0.53, 0.80, 0.55},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.03, 0.02, 0.66, 1.00, 0.87, 0.40, 0.88},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.02, 0.53, 0.87, 1.00, 0.32, 0.97},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.08, 0.80, 0.40, 0.32, 1.00, 0.35},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.02, 0.55, 0.88, 0.97, 0.35, 1.00}};
  return m;
}

/// Pearson correlation of simulated insurance claims.
inline const std::vector<std::vector<double>>& claims_pearson() {
  static const std::vector<std::vector<double>> m{
      {1.00, 0.29, 0.23, 0.23, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.29, 1.00, 0.77, 0.89, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.23, 0.77, 1.00, 0.87, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.23, 0.89, 0.87, 1.00, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.02, 1.00, 0.69, 0.48, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.00, 0.69, 1.00, 0.60, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.00, 0.48, 0.60, 1.00, 0.01, 0.00, 0.00, 0.03, 0.00, 0.03},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.01, 1.00, 0.01, 0.02, 0.09, 0.01, 0.07},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.01, 1.00, 0.16, 0.08, 0.63, 0.11},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.16, 1.00, 0.39, 0.06, 0.34},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.03, 0.09, 0.08, 0.39, 1.00, 0.04, 0.82},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.01, 0.63, 0.06, 0.04, 1.00, 0.07},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.03, 0.07, 0.11, 0.34, 0.82, 0.07, 1.00}};
  return m;
}

/// Kendall's tau of simulated financial losses.
inline const std::vector<std::vector<double>>& loss_kendall() {
  static const std::vector<std::vector<double>> m{
      {1.00, 0.73, 0.75, 0.39, 0.22, 0.09, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.73, 1.00, 0.78, 0.52, 0.33, 0.19, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.75, 0.78, 1.00, 0.53, 0.33, 0.19, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.39, 0.52, 0.53, 1.00, 0.74, 0.65, 0.19, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.22, 0.33, 0.33, 0.74, 1.00, 0.88, 0.43, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.09, 0.19, 0.19, 0.65, 0.88, 1.00, 0.51, 0.01, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.19, 0.43, 0.51, 1.00, 0.30, 0.02, 0.27, 0.27, 0.09, 0.30},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.01, 0.30, 1.00, 0.20, 0.57, 0.61, 0.44, 0.43},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.20, 1.00, 0.34, 0.27, 0.39, 0.36},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.27, 0.57, 0.34, 1.00, 0.79, 0.55, 0.65},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.27, 0.61, 0.27, 0.79, 1.00, 0.45, 0.70},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.09, 0.44, 0.39, 0.55, 0.45, 1.00, 0.36},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.30, 0.43, 0.36, 0.65, 0.70, 0.36, 1.00}};
  return m;
}

/// Kendall's tau of simulated insurance claims.
inline const std::vector<std::vector<double>>& claims_kendall() {
  static const std::vector<std::vector<double>> m{
      {1.00, 0.69, 0.70, 0.36, 0.21, 0.08, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.69, 1.00, 0.82, 0.51, 0.33, 0.17, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.70, 0.82, 1.00, 0.52, 0.34, 0.17, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.36, 0.51, 0.52, 1.00, 0.75, 0.65, 0.20, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.21, 0.33, 0.34, 0.75, 1.00, 0.87, 0.46, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.08, 0.17, 0.17, 0.65, 0.87, 1.00, 0.55, 0.04, 0.00, 0.00, 0.00, 0.00, 0.00},
      {0.00, 0.00, 0.00, 0.20, 0.46, 0.55, 1.00, 0.22, 0.00, 0.15, 0.15, 0.00, 0.19},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.04, 0.22, 1.00, 0.11, 0.36, 0.50, 0.21, 0.30},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.11, 1.00, 0.27, 0.21, 0.33, 0.30},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.15, 0.36, 0.27, 1.00, 0.71, 0.34, 0.57},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.15, 0.50, 0.21, 0.71, 1.00, 0.23, 0.59},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.21, 0.33, 0.34, 0.23, 1.00, 0.23},
      {0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.19, 0.30, 0.30, 0.57, 0.59, 0.23, 1.00}};
  return m;
}

struct PmlRow {
  std::array<double, 13> province;
  double east, west, osfi, pearson, kendall;
};

/// Simulated PML_{1/500} of financial losses.
inline constexpr PmlRow kLossPml500{{0.2, 1.6, 5.6, 13.6, 180.5, 108.6, 1.2, 0.1, 7.7, 2.4, 25.7, 0.9, 5.4}, 234.4, 38.1, 244.6, 271.6, 296.0};
/// Simulated PML_{1/500} of insurance claims.
inline constexpr PmlRow kClaimsPml500{{0.0, 0.1, 0.3, 2.1, 28.2, 10.3, 0.2, 0.0, 0.7, 0.1, 1.2, 0.1, 0.2}, 36.3, 2.0, 36.6, 36.4, 39.4};

}  // namespace quakesim::canada
