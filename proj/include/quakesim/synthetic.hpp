#pragma once

// Deterministic demo inputs: two seismic clusters (one each side of the
// -100 meridian), a hazard lattice around each, 50 square CSDs and full
// DPM/terms tables. Used by tests, the acceptance run and the shipped data/.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "quakesim/exposure.hpp"
#include "quakesim/geojson.hpp"
#include "quakesim/hazard.hpp"
#include "quakesim/lossengine.hpp"
#include "quakesim/stpp.hpp"

namespace quakesim::synthetic {

using json = nlohmann::json;

struct Cluster {
  geo::GeoPoint centre;
  int n_events;
  std::string province_low;   // CSDs west of centre
  std::string province_high;  // CSDs at or east of centre
  std::string metro_zone;
};

inline const std::vector<Cluster>& clusters() {
  static const std::vector<Cluster> c{{{-123.0, 49.2}, 120, "BC", "BC", "Vancouver Metro"},
                                      {{-73.6, 45.5}, 80, "ON", "QC", "Montreal Metro"}};
  return c;
}

inline geo::SpatialWindow window() { return geo::SpatialWindow::rectangle(-128.0, 42.0, -60.0, 56.0); }
inline stpp::Period period() { return {1901, 2020}; }
inline constexpr double kBandwidth = 1.2;
/// Mirrors the observed share of years without a significant event.
inline constexpr double kAnnualRate = 0.784;

inline stpp::PointPattern catalog(std::uint64_t seed = 7) {
  stpp::PointPattern p;
  p.window = window();
  p.period = period();
  Rng rng = Rng::keyed(seed, StreamPurpose::Test, 1);
  for (const auto& c : clusters()) {
    for (int i = 0; i < c.n_events;) {
      const geo::GeoPoint x{c.centre.lon + rng.normal(0.0, 0.9), c.centre.lat + rng.normal(0.0, 0.6)};
      const int year = p.period.start + static_cast<int>(rng.uniform() * p.period.length());
      if (!p.window.contains(x)) continue;
      p.events.push_back({x, std::min(year, p.period.end)});
      ++i;
    }
  }
  return p;
}

/// 0.5° lattice of sites within ±3° lon and ±2° lat of each cluster, with
/// GPD tails synthesized from smooth functions of position.
inline std::vector<hazard::HazardSite> hazard_grid() {
  std::vector<hazard::HazardSite> out;
  for (const auto& c : clusters()) {
    for (int i = -6; i <= 6; ++i) {
      for (int j = -4; j <= 4; ++j) {
        hazard::HazardSite s;
        s.location = {c.centre.lon + 0.5 * i, c.centre.lat + 0.5 * j};
        const double r = std::hypot(i / 6.0, j / 4.0);
        const double u = 0.06 + 0.10 * std::exp(-r * r);
        const double sigma = 0.05 + 0.06 * std::exp(-r * r);
        const double xi = 0.10 + 0.15 * (0.5 + 0.5 * std::sin(1.7 * i + 0.9 * j));
        for (std::size_t k = 0; k < 8; ++k) {
          const double p = hazard::kExceedanceProbs[k];
          s.pga[k] = u + sigma / xi * (std::pow(p / 0.02, -xi) - 1.0);
        }
        out.push_back(s);
      }
    }
  }
  return out;
}

inline constexpr double kCsdSize = 0.3;

/// 5 × 5 squares per cluster; ids are P<cluster><row><col>.
inline std::vector<loss::CsdGeometry> csds() {
  std::vector<loss::CsdGeometry> out;
  for (std::size_t k = 0; k < clusters().size(); ++k) {
    const auto& c = clusters()[k];
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double x0 = c.centre.lon + (i - 2.5) * kCsdSize;
        const double y0 = c.centre.lat + (j - 2.5) * kCsdSize;
        const std::string id = "C" + std::to_string(k) + std::to_string(i) + std::to_string(j);
        out.emplace_back(id, geo::Polygon::rectangle(x0, y0, x0 + kCsdSize, y0 + kCsdSize));
      }
    }
  }
  return out;
}

inline std::string province_of(std::size_t cluster, int i) {
  const auto& c = clusters()[cluster];
  return i < 2 ? c.province_low : c.province_high;
}

inline exposure::ZoneMap zone_map() {
  exposure::ZoneMap z;
  for (std::size_t k = 0; k < clusters().size(); ++k)
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        if (province_of(k, i) != "BC" && province_of(k, i) != "QC") continue;
        z["C" + std::to_string(k) + std::to_string(i) + std::to_string(j)] = clusters()[k].metro_zone;
      }
  return z;
}

/// Residential counts from a deterministic pattern (denser near the centre),
/// built with the cost model; non-residential classes from permit ratios.
inline std::vector<exposure::CsdExposure> exposures() {
  exposure::ResidentialInputs in;
  in.cost_per_sqft = {{{"*", "RES1"}, 180.0}, {{"*", "RES3A"}, 160.0}, {{"BC", "RES1"}, 230.0}};
  in.bcpi = {{"BC", 1.12}, {"ON", 1.15}, {"QC", 1.10}};
  in.materials["RES3A"] = {{exposure::Material::Wood, 0.6}, {exposure::Material::Concrete, 0.4}};
  for (std::size_t k = 0; k < clusters().size(); ++k) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const std::string id = "C" + std::to_string(k) + std::to_string(i) + std::to_string(j);
        const double w = std::exp(-((i - 2) * (i - 2) + (j - 2) * (j - 2)) / 4.0);
        in.counts.push_back({id, province_of(k, i), "RES1", std::round(400 + 9000 * w)});
        in.counts.push_back({id, province_of(k, i), "RES3A", std::round(100 + 6000 * w)});
        in.avg_sqft[{id, "RES1"}] = 1400 + 40 * i + 25 * j;
        in.avg_sqft[{id, "RES3A"}] = 850 + 15 * j;
      }
    }
  }
  const auto res = exposure::build_residential_exposure(in);
  exposure::NonResidentialInputs nr;
  for (const char* p : {"BC", "ON", "QC"}) {
    nr.permit_ratios["commercial"][p] = 0.35;
    nr.permit_ratios["industrial"][p] = 0.15;
    nr.permit_ratios["institutional"][p] = 0.10;
  }
  nr.materials["IND1"] = {{exposure::Material::Steel, 0.7}, {exposure::Material::Concrete, 0.3}};
  return exposure::merge(res, exposure::build_nonresidential_exposure(res, nr));
}

/// The wood-frame structural matrix as printed ("***" as 0, renormalized).
inline const std::vector<exposure::DpmRow>& wood_frame_rows() {
  static const std::vector<exposure::DpmRow> rows{{0.08, 0.75, 0.17, 0, 0, 0, 0},
                                                  {0.04, 0.28, 0.64, 0.04, 0, 0, 0},
                                                  {0.01, 0.06, 0.86, 0.05, 0.02, 0, 0},
                                                  {0, 0.01, 0.69, 0.20, 0.10, 0, 0},
                                                  {0, 0, 0.19, 0.76, 0.12, 0.02, 0},
                                                  {0, 0, 0.02, 0.69, 0.25, 0.04, 0},
                                                  {0, 0, 0, 0.42, 0.50, 0.06, 0.02}};
  return rows;
}

/// The wood light-frame structural matrix for RES1/wood S, and wildcard matrices for every damage type
/// derived from it: `shift` levels more fragile (DS, AS) or less (BldgC).
inline json dpm_json() {
  auto entry = [](const std::string& occ, const std::string& mat, const std::string& type, int shift) {
    json mmi = json::object();
    const auto& rows = wood_frame_rows();
    for (int l = 0; l < exposure::kLevels; ++l) {
      const int src = std::clamp(l + shift, 0, exposure::kLevels - 1);
      mmi[std::string(exposure::kRoman[l])] = rows[static_cast<std::size_t>(src)];
    }
    return json{{"occupancy", occ}, {"material", mat}, {"damage_type", type}, {"renormalize", true}, {"mmi", mmi}};
  };
  json arr = json::array();
  arr.push_back(entry("RES1", "wood", "S", 0));
  arr.push_back(entry("*", "*", "S", 0));
  arr.push_back(entry("*", "*", "DS", 1));
  arr.push_back(entry("*", "*", "AS", 1));
  arr.push_back(entry("*", "*", "BldgC", -1));
  arr.push_back(entry("*", "steel", "S", -1));
  return {{"note", "Published wood light-frame structural DPM with '***' cells as 0; rows renormalized "
                   "(column X sums to 1.09 as printed). Other matrices are level-shifted copies."},
          {"dpms", arr}};
}

inline std::string terms_csv() {
  return "zone,property_type,penetration,deductible,limit\n"
         "Vancouver Metro,residential,0.55,0.10,1.00\n"
         "Victoria Metro,residential,0.70,0.08,1.00\n"
         "Rest of BC,residential,0.40,0.08,1.00\n"
         "Montreal Metro,residential,0.05,0.05,1.00\n"
         "Quebec Metro,residential,0.02,0.05,1.00\n"
         "Rest of QC,residential,0.02,0.05,1.00\n"
         "Vancouver Metro,commercial_industrial,0.85,0.10,0.80\n"
         "Victoria Metro,commercial_industrial,0.85,0.075,0.80\n"
         "Rest of BC,commercial_industrial,0.85,0.075,0.80\n"
         "Montreal Metro,commercial_industrial,0.60,0.05,0.80\n"
         "Quebec Metro,commercial_industrial,0.60,0.05,0.80\n"
         "Rest of QC,commercial_industrial,0.60,0.05,0.80\n";
}

inline exposure::TermsTable terms() {
  std::istringstream in(terms_csv());
  return exposure::read_terms_csv(in, "terms");
}

inline loss::Inputs inputs() {
  loss::Inputs in;
  in.model = stpp::fit_kernel(catalog(), kBandwidth);
  in.hazard = loss::HazardModel::fit(hazard_grid());
  in.csds = csds();
  in.exposures = exposures();
  in.index_exposures();
  in.dpms = exposure::DpmLibrary::from_json(dpm_json());
  in.terms = terms();
  in.zones = zone_map();
  return in;
}

}  // namespace quakesim::synthetic
