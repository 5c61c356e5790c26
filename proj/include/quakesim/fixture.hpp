#pragma once

// Writes the synthetic demo inputs as a data directory the service can load.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "quakesim/service.hpp"
#include "quakesim/synthetic.hpp"

namespace quakesim::fixture {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline json config_json() {
  return {{"window", "window.geojson"},
          {"catalog", "catalog.csv"},
          {"period", {{"start", synthetic::period().start}, {"end", synthetic::period().end}}},
          {"bandwidth", synthetic::kBandwidth},
          {"hazard_grid", "hazard_grid.csv"},
          {"csds", "csds.geojson"},
          {"csd_id_property", "csd_id"},
          {"exposure", "exposure.csv"},
          {"dpm", "dpm.json"},
          {"terms", "terms.csv"},
          {"zones", "zones.csv"},
          {"annual_rate", synthetic::kAnnualRate},
          {"n_years", 1000},
          {"seed", 1},
          {"threads", 0},
          {"loss", {{"mdf_mode", "random"}, {"cost_uncertainty", true}}},
          {"runs_dir", "runs"},
          {"epsilons", {0.01, 0.004, 0.002, 1.0 / 750.0, 0.001}}};
}

/// Writes every input table plus config.json into `dir` (created if needed).
inline void write(const fs::path& dir) {
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) { service::write_text(dir / name, text); };

  put("window.geojson", geojson::feature(synthetic::window().boundary, {{"name", "synthetic window"}}).dump(1) + "\n");
  {
    std::ostringstream s;
    service::write_catalog_csv(s, synthetic::catalog().events);
    put("catalog.csv", s.str());
  }
  {
    std::ostringstream s;
    const auto grid = synthetic::hazard_grid();
    hazard::write_grid(s, grid);
    put("hazard_grid.csv", s.str());
  }
  {
    std::vector<json> features;
    for (const auto& c : synthetic::csds()) features.push_back(geojson::feature(c.polygon, {{"csd_id", c.csd_id}}));
    put("csds.geojson", geojson::feature_collection(features).dump(1) + "\n");
  }
  {
    std::ostringstream s;
    exposure::write_exposure_csv(s, synthetic::exposures());
    put("exposure.csv", s.str());
  }
  put("dpm.json", synthetic::dpm_json().dump(1) + "\n");
  put("terms.csv", synthetic::terms_csv());
  {
    std::ostringstream s;
    s << "csd_id,zone\n";
    for (const auto& [id, zone] : synthetic::zone_map()) s << id << ',' << zone << '\n';
    put("zones.csv", s.str());
  }
  put("config.json", config_json().dump(2) + "\n");
}

}  // namespace quakesim::fixture
