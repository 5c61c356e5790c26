#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "quakesim/exposure.hpp"
#include "quakesim/geo.hpp"
#include "quakesim/hazard.hpp"
#include "quakesim/stpp.hpp"

namespace quakesim::loss {

using exposure::BuildingClass;
using exposure::CsdExposure;
using exposure::DamageType;
using exposure::InsuranceTerms;
using exposure::MdfMode;
using geo::GeoPoint;
using geo::Polygon;

inline constexpr std::size_t kProvinceCount = exposure::kProvinces.size();

inline std::size_t province_index(std::string_view p) {
  for (std::size_t i = 0; i < kProvinceCount; ++i)
    if (exposure::kProvinces[i] == p) return i;
  throw Error(ErrorCode::InvalidArgument, "unknown province", std::string(p));
}

/// Regional aggregates used by the capital formulas. Nunavut counts as East.
inline constexpr std::array<std::string_view, 3> kRegions{"East", "West", "Total"};
inline constexpr std::size_t kRegionCount = kRegions.size();

inline bool is_eastern(std::size_t province) {
  static constexpr std::array<std::string_view, 7> east{"NL", "PE", "NS", "NB", "QC", "ON", "NU"};
  return std::find(east.begin(), east.end(), exposure::kProvinces[province]) != east.end();
}

template <class T>
std::array<T, kRegionCount> region_sums(const std::array<T, kProvinceCount>& by_province) {
  std::array<T, kRegionCount> out{};
  for (std::size_t p = 0; p < kProvinceCount; ++p) {
    out[is_eastern(p) ? 0 : 1] += by_province[p];
    out[2] += by_province[p];
  }
  return out;
}

/// Share of building exposure carried by each damage type; contents carry
/// BldgC in full.
inline constexpr std::array<double, 3> kBuildingSplit{0.25, 0.375, 0.375};  // S, DS, AS

struct CsdGeometry {
  std::string csd_id;
  Polygon polygon;
  geo::BBox bbox;

  CsdGeometry() = default;
  CsdGeometry(std::string id, Polygon p) : csd_id(std::move(id)), polygon(std::move(p)) {
    bbox = geo::bbox_of(polygon.exterior);
  }
};

// ---------------------------------------------------------------------------
// Event geometry

struct Band {
  int mmi_level = 6;
  double outer_km = 0.0;
  double inner_km = 0.0;
};

struct AffectedCsd {
  std::size_t csd_index = 0;
  std::string csd_id;
  int mmi_level = 6;
  double area_fraction = 0.0;
};

struct EventScenario {
  std::int64_t event_id = 0;
  int year = 0;
  GeoPoint epicenter;
  bool east = false;
  std::size_t site_index = 0;
  hazard::ShakeSample shake;
  std::vector<Band> rings;  // decreasing MMI, annuli
  std::vector<AffectedCsd> affected;
};

struct EventOptions {
  hazard::NoiseConfig noise;
  int max_tries = 10000;
  double cap_km = 5000.0;
  /// When set, the PGA draw is skipped and rings come straight from M.
  std::optional<double> magnitude;
};

struct HazardModel {
  std::vector<hazard::HazardSite> grid;
  std::vector<hazard::SiteGpdFit> fits;

  static HazardModel fit(std::vector<hazard::HazardSite> grid) {
    require(!grid.empty(), ErrorCode::EmptyGrid, "hazard grid is empty");
    HazardModel m;
    m.fits.reserve(grid.size());
    for (const auto& s : grid) m.fits.push_back(hazard::fit_site_gpd(s));
    m.grid = std::move(grid);
    return m;
  }
};

/// Annuli for levels top..6: the inner radius of level L is the outer radius
/// of level L + 1, and the innermost band is a disk.
inline std::vector<Band> make_bands(double magnitude, int top, bool east, double cap_km) {
  std::vector<Band> out;
  if (top < exposure::kMinMmi) return out;
  const auto radii = hazard::isoseismal_radii(magnitude, top, east, cap_km);
  double inner = 0.0;
  for (const auto& r : radii) {
    out.push_back({r.mmi_level, r.radius_km, inner});
    inner = r.radius_km;
  }
  return out;
}

namespace detail {

// Conservative km lower bound on the distance from p to a lon/lat box.
inline double bbox_distance_lower_bound(const GeoPoint& p, const geo::BBox& b) {
  const GeoPoint q{std::clamp(p.lon, b.lon_min, b.lon_max), std::clamp(p.lat, b.lat_min, b.lat_max)};
  const double dlat_km = std::abs(q.lat - p.lat) * kPi / 180.0 * kEarthRadiusKm;
  const double maxabs_lat = std::max({std::abs(b.lat_min), std::abs(b.lat_max), std::abs(p.lat)});
  const double dlon_km = std::abs(q.lon - p.lon) * kPi / 180.0 * kEarthRadiusKm * std::cos(geo::deg2rad(std::min(89.9, maxabs_lat)));
  // chord-vs-arc and projection slack
  return 0.9 * std::max(dlat_km, dlon_km) - 1.0;
}

}  // namespace detail

inline std::vector<AffectedCsd> affected_csds(const GeoPoint& epicenter, const std::vector<Band>& bands,
                                              const std::vector<CsdGeometry>& csds) {
  std::vector<AffectedCsd> out;
  if (bands.empty()) return out;
  const double reach = bands.back().outer_km;
  for (std::size_t c = 0; c < csds.size(); ++c) {
    if (detail::bbox_distance_lower_bound(epicenter, csds[c].bbox) > reach) continue;
    for (const auto& b : bands) {
      const double f = geo::band_area_fraction(csds[c].polygon, epicenter, b.outer_km, b.inner_km);
      if (f > 1e-12) out.push_back({c, csds[c].csd_id, b.mmi_level, f});
    }
  }
  return out;
}

/// Draws magnitude, PGA and isoseismal rings for one epicenter. SignificanceUnreachable and RadiusOverflow
/// propagate to the caller.
inline EventScenario simulate_event(const GeoPoint& epicenter, int year, std::int64_t event_id,
                                    const HazardModel& hazard, const std::vector<CsdGeometry>& csds, Rng& rng,
                                    const EventOptions& opts = {}) {
  geo::validate(epicenter);
  EventScenario ev;
  ev.event_id = event_id;
  ev.year = year;
  ev.epicenter = epicenter;
  ev.east = hazard::is_east(epicenter);
  const auto near = hazard::nearest_site(epicenter, hazard.grid);
  ev.site_index = near.index;
  if (opts.magnitude) {
    require(*opts.magnitude > 6.0, ErrorCode::InvalidArgument, "magnitude must exceed 6");
    ev.shake.magnitude = *opts.magnitude;
    ev.shake.east = ev.east;
    ev.shake.distance_to_site_km = near.clamped_km;
    // epicentral intensity: the attenuation law at its 1 km floor
    ev.shake.mmi_epicenter = std::clamp(hazard::bakun_intensity(*opts.magnitude, 1.0, ev.east), 1.0, 12.0);
    ev.shake.pga_cm_s2 = std::pow(10.0, (ev.shake.mmi_epicenter + 1.66) / 3.66);
  } else {
    ev.shake = hazard::simulate_site_pga(hazard.fits[near.index], near.clamped_km, ev.east, rng, opts.noise,
                                         opts.max_tries);
  }
  const int top = std::min(exposure::kMaxMmi, static_cast<int>(std::floor(ev.shake.mmi_epicenter)));
  ev.rings = make_bands(ev.shake.magnitude, top, ev.east, opts.cap_km);
  ev.affected = affected_csds(epicenter, ev.rings, csds);
  return ev;
}

// ---------------------------------------------------------------------------
// Losses and claims

/// π · max(0, min(loss − d, u − d)) with d = deductible × exposure and
/// u = limit × exposure.
inline double claim_amount(double loss, double exposure_value, const InsuranceTerms& t) {
  require(t.limit > t.deductible, ErrorCode::InvalidTerms, "limit must exceed deductible", t.zone);
  require(loss >= 0.0 && exposure_value >= 0.0, ErrorCode::InvalidArgument, "negative loss or exposure");
  const double d = t.deductible * exposure_value;
  const double u = t.limit * exposure_value;
  return t.penetration * std::max(0.0, std::min(loss - d, u - d));
}

inline Cents claim_payment(Cents total_loss, Cents total_exposure, const InsuranceTerms& t) {
  return Cents::from_dollars(claim_amount(total_loss.dollars(), total_exposure.dollars(), t));
}

struct LossOptions {
  MdfMode mdf_mode = MdfMode::Random;
  /// Per-class replacement-cost factor U(0.9, 1.1); 1 when off.
  bool cost_uncertainty = true;

  static LossOptions deterministic() { return {MdfMode::Midpoint, false}; }
};

struct ClassLoss {
  BuildingClass cls;
  std::array<Cents, 4> by_type{};  // S, DS, AS, BldgC
  Cents total;
  Cents claim;
  double cost_factor = 1.0;
};

struct CsdLossResult {
  std::string csd_id;
  std::string province;
  int max_mmi = 0;
  double area_fraction = 0.0;  // summed over bands
  Cents exposure;              // full CSD exposure, all classes
  std::vector<ClassLoss> classes;
  Cents total_loss;
  Cents claim;
};

/// Stream keys shared by the batch and scenario paths.
struct LossKeys {
  std::uint64_t seed = 0;
  std::uint64_t year = 0;
  std::uint64_t event = 0;
};

/// Damage and claims over every affected (CSD, band). Amounts accumulate in
/// double per (CSD, class, damage type) and round to cents once, so
/// splitting a band into pieces of the same level cannot move a cent.
inline std::vector<CsdLossResult> compute_event_losses(const EventScenario& ev, const std::vector<CsdExposure>& exposures,
                                                       const std::map<std::string, std::size_t>& exposure_index,
                                                       const exposure::DpmLibrary& dpms, const exposure::TermsTable& terms,
                                                       const exposure::ZoneMap& zones, const LossKeys& keys,
                                                       const LossOptions& opts = {}) {
  // group bands by CSD, keeping first-seen order
  std::vector<std::size_t> order;
  std::map<std::size_t, std::vector<const AffectedCsd*>> by_csd;
  for (const auto& a : ev.affected) {
    auto& v = by_csd[a.csd_index];
    if (v.empty()) order.push_back(a.csd_index);
    v.push_back(&a);
  }

  std::vector<CsdLossResult> out;
  out.reserve(order.size());
  for (const auto ci : order) {
    const auto& bands = by_csd[ci];
    const auto& id = bands.front()->csd_id;
    const auto eit = exposure_index.find(id);
    require(eit != exposure_index.end(), ErrorCode::MissingExposure, "affected CSD has no exposure", id);
    const CsdExposure& e = exposures[eit->second];

    CsdLossResult r;
    r.csd_id = id;
    r.province = e.province;
    r.exposure = e.total();
    for (const auto* b : bands) {
      r.max_mmi = std::max(r.max_mmi, b->mmi_level);
      r.area_fraction += b->area_fraction;
    }

    for (std::size_t k = 0; k < e.classes.size(); ++k) {
      const auto& ce = e.classes[k];
      ClassLoss cl;
      cl.cls = ce.cls;
      if (opts.cost_uncertainty) {
        Rng u_rng = Rng::keyed(keys.seed, keys.year, keys.event, ci, k, StreamPurpose::CostUncertainty);
        cl.cost_factor = u_rng.uniform(0.9, 1.1);
      }
      const auto& t = exposure::lookup_insurance_terms(e, exposure::property_type_of(ce.cls), terms, zones);
      const double bldg = ce.building.dollars() * cl.cost_factor;
      const double cont = ce.content.dollars() * cl.cost_factor;
      const std::array<double, 4> base{kBuildingSplit[0] * bldg, kBuildingSplit[1] * bldg, kBuildingSplit[2] * bldg, cont};

      std::array<double, 4> acc{};
      double claim = 0.0;
      for (const auto* b : bands) {
        Rng d_rng = Rng::keyed(keys.seed, keys.year, keys.event, ci, k, b->mmi_level, StreamPurpose::Damage);
        double band_loss = 0.0;
        for (std::size_t ti = 0; ti < 4; ++ti) {
          const auto& dpm = dpms.find(ce.cls, exposure::kDamageTypes[ti]);
          const double mdf = exposure::mean_damage_factor(dpm, b->mmi_level, opts.mdf_mode, &d_rng);
          const double l = base[ti] * mdf * b->area_fraction;
          acc[ti] += l;
          band_loss += l;
        }
        // deductible and limit on the band's share of this class
        claim += claim_amount(band_loss, (bldg + cont) * b->area_fraction, t);
      }
      for (std::size_t ti = 0; ti < 4; ++ti) {
        cl.by_type[ti] = Cents::from_dollars(acc[ti]);
        cl.total += cl.by_type[ti];
      }
      cl.claim = Cents::from_dollars(claim);
      r.total_loss += cl.total;
      r.claim += cl.claim;
      r.classes.push_back(std::move(cl));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch runs

struct Inputs {
  std::optional<stpp::SeparableIntensityModel> model;  // drives the catalog
  HazardModel hazard;
  std::vector<CsdGeometry> csds;
  std::vector<CsdExposure> exposures;
  std::map<std::string, std::size_t> exposure_index;
  exposure::DpmLibrary dpms;
  exposure::TermsTable terms;
  exposure::ZoneMap zones;

  void index_exposures() {
    exposure_index.clear();
    for (std::size_t i = 0; i < exposures.size(); ++i) {
      exposures[i].validate();
      require(exposure_index.emplace(exposures[i].csd_id, i).second, ErrorCode::Conflict, "duplicate CSD exposure",
              exposures[i].csd_id);
    }
  }

  /// Checks cross-table consistency before any simulation starts.
  void validate() const {
    require(model.has_value(), ErrorCode::InvalidArgument, "no intensity model");
    require(!hazard.grid.empty() && hazard.grid.size() == hazard.fits.size(), ErrorCode::EmptyGrid,
            "hazard grid not fitted");
    require(!terms.rows().empty(), ErrorCode::InvalidArgument, "terms table is empty");
    require(exposure_index.size() == exposures.size(), ErrorCode::InvalidArgument, "exposures not indexed");
    for (const auto& g : csds)
      require(exposure_index.count(g.csd_id) > 0, ErrorCode::MissingExposure, "CSD geometry without exposure", g.csd_id);
    for (const auto& e : exposures)
      for (const auto& c : e.classes)
        for (auto t : exposure::kDamageTypes) {
          const auto& d = dpms.find(c.cls, t);
          for (int l = exposure::kMinMmi; l <= exposure::kMaxMmi; ++l)
            require(d.has_level(l), ErrorCode::InvalidDpm, "DPM lacks an MMI row", d.key() + "@" + std::to_string(l));
        }
  }
};

struct BatchConfig {
  int n_years = 1000;
  std::uint64_t seed = 1;
  std::optional<double> annual_rate;
  EventOptions event;
  LossOptions loss;
  int threads = 0;  // 0 = hardware concurrency
};

struct EventRecord {
  std::int64_t event_id = 0;
  int year = 0;
  GeoPoint epicenter;
  bool discarded = false;
  std::string discard_reason;
  bool east = false;
  std::size_t site_index = 0;
  double distance_km = 0.0;
  double pga_cm_s2 = 0.0;
  double mmi = 0.0;
  double magnitude = 0.0;
  std::vector<Band> rings;
  std::size_t n_affected = 0;
  Cents loss;
  Cents claim;
  std::array<Cents, kProvinceCount> loss_by_province{};
  std::array<Cents, kProvinceCount> claim_by_province{};
};

struct YearRow {
  int year = 0;
  int n_events = 0;
  int n_damaging = 0;
  std::array<Cents, kProvinceCount> loss{};
  std::array<Cents, kProvinceCount> claim{};
  std::array<Cents, kProvinceCount> max_event_loss{};
  std::array<Cents, kProvinceCount> max_event_claim{};
  std::array<Cents, kRegionCount> max_region_loss{};  // largest single-event East/West/Total amounts
  std::array<Cents, kRegionCount> max_region_claim{};
};

struct SimulationRun {
  std::string run_id;
  std::uint64_t seed = 0;
  int n_years = 0;
  std::vector<YearRow> annual;  // years 1..n_years
  std::vector<EventRecord> events;
  std::map<std::string, int> diagnostics;  // discard reason -> count
};

inline EventRecord process_event(const stpp::SimulatedEvent& se, const Inputs& in, const BatchConfig& cfg) {
  EventRecord rec;
  rec.event_id = se.event_id;
  rec.year = se.year;
  rec.epicenter = se.location;
  Rng rng = Rng::keyed(cfg.seed, static_cast<std::uint64_t>(se.year), static_cast<std::uint64_t>(se.event_id),
                       StreamPurpose::Pga);
  EventScenario ev;
  try {
    ev = simulate_event(se.location, se.year, se.event_id, in.hazard, in.csds, rng, cfg.event);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SignificanceUnreachable && e.code() != ErrorCode::RadiusOverflow) throw;
    rec.discarded = true;
    rec.discard_reason = std::string(to_string(e.code()));
    return rec;
  }
  rec.east = ev.east;
  rec.site_index = ev.site_index;
  rec.distance_km = ev.shake.distance_to_site_km;
  rec.pga_cm_s2 = ev.shake.pga_cm_s2;
  rec.mmi = ev.shake.mmi_epicenter;
  rec.magnitude = ev.shake.magnitude;
  rec.rings = ev.rings;
  rec.n_affected = ev.affected.size();
  const LossKeys keys{cfg.seed, static_cast<std::uint64_t>(se.year), static_cast<std::uint64_t>(se.event_id)};
  for (const auto& r : compute_event_losses(ev, in.exposures, in.exposure_index, in.dpms, in.terms, in.zones, keys, cfg.loss)) {
    const auto p = province_index(r.province);
    rec.loss_by_province[p] += r.total_loss;
    rec.claim_by_province[p] += r.claim;
    rec.loss += r.total_loss;
    rec.claim += r.claim;
  }
  return rec;
}

/// Simulates the catalog, runs every event through the scenario and loss steps and
/// aggregates per year and province. Events are spread over worker threads;
/// all randomness is keyed, so output does not depend on the thread count.
inline SimulationRun run_batch(const Inputs& in, const BatchConfig& cfg,
                               const std::function<void(double)>& progress = {}) {
  require(cfg.n_years >= 1, ErrorCode::InvalidArgument, "n_years must be at least 1");
  in.validate();
  stpp::CatalogOptions co;
  co.annual_rate = cfg.annual_rate;
  const auto catalog = stpp::simulate_catalog(*in.model, cfg.n_years, cfg.seed, co);

  std::vector<EventRecord> records(catalog.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= catalog.size()) return;
      try {
        records[i] = process_event(catalog[i], in, cfg);
      } catch (...) {
        std::lock_guard lk(fail_mu);
        if (!failure) failure = std::current_exception();
        next.store(catalog.size());
        return;
      }
      const auto d = done.fetch_add(1) + 1;
      if (progress && (d % 64 == 0 || d == catalog.size())) progress(static_cast<double>(d) / catalog.size());
    }
  };
  unsigned nt = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, std::max<std::size_t>(1, catalog.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SimulationRun run;
  run.seed = cfg.seed;
  run.n_years = cfg.n_years;
  run.annual.resize(static_cast<std::size_t>(cfg.n_years));
  for (int y = 1; y <= cfg.n_years; ++y) run.annual[static_cast<std::size_t>(y - 1)].year = y;
  for (const auto& r : records) {
    auto& row = run.annual[static_cast<std::size_t>(r.year - 1)];
    ++row.n_events;
    if (r.discarded) {
      ++run.diagnostics[r.discard_reason];
      continue;
    }
    if (r.loss.value() > 0) ++row.n_damaging;
    for (std::size_t p = 0; p < kProvinceCount; ++p) {
      row.loss[p] += r.loss_by_province[p];
      row.claim[p] += r.claim_by_province[p];
      row.max_event_loss[p] = std::max(row.max_event_loss[p], r.loss_by_province[p]);
      row.max_event_claim[p] = std::max(row.max_event_claim[p], r.claim_by_province[p]);
    }
    const auto rl = region_sums(r.loss_by_province);
    const auto rc = region_sums(r.claim_by_province);
    for (std::size_t g = 0; g < kRegionCount; ++g) {
      row.max_region_loss[g] = std::max(row.max_region_loss[g], rl[g]);
      row.max_region_claim[g] = std::max(row.max_region_claim[g], rc[g]);
    }
  }
  run.events = std::move(records);
  if (progress) progress(1.0);
  return run;
}

struct CountRow {
  int k = 0;
  double pct_events = 0.0;
  double pct_damaging = 0.0;
};

/// Share of years (percent) with exactly k events and with exactly k
/// damaging events.
inline std::vector<CountRow> summarize_run(const SimulationRun& run) {
  require(!run.annual.empty(), ErrorCode::InvalidArgument, "run has no years");
  int kmax = 0;
  for (const auto& y : run.annual) kmax = std::max(kmax, y.n_events);
  std::vector<CountRow> out(static_cast<std::size_t>(kmax + 1));
  std::vector<std::int64_t> ce(out.size()), cd(out.size());
  for (const auto& y : run.annual) {
    ++ce[static_cast<std::size_t>(y.n_events)];
    ++cd[static_cast<std::size_t>(y.n_damaging)];
  }
  const double n = static_cast<double>(run.annual.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {static_cast<int>(k), 100.0 * ce[k] / n, 100.0 * cd[k] / n};
  return out;
}

/// Per-province annual series as dollars, for the tail-risk module.
/// `use_max` selects the largest single-event amount of each year rather
/// than the yearly sum.
inline std::array<std::vector<double>, kProvinceCount> province_series(const SimulationRun& run, bool claims,
                                                                       bool use_max = true) {
  std::array<std::vector<double>, kProvinceCount> out;
  for (auto& v : out) v.reserve(run.annual.size());
  for (const auto& y : run.annual)
    for (std::size_t p = 0; p < kProvinceCount; ++p) {
      const auto& src = claims ? (use_max ? y.max_event_claim : y.claim) : (use_max ? y.max_event_loss : y.loss);
      out[p].push_back(src[p].dollars());
    }
  return out;
}

// ---------------------------------------------------------------------------
// Output tables

inline void write_annual_csv(std::ostream& out, const SimulationRun& run) {
  out << "year,province,loss_cad,claim_cad,n_events\n";
  for (const auto& y : run.annual)
    for (std::size_t p = 0; p < kProvinceCount; ++p)
      out << y.year << ',' << exposure::kProvinces[p] << ',' << exposure::format_cad(y.loss[p]) << ','
          << exposure::format_cad(y.claim[p]) << ',' << y.n_events << '\n';
}

/// Largest single-event amounts per year for each province and region, the
/// input to the PML fits.
inline void write_annual_max_csv(std::ostream& out, const SimulationRun& run) {
  out << "year,area,max_loss_cad,max_claim_cad,n_damaging_events\n";
  for (const auto& y : run.annual) {
    for (std::size_t p = 0; p < kProvinceCount; ++p)
      out << y.year << ',' << exposure::kProvinces[p] << ',' << exposure::format_cad(y.max_event_loss[p]) << ','
          << exposure::format_cad(y.max_event_claim[p]) << ',' << y.n_damaging << '\n';
    for (std::size_t g = 0; g < kRegionCount; ++g)
      out << y.year << ',' << kRegions[g] << ',' << exposure::format_cad(y.max_region_loss[g]) << ','
          << exposure::format_cad(y.max_region_claim[g]) << ',' << y.n_damaging << '\n';
  }
}

inline std::string format_rings(const std::vector<Band>& rings) {
  std::ostringstream s;
  s << std::setprecision(10);
  for (std::size_t i = 0; i < rings.size(); ++i) s << (i ? ";" : "") << rings[i].mmi_level << ':' << rings[i].outer_km;
  return s.str();
}

inline void write_events_csv(std::ostream& out, const SimulationRun& run) {
  out << "event_id,year,lon,lat,east,status,site_index,distance_km,pga_cm_s2,mmi,magnitude,rings,n_affected,loss_cad,"
         "claim_cad\n";
  out << std::setprecision(10);
  for (const auto& e : run.events) {
    out << e.event_id << ',' << e.year << ',' << e.epicenter.lon << ',' << e.epicenter.lat << ',' << (e.east ? 1 : 0)
        << ',' << (e.discarded ? e.discard_reason : "ok") << ',' << e.site_index << ',' << e.distance_km << ','
        << e.pga_cm_s2 << ',' << e.mmi << ',' << e.magnitude << ',' << format_rings(e.rings) << ',' << e.n_affected
        << ',' << exposure::format_cad(e.loss) << ',' << exposure::format_cad(e.claim) << '\n';
  }
}

/// Parses annual.csv and annual_max.csv back into year rows.
inline std::vector<YearRow> read_annual(std::istream& annual, std::istream& annual_max) {
  const auto a = csv::Table::parse(annual, "annual.csv");
  const auto m = csv::Table::parse(annual_max, "annual_max.csv");
  a.require_columns({"year", "province", "loss_cad", "claim_cad", "n_events"});
  m.require_columns({"year", "area", "max_loss_cad", "max_claim_cad", "n_damaging_events"});
  constexpr std::size_t areas = kProvinceCount + kRegionCount;
  require(a.size() % kProvinceCount == 0 && m.size() == a.size() / kProvinceCount * areas, ErrorCode::ParseError,
          "annual tables disagree in size");
  std::vector<YearRow> rows(a.size() / kProvinceCount);
  for (std::size_t r = 0; r < a.size(); ++r) {
    auto& y = rows[r / kProvinceCount];
    y.year = static_cast<int>(a.integer(r, "year"));
    y.n_events = static_cast<int>(a.integer(r, "n_events"));
    const auto p = province_index(a.str(r, "province"));
    y.loss[p] = exposure::parse_cad(a.str(r, "loss_cad"));
    y.claim[p] = exposure::parse_cad(a.str(r, "claim_cad"));
  }
  for (std::size_t r = 0; r < m.size(); ++r) {
    auto& y = rows[r / areas];
    require(m.integer(r, "year") == y.year, ErrorCode::ParseError, "annual tables out of step", std::to_string(r));
    y.n_damaging = static_cast<int>(m.integer(r, "n_damaging_events"));
    const auto area = m.str(r, "area");
    const auto loss = exposure::parse_cad(m.str(r, "max_loss_cad"));
    const auto claim = exposure::parse_cad(m.str(r, "max_claim_cad"));
    const auto g = std::find(kRegions.begin(), kRegions.end(), area);
    if (g != kRegions.end()) {
      y.max_region_loss[static_cast<std::size_t>(g - kRegions.begin())] = loss;
      y.max_region_claim[static_cast<std::size_t>(g - kRegions.begin())] = claim;
    } else {
      const auto p = province_index(area);
      y.max_event_loss[p] = loss;
      y.max_event_claim[p] = claim;
    }
  }
  return rows;
}

}  // namespace quakesim::loss
