#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "quakesim/core.hpp"
#include "quakesim/csv.hpp"

namespace quakesim::exposure {

using json = nlohmann::json;

inline constexpr std::array<std::string_view, 13> kProvinces{"NL", "PE", "NS", "NB", "QC", "ON", "MB",
                                                            "SK", "BC", "YT", "NT", "AB", "NU"};

inline bool is_province(std::string_view p) {
  return std::find(kProvinces.begin(), kProvinces.end(), p) != kProvinces.end();
}

// Occupancy vocabulary used by the residential census mapping and the
// non-residential permit mapping.
inline constexpr std::array<std::string_view, 33> kOccupancyCodes{
    "RES1", "RES2", "RES3A", "RES3B", "RES3C", "RES3D", "RES3E", "RES3F", "RES4", "RES5", "RES6",
    "COM1", "COM2", "COM3",  "COM4",  "COM5",  "COM6",  "COM7",  "COM8",  "COM9", "COM10",
    "IND1", "IND2", "IND3",  "IND4",  "IND5",  "IND6",  "AGR1",  "REL1",  "GOV1", "GOV2",
    "EDU1", "EDU2"};

inline bool is_occupancy(std::string_view code) {
  return std::find(kOccupancyCodes.begin(), kOccupancyCodes.end(), code) != kOccupancyCodes.end();
}

enum class Material { Wood, Concrete, Steel, Masonry, Other };

constexpr std::string_view to_string(Material m) {
  switch (m) {
    case Material::Wood: return "wood";
    case Material::Concrete: return "concrete";
    case Material::Steel: return "steel";
    case Material::Masonry: return "masonry";
    case Material::Other: return "other";
  }
  return "other";
}

inline Material parse_material(std::string_view s) {
  for (auto m : {Material::Wood, Material::Concrete, Material::Steel, Material::Masonry, Material::Other})
    if (to_string(m) == s) return m;
  throw Error(ErrorCode::ParseError, "unknown material", std::string(s));
}

struct BuildingClass {
  std::string occupancy;
  Material material = Material::Wood;

  friend auto operator<=>(const BuildingClass&, const BuildingClass&) = default;
  std::string label() const { return occupancy + "/" + std::string(to_string(material)); }
};

enum class PropertyType { Residential, CommercialIndustrial };

constexpr std::string_view to_string(PropertyType t) {
  return t == PropertyType::Residential ? "residential" : "commercial_industrial";
}

inline PropertyType parse_property_type(std::string_view s) {
  if (s == "residential") return PropertyType::Residential;
  if (s == "commercial_industrial") return PropertyType::CommercialIndustrial;
  throw Error(ErrorCode::ParseError, "unknown property type", std::string(s));
}

inline PropertyType property_type_of(const BuildingClass& c) {
  return c.occupancy.rfind("RES", 0) == 0 ? PropertyType::Residential : PropertyType::CommercialIndustrial;
}

struct ClassExposure {
  BuildingClass cls;
  Cents building;
  Cents content;
};

struct CsdExposure {
  std::string csd_id;
  std::string province;
  std::string geometry_ref;
  std::vector<ClassExposure> classes;

  Cents total() const {
    Cents t;
    for (const auto& c : classes) t += c.building + c.content;
    return t;
  }

  void validate() const {
    require(is_province(province), ErrorCode::InvalidArgument, "unknown province", csd_id + ":" + province);
    for (const auto& c : classes) {
      require(is_occupancy(c.cls.occupancy), ErrorCode::InvalidArgument, "unknown occupancy code",
              csd_id + ":" + c.cls.occupancy);
      require(c.building.value() >= 0 && c.content.value() >= 0, ErrorCode::InvalidArgument,
              "negative exposure", csd_id + ":" + c.cls.label());
    }
  }
};

// ---------------------------------------------------------------------------
// Damage probability matrices

enum class DamageType { S, DS, AS, BldgC };

inline constexpr std::array<DamageType, 4> kDamageTypes{DamageType::S, DamageType::DS, DamageType::AS,
                                                        DamageType::BldgC};

constexpr std::string_view to_string(DamageType t) {
  switch (t) {
    case DamageType::S: return "S";
    case DamageType::DS: return "DS";
    case DamageType::AS: return "AS";
    case DamageType::BldgC: return "BldgC";
  }
  return "S";
}

inline DamageType parse_damage_type(std::string_view s) {
  for (auto t : kDamageTypes)
    if (to_string(t) == s) return t;
  throw Error(ErrorCode::ParseError, "unknown damage type", std::string(s));
}

inline constexpr int kMinMmi = 6;
inline constexpr int kMaxMmi = 12;
inline constexpr int kLevels = kMaxMmi - kMinMmi + 1;
inline constexpr int kStates = 7;

/// Damage factor range of each state as a fraction of exposure:
/// none, slight, light, moderate, heavy, major, destroyed.
inline constexpr std::array<std::array<double, 2>, kStates> kStateRanges{
    {{0.0, 0.0}, {0.0, 0.01}, {0.01, 0.10}, {0.10, 0.30}, {0.30, 0.60}, {0.60, 1.0}, {1.0, 1.0}}};

inline constexpr std::array<std::string_view, kLevels> kRoman{"VI", "VII", "VIII", "IX", "X", "XI", "XII"};

inline int parse_roman_level(std::string_view s) {
  for (int i = 0; i < kLevels; ++i)
    if (kRoman[i] == s) return kMinMmi + i;
  throw Error(ErrorCode::ParseError, "unknown MMI level", std::string(s));
}

using DpmRow = std::array<double, kStates>;

struct Dpm {
  // "*" in either field matches any occupancy or material.
  std::string occupancy = "*";
  std::string material = "*";
  DamageType damage_type = DamageType::S;
  std::array<std::optional<DpmRow>, kLevels> rows;

  bool has_level(int level) const { return level >= kMinMmi && level <= kMaxMmi && rows[level - kMinMmi].has_value(); }

  const DpmRow& row(int level) const {
    require(has_level(level), ErrorCode::InvalidDpm, "DPM has no row for this MMI level", key() + "@" + std::to_string(level));
    return *rows[level - kMinMmi];
  }

  std::string key() const { return occupancy + "/" + material + "/" + std::string(to_string(damage_type)); }

  void validate() const {
    for (int i = 0; i < kLevels; ++i) {
      if (!rows[i]) continue;
      double s = 0.0;
      for (double p : *rows[i]) {
        require(p >= 0.0 && std::isfinite(p), ErrorCode::InvalidDpm, "negative DPM probability",
                key() + "@" + std::string(kRoman[i]));
        s += p;
      }
      require(std::abs(s - 1.0) <= 1e-6, ErrorCode::InvalidDpm, "DPM row does not sum to 1",
              key() + "@" + std::string(kRoman[i]) + " sum=" + std::to_string(s));
    }
  }

  /// Divides each row by its sum. Used for tables whose near-zero entries
  /// were dropped, leaving rows that no longer sum to exactly one.
  void renormalize() {
    for (int i = 0; i < kLevels; ++i) {
      if (!rows[i]) continue;
      double s = 0.0;
      for (double p : *rows[i]) s += p;
      require(s > 0.0, ErrorCode::InvalidDpm, "DPM row is all zero", key() + "@" + std::string(kRoman[i]));
      for (double& p : *rows[i]) p /= s;
    }
  }
};

enum class MdfMode { Midpoint, Random };

/// Σ_s p_s f_s with f_s the midpoint of state s's range, or a uniform draw
/// from it. The none and destroyed states have degenerate ranges (0 and 1).
inline double mean_damage_factor(const Dpm& dpm, int level, MdfMode mode = MdfMode::Midpoint, Rng* rng = nullptr) {
  const auto& r = dpm.row(level);
  double s = 0.0;
  for (double p : r) s += p;
  require(std::abs(s - 1.0) <= 1e-6, ErrorCode::InvalidDpm, "DPM row does not sum to 1", dpm.key());
  require(mode == MdfMode::Midpoint || rng != nullptr, ErrorCode::InvalidArgument, "random MDF needs a generator");
  double mdf = 0.0;
  for (int k = 0; k < kStates; ++k) {
    const auto [lo, hi] = kStateRanges[k];
    // draw for every state so the stream position does not depend on zeros
    const double f = mode == MdfMode::Midpoint ? 0.5 * (lo + hi) : (lo == hi ? lo : rng->uniform(lo, hi));
    mdf += r[k] * f;
  }
  return std::clamp(mdf, 0.0, 1.0);
}

class DpmLibrary {
 public:
  void add(Dpm d) {
    d.validate();
    const auto k = std::make_tuple(d.occupancy, d.material, d.damage_type);
    require(by_key_.count(k) == 0, ErrorCode::Conflict, "duplicate DPM", d.key());
    by_key_.emplace(k, std::move(d));
  }

  std::size_t size() const { return by_key_.size(); }

  /// Most specific match: exact, then any material, then any occupancy.
  const Dpm& find(const BuildingClass& c, DamageType t) const {
    const std::string mat(to_string(c.material));
    for (const auto& [o, m] : {std::pair{c.occupancy, mat}, std::pair{c.occupancy, std::string("*")},
                               std::pair{std::string("*"), mat}, std::pair{std::string("*"), std::string("*")}}) {
      const auto it = by_key_.find({o, m, t});
      if (it != by_key_.end()) return it->second;
    }
    throw Error(ErrorCode::NotFound, "no DPM for building class", c.label() + "/" + std::string(to_string(t)));
  }

  /// Schema: {"dpms": [{"occupancy", "material", "damage_type",
  /// "renormalize"?, "mmi": {"VI": [7 probabilities], ...}}]}.
  static DpmLibrary from_json(const json& j) {
    require(j.is_object() && j.contains("dpms") && j["dpms"].is_array(), ErrorCode::ParseError,
            "DPM document needs a dpms array");
    DpmLibrary lib;
    for (const auto& e : j["dpms"]) {
      Dpm d;
      d.occupancy = e.value("occupancy", "*");
      d.material = e.value("material", "*");
      d.damage_type = parse_damage_type(e.at("damage_type").get<std::string>());
      for (const auto& [lvl, probs] : e.at("mmi").items()) {
        const int level = parse_roman_level(lvl);
        require(probs.is_array() && probs.size() == kStates, ErrorCode::InvalidDpm, "DPM row needs 7 probabilities",
                d.key() + "@" + lvl);
        DpmRow row{};
        for (int k = 0; k < kStates; ++k) row[k] = probs[k].get<double>();
        d.rows[level - kMinMmi] = row;
      }
      if (e.value("renormalize", false)) d.renormalize();
      lib.add(std::move(d));
    }
    return lib;
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& [k, d] : by_key_) {
      json mmi = json::object();
      for (int i = 0; i < kLevels; ++i)
        if (d.rows[i]) mmi[std::string(kRoman[i])] = *d.rows[i];
      arr.push_back({{"occupancy", d.occupancy}, {"material", d.material},
                     {"damage_type", std::string(to_string(d.damage_type))}, {"mmi", mmi}});
    }
    return {{"dpms", arr}};
  }

 private:
  std::map<std::tuple<std::string, std::string, DamageType>, Dpm> by_key_;
};

// ---------------------------------------------------------------------------
// Insurance terms

struct InsuranceTerms {
  std::string zone;
  PropertyType property_type = PropertyType::Residential;
  double penetration = 0.0;
  double deductible = 0.0;
  double limit = 1.0;

  void validate() const {
    require(penetration >= 0.0 && penetration <= 1.0, ErrorCode::InvalidTerms, "penetration outside [0, 1]", zone);
    require(deductible >= 0.0 && deductible < limit && limit <= 1.0, ErrorCode::InvalidTerms,
            "need 0 <= deductible < limit <= 1", zone);
  }
};

class TermsTable {
 public:
  TermsTable() = default;
  explicit TermsTable(std::vector<InsuranceTerms> rows) : rows_(std::move(rows)) {
    require(!rows_.empty(), ErrorCode::InvalidArgument, "terms table is empty");
    for (const auto& r : rows_) r.validate();
  }

  const std::vector<InsuranceTerms>& rows() const { return rows_; }

  const InsuranceTerms* find(const std::string& zone, PropertyType t) const {
    for (const auto& r : rows_)
      if (r.zone == zone && r.property_type == t) return &r;
    return nullptr;
  }

  /// Lowest penetration for the property type; ties go to the first row.
  const InsuranceTerms& minimum_penetration(PropertyType t) const {
    const InsuranceTerms* best = nullptr;
    for (const auto& r : rows_)
      if (r.property_type == t && (best == nullptr || r.penetration < best->penetration)) best = &r;
    if (best == nullptr)
      for (const auto& r : rows_)
        if (best == nullptr || r.penetration < best->penetration) best = &r;
    return *best;
  }

 private:
  std::vector<InsuranceTerms> rows_;
};

using ZoneMap = std::map<std::string, std::string>;

/// Zone from the zone map, else the province default zone ("Rest of QC" or
/// a row keyed by the bare province code), else the minimum-penetration row
/// of that property type.
inline const InsuranceTerms& lookup_insurance_terms(const CsdExposure& csd, PropertyType type,
                                                    const TermsTable& table, const ZoneMap& zones) {
  require(!table.rows().empty(), ErrorCode::InvalidArgument, "terms table is empty");
  if (const auto it = zones.find(csd.csd_id); it != zones.end())
    if (const auto* r = table.find(it->second, type)) return *r;
  if (const auto* r = table.find("Rest of " + csd.province, type)) return *r;
  if (const auto* r = table.find(csd.province, type)) return *r;
  return table.minimum_penetration(type);
}

// ---------------------------------------------------------------------------
// Residential builder

inline constexpr double kResidentialContentShare = 0.5;

struct DwellingCount {
  std::string csd_id;
  std::string province;
  std::string occupancy;
  double units = 0.0;
};

struct MaterialShare {
  Material material;
  double share;
};

struct ResidentialInputs {
  std::vector<DwellingCount> counts;
  std::map<std::pair<std::string, std::string>, double> avg_sqft;  // (csd_id, occupancy)
  // (province, occupancy); province "*" is the national fallback
  std::map<std::pair<std::string, std::string>, double> cost_per_sqft;
  std::map<std::string, double> bcpi;                          // province; absent means 1
  std::map<std::string, std::vector<MaterialShare>> materials;  // occupancy; absent means all wood
};

namespace detail {

inline double cost_for(const ResidentialInputs& in, const std::string& province, const std::string& occ) {
  if (auto it = in.cost_per_sqft.find({province, occ}); it != in.cost_per_sqft.end()) return it->second;
  if (auto it = in.cost_per_sqft.find({"*", occ}); it != in.cost_per_sqft.end()) return it->second;
  throw Error(ErrorCode::MissingCost, "no replacement cost for building class", province + ":" + occ);
}

inline std::vector<MaterialShare> materials_for(const std::map<std::string, std::vector<MaterialShare>>& m,
                                                const std::string& occ, Material fallback) {
  if (auto it = m.find(occ); it != m.end()) return it->second;
  return {{fallback, 1.0}};
}

// Accumulates class exposures per CSD, keeping first-seen order.
class Accumulator {
 public:
  void add(const std::string& csd, const std::string& province, const BuildingClass& cls, double building,
           double content) {
    add(csd, province, cls, Cents::from_dollars(building), Cents::from_dollars(content));
  }

  void add(const std::string& csd, const std::string& province, const BuildingClass& cls, Cents b, Cents c) {
    auto [it, fresh] = index_.try_emplace(csd, out_.size());
    if (fresh) out_.push_back({csd, province, csd, {}});
    auto& e = out_[it->second];
    for (auto& ce : e.classes) {
      if (ce.cls == cls) {
        ce.building += b;
        ce.content += c;
        return;
      }
    }
    e.classes.push_back({cls, b, c});
  }

  std::vector<CsdExposure> take() { return std::move(out_); }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<CsdExposure> out_;
};

/// Splits `total` in proportion to `weights` so the parts sum to it
/// exactly (largest remainder, ties to the earlier part).
inline std::vector<Cents> apportion(Cents total, const std::vector<double>& weights) {
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  std::vector<Cents> out(weights.size());
  if (wsum <= 0.0 || weights.empty()) return out;
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total.value()) * weights[i] / wsum;
    const auto fl = static_cast<std::int64_t>(std::floor(exact));
    out[i] = Cents(fl);
    used += fl;
    rem.emplace_back(exact - static_cast<double>(fl), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::int64_t k = 0; k < total.value() - used && k < static_cast<std::int64_t>(rem.size()); ++k)
    out[rem[static_cast<std::size_t>(k)].second] += Cents(1);
  return out;
}

}  // namespace detail

/// building = units × sqft × cost × bcpi × U(0.9, 1.1), one draw per count
/// row when a generator is supplied; contents are half the building value.
inline std::vector<CsdExposure> build_residential_exposure(const ResidentialInputs& in, Rng* noise = nullptr) {
  detail::Accumulator acc;
  for (const auto& c : in.counts) {
    require(c.units >= 0.0, ErrorCode::InvalidArgument, "negative dwelling count", c.csd_id);
    require(is_province(c.province), ErrorCode::InvalidArgument, "unknown province", c.csd_id + ":" + c.province);
    const auto sq = in.avg_sqft.find({c.csd_id, c.occupancy});
    require(sq != in.avg_sqft.end(), ErrorCode::InvalidArgument, "missing square footage (impute first)",
            c.csd_id + ":" + c.occupancy);
    const double cost = detail::cost_for(in, c.province, c.occupancy);
    const auto bi = in.bcpi.find(c.province);
    const double bcpi = bi == in.bcpi.end() ? 1.0 : bi->second;
    const double u = noise != nullptr ? noise->uniform(0.9, 1.1) : 1.0;
    const double building = c.units * sq->second * cost * bcpi * u;
    for (const auto& ms : detail::materials_for(in.materials, c.occupancy, Material::Wood)) {
      const double b = building * ms.share;
      acc.add(c.csd_id, c.province, {c.occupancy, ms.material}, b, kResidentialContentShare * b);
    }
  }
  return acc.take();
}

// ---------------------------------------------------------------------------
// Square-footage imputation

struct SqftRecord {
  std::string csd_id;
  std::string province;
  std::string occupancy;
  double units = 0.0;  // weight for the province average
  std::optional<double> income;
  std::optional<double> sqft;
};

/// Province that lends its data to provinces without any.
inline const std::map<std::string, std::vector<std::string>>& default_donor_provinces() {
  static const std::map<std::string, std::vector<std::string>> m{
      {"ON", {"QC", "MB", "NU"}}, {"NB", {"NL", "PE"}}, {"BC", {"SK", "AB", "YT", "NT"}}};
  return m;
}

/// Fills missing sqft per occupancy. Same-province donors first: nearest
/// household income (ties to the lower csd_id), or the unit-weighted
/// province average when the gap has no income. Provinces with no data use
/// their donor province under the same rule.
inline std::vector<SqftRecord> impute_missing_sqft(
    std::vector<SqftRecord> table,
    const std::map<std::string, std::vector<std::string>>& donors = default_donor_provinces()) {
  std::map<std::string, std::string> donor_of;
  for (const auto& [from, to] : donors)
    for (const auto& p : to) donor_of[p] = from;

  // complete records by (province, occupancy), in csd_id order
  std::map<std::pair<std::string, std::string>, std::vector<const SqftRecord*>> complete;
  for (const auto& r : table)
    if (r.sqft) complete[{r.province, r.occupancy}].push_back(&r);
  for (auto& [k, v] : complete)
    std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->csd_id < b->csd_id; });

  std::vector<std::optional<double>> filled(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table[i];
    if (r.sqft) continue;
    auto it = complete.find({r.province, r.occupancy});
    if (it == complete.end()) {
      const auto d = donor_of.find(r.province);
      if (d != donor_of.end()) it = complete.find({d->second, r.occupancy});
    }
    require(it != complete.end() && !it->second.empty(), ErrorCode::ImputationImpossible,
            "no donor square footage", r.csd_id + ":" + r.province + ":" + r.occupancy);
    const auto& pool = it->second;

    const SqftRecord* best = nullptr;
    if (r.income) {
      for (const auto* c : pool) {
        if (!c->income) continue;
        if (best == nullptr || std::abs(*c->income - *r.income) < std::abs(*best->income - *r.income)) best = c;
      }
    }
    if (best != nullptr) {
      filled[i] = *best->sqft;
    } else {
      double w = 0.0;
      double s = 0.0;
      for (const auto* c : pool) {
        w += c->units;
        s += c->units * *c->sqft;
      }
      if (w > 0.0) {
        filled[i] = s / w;
      } else {
        for (const auto* c : pool) s += *c->sqft;
        filled[i] = s / static_cast<double>(pool.size());
      }
    }
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    if (filled[i]) table[i].sqft = filled[i];
  return table;
}

// ---------------------------------------------------------------------------
// Non-residential builder

struct OccupancyWeight {
  std::string occupancy;
  double weight;
};

/// Permit categories to occupancy codes, weighted by how many permit labels
/// map to each code.
inline const std::map<std::string, std::vector<OccupancyWeight>>& default_category_map() {
  static const std::map<std::string, std::vector<OccupancyWeight>> m{
      {"institutional",
       {{"EDU1", 2}, {"EDU2", 2}, {"COM8", 1}, {"COM6", 1}, {"COM7", 1}, {"RES5", 1}, {"REL1", 1}, {"GOV1", 1},
        {"GOV2", 1}}},
      {"industrial", {{"IND1", 5}, {"IND4", 1}, {"AGR1", 1}}},
      {"commercial",
       {{"COM1", 1}, {"COM2", 1}, {"COM3", 1}, {"COM4", 2}, {"COM9", 1}, {"COM8", 4}, {"RES4", 2}, {"RES5", 1},
        {"COM7", 1}}}};
  return m;
}

struct NonResidentialInputs {
  // category -> province -> permit ratio to residential
  std::map<std::string, std::map<std::string, double>> permit_ratios;
  std::map<std::string, std::vector<OccupancyWeight>> category_map = default_category_map();
  std::map<std::string, double> content_share;  // occupancy; absent means default_content_share
  double default_content_share = 0.5;
  std::map<std::string, std::vector<MaterialShare>> materials;  // occupancy; absent means other
};

/// Per CSD and category: ratio × residential building total, split over the
/// category's occupancy codes by weight.
inline std::vector<CsdExposure> build_nonresidential_exposure(const std::vector<CsdExposure>& residential,
                                                              const NonResidentialInputs& in) {
  for (const auto& [cat, byprov] : in.permit_ratios) {
    require(in.category_map.count(cat) > 0, ErrorCode::UnknownCategory, "permit category has no occupancy map", cat);
    for (const auto& [p, ratio] : byprov)
      require(ratio >= 0.0, ErrorCode::InvalidArgument, "negative permit ratio", cat + ":" + p);
  }
  detail::Accumulator acc;
  for (const auto& csd : residential) {
    Cents res_total;
    for (const auto& c : csd.classes)
      if (property_type_of(c.cls) == PropertyType::Residential) res_total += c.building;
    for (const auto& [cat, byprov] : in.permit_ratios) {
      const auto rit = byprov.find(csd.province);
      if (rit == byprov.end() || rit->second == 0.0) continue;
      const auto& codes = in.category_map.at(cat);
      const Cents cat_total(static_cast<std::int64_t>(std::llround(rit->second * static_cast<double>(res_total.value()))));
      std::vector<double> weights;
      for (const auto& ow : codes) weights.push_back(ow.weight);
      const auto parts = detail::apportion(cat_total, weights);
      for (std::size_t k = 0; k < codes.size(); ++k) {
        const auto& occ = codes[k].occupancy;
        const auto cs = in.content_share.find(occ);
        const double share = cs == in.content_share.end() ? in.default_content_share : cs->second;
        const auto mats = detail::materials_for(in.materials, occ, Material::Other);
        std::vector<double> mw;
        for (const auto& ms : mats) mw.push_back(ms.share);
        const auto mparts = detail::apportion(parts[k], mw);
        for (std::size_t m = 0; m < mats.size(); ++m) {
          const Cents b = mparts[m];
          const Cents c(static_cast<std::int64_t>(std::llround(static_cast<double>(b.value()) * share)));
          acc.add(csd.csd_id, csd.province, {occ, mats[m].material}, b, c);
        }
      }
    }
  }
  return acc.take();
}

/// Concatenates class lists of CSDs with the same id.
inline std::vector<CsdExposure> merge(const std::vector<CsdExposure>& a, const std::vector<CsdExposure>& b) {
  std::vector<CsdExposure> out = a;
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < out.size(); ++i) idx[out[i].csd_id] = i;
  for (const auto& e : b) {
    auto it = idx.find(e.csd_id);
    if (it == idx.end()) {
      idx[e.csd_id] = out.size();
      out.push_back(e);
      continue;
    }
    auto& dst = out[it->second].classes;
    for (const auto& c : e.classes) {
      auto m = std::find_if(dst.begin(), dst.end(), [&](const ClassExposure& x) { return x.cls == c.cls; });
      if (m == dst.end()) {
        dst.push_back(c);
      } else {
        m->building += c.building;
        m->content += c.content;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Table I/O

/// "1234.5" or "1234.56" -> cents, without going through binary floating point.
inline Cents parse_cad(const std::string& s) {
  require(!s.empty(), ErrorCode::ParseError, "empty amount");
  std::size_t i = 0;
  const bool neg = s[0] == '-';
  if (neg) ++i;
  std::int64_t whole = 0;
  std::size_t digits = 0;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, ++digits) whole = whole * 10 + (s[i] - '0');
  std::int64_t frac = 0;
  int fd = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && fd < 2; ++i, ++fd) frac = frac * 10 + (s[i] - '0');
    if (fd == 1) frac *= 10;
  }
  require(i == s.size() && (digits > 0 || fd > 0), ErrorCode::ParseError, "bad CAD amount (max 2 decimals)", s);
  const std::int64_t v = whole * 100 + frac;
  return Cents(neg ? -v : v);
}

inline std::string format_cad(Cents c) {
  const std::int64_t v = c.value();
  const std::int64_t a = v < 0 ? -v : v;
  std::string frac = std::to_string(a % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (v < 0 ? "-" : "") + std::to_string(a / 100) + "." + frac;
}

/// Rows of `csd_id,province,occupancy,material,building_exposure,content_exposure`.
inline std::vector<CsdExposure> read_exposure_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto t = csv::Table::parse(in, source);
  t.require_columns({"csd_id", "province", "occupancy", "material", "building_exposure", "content_exposure"});
  std::vector<CsdExposure> out;
  std::map<std::string, std::size_t> idx;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto& id = t.str(r, "csd_id");
    auto [it, fresh] = idx.try_emplace(id, out.size());
    if (fresh) out.push_back({id, t.str(r, "province"), id, {}});
    auto& e = out[it->second];
    require(e.province == t.str(r, "province"), ErrorCode::ParseError, "CSD listed under two provinces", id);
    const BuildingClass cls{t.str(r, "occupancy"), parse_material(t.str(r, "material"))};
    for (const auto& c : e.classes)
      require(!(c.cls == cls), ErrorCode::ParseError, "duplicate building class for CSD", id + ":" + cls.label());
    e.classes.push_back({cls, parse_cad(t.str(r, "building_exposure")), parse_cad(t.str(r, "content_exposure"))});
  }
  for (const auto& e : out) e.validate();
  return out;
}

inline void write_exposure_csv(std::ostream& out, const std::vector<CsdExposure>& rows) {
  out << "csd_id,province,occupancy,material,building_exposure,content_exposure\n";
  for (const auto& e : rows)
    for (const auto& c : e.classes)
      out << e.csd_id << ',' << e.province << ',' << c.cls.occupancy << ',' << to_string(c.cls.material) << ','
          << format_cad(c.building) << ',' << format_cad(c.content) << '\n';
}

/// Rows of `zone,property_type,penetration,deductible,limit` as fractions.
inline TermsTable read_terms_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto t = csv::Table::parse(in, source);
  t.require_columns({"zone", "property_type", "penetration", "deductible", "limit"});
  std::vector<InsuranceTerms> rows;
  for (std::size_t r = 0; r < t.size(); ++r)
    rows.push_back({t.str(r, "zone"), parse_property_type(t.str(r, "property_type")), t.num(r, "penetration"),
                    t.num(r, "deductible"), t.num(r, "limit")});
  return TermsTable(std::move(rows));
}

inline ZoneMap read_zone_map_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto t = csv::Table::parse(in, source);
  t.require_columns({"csd_id", "zone"});
  ZoneMap m;
  for (std::size_t r = 0; r < t.size(); ++r) m[t.str(r, "csd_id")] = t.str(r, "zone");
  return m;
}

}  // namespace quakesim::exposure
