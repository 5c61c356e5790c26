#pragma once

// Integration surface: JSON configuration, run persistence, a single-lane
// batch queue and the HTTP handlers. Handlers return {status, body} so they
// can be exercised without a socket; register_routes wires them to httplib.

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "quakesim/core.hpp"
#include "quakesim/csv.hpp"
#include "quakesim/evt.hpp"
#include "quakesim/exposure.hpp"
#include "quakesim/geojson.hpp"
#include "quakesim/hazard.hpp"
#include "quakesim/lossengine.hpp"
#include "quakesim/stpp.hpp"

namespace quakesim::service {

using json = nlohmann::json;
namespace fs = std::filesystem;
using geo::GeoPoint;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

// ---------------------------------------------------------------------------
// Files and digests

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorCode::IoError,
          "SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::NotFound, "cannot open file", p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Writes a sibling temp file and renames it over the target, so a reader
/// never sees a half-written artifact.
inline void write_text(const fs::path& p, std::string_view data) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::IoError, "cannot write file", tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorCode::IoError, "short write", tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  require(!ec, ErrorCode::IoError, "cannot move file into place", p.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Catalog CSV

/// Rows of `lon,lat,year`.
inline std::vector<stpp::Event> read_catalog_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto t = csv::Table::parse(in, source);
  t.require_columns({"lon", "lat", "year"});
  std::vector<stpp::Event> out;
  out.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    const GeoPoint x{t.num(r, "lon"), t.num(r, "lat")};
    geo::validate(x);
    out.push_back({x, static_cast<int>(t.integer(r, "year"))});
  }
  return out;
}

inline void write_catalog_csv(std::ostream& out, const std::vector<stpp::Event>& events) {
  out << "lon,lat,year\n";
  char buf[96];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", e.location.lon, e.location.lat, e.year);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Configuration

inline exposure::MdfMode parse_mdf_mode(const std::string& s) {
  if (s == "random") return exposure::MdfMode::Random;
  if (s == "midpoint") return exposure::MdfMode::Midpoint;
  throw Error(ErrorCode::InvalidArgument, "mdf_mode must be random or midpoint", s);
}

inline std::string to_string(exposure::MdfMode m) { return m == exposure::MdfMode::Random ? "random" : "midpoint"; }

inline std::uint64_t json_seed(const json& v, const std::string& field) {
  require(v.is_number_integer() && v.get<std::int64_t>() >= 0, ErrorCode::InvalidArgument,
          field + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline json loss_options_json(const loss::LossOptions& o) {
  return {{"mdf_mode", to_string(o.mdf_mode)}, {"cost_uncertainty", o.cost_uncertainty}};
}

inline loss::LossOptions parse_loss_options(const json& j, loss::LossOptions base = {}) {
  require(j.is_object(), ErrorCode::InvalidArgument, "loss options must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "mdf_mode") {
      require(v.is_string(), ErrorCode::InvalidArgument, "mdf_mode must be a string");
      base.mdf_mode = parse_mdf_mode(v.get<std::string>());
    } else if (k == "cost_uncertainty") {
      require(v.is_boolean(), ErrorCode::InvalidArgument, "cost_uncertainty must be a boolean");
      base.cost_uncertainty = v.get<bool>();
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown loss option", k);
    }
  }
  return base;
}

struct Config {
  fs::path base_dir = ".";
  std::string window = "window.geojson";
  std::string catalog = "catalog.csv";
  stpp::Period period{1901, 2020};
  /// Fixed bandwidth in degrees, or a cross-validation method over the
  /// default grid.
  std::optional<double> bandwidth;
  stpp::BandwidthMethod bandwidth_method = stpp::BandwidthMethod::Lcv;
  std::string hazard_grid = "hazard_grid.csv";
  std::string csds = "csds.geojson";
  std::string csd_id_property = "csd_id";
  std::string exposure = "exposure.csv";
  std::string dpm = "dpm.json";
  std::string terms = "terms.csv";
  std::string zones = "zones.csv";
  std::optional<double> annual_rate;
  int n_years = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  loss::LossOptions loss;
  hazard::NoiseConfig noise;
  std::string runs_dir = "runs";
  std::vector<double> epsilons{0.01, 0.004, 0.002, 1.0 / 750.0, 0.001};

  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : base_dir / q;
  }

  std::map<std::string, std::string> input_files() const {
    return {{"window", window}, {"catalog", catalog}, {"hazard_grid", hazard_grid}, {"csds", csds},
            {"exposure", exposure}, {"dpm", dpm}, {"terms", terms}, {"zones", zones}};
  }

  static Config from_json(const json& j, const fs::path& base_dir) {
    require(j.is_object(), ErrorCode::ParseError, "config must be a JSON object");
    Config c;
    c.base_dir = base_dir;
    auto str = [](const json& v, const std::string& k) {
      require(v.is_string() && !v.get<std::string>().empty(), ErrorCode::InvalidArgument,
              k + " must be a non-empty string");
      return v.get<std::string>();
    };
    for (const auto& [k, v] : j.items()) {
      if (k == "window") c.window = str(v, k);
      else if (k == "catalog") c.catalog = str(v, k);
      else if (k == "hazard_grid") c.hazard_grid = str(v, k);
      else if (k == "csds") c.csds = str(v, k);
      else if (k == "csd_id_property") c.csd_id_property = str(v, k);
      else if (k == "exposure") c.exposure = str(v, k);
      else if (k == "dpm") c.dpm = str(v, k);
      else if (k == "terms") c.terms = str(v, k);
      else if (k == "zones") c.zones = str(v, k);
      else if (k == "runs_dir") c.runs_dir = str(v, k);
      else if (k == "period") {
        c.period = {v.at("start").get<int>(), v.at("end").get<int>()};
        require(c.period.length() >= 1, ErrorCode::InvalidArgument, "period end precedes start");
      } else if (k == "bandwidth") {
        if (v.is_number()) {
          c.bandwidth = v.get<double>();
          require(*c.bandwidth > 0.0, ErrorCode::InvalidArgument, "bandwidth must be positive");
        } else {
          const auto m = str(v, k);
          require(m == "lcv" || m == "mse", ErrorCode::InvalidArgument, "bandwidth must be a number, lcv or mse", m);
          c.bandwidth_method = m == "lcv" ? stpp::BandwidthMethod::Lcv : stpp::BandwidthMethod::Mse;
        }
      } else if (k == "annual_rate") {
        if (!v.is_null()) {
          c.annual_rate = v.get<double>();
          require(*c.annual_rate > 0.0, ErrorCode::InvalidArgument, "annual_rate must be positive");
        }
      } else if (k == "n_years") {
        c.n_years = v.get<int>();
        require(c.n_years >= 1, ErrorCode::InvalidArgument, "n_years must be at least 1");
      } else if (k == "seed") {
        c.seed = json_seed(v, k);
      } else if (k == "threads") {
        c.threads = v.get<int>();
        require(c.threads >= 0, ErrorCode::InvalidArgument, "threads must be non-negative");
      } else if (k == "loss") {
        c.loss = parse_loss_options(v);
      } else if (k == "noise") {
        c.noise.wald_sd = v.value("wald_sd", c.noise.wald_sd);
        c.noise.bakun_sd_east = v.value("bakun_sd_east", c.noise.bakun_sd_east);
        c.noise.bakun_sd_west = v.value("bakun_sd_west", c.noise.bakun_sd_west);
        require(c.noise.wald_sd >= 0 && c.noise.bakun_sd_east >= 0 && c.noise.bakun_sd_west >= 0,
                ErrorCode::InvalidArgument, "noise standard deviations must be non-negative");
      } else if (k == "epsilons") {
        c.epsilons = v.get<std::vector<double>>();
        require(!c.epsilons.empty(), ErrorCode::InvalidArgument, "epsilons is empty");
        for (double e : c.epsilons) require(e > 0.0 && e < 1.0, ErrorCode::InvalidArgument, "epsilon outside (0, 1)");
      } else if (k == "note") {
        // free text
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown config key", k);
      }
    }
    return c;
  }

  static Config load(const fs::path& path) {
    json j;
    try {
      j = json::parse(read_text(path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what(), path.string());
    }
    const auto dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    try {
      return from_json(j, dir);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what(), path.string());
    }
  }

  /// Everything but base_dir, so the digest does not depend on where the
  /// data directory lives.
  json to_json() const {
    json j{{"window", window}, {"catalog", catalog}, {"period", {{"start", period.start}, {"end", period.end}}},
           {"hazard_grid", hazard_grid}, {"csds", csds}, {"csd_id_property", csd_id_property},
           {"exposure", exposure}, {"dpm", dpm}, {"terms", terms}, {"zones", zones},
           {"n_years", n_years}, {"seed", seed}, {"threads", threads}, {"loss", loss_options_json(loss)},
           {"noise", {{"wald_sd", noise.wald_sd}, {"bakun_sd_east", noise.bakun_sd_east},
                      {"bakun_sd_west", noise.bakun_sd_west}}},
           {"runs_dir", runs_dir}, {"epsilons", epsilons}};
    if (bandwidth) j["bandwidth"] = *bandwidth;
    else j["bandwidth"] = bandwidth_method == stpp::BandwidthMethod::Lcv ? "lcv" : "mse";
    j["annual_rate"] = annual_rate ? json(*annual_rate) : json(nullptr);
    return j;
  }
};

// ---------------------------------------------------------------------------
// Input loading

inline stpp::PointPattern load_pattern(const Config& c) {
  stpp::PointPattern p;
  p.window = geojson::window_from_file(c.resolve(c.window).string());
  p.period = c.period;
  std::ifstream in(c.resolve(c.catalog));
  require(static_cast<bool>(in), ErrorCode::NotFound, "cannot open file", c.resolve(c.catalog).string());
  for (const auto& e : read_catalog_csv(in, c.catalog)) {
    require(p.window.contains(e.location), ErrorCode::OutOfWindow, "catalog event outside the window",
            std::to_string(e.location.lon) + "," + std::to_string(e.location.lat));
    require(p.period.contains(e.year), ErrorCode::InvalidArgument, "catalog event outside the period",
            std::to_string(e.year));
    p.events.push_back(e);
  }
  return p;
}

struct FittedModel {
  stpp::SeparableIntensityModel model;
  double h = 0.0;
  std::optional<stpp::BandwidthSelection> selection;
};

inline FittedModel fit_model(const Config& c, const stpp::PointPattern& p) {
  FittedModel f;
  if (c.bandwidth) {
    f.h = *c.bandwidth;
  } else {
    f.selection = stpp::select_bandwidth(p, c.bandwidth_method, stpp::default_bandwidth_grid(p));
    f.h = f.selection->h;
  }
  f.model = stpp::fit_kernel(p, f.h);
  return f;
}

inline std::vector<loss::CsdGeometry> load_csds(const Config& c) {
  std::vector<loss::CsdGeometry> out;
  for (auto& np : geojson::features_from_json(geojson::read_file(c.resolve(c.csds).string()), c.csd_id_property))
    out.emplace_back(std::move(np.id), std::move(np.polygon));
  return out;
}

template <class F>
auto with_file(const fs::path& p, F&& f) {
  std::ifstream in(p);
  require(static_cast<bool>(in), ErrorCode::NotFound, "cannot open file", p.string());
  return f(in, p.filename().string());
}

/// Reads every table named in the config and fits the intensity and hazard
/// models.
inline loss::Inputs load_inputs(const Config& c) {
  loss::Inputs in;
  in.model = fit_model(c, load_pattern(c)).model;
  in.hazard = loss::HazardModel::fit(
      with_file(c.resolve(c.hazard_grid), [](std::istream& s, const std::string& n) { return hazard::read_grid(s, n); }));
  in.csds = load_csds(c);
  in.exposures = with_file(c.resolve(c.exposure),
                           [](std::istream& s, const std::string& n) { return exposure::read_exposure_csv(s, n); });
  in.index_exposures();
  in.dpms = exposure::DpmLibrary::from_json(geojson::read_file(c.resolve(c.dpm).string()));
  in.terms = with_file(c.resolve(c.terms),
                       [](std::istream& s, const std::string& n) { return exposure::read_terms_csv(s, n); });
  in.zones = with_file(c.resolve(c.zones),
                       [](std::istream& s, const std::string& n) { return exposure::read_zone_map_csv(s, n); });
  in.validate();
  return in;
}

inline json input_digests(const Config& c) {
  json j = json::object();
  for (const auto& [k, p] : c.input_files()) j[k] = sha256_hex(read_text(c.resolve(p)));
  return j;
}

inline loss::BatchConfig batch_config(const Config& c) {
  loss::BatchConfig b;
  b.n_years = c.n_years;
  b.seed = c.seed;
  b.annual_rate = c.annual_rate;
  b.event.noise = c.noise;
  b.loss = c.loss;
  b.threads = c.threads;
  return b;
}

// ---------------------------------------------------------------------------
// Run store

inline bool valid_run_id(const std::string& id) {
  static const std::regex re("[A-Za-z0-9][A-Za-z0-9_.-]{0,63}");
  return std::regex_match(id, re) && id.find("..") == std::string::npos;
}

inline const std::vector<std::string>& run_artifacts() {
  static const std::vector<std::string> names{"annual.csv", "annual_max.csv", "events.csv"};
  return names;
}

struct StoredRun {
  json manifest;
  loss::SimulationRun run;  // events are not re-parsed; events.csv is digest-checked only
};

/// Writes the run tables into `d`, then manifest.json with their SHA-256
/// digests. `extra` seeds the manifest (request, config, input digests).
inline json write_run(const fs::path& d, const loss::SimulationRun& run, json extra = json::object()) {
  fs::create_directories(d);
  std::map<std::string, std::string> body;
  {
    std::ostringstream a, m, e;
    loss::write_annual_csv(a, run);
    loss::write_annual_max_csv(m, run);
    loss::write_events_csv(e, run);
    body["annual.csv"] = a.str();
    body["annual_max.csv"] = m.str();
    body["events.csv"] = e.str();
  }
  json files = json::object();
  for (const auto& [name, text] : body) {
    write_text(d / name, text);
    files[name] = sha256_hex(text);
  }
  json manifest = std::move(extra);
  manifest["run_id"] = run.run_id;
  manifest["seed"] = run.seed;
  manifest["n_years"] = run.n_years;
  manifest["n_events"] = run.events.size();
  manifest["diagnostics"] = run.diagnostics;
  manifest["files"] = files;
  manifest["versions"] = {{"quakesim", kVersion}, {"schema", kSchemaVersion}};
  write_text(d / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

inline json read_manifest(const fs::path& d) {
  json m;
  try {
    m = json::parse(read_text(d / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what(), (d / "manifest.json").string());
  }
  for (const auto& name : run_artifacts()) {
    require(m.contains("files") && m["files"].contains(name), ErrorCode::ParseError, "manifest lacks a digest",
            (d / name).string());
    require(sha256_hex(read_text(d / name)) == m["files"][name].get<std::string>(), ErrorCode::IoError,
            "artifact digest mismatch", (d / name).string());
  }
  return m;
}

/// Loads a run directory written by write_run, verifying digests first.
inline StoredRun read_run(const fs::path& d) {
  StoredRun s;
  s.manifest = read_manifest(d);
  std::istringstream a(read_text(d / "annual.csv")), m(read_text(d / "annual_max.csv"));
  s.run.run_id = s.manifest.value("run_id", d.filename().string());
  s.run.seed = s.manifest.at("seed").get<std::uint64_t>();
  s.run.n_years = s.manifest.at("n_years").get<int>();
  s.run.annual = loss::read_annual(a, m);
  s.run.diagnostics = s.manifest.at("diagnostics").get<std::map<std::string, int>>();
  require(static_cast<int>(s.run.annual.size()) == s.run.n_years, ErrorCode::ParseError,
          "annual table length disagrees with manifest", d.string());
  return s;
}

/// One directory per run. Artifacts land first and manifest.json last, so a
/// directory without a manifest is an incomplete run.
class RunStore {
 public:
  explicit RunStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }

  fs::path dir(const std::string& id) const {
    require(valid_run_id(id), ErrorCode::InvalidArgument, "run id must match [A-Za-z0-9][A-Za-z0-9_.-]{0,63}", id);
    return root_ / id;
  }

  bool exists(const std::string& id) const { return fs::exists(dir(id)); }
  bool complete(const std::string& id) const { return fs::exists(dir(id) / "manifest.json"); }

  /// Claims the run id; a second claim of the same id is a conflict.
  void reserve(const std::string& id) const {
    const auto d = dir(id);
    std::error_code ec;
    require(fs::create_directory(d, ec), ErrorCode::Conflict, "run id already exists", id);
  }

  json save(const loss::SimulationRun& run, json extra = json::object()) const {
    return write_run(dir(run.run_id), run, std::move(extra));
  }

  /// Reads the manifest and checks every artifact against its digest.
  json manifest(const std::string& id) const {
    const auto d = dir(id);
    require(fs::exists(d / "manifest.json"), ErrorCode::NotFound, "no completed run with this id", id);
    return read_manifest(d);
  }

  StoredRun load(const std::string& id) const {
    manifest(id);
    return read_run(dir(id));
  }

  std::vector<std::string> list() const {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(root_))
      if (e.is_directory() && fs::exists(e.path() / "manifest.json")) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  fs::path root_;
};

// ---------------------------------------------------------------------------
// Batch queue

enum class JobStatus { Queued, Running, Done, Failed };

inline std::string to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Queued: return "queued";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
  }
  return "failed";
}

struct JobInfo {
  std::string run_id;
  JobStatus status = JobStatus::Queued;
  double progress = 0.0;
  json error;  // {code, message, details} when failed
};

/// Runs one batch at a time on its own thread, leaving request threads free
/// for scenarios. Jobs still queued at shutdown are dropped.
class BatchManager {
 public:
  BatchManager(const loss::Inputs& inputs, const RunStore& store, json context = json::object())
      : inputs_(inputs), store_(store), context_(std::move(context)), worker_([this] { loop(); }) {}

  ~BatchManager() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    worker_.join();
  }

  BatchManager(const BatchManager&) = delete;
  BatchManager& operator=(const BatchManager&) = delete;

  void submit(const std::string& run_id, const loss::BatchConfig& cfg, json request) {
    std::lock_guard lk(mu_);
    require(jobs_.count(run_id) == 0, ErrorCode::Conflict, "run id already submitted", run_id);
    store_.reserve(run_id);
    jobs_[run_id] = {run_id, JobStatus::Queued, 0.0, nullptr};
    queue_.push_back({run_id, cfg, std::move(request)});
    cv_.notify_all();
  }

  /// In-memory state first; otherwise whatever the store holds on disk.
  std::optional<JobInfo> status(const std::string& run_id) const {
    {
      std::lock_guard lk(mu_);
      if (const auto it = jobs_.find(run_id); it != jobs_.end()) return it->second;
    }
    if (!valid_run_id(run_id) || !store_.exists(run_id)) return std::nullopt;
    if (store_.complete(run_id)) return JobInfo{run_id, JobStatus::Done, 1.0, nullptr};
    return JobInfo{run_id, JobStatus::Failed, 0.0,
                   {{"code", "IoError"}, {"message", "incomplete run without a manifest"}, {"details", run_id}}};
  }

  std::size_t pending() const {
    std::lock_guard lk(mu_);
    return queue_.size() + (busy_ ? 1 : 0);
  }

  /// Blocks until the job leaves the queued/running states.
  JobInfo wait(const std::string& run_id) const {
    std::unique_lock lk(mu_);
    const auto it = jobs_.find(run_id);
    require(it != jobs_.end(), ErrorCode::NotFound, "unknown run id", run_id);
    done_cv_.wait(lk, [&] { return it->second.status == JobStatus::Done || it->second.status == JobStatus::Failed; });
    return it->second;
  }

 private:
  struct Pending {
    std::string run_id;
    loss::BatchConfig cfg;
    json request;
  };

  void set(const std::string& id, JobStatus s, double progress, json error = nullptr) {
    {
      std::lock_guard lk(mu_);
      auto& j = jobs_[id];
      j.status = s;
      j.progress = progress;
      j.error = std::move(error);
    }
    done_cv_.notify_all();
  }

  void loop() {
    for (;;) {
      Pending p;
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return stop_ || !queue_.empty(); });
        if (stop_) return;
        p = std::move(queue_.front());
        queue_.pop_front();
        busy_ = true;
      }
      set(p.run_id, JobStatus::Running, 0.0);
      try {
        auto run = loss::run_batch(inputs_, p.cfg, [&](double f) {
          std::lock_guard lk(mu_);
          jobs_[p.run_id].progress = std::min(f, 0.999);
        });
        run.run_id = p.run_id;
        json extra = context_;
        extra["request"] = p.request;
        store_.save(run, std::move(extra));
        set(p.run_id, JobStatus::Done, 1.0);
      } catch (const Error& e) {
        set(p.run_id, JobStatus::Failed, 0.0,
            {{"code", std::string(quakesim::to_string(e.code()))}, {"message", e.message()}, {"details", e.details()}});
      } catch (const std::exception& e) {
        set(p.run_id, JobStatus::Failed, 0.0, {{"code", "Internal"}, {"message", e.what()}, {"details", ""}});
      }
      std::lock_guard lk(mu_);
      busy_ = false;
    }
  }

  const loss::Inputs& inputs_;
  const RunStore& store_;
  json context_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  mutable std::condition_variable done_cv_;
  std::deque<Pending> queue_;
  std::map<std::string, JobInfo> jobs_;
  bool stop_ = false;
  bool busy_ = false;
  std::thread worker_;  // last, so everything above exists before it starts
};

// ---------------------------------------------------------------------------
// Errors

/// 404 for missing things, 409 when valid input meets a domain limit, 422
/// for input that fails validation.
inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotFound:
    case ErrorCode::MissingExposure:
      return 404;
    case ErrorCode::Conflict:
    case ErrorCode::SignificanceUnreachable:
    case ErrorCode::RadiusOverflow:
    case ErrorCode::TooFewExceedances:
    case ErrorCode::BelowThresholdReturn:
    case ErrorCode::BelowThresholdPml:
    case ErrorCode::InsufficientYears:
    case ErrorCode::FitDiverged:
      return 409;
    case ErrorCode::IoError:
      return 500;
    default:
      return 422;
  }
}

struct Response {
  int status = 200;
  json body;
};

inline json error_body(const std::string& code, const std::string& message, const std::string& details) {
  return {{"code", code}, {"message", message}, {"details", details}};
}

inline Response error_response(const Error& e) {
  return {http_status(e.code()), error_body(std::string(to_string(e.code())), e.message(), e.details())};
}

template <class F>
Response guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return {422, error_body("ParseError", "malformed request", e.what())};
  } catch (const std::exception& e) {
    return {500, error_body("Internal", "unexpected failure", e.what())};
  }
}

// ---------------------------------------------------------------------------
// Scenario

inline std::string cents(Cents c) { return c.to_string(); }

inline GeoPoint parse_point(const json& j) {
  GeoPoint p;
  if (j.is_array()) {
    require(j.size() == 2, ErrorCode::InvalidArgument, "epicenter array must be [lon, lat]");
    p = {j[0].get<double>(), j[1].get<double>()};
  } else {
    require(j.is_object(), ErrorCode::InvalidArgument, "epicenter must be {lon, lat} or [lon, lat]");
    p = {j.at("lon").get<double>(), j.at("lat").get<double>()};
  }
  geo::validate(p);
  return p;
}

/// Overrides replace the row with the same (zone, property_type) or add one.
inline exposure::TermsTable apply_overrides(const exposure::TermsTable& base, const json& overrides) {
  require(overrides.is_array(), ErrorCode::InvalidArgument, "insurance_overrides must be an array");
  auto rows = base.rows();
  for (const auto& o : overrides) {
    exposure::InsuranceTerms t;
    t.zone = o.at("zone").get<std::string>();
    t.property_type = exposure::parse_property_type(o.at("property_type").get<std::string>());
    const auto* cur = base.find(t.zone, t.property_type);
    t.penetration = o.value("penetration", cur ? cur->penetration : -1.0);
    t.deductible = o.value("deductible", cur ? cur->deductible : 0.0);
    t.limit = o.value("limit", cur ? cur->limit : 1.0);
    require(t.penetration >= 0.0, ErrorCode::InvalidTerms, "a new zone needs a penetration", t.zone);
    t.validate();
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const exposure::InsuranceTerms& r) {
      return r.zone == t.zone && r.property_type == t.property_type;
    });
    if (it != rows.end()) *it = t;
    else rows.push_back(t);
  }
  return exposure::TermsTable(std::move(rows));
}

inline constexpr int kRingVertices = 128;

inline json ring_features(const GeoPoint& epi, const std::vector<loss::Band>& rings) {
  std::vector<json> features;
  for (const auto& b : rings) {
    std::vector<geo::Ring> holes;
    if (b.inner_km > 0.0) {
      auto h = geo::circle_polygon(epi, b.inner_km, kRingVertices).exterior;
      std::reverse(h.begin(), h.end());  // holes run clockwise
      holes.push_back(std::move(h));
    }
    geo::Polygon poly(geo::circle_polygon(epi, b.outer_km, kRingVertices).exterior, std::move(holes));
    features.push_back(geojson::feature(poly, {{"mmi", b.mmi_level}, {"outer_km", b.outer_km}, {"inner_km", b.inner_km}}));
  }
  return geojson::feature_collection(features);
}

struct ScenarioContext {
  const loss::Inputs& inputs;
  const geo::SpatialWindow& window;
  hazard::NoiseConfig noise;  // configured noise levels; request flags switch them off
  loss::LossOptions loss;
};

inline json run_scenario(const ScenarioContext& ctx, const json& req) {
  require(req.is_object(), ErrorCode::InvalidArgument, "request body must be an object");
  static const std::vector<std::string> known{"epicenter", "magnitude", "seed", "insurance_overrides", "noise"};
  for (const auto& [k, v] : req.items())
    require(std::find(known.begin(), known.end(), k) != known.end(), ErrorCode::InvalidArgument,
            "unknown request field", k);
  require(req.contains("epicenter"), ErrorCode::InvalidArgument, "epicenter is required");
  const GeoPoint epi = parse_point(req["epicenter"]);
  require(ctx.window.contains(epi), ErrorCode::OutOfWindow, "epicenter outside the configured window",
          std::to_string(epi.lon) + "," + std::to_string(epi.lat));

  loss::EventOptions eo;
  eo.noise = ctx.noise;
  if (req.contains("magnitude")) {
    const auto& m = req["magnitude"];
    if (m.is_number()) {
      require(m.get<double>() > 6.0 && m.get<double>() < 10.0, ErrorCode::InvalidArgument,
              "magnitude must lie in (6, 10)");
      eo.magnitude = m.get<double>();
    } else {
      require(m.is_string() && m.get<std::string>() == "random", ErrorCode::InvalidArgument,
              "magnitude must be a number above 6 or \"random\"");
    }
  }
  const std::uint64_t seed = req.contains("seed") ? json_seed(req["seed"], "seed") : 1;
  loss::LossOptions lo = ctx.loss;
  if (req.contains("noise")) {
    const auto& n = req["noise"];
    require(n.is_object(), ErrorCode::InvalidArgument, "noise must be an object of flags");
    for (const auto& [k, v] : n.items()) {
      require(v.is_boolean() || k == "mdf", ErrorCode::InvalidArgument, "noise flags are booleans", k);
      if (k == "wald") {
        if (!v.get<bool>()) eo.noise.wald_sd = 0.0;
      } else if (k == "bakun") {
        if (!v.get<bool>()) eo.noise.bakun_sd_east = eo.noise.bakun_sd_west = 0.0;
      } else if (k == "cost_uncertainty") {
        lo.cost_uncertainty = v.get<bool>();
      } else if (k == "mdf") {
        require(v.is_string(), ErrorCode::InvalidArgument, "noise.mdf must be random or midpoint");
        lo.mdf_mode = parse_mdf_mode(v.get<std::string>());
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown noise flag", k);
      }
    }
  }
  const auto terms = req.contains("insurance_overrides")
                         ? apply_overrides(ctx.inputs.terms, req["insurance_overrides"])
                         : ctx.inputs.terms;

  constexpr std::int64_t kEventId = 1;
  Rng rng = Rng::keyed(seed, 0, static_cast<std::uint64_t>(kEventId), StreamPurpose::Pga);
  const auto ev = loss::simulate_event(epi, 0, kEventId, ctx.inputs.hazard, ctx.inputs.csds, rng, eo);
  auto rows = loss::compute_event_losses(ev, ctx.inputs.exposures, ctx.inputs.exposure_index, ctx.inputs.dpms, terms,
                                         ctx.inputs.zones, {seed, 0, static_cast<std::uint64_t>(kEventId)}, lo);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.csd_id < b.csd_id; });

  json ring_list = json::array();
  for (const auto& b : ev.rings) ring_list.push_back({{"mmi", b.mmi_level}, {"outer_km", b.outer_km}, {"inner_km", b.inner_km}});
  json event{{"epicenter", {{"lon", epi.lon}, {"lat", epi.lat}}},
             {"east", ev.east},
             {"magnitude", ev.shake.magnitude},
             {"magnitude_source", eo.magnitude ? "fixed" : "simulated"},
             {"mmi_epicenter", ev.shake.mmi_epicenter},
             {"pga_cm_s2", ev.shake.pga_cm_s2},
             {"site_index", ev.site_index},
             {"distance_to_site_km", ev.shake.distance_to_site_km},
             {"seed", seed},
             {"rings", ring_list}};

  json table = json::array();
  std::map<std::string, std::array<Cents, 3>> by_prov;  // loss, claim, exposure
  std::map<std::string, int> n_by_prov;
  Cents tl, tc, te;
  for (const auto& r : rows) {
    std::array<Cents, 4> by_type{};
    for (const auto& c : r.classes)
      for (std::size_t t = 0; t < 4; ++t) by_type[t] += c.by_type[t];
    json types = json::object();
    for (std::size_t t = 0; t < 4; ++t) types[std::string(exposure::to_string(exposure::kDamageTypes[t]))] = cents(by_type[t]);
    const auto zit = ctx.inputs.zones.find(r.csd_id);
    table.push_back({{"csd_id", r.csd_id},
                     {"province", r.province},
                     {"zone", zit != ctx.inputs.zones.end() ? json(zit->second) : json(nullptr)},
                     {"mmi", r.max_mmi},
                     {"area_fraction", r.area_fraction},
                     {"exposure_cents", cents(r.exposure)},
                     {"loss_cents", cents(r.total_loss)},
                     {"claim_cents", cents(r.claim)},
                     {"loss_by_type_cents", types}});
    auto& p = by_prov[r.province];
    p[0] += r.total_loss;
    p[1] += r.claim;
    p[2] += r.exposure;
    ++n_by_prov[r.province];
    tl += r.total_loss;
    tc += r.claim;
    te += r.exposure;
  }
  json provs = json::object();
  for (const auto& [p, v] : by_prov)
    provs[p] = {{"loss_cents", cents(v[0])}, {"claim_cents", cents(v[1])}, {"exposure_cents", cents(v[2])},
                {"n_csds", n_by_prov[p]}};

  return {{"schema_version", kSchemaVersion},
          {"request_digest", sha256_hex(req.dump())},
          {"event", event},
          {"rings", ring_features(epi, ev.rings)},
          {"csds", table},
          {"totals",
           {{"loss_cents", cents(tl)}, {"claim_cents", cents(tc)}, {"exposure_cents", cents(te)}, {"by_province", provs}}}};
}

// ---------------------------------------------------------------------------
// MCT report

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == s.size() && pos > 0, ErrorCode::InvalidArgument, what + " is not a number", s);
  return v;
}

inline json pml_set_json(const evt::PmlSet& s) {
  auto money = [](double v) { return cents(Cents::from_dollars(v)); };
  json prov = json::object(), reg = json::object();
  for (std::size_t p = 0; p < loss::kProvinceCount; ++p) prov[std::string(exposure::kProvinces[p])] = money(s.province[p]);
  for (std::size_t g = 0; g < loss::kRegionCount; ++g) reg[std::string(loss::kRegions[g])] = money(s.region[g]);
  return {{"provinces", prov}, {"regions", reg}, {"osfi", money(s.osfi)},
          {"pearson", s.pearson ? json(money(*s.pearson)) : json(nullptr)},
          {"kendall", s.kendall ? json(money(*s.kendall)) : json(nullptr)}};
}

inline json pot_fit_json(const std::optional<evt::PotFit>& f) {
  if (!f) return nullptr;
  return {{"threshold_cents", cents(Cents::from_dollars(f->u))}, {"sigma", f->sigma}, {"xi", f->xi},
          {"lambda", f->lambda}, {"se_sigma", f->se_sigma}, {"se_xi", f->se_xi}, {"se_lambda", f->se_lambda},
          {"n_exceed", f->n_exceed}, {"threshold_quantile", f->threshold_quantile}};
}

inline json correlation_json(const std::optional<evt::CorrelationMatrix>& c) {
  if (!c) return nullptr;
  return {{"labels", c->labels}, {"entries", c->entries}, {"diagnostics", c->diagnostics}};
}

inline json mct_json(const std::string& run_id, int n_years, const evt::MctAnalysis& a) {
  json reports = json::array();
  for (const auto& r : a.reports)
    reports.push_back({{"epsilon", r.epsilon}, {"return_period", 1.0 / r.epsilon},
                       {"simulated", pml_set_json(r.simulated)}, {"estimated", pml_set_json(r.estimated)},
                       {"warnings", r.warnings}});
  json fits = json::object();
  const auto labels = evt::province_labels();
  for (std::size_t p = 0; p < loss::kProvinceCount; ++p) fits[labels[p]] = pot_fit_json(a.province_fits[p]);
  for (std::size_t g = 0; g < loss::kRegionCount; ++g) fits[std::string(loss::kRegions[g])] = pot_fit_json(a.region_fits[g]);
  return {{"schema_version", kSchemaVersion},
          {"run_id", run_id},
          {"amount", a.claims ? "claims" : "losses"},
          {"n_years", n_years},
          {"reports", reports},
          {"fits", fits},
          {"correlation", {{"pearson", correlation_json(a.pearson)}, {"kendall", correlation_json(a.kendall)}}},
          {"warnings", a.warnings}};
}

// ---------------------------------------------------------------------------
// Service

using Query = std::multimap<std::string, std::string>;

class Service {
 public:
  Service(Config cfg, loss::Inputs inputs, geo::SpatialWindow window, json input_digests = json::object())
      : cfg_(std::move(cfg)),
        inputs_(std::move(inputs)),
        window_(std::move(window)),
        store_(cfg_.resolve(cfg_.runs_dir)),
        batches_(inputs_, store_,
                 {{"config", cfg_.to_json()}, {"config_digest", sha256_hex(cfg_.to_json().dump())},
                  {"inputs", input_digests}}) {
    inputs_.validate();
  }

  static std::unique_ptr<Service> from_config(const Config& c) {
    return std::make_unique<Service>(c, load_inputs(c), geojson::window_from_file(c.resolve(c.window).string()),
                                     input_digests(c));
  }

  const Config& config() const { return cfg_; }
  const loss::Inputs& inputs() const { return inputs_; }
  const RunStore& store() const { return store_; }
  BatchManager& batches() { return batches_; }

  Response scenario(const json& req) const {
    return guarded([&] { return Response{200, run_scenario({inputs_, window_, cfg_.noise, cfg_.loss}, req)}; });
  }

  /// Body: {n_years?, seed?, run_id?, annual_rate?, threads?, loss?}. The
  /// default run id is derived from the resolved request, so resubmitting
  /// the same request is a conflict that names the existing run.
  Response submit_batch(const json& req) {
    return guarded([&] {
      require(req.is_object(), ErrorCode::InvalidArgument, "request body must be an object");
      loss::BatchConfig b = batch_config(cfg_);
      std::optional<std::string> id;
      for (const auto& [k, v] : req.items()) {
        if (k == "n_years") {
          require(v.is_number_integer() && v.get<int>() >= 1 && v.get<int>() <= 1'000'000, ErrorCode::InvalidArgument,
                  "n_years must be an integer in [1, 1000000]");
          b.n_years = v.get<int>();
        } else if (k == "seed") {
          b.seed = json_seed(v, k);
        } else if (k == "run_id") {
          require(v.is_string(), ErrorCode::InvalidArgument, "run_id must be a string");
          id = v.get<std::string>();
          require(valid_run_id(*id), ErrorCode::InvalidArgument, "run id must match [A-Za-z0-9][A-Za-z0-9_.-]{0,63}", *id);
        } else if (k == "annual_rate") {
          require(v.is_number() && v.get<double>() > 0.0, ErrorCode::InvalidArgument, "annual_rate must be positive");
          b.annual_rate = v.get<double>();
        } else if (k == "threads") {
          require(v.is_number_integer() && v.get<int>() >= 0, ErrorCode::InvalidArgument, "threads must be >= 0");
          b.threads = v.get<int>();
        } else if (k == "loss") {
          b.loss = parse_loss_options(v, b.loss);
        } else {
          throw Error(ErrorCode::InvalidArgument, "unknown request field", k);
        }
      }
      json resolved{{"n_years", b.n_years}, {"seed", b.seed}, {"loss", loss_options_json(b.loss)},
                    {"annual_rate", b.annual_rate ? json(*b.annual_rate) : json(nullptr)}};
      if (!id) id = "run-" + sha256_hex(resolved.dump()).substr(0, 16);
      resolved["threads"] = b.threads;
      batches_.submit(*id, b, resolved);
      return Response{202, {{"run_id", *id}, {"status", "queued"}}};
    });
  }

  Response batch_status(const std::string& id) const {
    return guarded([&] {
      const auto info = batches_.status(id);
      require(info.has_value(), ErrorCode::NotFound, "unknown run id", id);
      json body{{"run_id", id}, {"status", to_string(info->status)}, {"progress", info->progress}};
      if (info->status == JobStatus::Failed) body["error"] = info->error;
      if (info->status == JobStatus::Done) body["result"] = result_summary(id);
      return Response{200, body};
    });
  }

  /// Query: epsilon=0.002,0.01 (default from config), method=pearson,kendall
  /// (default both), amount=claims|losses (default claims).
  Response batch_mct(const std::string& id, const Query& q) const {
    return guarded([&] {
      const auto info = batches_.status(id);
      require(info.has_value(), ErrorCode::NotFound, "unknown run id", id);
      require(info->status == JobStatus::Done, ErrorCode::Conflict, "run is not done", to_string(info->status));
      auto param = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = q.find(k);
        return it == q.end() ? std::nullopt : std::optional<std::string>(it->second);
      };
      for (const auto& [k, v] : q)
        require(k == "epsilon" || k == "method" || k == "amount", ErrorCode::InvalidArgument, "unknown query parameter", k);
      std::vector<double> eps = cfg_.epsilons;
      if (const auto e = param("epsilon")) {
        eps.clear();
        for (const auto& s : split_list(*e)) {
          const double v = parse_number(s, "epsilon");
          require(v > 0.0 && v < 1.0, ErrorCode::InvalidArgument, "epsilon outside (0, 1)", s);
          eps.push_back(v);
        }
        require(!eps.empty(), ErrorCode::InvalidArgument, "epsilon list is empty");
      }
      std::vector<evt::CorrelationMethod> methods{evt::CorrelationMethod::Pearson, evt::CorrelationMethod::Kendall};
      if (const auto m = param("method")) {
        methods.clear();
        for (const auto& s : split_list(*m)) methods.push_back(evt::parse_correlation_method(s));
      }
      bool claims = true;
      if (const auto a = param("amount")) {
        require(*a == "claims" || *a == "losses", ErrorCode::InvalidArgument, "amount must be claims or losses", *a);
        claims = *a == "claims";
      }
      const auto stored = store_.load(id);
      const auto maxima = evt::AnnualMaxima::from_years(stored.run.annual, claims);
      return Response{200, mct_json(id, stored.run.n_years, evt::mct_analysis(maxima, eps, methods, claims))};
    });
  }

  Response exposure(const std::string& csd_id) const {
    return guarded([&] {
      const auto it = inputs_.exposure_index.find(csd_id);
      require(it != inputs_.exposure_index.end(), ErrorCode::NotFound, "unknown CSD", csd_id);
      const auto& e = inputs_.exposures[it->second];
      json classes = json::array();
      for (const auto& c : e.classes) {
        const auto type = exposure::property_type_of(c.cls);
        const auto& t = exposure::lookup_insurance_terms(e, type, inputs_.terms, inputs_.zones);
        classes.push_back({{"occupancy", c.cls.occupancy},
                           {"material", std::string(exposure::to_string(c.cls.material))},
                           {"building_cents", cents(c.building)},
                           {"content_cents", cents(c.content)},
                           {"terms", {{"zone", t.zone}, {"penetration", t.penetration}, {"deductible", t.deductible},
                                      {"limit", t.limit}}}});
      }
      json geometry = nullptr;
      for (const auto& g : inputs_.csds)
        if (g.csd_id == csd_id) geometry = geojson::polygon_geometry(g.polygon);
      const auto zit = inputs_.zones.find(csd_id);
      return Response{200,
                      {{"csd_id", e.csd_id},
                       {"province", e.province},
                       {"zone", zit != inputs_.zones.end() ? json(zit->second) : json(nullptr)},
                       {"total_cents", cents(e.total())},
                       {"classes", classes},
                       {"geometry", geometry}}};
    });
  }

  Response health() const {
    return guarded([&] {
      return Response{200,
                      {{"status", "ok"},
                       {"version", kVersion},
                       {"schema_version", kSchemaVersion},
                       {"n_csds", inputs_.csds.size()},
                       {"n_exposures", inputs_.exposures.size()},
                       {"n_hazard_sites", inputs_.hazard.grid.size()},
                       {"annual_rate", inputs_.model->annual_rate()},
                       {"pending_batches", batches_.pending()}}};
    });
  }

 private:
  json result_summary(const std::string& id) const {
    const auto m = store_.manifest(id);
    const auto s = store_.load(id);
    Cents loss, claim;
    int damaging = 0;
    for (const auto& y : s.run.annual) {
      for (std::size_t p = 0; p < loss::kProvinceCount; ++p) {
        loss += y.loss[p];
        claim += y.claim[p];
      }
      if (y.n_damaging > 0) ++damaging;
    }
    return {{"n_years", m.at("n_years")},
            {"seed", m.at("seed")},
            {"n_events", m.at("n_events")},
            {"damaging_years", damaging},
            {"diagnostics", m.at("diagnostics")},
            {"files", m.at("files")},
            {"totals", {{"loss_cents", cents(loss)}, {"claim_cents", cents(claim)}}}};
  }

  Config cfg_;
  loss::Inputs inputs_;
  geo::SpatialWindow window_;
  RunStore store_;
  mutable BatchManager batches_;
};

// ---------------------------------------------------------------------------
// HTTP

inline void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

inline json parse_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? json::object() : json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "request body is not JSON", e.what());
  }
}

/// The UI reads its settings from /config.json; `ui_config` is served as is.
inline void register_routes(httplib::Server& svr, Service& s, json ui_config = {{"api_base", "/api/v1"}}) {
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  svr.Post("/api/v1/scenario", [&s](const httplib::Request& req, httplib::Response& res) {
    send(res, guarded([&] { return s.scenario(parse_body(req)); }));
  });
  svr.Post("/api/v1/batch", [&s](const httplib::Request& req, httplib::Response& res) {
    send(res, guarded([&] { return s.submit_batch(parse_body(req)); }));
  });
  svr.Get(R"(/api/v1/batch/([^/]+)/mct)", [&s](const httplib::Request& req, httplib::Response& res) {
    Query q(req.params.begin(), req.params.end());
    send(res, s.batch_mct(req.matches[1], q));
  });
  svr.Get(R"(/api/v1/batch/([^/]+))", [&s](const httplib::Request& req, httplib::Response& res) {
    send(res, s.batch_status(req.matches[1]));
  });
  svr.Get(R"(/api/v1/exposure/([^/]+))", [&s](const httplib::Request& req, httplib::Response& res) {
    send(res, s.exposure(req.matches[1]));
  });
  svr.Get("/api/v1/health", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.health()); });
  svr.Get("/config.json", [ui_config](const httplib::Request&, httplib::Response& res) {
    res.set_content(ui_config.dump(), "application/json");
  });
  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) send(res, {404, error_body("NotFound", "no such route", "")});
  });
}

}  // namespace quakesim::service
