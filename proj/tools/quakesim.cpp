// quakesim command line: fit | residuals | simulate | scenario | evt | mct | serve

#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "quakesim/residuals.hpp"
#include "quakesim/service.hpp"

using namespace quakesim;
using service::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config = std::string(QUAKESIM_DATA_DIR) + "/config.json";
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--config", c.config, "JSON config")->capture_default_str();
  cmd->add_option("--seed", c.seed, "RNG seed (overrides the config)");
  if (with_out) cmd->add_option("--out", c.out, "output directory")->capture_default_str();
}

service::Config load_config(const Common& c) {
  auto cfg = service::Config::load(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::create_directories(c.out);
  return c.out;
}

void put(const fs::path& p, const std::string& text) {
  service::write_text(p, text);
  std::cout << "wrote " << p.string() << '\n';
}

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_fit(const Common& c) {
  const auto cfg = load_config(c);
  const auto dir = out_dir(c);
  const auto pattern = service::load_pattern(cfg);
  const auto f = service::fit_model(cfg, pattern);
  json model{{"bandwidth_deg", f.h},
             {"bandwidth_source", cfg.bandwidth ? "fixed" : (cfg.bandwidth_method == stpp::BandwidthMethod::Lcv ? "lcv" : "mse")},
             {"n_events", pattern.size()},
             {"period", {{"start", cfg.period.start}, {"end", cfg.period.end}}},
             {"window_area_deg2", pattern.window.area()},
             {"mass", f.model.mass()},
             {"annual_rate", f.model.annual_rate()},
             {"log_likelihood", residuals::log_likelihood(pattern, f.model)}};
  put(dir / "model.json", model.dump(2) + "\n");
  if (f.selection) {
    put(dir / "bandwidth_scores.csv", render([&](std::ostream& o) {
          o << "h,score\n" << std::setprecision(12);
          for (std::size_t i = 0; i < f.selection->grid.size(); ++i)
            o << f.selection->grid[i] << ',' << f.selection->scores[i] << '\n';
        }));
  }
  const auto hz = loss::HazardModel::fit(hazard::read_grid_file(cfg.resolve(cfg.hazard_grid).string()));
  put(dir / "hazard_fits.csv", render([&](std::ostream& o) {
        o << "site,lon,lat,u,sigma,xi,lambda,rms_error,iterations\n" << std::setprecision(10);
        for (std::size_t i = 0; i < hz.grid.size(); ++i) {
          const auto& s = hz.fits[i];
          o << i << ',' << hz.grid[i].location.lon << ',' << hz.grid[i].location.lat << ',' << s.u << ',' << s.sigma
            << ',' << s.xi << ',' << s.lambda << ',' << s.rms_error << ',' << s.iterations << '\n';
        }
      }));
  return 0;
}

int cmd_residuals(const Common& c, int sims) {
  const auto cfg = load_config(c);
  const auto dir = out_dir(c);
  const auto pattern = service::load_pattern(cfg);
  const auto f = service::fit_model(cfg, pattern);
  const auto homog = stpp::fit_homogeneous(pattern);
  const auto kernel = f.model.spatial_margin();
  const auto vd = residuals::tessellate(pattern);
  const auto raw = residuals::voronoi_raw(vd, kernel);
  const auto pearson = residuals::voronoi_pearson(vd, kernel);
  const auto dev = residuals::voronoi_deviance(vd, kernel, homog.spatial_margin());
  for (const auto* rs : {&raw, &pearson, &dev})
    put(dir / ("residuals_" + std::string(residuals::to_string(rs->kind)) + ".csv"),
        render([&](std::ostream& o) { residuals::write_csv(o, *rs); }));
  json summary{{"n_cells", raw.size()},
               {"raw_sum", raw.score},
               {"pearson_sum", pearson.score},
               {"deviance_sum_kernel_vs_homogeneous", dev.score},
               {"n_test", residuals::n_test(pattern, f.model, sims, cfg.seed)},
               {"l_test", residuals::l_test(pattern, f.model, sims, cfg.seed)},
               {"simulations", sims}};
  put(dir / "residual_summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const Common& c, std::optional<int> years, std::optional<int> threads) {
  const auto cfg = load_config(c);
  const auto inputs = service::load_inputs(cfg);
  auto bc = service::batch_config(cfg);
  if (years) bc.n_years = *years;
  if (threads) bc.threads = *threads;
  int last = -1;
  auto run = loss::run_batch(inputs, bc, [&](double p) {
    const int pct = static_cast<int>(p * 100);
    if (pct / 10 != last / 10) std::cerr << "\rsimulating " << pct << "%" << std::flush;
    last = pct;
  });
  std::cerr << '\n';
  run.run_id = fs::path(c.out).filename().string();
  json extra{{"config", cfg.to_json()},
             {"config_digest", service::sha256_hex(cfg.to_json().dump())},
             {"inputs", service::input_digests(cfg)},
             {"request", {{"n_years", bc.n_years}, {"seed", bc.seed}, {"loss", service::loss_options_json(bc.loss)}}}};
  const auto dir = out_dir(c);
  const auto m = service::write_run(dir, run, extra);
  put(dir / "counts.csv", render([&](std::ostream& o) {
        o << "k,pct_years_events,pct_years_damaging\n";
        for (const auto& r : loss::summarize_run(run))
          o << r.k << ',' << fmt("%.4f", r.pct_events) << ',' << fmt("%.4f", r.pct_damaging) << '\n';
      }));
  std::cout << "annual.csv sha256 " << m["files"]["annual.csv"].get<std::string>() << '\n';
  return 0;
}

int cmd_scenario(const Common& c, double lon, double lat, const std::string& magnitude) {
  const auto cfg = load_config(c);
  const auto inputs = service::load_inputs(cfg);
  const auto window = geojson::window_from_file(cfg.resolve(cfg.window).string());
  json req{{"epicenter", {{"lon", lon}, {"lat", lat}}}, {"seed", cfg.seed}};
  req["magnitude"] = magnitude == "random" ? json("random") : json(std::stod(magnitude));
  const auto body = service::run_scenario({inputs, window, cfg.noise, cfg.loss}, req);
  const auto dir = out_dir(c);
  put(dir / "scenario.json", body.dump(2) + "\n");
  put(dir / "rings.geojson", body["rings"].dump(1) + "\n");
  const auto& t = body["totals"];
  std::cout << "M " << fmt("%.2f", body["event"]["magnitude"].get<double>()) << ", " << body["csds"].size()
            << " CSDs, loss " << exposure::format_cad(Cents(std::stoll(t["loss_cents"].get<std::string>())))
            << " CAD, claims " << exposure::format_cad(Cents(std::stoll(t["claim_cents"].get<std::string>())))
            << " CAD\n";
  return 0;
}

std::vector<double> epsilons_or(const std::vector<double>& cli, const service::Config& cfg) {
  return cli.empty() ? cfg.epsilons : cli;
}

int cmd_evt(const Common& c, const std::string& run_dir, bool losses, const std::vector<double>& eps_cli) {
  const auto cfg = load_config(c);
  const auto eps = epsilons_or(eps_cli, cfg);
  const auto stored = service::read_run(run_dir);
  const auto a = evt::AnnualMaxima::from_years(stored.run.annual, !losses);
  const auto dir = out_dir(c);
  std::vector<std::pair<std::string, const std::vector<double>*>> areas;
  const auto labels = evt::province_labels();
  for (std::size_t p = 0; p < loss::kProvinceCount; ++p) areas.emplace_back(labels[p], &a.province[p]);
  for (std::size_t g = 0; g < loss::kRegionCount; ++g) areas.emplace_back(std::string(loss::kRegions[g]), &a.region[g]);

  std::ostringstream fits, levels;
  fits << "area,u,sigma,xi,lambda,se_sigma,se_xi,se_lambda,n_exceed,threshold_quantile,loglik,status\n";
  levels << "area,x,simulated,estimated\n";
  for (const auto& [name, series] : areas) {
    std::optional<evt::PotFit> f;
    std::string status = "ok";
    try {
      f = evt::fit_pot(*series, a.n_years);
    } catch (const Error& e) {
      status = std::string(quakesim::to_string(e.code()));
    }
    if (f) {
      fits << name << ',' << fmt("%.2f", f->u) << ',' << fmt("%.6g", f->sigma) << ',' << fmt("%.6g", f->xi) << ','
           << fmt("%.6g", f->lambda) << ',' << fmt("%.6g", f->se_sigma) << ',' << fmt("%.6g", f->se_xi) << ','
           << fmt("%.6g", f->se_lambda) << ',' << f->n_exceed << ',' << f->threshold_quantile << ','
           << fmt("%.6g", f->loglik) << ",ok\n";
    } else {
      fits << name << ",,,,,,,,,,," << status << '\n';
    }
    for (double e : eps) {
      levels << name << ',' << fmt("%.10g", 1.0 / e) << ',';
      try {
        levels << fmt("%.2f", evt::empirical_pml(*series, e));
      } catch (const Error&) {
      }
      levels << ',' << (f ? fmt("%.2f", evt::pml_quantile(*f, e)) : "") << '\n';
    }
  }
  put(dir / "gpd_fits.csv", fits.str());
  put(dir / "return_levels.csv", levels.str());
  return 0;
}

int cmd_mct(const Common& c, const std::string& run_dir, bool losses, const std::vector<double>& eps_cli) {
  const auto cfg = load_config(c);
  const auto eps = epsilons_or(eps_cli, cfg);
  const auto stored = service::read_run(run_dir);
  const auto a = evt::AnnualMaxima::from_years(stored.run.annual, !losses);
  const std::vector<evt::CorrelationMethod> methods{evt::CorrelationMethod::Pearson, evt::CorrelationMethod::Kendall};
  const auto r = evt::mct_analysis(a, eps, methods, !losses);
  const auto dir = out_dir(c);
  put(dir / "mct.json", service::mct_json(stored.run.run_id, stored.run.n_years, r).dump(2) + "\n");
  put(dir / "pml_simulated.csv", render([&](std::ostream& o) { evt::write_pml_csv(o, r.reports, false); }));
  put(dir / "pml_estimated.csv", render([&](std::ostream& o) { evt::write_pml_csv(o, r.reports, true); }));
  put(dir / "corr_pearson.csv", render([&](std::ostream& o) { evt::write_correlation_csv(o, *r.pearson); }));
  put(dir / "corr_kendall.csv", render([&](std::ostream& o) { evt::write_correlation_csv(o, *r.kendall); }));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& rep : r.reports)
    for (const auto& w : rep.warnings) std::cerr << "warning (x=" << fmt("%.0f", 1.0 / rep.epsilon) << "): " << w << '\n';
  return 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const Common& c, const std::string& host, int port) {
  const auto cfg = load_config(c);
  std::cerr << "loading inputs from " << c.config << '\n';
  auto svc = service::Service::from_config(cfg);
  httplib::Server server;
  service::register_routes(server, *svc);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "listening on http://" << host << ':' << port << "/api/v1 (runs in "
            << cfg.resolve(cfg.runs_dir).string() << ")\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Earthquake catastrophe loss model"};
  app.require_subcommand(1);
  Common c;

  auto* fit = app.add_subcommand("fit", "fit the intensity model and the hazard-site tails");
  add_common(fit, c);

  int sims = 99;
  auto* res = app.add_subcommand("residuals", "Voronoi residuals and N/L tests for the fitted model");
  add_common(res, c);
  res->add_option("--simulations", sims, "simulations for the N and L tests")->capture_default_str();

  std::optional<int> years, threads;
  auto* sim = app.add_subcommand("simulate", "multi-year batch run");
  add_common(sim, c);
  sim->add_option("--years", years, "years to simulate (overrides the config)");
  sim->add_option("--threads", threads, "worker threads, 0 = all cores");

  double lon = 0.0, lat = 0.0;
  std::string magnitude = "random";
  auto* sc = app.add_subcommand("scenario", "one event at a chosen epicenter");
  add_common(sc, c);
  sc->add_option("--lon", lon, "epicenter longitude")->required();
  sc->add_option("--lat", lat, "epicenter latitude")->required();
  sc->add_option("--magnitude", magnitude, "moment magnitude above 6, or random")->capture_default_str();

  std::string run_dir;
  bool losses = false;
  std::vector<double> eps;
  auto* ev = app.add_subcommand("evt", "tail fits and return levels from a simulate run");
  auto* mct = app.add_subcommand("mct", "PML and capital aggregates from a simulate run");
  for (auto* cmd : {ev, mct}) {
    add_common(cmd, c);
    cmd->add_option("--run", run_dir, "directory written by simulate")->required();
    cmd->add_flag("--losses", losses, "use ground-up losses instead of claims");
    cmd->add_option("--epsilon", eps, "exceedance probabilities (default from config)");
  }

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP API");
  add_common(serve, c, false);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*fit) return cmd_fit(c);
    if (*res) return cmd_residuals(c, sims);
    if (*sim) return cmd_simulate(c, years, threads);
    if (*sc) return cmd_scenario(c, lon, lat, magnitude);
    if (*ev) return cmd_evt(c, run_dir, losses, eps);
    if (*mct) return cmd_mct(c, run_dir, losses, eps);
    if (*serve) return cmd_serve(c, host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << (e.details().empty() ? "" : " (" + e.details() + ")") << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
