#include "sectorwave/config.hpp"
#include "sectorwave/csv.hpp"
#include "sectorwave/harness.hpp"
#include "sectorwave/rates.hpp"
#include "sectorwave/validate.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace sectorwave;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> settings;
  bool paper_scale = false;
  bool redraw = false;
  long slots = 0;
  std::string out;

  ScenarioConfig load() const {
    ScenarioConfig cfg = paper_scale ? paper_scale_config() : desk_config();
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    for (const auto& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (redraw) cfg.redraw_per_slot = true;
    if (slots > 0) cfg.slots = slots;
    cfg.seed = resolve_seed(cfg, seed);
    return cfg;
  }
};

void add_common(CLI::App* app, Common& c, const std::string& default_out) {
  c.out = default_out;
  app->add_option("-c,--config", c.config_path, "key = value config file");
  app->add_option("--seed", c.seed, "RNG seed (overrides SECTORWAVE_SEED and the config)");
  app->add_option("--set", c.settings, "override one config key, key=value")->take_all();
  app->add_flag("--paper-scale", c.paper_scale, "start from M = 1000, S = 25, K_tot = 100");
  app->add_flag("--redraw-per-slot", c.redraw, "new connectivity drop every slot");
  app->add_option("--slots", c.slots, "number of slots (overrides n_slots)");
  app->add_option("-o,--out", c.out, "output CSV path")->capture_default_str();
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

SweepGrid default_grid(const ScenarioConfig& cfg, const std::vector<int>& widths, const std::vector<int>& ks) {
  SweepGrid g;
  g.widths = widths.empty() ? range(1, cfg.user_antennas) : widths;
  g.users_per_dim = ks.empty() ? range(1, cfg.total_users / cfg.pilot_dims) : ks;
  return g;
}

template <typename Rows, typename Writer>
void write_file(const std::string& path, const Rows& rows, Writer writer) {
  auto out = open_output(path);
  writer(out, rows);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sector-based multiuser mmWave simulator"};
  app.require_subcommand(1);

  Common mg_opts, rates_opts, cdf_opts, run_opts, flat_opts;
  int k_max = 30;
  long mc_slots = 1000;
  auto* mg = app.add_subcommand("mg", "multiplexing gain per pilot dimension, closed form and Monte Carlo");
  add_common(mg, mg_opts, "mg.csv");
  mg->add_option("--k-max", k_max, "largest K in the grid")->capture_default_str();
  mg->add_option("--mc-slots", mc_slots, "Monte-Carlo slots per grid point")->capture_default_str();

  std::vector<int> widths, ks;
  std::string metrics_path;
  auto* rates = app.add_subcommand("rates", "per-user throughput over the (w, K) grid");
  add_common(rates, rates_opts, "rates.csv");
  rates->add_option("--metrics", metrics_path, "also write the long-format metrics CSV here");

  auto* cdf = app.add_subcommand("cdf", "user-rate CDFs at the rate-optimal K of each w, plus K = 1");
  add_common(cdf, cdf_opts, "cdf.csv");

  std::string run_rates, run_cdf;
  auto* run = app.add_subcommand("run", "generic sweep; long-format metrics");
  add_common(run, run_opts, "experiment.csv");
  for (auto* sub : {rates, cdf, run}) {
    sub->add_option("--widths", widths, "beam widths to sweep")->delimiter(',');
    sub->add_option("--Ks", ks, "users per pilot dimension to sweep")->delimiter(',');
  }
  run->add_option("--rates", run_rates, "also write rates.csv here");
  run->add_option("--cdf", run_cdf, "also write cdf.csv here");

  long flat_samples = 2000;
  auto* flat = app.add_subcommand("flatcmp", "piecewise-flat versus circulant covariance, ZF and CBF");
  add_common(flat, flat_opts, "flatcmp.csv");
  flat->add_option("--samples", flat_samples, "channel draws per SNR point")->capture_default_str();

  std::string suite;
  long val_samples = 0;
  std::uint64_t val_seed = 1;
  auto* val = app.add_subcommand("validate", "run a validation suite");
  val->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(validation_suites()));
  val->add_option("--samples", val_samples, "override the suite's sample count");
  val->add_option("--seed", val_seed, "RNG seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*mg) {
      const ScenarioConfig cfg = mg_opts.load();
      cfg.validate();
      std::vector<MgRow> rows;
      for (int w = 1; w <= cfg.user_antennas; ++w) {
        for (int k = 1; k <= k_max; ++k) {
          MgScenario sc;
          sc.sectors = cfg.sectors;
          sc.pilot_dims = cfg.pilot_dims;
          sc.users_per_dim = k;
          sc.width = w;
          sc.user_antennas = cfg.user_antennas;
          sc.connectivity = cfg.connectivity();
          sc.threshold = cfg.threshold;
          const MgEstimate e = mg_monte_carlo(sc, mc_slots, cfg.seed);
          rows.push_back({w, k, mg_closed_form(w, k, cfg.p, cfg.sectors), e.per_dim, e.per_dim_stderr});
        }
      }
      write_file(mg_opts.out, rows, write_mg_csv);
    } else if (*rates || *cdf || *run) {
      const Common& opts = *rates ? rates_opts : (*cdf ? cdf_opts : run_opts);
      const ScenarioConfig cfg = opts.load();
      const auto points = run_experiment(cfg, default_grid(cfg, widths, ks));
      if (*rates) {
        write_file(opts.out, rate_rows(points), write_rates_csv);
        if (!metrics_path.empty()) write_file(metrics_path, experiment_metrics(points), write_metrics_csv);
      } else if (*cdf) {
        std::vector<PointResult> chosen;
        for (int w : default_grid(cfg, widths, ks).widths) {
          chosen.push_back(best_for_width(points, w));
          for (const auto& p : points)
            if (p.w == w && p.K == 1 && chosen.back().K != 1) chosen.push_back(p);
        }
        write_file(opts.out, cdf_rows(chosen), write_cdf_csv);
      } else {
        write_file(opts.out, experiment_metrics(points), write_metrics_csv);
        if (!run_rates.empty()) write_file(run_rates, rate_rows(points), write_rates_csv);
        if (!run_cdf.empty()) write_file(run_cdf, cdf_rows(points), write_cdf_csv);
      }
    } else if (*flat) {
      FlatcmpConfig fc;
      fc.seed = flat_opts.load().seed;
      fc.samples = flat_samples;
      write_file(flat_opts.out, run_flatcmp(fc), write_flatcmp_csv);
    } else if (*val) {
      const ValidationReport r = run_validation(suite, val_seed, val_samples);
      for (const auto& line : r.lines) std::cout << line << '\n';
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << '\n';
      return r.passed ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
