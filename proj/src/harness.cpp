#include "sectorwave/harness.hpp"

#include "sectorwave/covariance_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace sectorwave {

namespace {

constexpr std::uint64_t kDropSlot = std::numeric_limits<std::uint64_t>::max();

// Per-user rescaling of a gain table to the connectivity model's mean
// total gain per direction, S p (lambda_L + lambda_H) / 2.
void normalize_users(ConnectivityMap& map, const ScenarioConfig& cfg) {
  const double target = cfg.sectors * cfg.p * 0.5 * (cfg.lambda_low + cfg.lambda_high);
  for (int k = 0; k < map.users(); ++k) {
    double total = 0.0;
    for (int s = 0; s < map.sectors(); ++s)
      for (int m = 0; m < map.user_antennas(); ++m) total += map.gain(s, k, m);
    total /= map.user_antennas();
    if (total <= 0.0) continue;
    for (int s = 0; s < map.sectors(); ++s)
      for (int m = 0; m < map.user_antennas(); ++m) map.set(s, k, m, map.gain(s, k, m) * target / total);
  }
}

// Mean of diag(F^H R F) over each sector block.
VectorXd sector_energy(const MatrixXcd& f, const MatrixXcd& r, int sectors) {
  const VectorXd diag = (f.adjoint() * r * f).diagonal().real();
  return sector_gains(diag, sectors);
}

DropState physical_drop(const ScenarioConfig& cfg, Rng& rng) {
  const int S = cfg.sectors, Mt = cfg.user_antennas, g = cfg.beams();
  const SectorBasis<double> basis(cfg.bs_antennas, S);
  const MatrixXcd ft = dft_matrix<double>(Mt);
  DropState d{ConnectivityMap(S, cfg.total_users, Mt)};
  for (int k = 0; k < cfg.total_users; ++k) {
    const PathSet paths = random_path_set(2, 4, 0.02, 0.0, rng);
    for (const auto& path : paths.paths) {
      const VectorXcd beams = basis.matrix().adjoint() * steering_vector<double>(cfg.bs_antennas, path.aoa);
      const VectorXd user = (ft.adjoint() * steering_vector<double>(Mt, path.aod)).cwiseAbs2();
      for (int s = 0; s < S; ++s) {
        const double e = beams.segment(static_cast<Eigen::Index>(s) * g, g).squaredNorm() / g;
        for (int m = 0; m < Mt; ++m) d.map.set(s, k, m, d.map.gain(s, k, m) + std::norm(path.gain) * user(m) * e);
      }
    }
  }
  return d;
}

DropState virtual_drop(const ScenarioConfig& cfg, Rng& rng) {
  const int S = cfg.sectors, Mt = cfg.user_antennas, g = cfg.beams();
  DropState d{ConnectivityMap(S, cfg.total_users, Mt)};
  for (int k = 0; k < cfg.total_users; ++k) {
    const VirtualChannel v = VirtualChannel::random_sparse(cfg.bs_antennas, Mt, 4, 1.0, 8, rng);
    for (int i = 0; i < cfg.bs_antennas; ++i)
      for (int m = 0; m < Mt; ++m)
        for (int l = 0; l < v.delay_bins(); ++l) {
          const double e = std::norm(v.at(i, m, l));
          if (e > 0.0) d.map.set(i / g, k, m, d.map.gain(i / g, k, m) + e);
        }
  }
  return d;
}

DropState covariance_drop(const ScenarioConfig& cfg) {
  const auto mats = read_covariances(cfg.covariance_file, cfg.bs_antennas);
  const MatrixXcd f = dft_matrix<double>(cfg.bs_antennas);
  std::vector<VectorXd> energy;
  for (const auto& r : mats) energy.push_back(sector_energy(f, r, cfg.sectors));
  DropState d{ConnectivityMap(cfg.sectors, cfg.total_users, cfg.user_antennas)};
  for (int k = 0; k < cfg.total_users; ++k) {
    const VectorXd& e = energy[static_cast<std::size_t>(k) % energy.size()];
    for (int s = 0; s < cfg.sectors; ++s)
      for (int m = 0; m < cfg.user_antennas; ++m) d.map.set(s, k, m, std::max(0.0, e(s)));
  }
  return d;
}

struct Running {
  long n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double stderr_() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

}  // namespace

DropState make_drop(const ScenarioConfig& cfg, std::uint64_t index) {
  Rng rng = make_stream(cfg.seed, kDropSlot, index);
  DropState d;
  switch (cfg.channel) {
    case ChannelMode::connectivity:
      d.map = sample_connectivity(cfg.connectivity(), cfg.sectors, cfg.total_users, cfg.user_antennas, rng);
      return d;
    case ChannelMode::physical: d = physical_drop(cfg, rng); break;
    case ChannelMode::virtual_sampled: d = virtual_drop(cfg, rng); break;
    case ChannelMode::covariance_file: d = covariance_drop(cfg); break;
  }
  normalize_users(d.map, cfg);
  return d;
}

std::vector<double> slot_rates(const ScenarioConfig& cfg, const PilotAssignment& a, const MatrixXd& gains,
                               const DetectionReport& report) {
  const int S = static_cast<int>(gains.rows());
  const int L = static_cast<int>(gains.cols());
  const int tau = a.pilot_dims;
  std::vector<double> rates(L, 0.0);
  if (report.served == 0) return rates;

  MatrixXd power = MatrixXd::Zero(S, L);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < L; ++j)
      if (report.resolvable(s, j)) power(s, j) = 1.0 / (static_cast<double>(report.served) * report.serving_count[j]);

  Eigen::MatrixXi nulled = Eigen::MatrixXi::Zero(S, tau);
  MatrixXd group_gain = MatrixXd::Zero(S, tau), group_power = MatrixXd::Zero(S, tau);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < L; ++j) {
      group_gain(s, a.pilot[j]) += gains(s, j);
      group_power(s, a.pilot[j]) += power(s, j);
      if (report.resolvable(s, j)) nulled(s, a.pilot[j]) = 1;
    }
  const VectorXd total_power = power.rowwise().sum();
  const Eigen::VectorXi nulling_dims = nulled.rowwise().sum();
  const double pilot_snr = tau * cfg.rho_p;

  for (int j = 0; j < L; ++j) {
    if (report.serving_count[j] == 0) continue;
    const int sigma = a.pilot[j];
    SinrTerms t;
    t.beams = cfg.beams();
    t.rho_d = cfg.rho_d;
    t.noise_var = 1.0;
    t.sectors.resize(S);
    for (int s = 0; s < S; ++s) {
      auto& st = t.sectors[s];
      st.power = power(s, j);
      st.mmse_gain = mmse_gain(gains(s, j), group_gain(s, sigma), pilot_snr);
      st.error_var = gains(s, j) - st.mmse_gain;
      st.nulling_dims = nulling_dims(s);
      st.nulls_own_pilot = nulled(s, sigma) != 0;
      st.other_power = total_power(s) - power(s, j);
      st.other_group_power = total_power(s) - group_power(s, sigma);
    }
    for (int u : a.groups[sigma]) {
      if (u == j || report.serving_count[u] == 0) continue;
      t.copilot_power.emplace_back(power.col(u).data(), power.col(u).data() + S);
    }
    rates[j] = rate_bound_caire(sinr_closed_form(t), cfg.coherence);
  }
  return rates;
}

SlotResult run_slot(const ScenarioConfig& cfg, const DropState& drop, long slot) {
  const auto start = std::chrono::steady_clock::now();
  DropState local;
  if (cfg.redraw_per_slot) local = make_drop(cfg, static_cast<std::uint64_t>(slot) + 1);
  const ConnectivityMap& map = cfg.redraw_per_slot ? local.map : drop.map;
  if (map.users() != cfg.total_users || map.sectors() != cfg.sectors) {
    throw ConfigError("drop state does not match the configuration");
  }

  const int L = cfg.scheduled();
  const int S = cfg.sectors;
  const auto useq = static_cast<std::uint64_t>(slot);
  SlotResult r;
  r.slot = slot;
  r.users.resize(L);
  const long first = (slot * L) % cfg.total_users;
  for (int j = 0; j < L; ++j) r.users[j] = static_cast<int>((first + j) % cfg.total_users);

  Rng rng = make_stream(cfg.seed, useq, 0);
  const PilotAssignment assignment = assign_pilots(L, cfg.pilot_dims, cfg.users_per_dim, rng);

  MatrixXd gains(S, L);
  for (int j = 0; j < L; ++j) {
    Rng urng = make_stream(cfg.seed, useq, 1 + static_cast<std::uint64_t>(r.users[j]));
    const BeamMask mask = BeamMask::random(cfg.user_antennas, cfg.width, urng);
    for (int s = 0; s < S; ++s) gains(s, j) = effective_gain(map, mask, s, r.users[j]);
  }

  Indicator present;
  if (cfg.detection == DetectionMode::genie) {
    present = threshold_presence(gains, cfg.presence_threshold());
  } else {
    Rng erng = make_stream(cfg.seed, useq, 1 + static_cast<std::uint64_t>(cfg.total_users));
    const CodeMatrix code = build_code_matrix(cfg.blocks, cfg.users_per_dim);
    const SectorChannels channels = SectorChannels::sample(gains, cfg.blocks, cfg.beams(), erng);
    const SectorObservations obs = synthesize_uplink(channels, assignment, code, cfg.rho_p, erng);
    const MatrixXd est = cfg.users_per_dim == 1 ? presence_statistic_orthogonal(obs, assignment)
                                                : estimate_gains_nonorthogonal(obs, assignment, code);
    present = threshold_presence(est, cfg.presence_threshold());
  }
  const DetectionReport report = detect_resolvable(present, assignment);
  r.served = report.served;
  r.serving_histogram.assign(S + 1, 0);
  for (int n : report.serving_count) ++r.serving_histogram[n];
  r.rates = slot_rates(cfg, assignment, gains, report);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

PointResult run_point(const ScenarioConfig& cfg, const DropState& drop) {
  cfg.validate();
  PointResult p;
  p.w = cfg.width;
  p.K = cfg.users_per_dim;
  p.mg_closed = mg_closed_form(cfg.width, cfg.users_per_dim, cfg.p, cfg.sectors);
  p.throughput.assign(cfg.total_users, 0.0);
  Running mg;
  for (long t = 0; t < cfg.slots; ++t) {
    const SlotResult r = run_slot(cfg, drop, t);
    for (std::size_t j = 0; j < r.users.size(); ++j) p.throughput[r.users[j]] += r.rates[j];
    mg.add(static_cast<double>(r.served) / cfg.pilot_dims);
  }
  for (double& v : p.throughput) v /= static_cast<double>(cfg.slots);
  p.mg_slots = mg.mean;
  p.mg_slots_stderr = mg.stderr_();
  p.report = summarize(p.throughput);
  p.net_factor = 1.0 - cfg.pilot_dims / cfg.block_length;
  return p;
}

std::vector<PointResult> run_experiment(const ScenarioConfig& cfg, const SweepGrid& grid) {
  if (grid.widths.empty() || grid.users_per_dim.empty()) throw ConfigError("sweep grid is empty");
  const DropState drop = make_drop(cfg);
  std::vector<PointResult> out;
  for (int w : grid.widths) {
    for (int k : grid.users_per_dim) {
      ScenarioConfig c = cfg;
      c.width = w;
      c.users_per_dim = k;
      c.blocks = std::max(cfg.blocks, k);
      out.push_back(run_point(c, drop));
    }
  }
  return out;
}

std::vector<MetricRow> experiment_metrics(const std::vector<PointResult>& points) {
  std::vector<MetricRow> rows;
  for (const auto& p : points) {
    auto add = [&](const char* name, double v) { rows.push_back({p.w, p.K, name, v}); };
    add("mg_closed", p.mg_closed);
    add("mg_slots", p.mg_slots);
    add("mg_slots_stderr", p.mg_slots_stderr);
    add("arith_mean", p.report.arithmetic_mean);
    add("geo_mean", p.report.geometric_mean);
    add("arith_mean_net", p.report.arithmetic_mean * p.net_factor);
    add("geo_mean_net", p.report.geometric_mean * p.net_factor);
    add("geo_floor", p.report.geometric_floor);
    for (double v : p.report.sorted) add("cdf_rate", v);
  }
  return rows;
}

std::vector<RateRow> rate_rows(const std::vector<PointResult>& points) {
  std::vector<RateRow> rows;
  for (const auto& p : points)
    for (std::size_t k = 0; k < p.throughput.size(); ++k)
      rows.push_back({p.w, p.K, static_cast<int>(k), p.throughput[k]});
  return rows;
}

std::vector<CdfRow> cdf_rows(const std::vector<PointResult>& points) {
  std::vector<CdfRow> rows;
  for (const auto& p : points)
    for (std::size_t i = 0; i < p.report.sorted.size(); ++i)
      rows.push_back({p.w, p.K, p.report.cdf_level(i), p.report.sorted[i]});
  return rows;
}

const PointResult& best_for_width(const std::vector<PointResult>& points, int w) {
  const PointResult* best = nullptr;
  for (const auto& p : points)
    if (p.w == w && (!best || p.report.arithmetic_mean > best->report.arithmetic_mean)) best = &p;
  if (!best) throw DomainError("no sweep point with w = " + std::to_string(w));
  return *best;
}

// ---------------------------------------------------------------------------

FlatcmpModels flatcmp_models(const FlatcmpConfig& cfg) {
  if (cfg.users < 1 || cfg.users > cfg.bs_antennas) throw ConfigError("flatcmp needs 1 <= users <= M");
  Rng rng = make_stream(cfg.seed, kDropSlot, 0xfc);
  const VectorXcd single = VectorXcd::Ones(1);
  FlatcmpModels m;
  for (int k = 0; k < cfg.users; ++k) {
    const int clusters = k < cfg.users / 2 ? 1 : 3;
    const PathSet paths = random_path_set(clusters, 10, cfg.spread, 0.0, rng);
    MatrixXcd r = path_covariance(paths, cfg.bs_antennas, single);
    r *= cfg.bs_antennas / r.trace().real();
    const CirculantApproximation circ = circulant_approximation(r);
    m.original.push_back(r);
    m.circulant.push_back(circ.covariance);
    m.flat.push_back(covariance_from_spectrum(piecewise_flat(circ.spectrum, cfg.sectors)));
  }
  return m;
}

std::vector<FlatcmpRow> run_flatcmp(const FlatcmpConfig& cfg) {
  const FlatcmpModels models = flatcmp_models(cfg);
  const std::vector<std::pair<std::string, ChannelSampler>> samplers = {
      {"original", covariance_sampler(models.original)},
      {"circulant", covariance_sampler(models.circulant)},
      {"flat", covariance_sampler(models.flat)}};
  std::vector<FlatcmpRow> rows;
  for (double snr : cfg.snr_db) {
    const double rho = std::pow(10.0, snr / 10.0);
    for (const auto& [name, sampler] : samplers) {
      for (const auto kind : {PrecoderKind::zf, PrecoderKind::cbf}) {
        const ErgodicRates e = ergodic_rate_mc(sampler, kind, rho, cfg.samples, cfg.seed);
        for (Eigen::Index k = 0; k < e.per_user.size(); ++k) {
          rows.push_back({snr, name, kind == PrecoderKind::zf ? "zf" : "cbf", e.sum_rate, static_cast<int>(k),
                          e.per_user(k)});
        }
      }
    }
  }
  return rows;
}

}  // namespace sectorwave
