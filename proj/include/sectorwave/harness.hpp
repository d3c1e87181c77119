#pragma once

#include "sectorwave/channel.hpp"
#include "sectorwave/config.hpp"
#include "sectorwave/csv.hpp"
#include "sectorwave/rates.hpp"
#include "sectorwave/training.hpp"

#include <cstdint>
#include <vector>

namespace sectorwave {

/// Per-direction sector gains lambda^(m)_{s,k} for all K_tot users, fixed
/// for the experiment unless redraw_per_slot is set. Non-connectivity
/// channel modes are reduced to the same table through their covariance in
/// the DFT basis, tr(F_s^H R F_s) / g, and rescaled per user to the mean
/// total gain of the connectivity model.
struct DropState {
  ConnectivityMap map;
};

/// Drop `index` draws from stream (seed, 2^64 - 1, index).
DropState make_drop(const ScenarioConfig& cfg, std::uint64_t index = 0);

struct SlotResult {
  long slot = 0;
  int served = 0;                      // L'
  std::vector<int> serving_histogram;  // [n] = scheduled users with N_k = n
  std::vector<int> users;              // scheduled user ids
  std::vector<double> rates;           // bits/s/Hz per scheduled user, 0 when not served
  double wall_seconds = 0.0;
};

/// One scheduling slot: round-robin window of K tau users starting at
/// (slot K tau) mod K_tot, random width-w masks, detection, sector ZF and
/// the closed-form rate of every served user.
SlotResult run_slot(const ScenarioConfig& cfg, const DropState& drop, long slot);

/// Rates of the scheduled users of one slot for a given presence pattern.
/// `gains` is S x L, `present` the detected X_hat.
std::vector<double> slot_rates(const ScenarioConfig& cfg, const PilotAssignment& assignment, const MatrixXd& gains,
                               const DetectionReport& report);

struct PointResult {
  int w = 0, K = 0;
  double mg_closed = 0.0;              // per pilot dimension
  double mg_slots = 0.0;               // mean L'/tau over the run
  double mg_slots_stderr = 0.0;
  std::vector<double> throughput;      // per user over all slots (0 when not scheduled)
  RateReport report;
  double net_factor = 1.0;             // 1 - tau / T_block
};

/// All slots of cfg at its (w, K).
PointResult run_point(const ScenarioConfig& cfg, const DropState& drop);

struct SweepGrid {
  std::vector<int> widths;
  std::vector<int> users_per_dim;
};

/// Every (w, K) of the grid on one drop. Q is raised to K where needed.
std::vector<PointResult> run_experiment(const ScenarioConfig& cfg, const SweepGrid& grid);

/// Long-format rows: mg_closed, mg_slots, mg_slots_stderr, arith_mean,
/// geo_mean, arith_mean_net, geo_mean_net and one cdf_rate row per user.
std::vector<MetricRow> experiment_metrics(const std::vector<PointResult>& points);

std::vector<RateRow> rate_rows(const std::vector<PointResult>& points);
std::vector<CdfRow> cdf_rows(const std::vector<PointResult>& points);

/// Point with the largest arithmetic mean among those with width w.
const PointResult& best_for_width(const std::vector<PointResult>& points, int w);

// ---------------------------------------------------------------------------
// Piecewise-flat versus circulant covariance comparison
// ---------------------------------------------------------------------------

struct FlatcmpConfig {
  int bs_antennas = 64;
  int sectors = 8;
  int users = 6;
  std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  long samples = 2000;
  double spread = 0.02;  // Laplacian angular spread, normalized angle
  std::uint64_t seed = 1;
};

struct FlatcmpModels {
  std::vector<MatrixXcd> original;
  std::vector<MatrixXcd> circulant;
  std::vector<MatrixXcd> flat;
};

/// Clustered user covariances: the first half of the users see one cluster,
/// the rest three. Traces are normalized to M.
FlatcmpModels flatcmp_models(const FlatcmpConfig& cfg);

std::vector<FlatcmpRow> run_flatcmp(const FlatcmpConfig& cfg);

}  // namespace sectorwave
