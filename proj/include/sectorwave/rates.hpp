#pragma once

#include "sectorwave/channel.hpp"
#include "sectorwave/common.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace sectorwave {

// ---------------------------------------------------------------------------
// Multiplexing gain
// ---------------------------------------------------------------------------

/// Probability that a user training with beam width w is present on a
/// sector: 1 - (1 - p)^w.
double q_prob(int width, double p);

/// Expected number of served users per pilot dimension,
/// K [1 - (1 - q (1 - q)^(K-1))^S].
double mg_closed_form(int width, int users_per_dim, double p, int sectors);

struct MgScenario {
  int sectors = 25;
  int pilot_dims = 5;
  int users_per_dim = 1;
  int width = 1;
  int user_antennas = 6;
  ConnectivityParams connectivity;
  double threshold = 0.0;  // 0 selects the default lambda_L / (2 M~)
};

struct MgEstimate {
  double per_dim = 0.0;         // mean of L'/tau
  double per_dim_stderr = 0.0;
  double raw = 0.0;             // mean of L'
  double raw_stderr = 0.0;
  long slots = 0;
  bool few_slots = false;       // set when fewer than 100 slots were run
};

/// Slot-averaged L' with a fresh connectivity draw and fresh beams every
/// slot. Slot t uses the stream (seed, t, 0).
MgEstimate mg_monte_carlo(const MgScenario& scenario, long slots, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Rate bounds for zero-forced sector transmission
// ---------------------------------------------------------------------------

/// Omega(g, K_s) = Gamma(g - K_s + 3/2) / Gamma(g - K_s + 1), via log-gamma.
double omega(int beams, int nulling_dims);

/// Everything user k's SINR depends on, per sector s.
struct SectorTerm {
  double power = 0.0;              // eta_{s,k}
  double mmse_gain = 0.0;          // gamma_{s,k}
  double error_var = 0.0;          // sigma^2_{e,k,s}
  int nulling_dims = 0;            // K_s
  bool nulls_own_pilot = false;    // s in R_{G(k)}
  double other_power = 0.0;        // sum_{u != k} eta_{s,u}
  double other_group_power = 0.0;  // sum_{G(u) != G(k)} eta_{s,u}
};

struct SinrTerms {
  int beams = 1;                                 // g
  double rho_d = 1.0;
  double noise_var = 1.0;                        // delta^2
  std::vector<SectorTerm> sectors;
  std::vector<std::vector<double>> copilot_power; // eta_{s,u} per same-pilot interferer u
};

struct SinrResult {
  double mean_signal = 0.0;         // E[D_k]
  double second_moment = 0.0;       // E[|D_k|^2]
  double interference_noise = 0.0;  // sigma^2_{z_k}
  double sinr = 0.0;                // E[|D_k|^2] / sigma^2_{z_k}
};

/// Closed-form E[D_k], E[|D_k|^2], sigma^2_z and their ratio for ZF
/// precoding on MMSE estimates. Throws NumericError on a non-finite term.
SinrResult sinr_closed_form(const SinrTerms& terms);

/// Terms under the massive-array scaling (n g, n K_s, eta / n). Other-user
/// power aggregates are held fixed (n times as many users at 1/n power).
SinrTerms scale_terms(const SinrTerms& terms, int n);

/// Large-array limit of sinr_closed_form under scale_terms: Omega replaced
/// by sqrt(g - K_s) and the 1/n-vanishing terms dropped.
double sinr_asymptotic(const SinrTerms& terms);

/// log2(1 + |E D|^2 / (var D + sigma_z^2)); tiny negative variances are clamped.
double rate_bound_statistics(const SinrResult& r);

/// log2(1 + E|D|^2/sigma_z^2) - (1/T_d) log2(1 + T_d E|D|^2/sigma_z^2).
/// T_d = infinity drops the second term. Throws DomainError for T_d <= 1.
double rate_bound_caire(const SinrResult& r, double coherence = std::numeric_limits<double>::infinity());

/// Multi-sector downlink with pilot reuse, used both to assemble SinrTerms
/// and by the Monte-Carlo term oracle.
struct DownlinkScenario {
  int beams = 1;                               // g
  int pilot_dims = 1;                          // tau
  std::vector<int> group;                      // G(k)
  MatrixXd gains;                              // lambda_{s,k}, S x K
  MatrixXd power;                              // eta_{s,k}, S x K
  std::vector<std::vector<int>> nulling;       // K_s: pilot groups sector s nulls
  double pilot_snr = 1.0;                      // tau rho_p
  double rho_d = 1.0;
  double noise_var = 1.0;

  int sectors() const { return static_cast<int>(gains.rows()); }
  int users() const { return static_cast<int>(gains.cols()); }

  /// Throws DomainError on inconsistent dimensions or a served user whose
  /// pilot group is missing from the sector's nulling set.
  void validate() const;
};

SinrTerms sinr_terms(const DownlinkScenario& scenario, int user);

/// Monte-Carlo estimates of the same quantities, from explicit draws of
/// channels, pilots, MMSE estimates and ZF precoders.
struct TermEstimates {
  double mean_signal = 0.0, mean_signal_stderr = 0.0;
  double second_moment = 0.0, second_moment_stderr = 0.0;
  double interference_noise = 0.0, interference_noise_stderr = 0.0;
  double chi_mean_ratio = 0.0;   // mean of ||Pi(B) g_hat|| / (sqrt(gamma) Omega) over served sectors
  double nulled_residual = 0.0;  // max eta_{s,u} |g_hat_{s,k}^H v_{s,u}|^2 over s in R_G(k), G(u) != G(k)
};

TermEstimates monte_carlo_terms(const DownlinkScenario& scenario, int user, long samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ergodic rates by simulation
// ---------------------------------------------------------------------------

enum class PrecoderKind { zf, cbf };

/// Returns an M x L matrix whose columns are user channels.
using ChannelSampler = std::function<MatrixXcd(Rng&)>;

struct ErgodicRates {
  VectorXd per_user;
  VectorXd per_user_stderr;
  double sum_rate = 0.0;
  double sum_rate_stderr = 0.0;
};

/// Sample mean of log2(1 + rho |h_k^H v_k|^2 / (rho sum_{k'} |h_k^H v_k'|^2 + 1))
/// with precoders built from the sampled channels (ideal CSI).
ErgodicRates ergodic_rate_mc(const ChannelSampler& sampler, PrecoderKind kind, double rho_d, long samples,
                             std::uint64_t seed);

/// Channel sampler h_k ~ CN(0, R_k) for a set of covariances.
ChannelSampler covariance_sampler(const std::vector<MatrixXcd>& covariances);

// ---------------------------------------------------------------------------

struct RateReport {
  std::vector<double> sorted;  // ascending; sorted[i] sits at CDF level (i+1)/n
  double arithmetic_mean = 0.0;
  double geometric_mean = 0.0;
  double geometric_floor = 1e-6;  // rates are floored here before the geometric mean

  double cdf_level(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(sorted.size()); }
};

RateReport summarize(const std::vector<double>& per_user_rates, double geometric_floor = 1e-6);

}  // namespace sectorwave
