#pragma once

#include "sectorwave/common.hpp"

#include <ostream>
#include <span>
#include <vector>

namespace sectorwave {

using Indicator = Eigen::MatrixXi;  // 0/1 entries, sectors x users

/// Scheduled users split across pilot dimensions, K per dimension.
struct PilotAssignment {
  int pilot_dims = 0;                   // tau
  int users_per_dim = 0;                // K
  std::vector<int> pilot;               // sigma_k per user
  std::vector<int> position;            // column of the user in its group's code
  std::vector<std::vector<int>> groups; // U_sigma

  int users() const { return static_cast<int>(pilot.size()); }
};

/// Uniform random partition of L = K tau users. Throws ConfigError if L != K tau.
PilotAssignment assign_pilots(int users, int pilot_dims, int users_per_dim, Rng& rng);

/// Deterministic assignment: user k goes to dimension k / K.
PilotAssignment assign_pilots_in_order(int pilot_dims, int users_per_dim);

/// Pilot code for one dimension: Q fading blocks by K users.
struct CodeMatrix {
  MatrixXd power;   // C: |p_k(f)|^2
  MatrixXd pilots;  // p_k(f), real positive
  MatrixXd pinv;    // A = (C^T C)^{-1} C^T, computed once
  VectorXd offset;  // delta = A 1

  int blocks() const { return static_cast<int>(power.rows()); }
  int users() const { return static_cast<int>(power.cols()); }
};

/// Full-column-rank positive code with unit mean power per user.
///  K = 1              all-ones column
///  Q a power of two   columns 1 + beta h_j over the non-constant Hadamard
///                     columns (plus 1 - beta h_2 when K = Q), beta = 0.5
///  otherwise          Uniform[0.5, 1.5] entries, column-normalized, redrawn
///                     from a fixed seed until sigma_min / sigma_max > 1e-3
/// Throws UnsupportedConfig for Q < K (that regime needs ON-OFF codes).
CodeMatrix build_code_matrix(int blocks, int users);

void write_code_csv(std::ostream& out, const CodeMatrix& code);

/// Per-user, per-sector, per-block g-vectors.
class SectorChannels {
 public:
  SectorChannels(int sectors, int users, int blocks, int beams);

  int sectors() const { return s_; }
  int users() const { return k_; }
  int blocks() const { return q_; }
  int beams() const { return g_; }

  VectorXcd& at(int s, int k, int f) { return data_[index(s, k, f)]; }
  const VectorXcd& at(int s, int k, int f) const { return data_[index(s, k, f)]; }

  /// IID CN(0, gains(s,k)) entries, independent across blocks.
  static SectorChannels sample(const MatrixXd& gains, int blocks, int beams, Rng& rng);

 private:
  std::size_t index(int s, int k, int f) const { return (static_cast<std::size_t>(s) * k_ + k) * q_ + f; }
  int s_, k_, q_, g_;
  std::vector<VectorXcd> data_;
};

/// ybar_{s,sigma}(f) for every sector, pilot dimension and fading block.
struct SectorObservations {
  int sectors = 0, pilot_dims = 0, blocks = 0, beams = 0;
  double rho_p = 0.0;
  std::vector<VectorXcd> y;

  VectorXcd& at(int s, int sigma, int f) { return y[index(s, sigma, f)]; }
  const VectorXcd& at(int s, int sigma, int f) const { return y[index(s, sigma, f)]; }

 private:
  std::size_t index(int s, int sigma, int f) const {
    return (static_cast<std::size_t>(s) * pilot_dims + sigma) * blocks + f;
  }
};

/// ybar = sqrt(pilot_gain rho_p) sum_{k in U_sigma} p_k(f) g_{s,k}(f) + w,
/// w ~ CN(0, I_g). Noise is omitted when `noiseless` is set.
SectorObservations synthesize_uplink(const SectorChannels& channels, const PilotAssignment& assignment,
                                     const CodeMatrix& code, double rho_p, Rng& rng, bool noiseless = false,
                                     double pilot_gain = 1.0);

/// Orthogonal-training statistic (1/(Q rho_p g)) sum_f |ybar_{s,k}(f)|^2 - 1/rho_p.
/// Requires K = 1.
MatrixXd presence_statistic_orthogonal(const SectorObservations& obs, const PilotAssignment& assignment);

Indicator detect_presence_orthogonal(const SectorObservations& obs, const PilotAssignment& assignment,
                                     double threshold);

/// Least-squares gain estimates from the per-block observation energies:
/// lambda_hat = (1/(rho_p g)) e^T A nu - (1/rho_p) e^T delta.
MatrixXd estimate_gains_nonorthogonal(const SectorObservations& obs, const PilotAssignment& assignment,
                                      const CodeMatrix& code);

/// 1[value >= threshold] elementwise.
Indicator threshold_presence(const MatrixXd& gains, double threshold);

struct DetectionReport {
  Indicator present;                // X_hat
  Indicator resolvable;             // D_hat
  std::vector<int> serving_count;   // N_k
  int served = 0;                   // L'
};

/// D_{s,k} = X_{s,k} prod_{k' in U_sigma_k \ k} (1 - X_{s,k'}).
DetectionReport detect_resolvable(const Indicator& present, const PilotAssignment& assignment);

/// The observation itself; precoders are invariant to its scale.
inline const VectorXcd& raw_channel_estimate(const SectorObservations& obs, int s, int sigma, int f) {
  return obs.at(s, sigma, f);
}

struct ChannelEstimate {
  VectorXcd estimate;
  double mmse_gain = 0.0;  // per-entry variance of the estimate
  double error_var = 0.0;  // per-entry variance of the error
};

/// Per-entry variance of the MMSE estimate for a user with gain `gain` in a
/// pilot group with total gain `group_total`, at effective pilot SNR
/// `pilot_snr` (tau rho_p in the rate model).
double mmse_gain(double gain, double group_total, double pilot_snr);

/// MMSE estimate of user `member` of a pilot group from the group's
/// observation ybar = sqrt(pilot_snr) sum_u g_u + w.
ChannelEstimate mmse_estimate(const VectorXcd& observation, std::span<const double> group_gains, int member,
                              double pilot_snr);

}  // namespace sectorwave
