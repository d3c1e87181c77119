#include "sectorwave/training.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

namespace sectorwave {

PilotAssignment assign_pilots(int users, int pilot_dims, int users_per_dim, Rng& rng) {
  if (pilot_dims < 1 || users_per_dim < 1 || users != pilot_dims * users_per_dim) {
    throw ConfigError("scheduled users (" + std::to_string(users) + ") must equal K*tau = " +
                      std::to_string(users_per_dim) + "*" + std::to_string(pilot_dims));
  }
  std::vector<int> order(users);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  PilotAssignment a;
  a.pilot_dims = pilot_dims;
  a.users_per_dim = users_per_dim;
  a.pilot.assign(users, 0);
  a.position.assign(users, 0);
  a.groups.assign(pilot_dims, {});
  for (int j = 0; j < users; ++j) {
    const int sigma = j / users_per_dim;
    a.pilot[order[j]] = sigma;
    a.position[order[j]] = j % users_per_dim;
    a.groups[sigma].push_back(order[j]);
  }
  return a;
}

PilotAssignment assign_pilots_in_order(int pilot_dims, int users_per_dim) {
  PilotAssignment a;
  a.pilot_dims = pilot_dims;
  a.users_per_dim = users_per_dim;
  a.groups.assign(pilot_dims, {});
  for (int k = 0; k < pilot_dims * users_per_dim; ++k) {
    a.pilot.push_back(k / users_per_dim);
    a.position.push_back(k % users_per_dim);
    a.groups[k / users_per_dim].push_back(k);
  }
  return a;
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Sylvester Hadamard matrix of order n (power of two).
MatrixXd hadamard(int n) {
  MatrixXd h = MatrixXd::Ones(1, 1);
  while (h.rows() < n) {
    const auto m = h.rows();
    MatrixXd next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

double condition_ratio(const MatrixXd& c) {
  Eigen::JacobiSVD<MatrixXd> svd(c);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) / sv(0);
}

}  // namespace

CodeMatrix build_code_matrix(int blocks, int users) {
  if (users < 1 || blocks < 1) throw ConfigError("code dimensions must be positive");
  if (blocks < users) {
    throw UnsupportedConfig("Q = " + std::to_string(blocks) + " < K = " + std::to_string(users) +
                            " needs ON-OFF codes, which are not supported");
  }
  CodeMatrix code;
  if (users == 1) {
    code.power = MatrixXd::Ones(blocks, 1);
  } else if (is_power_of_two(blocks)) {
    constexpr double beta = 0.5;
    const MatrixXd h = hadamard(blocks);
    code.power.resize(blocks, users);
    for (int k = 0; k < users; ++k) {
      // Skip the constant column; the extra column needed when K = Q is the
      // mirror of the first non-constant one.
      const VectorXd col = (k + 1 < blocks) ? VectorXd(h.col(k + 1)) : VectorXd(-h.col(1));
      code.power.col(k) = VectorXd::Ones(blocks) + beta * col;
    }
  } else {
    Rng rng(splitmix64(0x5eed0000ULL + static_cast<std::uint64_t>(blocks) * 1009 + users));
    std::uniform_real_distribution<double> entry(0.5, 1.5);
    do {
      code.power.resize(blocks, users);
      for (int f = 0; f < blocks; ++f)
        for (int k = 0; k < users; ++k) code.power(f, k) = entry(rng);
      for (int k = 0; k < users; ++k) code.power.col(k) /= code.power.col(k).mean();
    } while (condition_ratio(code.power) <= 1e-3);
  }

  if (condition_ratio(code.power) <= 1e-8) throw NumericError("code matrix is rank deficient");
  code.pilots = code.power.cwiseSqrt();
  code.pinv = (code.power.transpose() * code.power).ldlt().solve(code.power.transpose());
  code.offset = code.pinv * VectorXd::Ones(blocks);
  return code;
}

void write_code_csv(std::ostream& out, const CodeMatrix& code) {
  out << "block";
  for (int k = 0; k < code.users(); ++k) out << ",user" << k;
  out << '\n' << std::setprecision(17);
  for (int f = 0; f < code.blocks(); ++f) {
    out << f;
    for (int k = 0; k < code.users(); ++k) out << ',' << code.power(f, k);
    out << '\n';
  }
}

SectorChannels::SectorChannels(int sectors, int users, int blocks, int beams)
    : s_(sectors), k_(users), q_(blocks), g_(beams) {
  data_.assign(static_cast<std::size_t>(s_) * k_ * q_, VectorXcd::Zero(g_));
}

SectorChannels SectorChannels::sample(const MatrixXd& gains, int blocks, int beams, Rng& rng) {
  SectorChannels ch(static_cast<int>(gains.rows()), static_cast<int>(gains.cols()), blocks, beams);
  for (int s = 0; s < ch.s_; ++s)
    for (int k = 0; k < ch.k_; ++k) {
      if (gains(s, k) < 0.0) throw DomainError("sector gain must be nonnegative");
      if (gains(s, k) == 0.0) continue;
      for (int f = 0; f < blocks; ++f) ch.at(s, k, f) = complex_normal_vector(rng, beams, gains(s, k));
    }
  return ch;
}

SectorObservations synthesize_uplink(const SectorChannels& channels, const PilotAssignment& assignment,
                                     const CodeMatrix& code, double rho_p, Rng& rng, bool noiseless,
                                     double pilot_gain) {
  if (channels.users() != assignment.users()) throw DomainError("channel set does not match the pilot assignment");
  if (code.blocks() != channels.blocks() || code.users() != assignment.users_per_dim) {
    throw DomainError("code matrix does not match the slot dimensions");
  }
  SectorObservations obs;
  obs.sectors = channels.sectors();
  obs.pilot_dims = assignment.pilot_dims;
  obs.blocks = channels.blocks();
  obs.beams = channels.beams();
  obs.rho_p = rho_p;
  obs.y.assign(static_cast<std::size_t>(obs.sectors) * obs.pilot_dims * obs.blocks, VectorXcd());

  const double amp = std::sqrt(pilot_gain * rho_p);
  for (int s = 0; s < obs.sectors; ++s) {
    for (int sigma = 0; sigma < obs.pilot_dims; ++sigma) {
      for (int f = 0; f < obs.blocks; ++f) {
        VectorXcd y = noiseless ? VectorXcd(VectorXcd::Zero(obs.beams)) : complex_normal_vector(rng, obs.beams, 1.0);
        for (int k : assignment.groups[sigma]) {
          y += (amp * code.pilots(f, assignment.position[k])) * channels.at(s, k, f);
        }
        obs.at(s, sigma, f) = std::move(y);
      }
    }
  }
  return obs;
}

MatrixXd presence_statistic_orthogonal(const SectorObservations& obs, const PilotAssignment& assignment) {
  if (assignment.users_per_dim != 1) throw ConfigError("orthogonal detector requires one user per pilot dimension");
  MatrixXd stat(obs.sectors, assignment.users());
  const double norm = 1.0 / (obs.blocks * obs.rho_p * obs.beams);
  for (int s = 0; s < obs.sectors; ++s) {
    for (int k = 0; k < assignment.users(); ++k) {
      double energy = 0.0;
      for (int f = 0; f < obs.blocks; ++f) energy += obs.at(s, assignment.pilot[k], f).squaredNorm();
      stat(s, k) = norm * energy - 1.0 / obs.rho_p;
    }
  }
  return stat;
}

Indicator detect_presence_orthogonal(const SectorObservations& obs, const PilotAssignment& assignment,
                                     double threshold) {
  return threshold_presence(presence_statistic_orthogonal(obs, assignment), threshold);
}

MatrixXd estimate_gains_nonorthogonal(const SectorObservations& obs, const PilotAssignment& assignment,
                                      const CodeMatrix& code) {
  if (code.blocks() != obs.blocks || code.users() != assignment.users_per_dim) {
    throw DomainError("code matrix does not match the observations");
  }
  MatrixXd est(obs.sectors, assignment.users());
  VectorXd energy(obs.blocks);
  for (int s = 0; s < obs.sectors; ++s) {
    for (int sigma = 0; sigma < obs.pilot_dims; ++sigma) {
      for (int f = 0; f < obs.blocks; ++f) energy(f) = obs.at(s, sigma, f).squaredNorm();
      const VectorXd lam = (code.pinv * energy) / (obs.rho_p * obs.beams) - code.offset / obs.rho_p;
      for (int k : assignment.groups[sigma]) est(s, k) = lam(assignment.position[k]);
    }
  }
  return est;
}

Indicator threshold_presence(const MatrixXd& gains, double threshold) {
  return (gains.array() >= threshold).cast<int>().matrix();
}

DetectionReport detect_resolvable(const Indicator& present, const PilotAssignment& assignment) {
  if (present.cols() != assignment.users()) throw DomainError("presence matrix does not match the assignment");
  DetectionReport r;
  r.present = present;
  r.resolvable = Indicator::Zero(present.rows(), present.cols());
  for (int s = 0; s < present.rows(); ++s) {
    for (const auto& group : assignment.groups) {
      int count = 0;
      int who = -1;
      for (int k : group) {
        if (present(s, k)) {
          ++count;
          who = k;
        }
      }
      if (count == 1) r.resolvable(s, who) = 1;
    }
  }
  r.serving_count.assign(present.cols(), 0);
  for (int k = 0; k < present.cols(); ++k) {
    r.serving_count[k] = r.resolvable.col(k).sum();
    if (r.serving_count[k] > 0) ++r.served;
  }
  return r;
}

double mmse_gain(double gain, double group_total, double pilot_snr) {
  if (gain < 0.0 || group_total < 0.0) throw DomainError("channel gains must be nonnegative");
  return pilot_snr * gain * gain / (pilot_snr * group_total + 1.0);
}

ChannelEstimate mmse_estimate(const VectorXcd& observation, std::span<const double> group_gains, int member,
                              double pilot_snr) {
  double total = 0.0;
  for (double g : group_gains) {
    if (g < 0.0) throw DomainError("channel gains must be nonnegative");
    total += g;
  }
  const double gain = group_gains[member];
  ChannelEstimate e;
  const double scale = std::sqrt(pilot_snr) * gain / (pilot_snr * total + 1.0);
  e.estimate = scale * observation;
  e.mmse_gain = mmse_gain(gain, total, pilot_snr);
  e.error_var = gain - e.mmse_gain;
  return e;
}

}  // namespace sectorwave
