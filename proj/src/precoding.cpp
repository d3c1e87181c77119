#include "sectorwave/precoding.hpp"

#include <cmath>

namespace sectorwave {

SectorPrecoder zf_precoder(std::span<const VectorXcd> estimates, std::span<const int> resolvable, int served,
                           std::span<const int> serving_count) {
  const int users = static_cast<int>(estimates.size());
  SectorPrecoder out;
  if (resolvable.empty()) {
    out.columns = MatrixXcd::Zero(0, users);
    return out;
  }
  const auto beams = estimates[resolvable.front()].size();
  out.columns = MatrixXcd::Zero(beams, users);
  if (static_cast<Eigen::Index>(resolvable.size()) > beams) {
    throw InfeasibleNulling(std::to_string(resolvable.size()) + " resolvable users exceed " + std::to_string(beams) +
                            " sector beams");
  }
  if (served < 1) throw DomainError("served count must be positive when a sector serves users");

  MatrixXcd others(beams, static_cast<Eigen::Index>(resolvable.size()) - 1);
  for (std::size_t i = 0; i < resolvable.size(); ++i) {
    const int k = resolvable[i];
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < resolvable.size(); ++j) {
      if (j != i) others.col(c++) = estimates[resolvable[j]];
    }
    const VectorXcd& est = estimates[k];
    const VectorXcd v = project_out<double>(others, est);
    const double norm = v.norm();
    if (!(norm > 1e-12 * est.norm()) || norm == 0.0) {
      out.dropped.push_back(k);
      continue;
    }
    if (serving_count[k] < 1) throw DomainError("resolvable user has no serving count");
    out.columns.col(k) = v / (norm * std::sqrt(static_cast<double>(served) * serving_count[k]));
  }
  return out;
}

MatrixXcd zf_precoder_full(const MatrixXcd& channels) {
  const auto users = channels.cols();
  if (users > channels.rows()) throw InfeasibleNulling("more users than antennas");
  MatrixXcd v(channels.rows(), users);
  MatrixXcd others(channels.rows(), users - 1);
  for (Eigen::Index k = 0; k < users; ++k) {
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < users; ++j)
      if (j != k) others.col(c++) = channels.col(j);
    const VectorXcd p = project_out<double>(others, channels.col(k));
    const double norm = p.norm();
    if (!(norm > 1e-12 * channels.col(k).norm())) throw NumericError("user channel lies in the span of the others");
    v.col(k) = p / (norm * std::sqrt(static_cast<double>(users)));
  }
  return v;
}

MatrixXcd cbf_precoder(const MatrixXcd& channels) {
  const auto users = channels.cols();
  MatrixXcd v(channels.rows(), users);
  for (Eigen::Index k = 0; k < users; ++k) {
    const double norm = channels.col(k).norm();
    if (norm == 0.0) throw NumericError("zero channel estimate for user " + std::to_string(k));
    v.col(k) = channels.col(k) / (norm * std::sqrt(static_cast<double>(users)));
  }
  return v;
}

MatrixXcd stream_coupling(std::span<const MatrixXcd> channels, std::span<const MatrixXcd> precoders) {
  if (channels.size() != precoders.size() || channels.empty()) throw DomainError("sector count mismatch");
  const auto users = channels.front().cols();
  MatrixXcd c = MatrixXcd::Zero(users, precoders.front().cols());
  for (std::size_t s = 0; s < channels.size(); ++s) {
    if (precoders[s].rows() == 0) continue;
    // (V_s^H G_s)(u, k) = v_{s,u}^H g_{s,k}
    c += (precoders[s].adjoint() * channels[s]).transpose();
  }
  return c;
}

VectorXcd downlink_receive(std::span<const MatrixXcd> channels, std::span<const MatrixXcd> precoders, double rho_d,
                           const VectorXcd& data, Rng& rng) {
  const MatrixXcd c = stream_coupling(channels, precoders);
  VectorXcd r = std::sqrt(rho_d) * (c * data);
  for (Eigen::Index k = 0; k < r.size(); ++k) r(k) += complex_normal(rng, 1.0);
  return r;
}

}  // namespace sectorwave
