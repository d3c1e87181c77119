#pragma once

#include "sectorwave/common.hpp"

#include <Eigen/QR>

#include <span>
#include <vector>

namespace sectorwave {

/// Orthonormal basis of the column span of B, rank decided at
/// 1e-10 * sigma_max.
template <typename Real>
CMatrix<Real> column_space(const CMatrix<Real>& b, Real rank_tol = Real(1e-10)) {
  if (b.cols() == 0) return CMatrix<Real>(b.rows(), 0);
  Eigen::ColPivHouseholderQR<CMatrix<Real>> qr(b);
  const auto& r = qr.matrixQR();
  const Eigen::Index diag = std::min(r.rows(), r.cols());
  const Real top = diag > 0 ? std::abs(r(0, 0)) : Real(0);
  Eigen::Index rank = 0;
  while (rank < diag && std::abs(r(rank, rank)) > rank_tol * top) ++rank;
  CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(b.rows(), rank);
  return q;
}

/// Pi(B) = I - B (B^H B)^{-1} B^H, built from an orthonormal basis of span(B).
template <typename Real>
CMatrix<Real> null_space_projector(const CMatrix<Real>& b, Real rank_tol = Real(1e-10)) {
  const CMatrix<Real> u = column_space<Real>(b, rank_tol);
  return CMatrix<Real>::Identity(b.rows(), b.rows()) - u * u.adjoint();
}

/// Pi(B) x without forming the g x g projector.
template <typename Real>
CVector<Real> project_out(const CMatrix<Real>& b, const CVector<Real>& x, Real rank_tol = Real(1e-10)) {
  const CMatrix<Real> u = column_space<Real>(b, rank_tol);
  return x - u * (u.adjoint() * x);
}

/// Sector precoder V_s: g x L, column k zero for users the sector does not serve.
struct SectorPrecoder {
  MatrixXcd columns;
  std::vector<int> dropped;  // users whose estimate fell inside the interference span
};

/// Zero-forcing precoder for one sector and fading block. `estimates[k]`
/// must be set for every k in `resolvable`; each served column is the
/// projection of its estimate away from the other resolvable estimates,
/// normalized to ||v_k||^2 = 1/(L' N_k).
/// Throws InfeasibleNulling when more users than beams are resolvable.
SectorPrecoder zf_precoder(std::span<const VectorXcd> estimates, std::span<const int> resolvable, int served,
                           std::span<const int> serving_count);

/// Full-array ZF for ideal CSI: columns of H are user channels, each
/// v_k ∝ Pi(H_{-k}) h_k with ||v_k||^2 = 1/L.
MatrixXcd zf_precoder_full(const MatrixXcd& channels);

/// Conjugate beamforming: v_k = h_k / ||h_k|| / sqrt(L).
MatrixXcd cbf_precoder(const MatrixXcd& channels);

/// Coupling c(k, u) = sum_s v_{s,u}^H g_{s,k} between the stream of user u
/// and the receiver of user k. `channels[s]` is g x L (column k = g_{s,k}),
/// `precoders[s]` is g x L.
MatrixXcd stream_coupling(std::span<const MatrixXcd> channels, std::span<const MatrixXcd> precoders);

/// r_k = sqrt(rho_d) sum_s u^T V_s^H g_{s,k} + n_k with n_k ~ CN(0, 1).
VectorXcd downlink_receive(std::span<const MatrixXcd> channels, std::span<const MatrixXcd> precoders, double rho_d,
                           const VectorXcd& data, Rng& rng);

}  // namespace sectorwave
