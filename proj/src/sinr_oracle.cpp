#include "sectorwave/precoding.hpp"
#include "sectorwave/rates.hpp"
#include "sectorwave/training.hpp"

#include <algorithm>
#include <cmath>

namespace sectorwave {

namespace {

struct Running {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double stderr_() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

TermEstimates monte_carlo_terms(const DownlinkScenario& sc, int k, long samples, std::uint64_t seed) {
  sc.validate();
  const int S = sc.sectors();
  const int K = sc.users();
  const int g = sc.beams;
  if (k < 0 || k >= K) throw DomainError("user index out of range");
  int groups = sc.pilot_dims;
  for (int u = 0; u < K; ++u) groups = std::max(groups, sc.group[u] + 1);
  const double amp = std::sqrt(sc.pilot_snr);
  const int own = sc.group[k];

  std::vector<double> om(S, 0.0), gamma_k(S, 0.0);
  for (int s = 0; s < S; ++s) {
    double total = 0.0;
    for (int u = 0; u < K; ++u)
      if (sc.group[u] == own) total += sc.gains(s, u);
    gamma_k[s] = mmse_gain(sc.gains(s, k), total, sc.pilot_snr);
    if (sc.power(s, k) > 0.0) om[s] = omega(g, static_cast<int>(sc.nulling[s].size()));
  }

  Running d_re, d_sq, z, chi;
  double residual = 0.0;
  std::vector<VectorXcd> h(static_cast<std::size_t>(S) * K);
  std::vector<VectorXcd> y(static_cast<std::size_t>(S) * groups);
  std::vector<VectorXcd> dir(static_cast<std::size_t>(S) * groups);  // unit Pi(B) y per nulled group

  for (long n = 0; n < samples; ++n) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(n), 0);
    for (int s = 0; s < S; ++s) {
      for (int u = 0; u < K; ++u) h[s * K + u] = complex_normal_vector(rng, g, sc.gains(s, u));
      for (int q = 0; q < groups; ++q) y[s * groups + q] = complex_normal_vector(rng, g, 1.0);
      for (int u = 0; u < K; ++u) y[s * groups + sc.group[u]] += amp * h[s * K + u];

      // Column q of Y (Y^H Y)^{-1} is parallel to Pi(Y_{-q}) y_q, the ZF
      // direction of group q against the other nulled groups.
      const auto& nulled = sc.nulling[s];
      const auto nq = static_cast<Eigen::Index>(nulled.size());
      if (nq == 0) continue;
      MatrixXcd ymat(g, nq);
      for (Eigen::Index c = 0; c < nq; ++c) ymat.col(c) = y[s * groups + nulled[c]];
      const MatrixXcd gram = ymat.adjoint() * ymat;
      const MatrixXcd w = ymat * gram.ldlt().solve(MatrixXcd::Identity(nq, nq));
      for (Eigen::Index c = 0; c < nq; ++c) {
        const double norm = w.col(c).norm();
        dir[s * groups + nulled[c]] = norm > 0.0 ? VectorXcd(w.col(c) / norm) : VectorXcd(VectorXcd::Zero(g));
      }
    }

    // Coupling of user k's receiver to every stream, coherent over sectors.
    std::vector<std::complex<double>> coupling(K, 0.0);
    for (int s = 0; s < S; ++s) {
      const VectorXcd& hk = h[s * K + k];
      for (int u = 0; u < K; ++u) {
        const double eta = sc.power(s, u);
        if (eta <= 0.0 || sc.gains(s, u) <= 0.0) continue;
        // g_hat_{s,u} is a positive multiple of y_{s,G(u)}, so v_{s,u} only
        // depends on the pilot group.
        const VectorXcd& v = dir[s * groups + sc.group[u]];
        coupling[u] += std::sqrt(eta) * v.dot(hk);
      }
    }
    const double rho = sc.rho_d;
    const std::complex<double> d = std::sqrt(rho) * coupling[k];
    double interference = sc.noise_var;
    for (int u = 0; u < K; ++u)
      if (u != k) interference += rho * std::norm(coupling[u]);
    d_re.add(d.real());
    d_sq.add(std::norm(d));
    z.add(interference);

    for (int s = 0; s < S; ++s) {
      if (sc.power(s, k) <= 0.0 || gamma_k[s] <= 0.0) continue;
      double group_total = 0.0;
      for (int u = 0; u < K; ++u)
        if (sc.group[u] == own) group_total += sc.gains(s, u);
      const double c = amp * sc.gains(s, k) / (sc.pilot_snr * group_total + 1.0);
      const VectorXcd& v = dir[s * groups + own];
      const double proj = c * std::abs(v.dot(y[s * groups + own]));
      chi.add(proj / (std::sqrt(gamma_k[s]) * om[s]));
      if (!contains(sc.nulling[s], own)) continue;
      const VectorXcd est = c * y[s * groups + own];
      for (int u = 0; u < K; ++u) {
        if (sc.group[u] == own || sc.power(s, u) <= 0.0) continue;
        const std::complex<double> leak = dir[s * groups + sc.group[u]].dot(est);
        residual = std::max(residual, sc.power(s, u) * std::norm(leak));
      }
    }
  }

  TermEstimates e;
  e.mean_signal = d_re.mean;
  e.mean_signal_stderr = d_re.stderr_();
  e.second_moment = d_sq.mean;
  e.second_moment_stderr = d_sq.stderr_();
  e.interference_noise = z.mean;
  e.interference_noise_stderr = z.stderr_();
  e.chi_mean_ratio = chi.mean;
  e.nulled_residual = residual;
  return e;
}

}  // namespace sectorwave
