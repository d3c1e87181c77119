#pragma once

#include "sectorwave/common.hpp"

#include <cstdint>
#include <vector>

namespace sectorwave {

// ---------------------------------------------------------------------------
// Array geometry and DFT sectorization
// ---------------------------------------------------------------------------

struct ArrayGeometry {
  int bs_antennas = 200;     // M
  int user_antennas = 6;     // M~
  double spacing = 0.5;      // antenna spacing in wavelengths
  int sectors = 10;          // S

  int beams_per_sector() const { return bs_antennas / sectors; }

  /// Throws ConfigError unless M, M~, S >= 1, spacing > 0 and S divides M.
  void validate() const;
};

/// Unitary N-point DFT matrix. Column i is the steering vector a(i/N)
/// divided by sqrt(N), i = 0..N-1.
template <typename Real = double>
CMatrix<Real> dft_matrix(int n) {
  CMatrix<Real> f(n, n);
  const Real norm = Real(1) / std::sqrt(static_cast<Real>(n));
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      // Reduce the exponent modulo n before scaling to keep the phase exact.
      const auto k = static_cast<long long>(row) * col % n;
      const Real phase = Real(2) * static_cast<Real>(kPi) * static_cast<Real>(k) / static_cast<Real>(n);
      f(row, col) = std::polar(norm, phase);
    }
  }
  return f;
}

/// ULA response a(theta) with unit-modulus entries exp(j 2 pi n theta).
template <typename Real = double>
CVector<Real> steering_vector(int n, Real theta) {
  CVector<Real> a(n);
  for (int i = 0; i < n; ++i) a(i) = std::polar(Real(1), Real(2) * static_cast<Real>(kPi) * static_cast<Real>(i) * theta);
  return a;
}

/// DFT basis of the BS array split into S blocks of g consecutive columns.
template <typename Real = double>
class SectorBasis {
 public:
  SectorBasis(int bs_antennas, int sectors) : sectors_(sectors) {
    if (bs_antennas < 1 || sectors < 1 || bs_antennas % sectors != 0) {
      throw ConfigError("sector count " + std::to_string(sectors) + " must divide antenna count " +
                        std::to_string(bs_antennas));
    }
    beams_ = bs_antennas / sectors;
    f_ = dft_matrix<Real>(bs_antennas);
  }

  int antennas() const { return static_cast<int>(f_.rows()); }
  int sectors() const { return sectors_; }
  int beams_per_sector() const { return beams_; }

  const CMatrix<Real>& matrix() const { return f_; }

  /// F_s, the M x g block of sector s (0-based).
  auto block(int s) const { return f_.middleCols(static_cast<Eigen::Index>(s) * beams_, beams_); }

  /// g_s = F_s^H h.
  CVector<Real> project(const CVector<Real>& h, int s) const {
    if (h.size() != f_.rows()) throw DomainError("channel length does not match the array");
    return block(s).adjoint() * h;
  }

  /// Sector that contains DFT column i.
  int sector_of_beam(int i) const { return i / beams_; }

 private:
  CMatrix<Real> f_;
  int sectors_ = 1;
  int beams_ = 1;
};

SectorBasis<double> build_sector_basis(const ArrayGeometry& geometry);

/// g_{s,k} = F_s^H h.
VectorXcd sector_project(const VectorXcd& h, const SectorBasis<double>& basis, int s);

// ---------------------------------------------------------------------------
// Physical multipath model
// ---------------------------------------------------------------------------

struct Path {
  std::complex<double> gain;  // beta_n
  double delay = 0.0;         // seconds
  double aoa = 0.0;           // normalized, in [-1/2, 1/2]
  double aod = 0.0;           // normalized, in [-1/2, 1/2]
};

struct PathSet {
  std::vector<Path> paths;

  /// Throws DomainError on negative delays or angles outside [-1/2, 1/2].
  void validate() const;
};

/// h(f; b) = sum_n beta_n (a~^H(aod_n) b) a(aoa_n) exp(-j 2 pi delay_n f).
VectorXcd physical_channel(const PathSet& paths, int bs_antennas, const VectorXcd& beam, double frequency);

/// Random clustered path set: `clusters` clusters of `paths_per_cluster`
/// rays each, Laplacian angular spread `spread` (normalized angle units)
/// around uniformly drawn cluster centres, unit total power.
PathSet random_path_set(int clusters, int paths_per_cluster, double spread, double max_delay, Rng& rng);

// ---------------------------------------------------------------------------
// Virtual (angle-delay sampled) model
// ---------------------------------------------------------------------------

class VirtualChannel {
 public:
  VirtualChannel(int bs_antennas, int user_antennas, int delay_bins, double bandwidth);

  int bs_antennas() const { return m_; }
  int user_antennas() const { return mt_; }
  int delay_bins() const { return l_; }
  double bandwidth() const { return w_; }

  /// Coefficient for AoA bin i, AoD bin m, delay bin l (all 0-based).
  std::complex<double>& at(int i, int m, int l) { return h_[index(i, m, l)]; }
  const std::complex<double>& at(int i, int m, int l) const { return h_[index(i, m, l)]; }

  /// Number of coefficients with magnitude above eps.
  int sparsity(double eps) const;

  /// Channel matrix H(f) = sum H^v(i,m,l) a(i/M) a~^H(m/M~) exp(-j 2 pi l f / W).
  MatrixXcd matrix(double frequency) const;

  /// Number of AoA bins carrying energy above eps_rel * peak once the user
  /// beam is applied, measured on the beam-effective coefficients
  /// sum_m H^v(i,m,l) a~^H(m/M~) b.
  int aoa_support(const VectorXcd& beam, double eps_rel = 1e-6) const;

  /// Sparse random channel: `occupied` (i,m,l) bins with CN(0,1) coefficients.
  static VirtualChannel random_sparse(int bs_antennas, int user_antennas, int delay_bins, double bandwidth,
                                      int occupied, Rng& rng);

 private:
  std::size_t index(int i, int m, int l) const {
    return (static_cast<std::size_t>(i) * mt_ + m) * l_ + l;
  }
  int m_, mt_, l_;
  double w_;
  std::vector<std::complex<double>> h_;
};

/// h(f; b) = H(f) b for the virtual model.
VectorXcd virtual_channel_vector(const VirtualChannel& vchan, const VectorXcd& beam, double frequency);

// ---------------------------------------------------------------------------
// Training beams and the probabilistic connectivity model
// ---------------------------------------------------------------------------

/// Zero-one selection of user-side DFT eigen directions.
struct BeamMask {
  std::vector<std::uint8_t> active;

  int width() const;
  int size() const { return static_cast<int>(active.size()); }

  /// b = F~ c / sqrt(w), unit norm. Throws DomainError when w == 0.
  VectorXcd beam() const;

  static BeamMask eigen(int user_antennas, int direction);
  static BeamMask omni(int user_antennas);
  /// Uniformly random mask among those of the given width.
  static BeamMask random(int user_antennas, int width, Rng& rng);
};

struct ConnectivityParams {
  double p = 0.1;
  double lambda_low = 0.5;
  double lambda_high = 1.5;

  void validate() const;
};

/// Bernoulli links between every (sector, user, eigen direction) and their
/// elemental gains.
class ConnectivityMap {
 public:
  ConnectivityMap() = default;
  ConnectivityMap(int sectors, int users, int user_antennas);

  int sectors() const { return s_; }
  int users() const { return k_; }
  int user_antennas() const { return mt_; }

  bool connected(int s, int k, int m) const { return gain(s, k, m) > 0.0; }
  double gain(int s, int k, int m) const { return gain_[index(s, k, m)]; }
  void set(int s, int k, int m, double gain) { gain_[index(s, k, m)] = gain; }

 private:
  std::size_t index(int s, int k, int m) const {
    return (static_cast<std::size_t>(s) * k_ + k) * mt_ + m;
  }
  int s_ = 0, k_ = 0, mt_ = 0;
  std::vector<double> gain_;
};

ConnectivityMap sample_connectivity(const ConnectivityParams& params, int sectors, int users, int user_antennas,
                                    Rng& rng);

/// lambda_{s,k}(b) = (1/w) sum_m lambda^(m)_{s,k} c_m.
double effective_gain(const ConnectivityMap& map, const BeamMask& mask, int s, int k);

/// Default presence threshold: midpoint of (0, lambda_L / M~).
inline double default_presence_threshold(const ConnectivityParams& params, int user_antennas) {
  return params.lambda_low / (2.0 * user_antennas);
}

/// IID CN(0, gain) vector of length g.
VectorXcd sample_sector_channel(double gain, int beams, Rng& rng);

// ---------------------------------------------------------------------------
// Covariance approximations
// ---------------------------------------------------------------------------

struct CirculantApproximation {
  MatrixXcd covariance;  // F diag(spectrum) F^H
  VectorXd spectrum;     // eigenvalue placed on each DFT column
};

/// Replaces the eigenvectors of a Hermitian PSD R by DFT columns. Each
/// eigenvalue is placed on the DFT column its eigenvector overlaps most
/// (maximum-weight assignment), so the eigenvalue multiset is preserved and
/// the angular location of the energy is kept.
CirculantApproximation circulant_approximation(const MatrixXcd& covariance);

/// Replace each block of g consecutive entries by its mean.
VectorXd piecewise_flat(const VectorXd& spectrum, int sectors);

/// F diag(spectrum) F^H.
MatrixXcd covariance_from_spectrum(const VectorXd& spectrum);

/// Per-sector mean gains lambda_s = (1/g) sum over the sector block.
VectorXd sector_gains(const VectorXd& spectrum, int sectors);

/// Covariance of a physical path set under uncorrelated scattering, seen
/// through beam b: sum_n |alpha_n(b)|^2 a(aoa_n) a(aoa_n)^H.
MatrixXcd path_covariance(const PathSet& paths, int bs_antennas, const VectorXcd& beam);

}  // namespace sectorwave
