#include "sectorwave/channel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sectorwave {

void ArrayGeometry::validate() const {
  if (bs_antennas < 1 || user_antennas < 1 || sectors < 1) {
    throw ConfigError("antenna and sector counts must be positive");
  }
  if (!(spacing > 0.0)) throw ConfigError("antenna spacing must be positive");
  if (bs_antennas % sectors != 0) {
    throw ConfigError("sector count " + std::to_string(sectors) + " does not divide " +
                      std::to_string(bs_antennas) + " BS antennas");
  }
}

SectorBasis<double> build_sector_basis(const ArrayGeometry& geometry) {
  geometry.validate();
  return SectorBasis<double>(geometry.bs_antennas, geometry.sectors);
}

VectorXcd sector_project(const VectorXcd& h, const SectorBasis<double>& basis, int s) {
  return basis.project(h, s);
}

void PathSet::validate() const {
  for (const auto& p : paths) {
    if (p.delay < 0.0) throw DomainError("path delay must be nonnegative");
    if (std::abs(p.aoa) > 0.5 || std::abs(p.aod) > 0.5) {
      throw DomainError("normalized path angles must lie in [-1/2, 1/2]");
    }
  }
}

VectorXcd physical_channel(const PathSet& paths, int bs_antennas, const VectorXcd& beam, double frequency) {
  paths.validate();
  const int user_antennas = static_cast<int>(beam.size());
  VectorXcd h = VectorXcd::Zero(bs_antennas);
  for (const auto& p : paths.paths) {
    const std::complex<double> alpha = p.gain * steering_vector<double>(user_antennas, p.aod).dot(beam);
    if (alpha == 0.0) continue;
    const auto delay_phase = std::polar(1.0, -2.0 * kPi * p.delay * frequency);
    h += (alpha * delay_phase) * steering_vector<double>(bs_antennas, p.aoa);
  }
  return h;
}

namespace {

double wrap_angle(double theta) {
  theta -= std::round(theta);
  return std::clamp(theta, -0.5, 0.5);
}

}  // namespace

PathSet random_path_set(int clusters, int paths_per_cluster, double spread, double max_delay, Rng& rng) {
  std::uniform_real_distribution<double> centre(-0.5, 0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> lap(1.0);
  PathSet set;
  const int n = clusters * paths_per_cluster;
  for (int c = 0; c < clusters; ++c) {
    const double aoa0 = centre(rng);
    const double aod0 = centre(rng);
    const double delay0 = max_delay * unit(rng);
    for (int r = 0; r < paths_per_cluster; ++r) {
      const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
      Path p;
      p.aoa = wrap_angle(aoa0 + sign * spread * lap(rng));
      p.aod = wrap_angle(aod0 + (unit(rng) - 0.5) * spread);
      p.delay = delay0;
      p.gain = complex_normal(rng, 1.0 / n);
      set.paths.push_back(p);
    }
  }
  return set;
}

VirtualChannel::VirtualChannel(int bs_antennas, int user_antennas, int delay_bins, double bandwidth)
    : m_(bs_antennas), mt_(user_antennas), l_(delay_bins), w_(bandwidth) {
  if (m_ < 1 || mt_ < 1 || l_ < 1 || !(w_ > 0.0)) throw DomainError("invalid virtual channel dimensions");
  h_.assign(static_cast<std::size_t>(m_) * mt_ * l_, {0.0, 0.0});
}

int VirtualChannel::sparsity(double eps) const {
  return static_cast<int>(std::count_if(h_.begin(), h_.end(), [eps](const auto& c) { return std::abs(c) > eps; }));
}

MatrixXcd VirtualChannel::matrix(double frequency) const {
  MatrixXcd h = MatrixXcd::Zero(m_, mt_);
  for (int i = 0; i < m_; ++i) {
    const VectorXcd a = steering_vector<double>(m_, static_cast<double>(i) / m_);
    for (int m = 0; m < mt_; ++m) {
      std::complex<double> coeff{0.0, 0.0};
      for (int l = 0; l < l_; ++l) {
        coeff += at(i, m, l) * std::polar(1.0, -2.0 * kPi * l * frequency / w_);
      }
      if (coeff == 0.0) continue;
      const VectorXcd at_ = steering_vector<double>(mt_, static_cast<double>(m) / mt_);
      h += coeff * a * at_.adjoint();
    }
  }
  return h;
}

int VirtualChannel::aoa_support(const VectorXcd& beam, double eps_rel) const {
  if (beam.size() != mt_) throw DomainError("beam length does not match the user array");
  // Response of the AoD bins to the beam, a~^H(m/M~) b.
  VectorXcd response(mt_);
  for (int m = 0; m < mt_; ++m) response(m) = steering_vector<double>(mt_, static_cast<double>(m) / mt_).dot(beam);

  std::vector<double> peak(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    for (int l = 0; l < l_; ++l) {
      std::complex<double> e{0.0, 0.0};
      for (int m = 0; m < mt_; ++m) e += at(i, m, l) * response(m);
      peak[i] = std::max(peak[i], std::abs(e));
    }
  }
  const double top = *std::max_element(peak.begin(), peak.end());
  if (top == 0.0) return 0;
  return static_cast<int>(std::count_if(peak.begin(), peak.end(), [&](double v) { return v > eps_rel * top; }));
}

VirtualChannel VirtualChannel::random_sparse(int bs_antennas, int user_antennas, int delay_bins, double bandwidth,
                                             int occupied, Rng& rng) {
  VirtualChannel v(bs_antennas, user_antennas, delay_bins, bandwidth);
  std::uniform_int_distribution<int> bi(0, bs_antennas - 1), bm(0, user_antennas - 1), bl(0, delay_bins - 1);
  for (int n = 0; n < occupied; ++n) {
    v.at(bi(rng), bm(rng), bl(rng)) += complex_normal(rng, 1.0);
  }
  return v;
}

VectorXcd virtual_channel_vector(const VirtualChannel& vchan, const VectorXcd& beam, double frequency) {
  if (beam.size() != vchan.user_antennas()) throw DomainError("beam length does not match the user array");
  return vchan.matrix(frequency) * beam;
}

// ---------------------------------------------------------------------------

int BeamMask::width() const { return static_cast<int>(std::count(active.begin(), active.end(), 1)); }

VectorXcd BeamMask::beam() const {
  const int w = width();
  if (w == 0) throw DomainError("beam mask activates no direction");
  const int n = size();
  VectorXcd b = VectorXcd::Zero(n);
  for (int m = 0; m < n; ++m) {
    if (active[m]) b += steering_vector<double>(n, static_cast<double>(m) / n) / std::sqrt(static_cast<double>(n));
  }
  return b / std::sqrt(static_cast<double>(w));
}

BeamMask BeamMask::eigen(int user_antennas, int direction) {
  BeamMask mask;
  mask.active.assign(user_antennas, 0);
  mask.active.at(direction) = 1;
  return mask;
}

BeamMask BeamMask::omni(int user_antennas) {
  BeamMask mask;
  mask.active.assign(user_antennas, 1);
  return mask;
}

BeamMask BeamMask::random(int user_antennas, int width, Rng& rng) {
  if (width < 1 || width > user_antennas) throw ConfigError("beam width must lie in [1, M~]");
  std::vector<int> idx(user_antennas);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first `width` entries are a uniform subset.
  for (int i = 0; i < width; ++i) {
    std::uniform_int_distribution<int> pick(i, user_antennas - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  BeamMask mask;
  mask.active.assign(user_antennas, 0);
  for (int i = 0; i < width; ++i) mask.active[idx[i]] = 1;
  return mask;
}

void ConnectivityParams::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("connection probability p must lie in (0, 1)");
  if (!(lambda_low > 0.0 && lambda_high > lambda_low)) {
    throw ConfigError("gain bounds must satisfy lambda_high > lambda_low > 0");
  }
}

ConnectivityMap::ConnectivityMap(int sectors, int users, int user_antennas)
    : s_(sectors), k_(users), mt_(user_antennas) {
  gain_.assign(static_cast<std::size_t>(s_) * k_ * mt_, 0.0);
}

ConnectivityMap sample_connectivity(const ConnectivityParams& params, int sectors, int users, int user_antennas,
                                    Rng& rng) {
  params.validate();
  ConnectivityMap map(sectors, users, user_antennas);
  std::bernoulli_distribution link(params.p);
  std::uniform_real_distribution<double> gain(params.lambda_low, params.lambda_high);
  for (int s = 0; s < sectors; ++s) {
    for (int k = 0; k < users; ++k) {
      for (int m = 0; m < user_antennas; ++m) {
        if (link(rng)) map.set(s, k, m, gain(rng));
      }
    }
  }
  return map;
}

double effective_gain(const ConnectivityMap& map, const BeamMask& mask, int s, int k) {
  const int w = mask.width();
  if (w == 0) throw DomainError("beam mask activates no direction");
  double sum = 0.0;
  for (int m = 0; m < mask.size(); ++m) {
    if (mask.active[m]) sum += map.gain(s, k, m);
  }
  return sum / w;
}

VectorXcd sample_sector_channel(double gain, int beams, Rng& rng) {
  if (gain < 0.0) throw DomainError("sector gain must be nonnegative");
  return complex_normal_vector(rng, beams, gain);
}

// ---------------------------------------------------------------------------

namespace {

// Hungarian algorithm (shortest augmenting path), minimizing total cost on
// a square matrix. Returns assignment row -> column.
std::vector<int> min_cost_assignment(const MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

void require_hermitian(const MatrixXcd& r) {
  if (r.rows() != r.cols()) throw DomainError("covariance must be square");
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  const double asym = (r - r.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) throw DomainError("covariance is not Hermitian (asymmetry " + std::to_string(asym) + ")");
}

}  // namespace

CirculantApproximation circulant_approximation(const MatrixXcd& covariance) {
  require_hermitian(covariance);
  const int m = static_cast<int>(covariance.rows());
  const MatrixXcd herm = 0.5 * (covariance + covariance.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(herm);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");

  const MatrixXcd f = dft_matrix<double>(m);
  // overlap(j, i) = |f_i^H u_j|^2; maximize total overlap.
  const MatrixXd overlap = (f.adjoint() * eig.eigenvectors()).cwiseAbs2().transpose();
  const std::vector<int> placement = min_cost_assignment(-overlap);

  CirculantApproximation out;
  out.spectrum = VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) out.spectrum(placement[j]) = eig.eigenvalues()(j);
  out.covariance = f * out.spectrum.cast<std::complex<double>>().asDiagonal() * f.adjoint();
  return out;
}

VectorXd piecewise_flat(const VectorXd& spectrum, int sectors) {
  const auto m = spectrum.size();
  if (sectors < 1 || m % sectors != 0) throw ConfigError("sector count must divide the spectrum length");
  const auto g = m / sectors;
  VectorXd flat(m);
  for (int s = 0; s < sectors; ++s) flat.segment(s * g, g).setConstant(spectrum.segment(s * g, g).mean());
  return flat;
}

MatrixXcd covariance_from_spectrum(const VectorXd& spectrum) {
  const MatrixXcd f = dft_matrix<double>(static_cast<int>(spectrum.size()));
  return f * spectrum.cast<std::complex<double>>().asDiagonal() * f.adjoint();
}

VectorXd sector_gains(const VectorXd& spectrum, int sectors) {
  const auto m = spectrum.size();
  if (sectors < 1 || m % sectors != 0) throw ConfigError("sector count must divide the spectrum length");
  const auto g = m / sectors;
  VectorXd out(sectors);
  for (int s = 0; s < sectors; ++s) out(s) = spectrum.segment(s * g, g).mean();
  return out;
}

MatrixXcd path_covariance(const PathSet& paths, int bs_antennas, const VectorXcd& beam) {
  paths.validate();
  const int user_antennas = static_cast<int>(beam.size());
  MatrixXcd r = MatrixXcd::Zero(bs_antennas, bs_antennas);
  for (const auto& p : paths.paths) {
    const double power = std::norm(p.gain * steering_vector<double>(user_antennas, p.aod).dot(beam));
    if (power == 0.0) continue;
    const VectorXcd a = steering_vector<double>(bs_antennas, p.aoa);
    r += power * a * a.adjoint();
  }
  return r;
}

}  // namespace sectorwave
