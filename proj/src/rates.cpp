#include "sectorwave/rates.hpp"

#include "sectorwave/precoding.hpp"
#include "sectorwave/training.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sectorwave {

double q_prob(int width, double p) {
  if (width <= 0) return 0.0;
  // p sum_j (1 - p)^j: positive terms only, and q(1) = p bit for bit.
  double sum = 0.0, term = 1.0;
  for (int j = 0; j < width; ++j) {
    sum += term;
    term *= 1.0 - p;
  }
  return p * sum;
}

double mg_closed_form(int width, int users_per_dim, double p, int sectors) {
  const double q = q_prob(width, p);
  const double alone = q * std::pow(1.0 - q, users_per_dim - 1);
  return users_per_dim * (1.0 - std::pow(1.0 - alone, sectors));
}

namespace {

// Welford accumulator.
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

}  // namespace

MgEstimate mg_monte_carlo(const MgScenario& sc, long slots, std::uint64_t seed) {
  sc.connectivity.validate();
  if (sc.width < 1 || sc.width > sc.user_antennas) throw ConfigError("beam width must lie in [1, M~]");
  const double threshold =
      sc.threshold > 0.0 ? sc.threshold : default_presence_threshold(sc.connectivity, sc.user_antennas);
  const int users = sc.pilot_dims * sc.users_per_dim;
  const PilotAssignment assignment = assign_pilots_in_order(sc.pilot_dims, sc.users_per_dim);

  Running raw;
  Indicator present(sc.sectors, users);
  std::bernoulli_distribution link(sc.connectivity.p);
  std::uniform_real_distribution<double> level(sc.connectivity.lambda_low, sc.connectivity.lambda_high);
  for (long t = 0; t < slots; ++t) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t), 0);
    // Links of directions outside a user's mask never reach the BS, so only
    // the w masked directions are drawn.
    for (int k = 0; k < users; ++k) {
      const BeamMask mask = BeamMask::random(sc.user_antennas, sc.width, rng);
      for (int s = 0; s < sc.sectors; ++s) {
        double sum = 0.0;
        for (int m = 0; m < mask.size(); ++m)
          if (mask.active[m] && link(rng)) sum += level(rng);
        present(s, k) = sum / sc.width >= threshold ? 1 : 0;
      }
    }
    raw.add(detect_resolvable(present, assignment).served);
  }
  MgEstimate e;
  e.slots = slots;
  e.few_slots = slots < 100;
  e.raw = raw.mean;
  e.raw_stderr = raw.stderr_();
  e.per_dim = raw.mean / sc.pilot_dims;
  e.per_dim_stderr = e.raw_stderr / sc.pilot_dims;
  return e;
}

double omega(int beams, int nulling_dims) {
  if (nulling_dims < 1 || beams < nulling_dims) {
    throw DomainError("Omega needs g >= K_s >= 1 (g = " + std::to_string(beams) +
                      ", K_s = " + std::to_string(nulling_dims) + ")");
  }
  const double m = beams - nulling_dims;
  return std::exp(std::lgamma(m + 1.5) - std::lgamma(m + 1.0));
}

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + name);
}

}  // namespace

SinrResult sinr_closed_form(const SinrTerms& t) {
  const int g = t.beams;
  const auto n_sectors = t.sectors.size();
  for (const auto& u : t.copilot_power) {
    if (u.size() != n_sectors) throw DomainError("co-pilot power vector has the wrong sector count");
  }
  // Omega and the residual chi-square spread (g - K_s + 1 - Omega^2) per
  // sector, evaluated only where the sector transmits to someone relevant.
  std::vector<double> om(n_sectors, 0.0), spread(n_sectors, 0.0);
  for (std::size_t s = 0; s < n_sectors; ++s) {
    bool active = t.sectors[s].power > 0.0;
    for (const auto& u : t.copilot_power) active = active || u[s] > 0.0;
    if (!active) continue;
    const int ks = t.sectors[s].nulling_dims;
    om[s] = omega(g, ks);
    spread[s] = g - ks + 1 - om[s] * om[s];
  }

  double amp = 0.0, own_spread = 0.0, own_error = 0.0;
  double leak_error = 0.0, leak_unnulled = 0.0, copilot = 0.0;
  for (std::size_t s = 0; s < n_sectors; ++s) {
    const auto& st = t.sectors[s];
    if (st.power > 0.0) {
      amp += std::sqrt(st.power * st.mmse_gain) * om[s];
      own_spread += st.power * st.mmse_gain * spread[s];
      own_error += st.power * st.error_var;
    }
    leak_error += st.other_power * st.error_var;
    if (!st.nulls_own_pilot) leak_unnulled += st.other_group_power * st.mmse_gain;
  }
  for (const auto& u : t.copilot_power) {
    double a = 0.0, sp = 0.0;
    for (std::size_t s = 0; s < n_sectors; ++s) {
      if (u[s] <= 0.0) continue;
      a += std::sqrt(u[s] * t.sectors[s].mmse_gain) * om[s];
      sp += u[s] * t.sectors[s].mmse_gain * spread[s];
    }
    copilot += sp + a * a;
  }

  SinrResult r;
  r.mean_signal = std::sqrt(t.rho_d) * amp;
  r.second_moment = t.rho_d * (amp * amp + own_spread + own_error);
  r.interference_noise = t.noise_var + t.rho_d * (leak_error + leak_unnulled + copilot);
  require_finite(r.mean_signal, "mean signal E[D_k]");
  require_finite(r.second_moment, "signal second moment E[|D_k|^2]");
  require_finite(r.interference_noise, "interference-plus-noise variance");
  if (!(r.interference_noise > 0.0)) throw NumericError("interference-plus-noise variance must be positive");
  r.sinr = r.second_moment / r.interference_noise;
  return r;
}

SinrTerms scale_terms(const SinrTerms& terms, int n) {
  if (n < 1) throw DomainError("scaling factor must be positive");
  SinrTerms out = terms;
  out.beams = terms.beams * n;
  for (auto& st : out.sectors) {
    st.nulling_dims *= n;
    st.power /= n;
  }
  for (auto& u : out.copilot_power)
    for (auto& p : u) p /= n;
  return out;
}

double sinr_asymptotic(const SinrTerms& t) {
  const auto n_sectors = t.sectors.size();
  auto dof = [&](std::size_t s) { return std::max(0, t.beams - t.sectors[s].nulling_dims); };
  double amp = 0.0, leak_error = 0.0, leak_unnulled = 0.0, copilot = 0.0;
  for (std::size_t s = 0; s < n_sectors; ++s) {
    const auto& st = t.sectors[s];
    if (st.power > 0.0) amp += std::sqrt(st.power * dof(s) * st.mmse_gain);
    leak_error += st.other_power * st.error_var;
    if (!st.nulls_own_pilot) leak_unnulled += st.other_group_power * st.mmse_gain;
  }
  for (const auto& u : t.copilot_power) {
    double a = 0.0;
    for (std::size_t s = 0; s < n_sectors; ++s)
      if (u[s] > 0.0) a += std::sqrt(u[s] * dof(s) * t.sectors[s].mmse_gain);
    copilot += a * a;
  }
  const double num = t.rho_d * amp * amp;
  const double den = t.noise_var + t.rho_d * (leak_unnulled + leak_error + copilot);
  require_finite(num, "asymptotic signal");
  require_finite(den, "asymptotic interference");
  return num / den;
}

double rate_bound_statistics(const SinrResult& r) {
  double var = r.second_moment - r.mean_signal * r.mean_signal;
  if (var < -1e-9 * std::max(1.0, r.second_moment)) throw NumericError("negative signal variance");
  var = std::max(var, 0.0);
  return std::log2(1.0 + r.mean_signal * r.mean_signal / (var + r.interference_noise));
}

double rate_bound_caire(const SinrResult& r, double coherence) {
  if (!(coherence > 1.0)) throw DomainError("coherence time must exceed one channel use");
  const double snr = r.second_moment / r.interference_noise;
  double rate = std::log2(1.0 + snr);
  if (std::isfinite(coherence)) rate -= std::log2(1.0 + coherence * snr) / coherence;
  return rate;
}

// ---------------------------------------------------------------------------

void DownlinkScenario::validate() const {
  const int s_count = sectors();
  const int k_count = users();
  if (power.rows() != s_count || power.cols() != k_count) throw DomainError("power matrix shape mismatch");
  if (static_cast<int>(group.size()) != k_count) throw DomainError("group vector length mismatch");
  if (static_cast<int>(nulling.size()) != s_count) throw DomainError("nulling sets must be given per sector");
  if ((gains.array() < 0.0).any() || (power.array() < 0.0).any()) throw DomainError("negative gain or power");
  for (int s = 0; s < s_count; ++s) {
    if (static_cast<int>(nulling[s].size()) > beams) throw InfeasibleNulling("nulling set exceeds sector beams");
    for (int k = 0; k < k_count; ++k) {
      if (power(s, k) > 0.0 &&
          std::find(nulling[s].begin(), nulling[s].end(), group[k]) == nulling[s].end()) {
        throw DomainError("sector " + std::to_string(s) + " serves user " + std::to_string(k) +
                          " without using its pilot group");
      }
    }
  }
}

SinrTerms sinr_terms(const DownlinkScenario& sc, int k) {
  const int s_count = sc.sectors();
  const int k_count = sc.users();
  SinrTerms t;
  t.beams = sc.beams;
  t.rho_d = sc.rho_d;
  t.noise_var = sc.noise_var;
  t.sectors.resize(s_count);
  const int own = sc.group[k];
  for (int s = 0; s < s_count; ++s) {
    double group_total = 0.0, total_power = 0.0, own_group_power = 0.0;
    for (int u = 0; u < k_count; ++u) {
      total_power += sc.power(s, u);
      if (sc.group[u] == own) {
        group_total += sc.gains(s, u);
        own_group_power += sc.power(s, u);
      }
    }
    auto& st = t.sectors[s];
    st.power = sc.power(s, k);
    st.mmse_gain = mmse_gain(sc.gains(s, k), group_total, sc.pilot_snr);
    st.error_var = sc.gains(s, k) - st.mmse_gain;
    st.nulling_dims = static_cast<int>(sc.nulling[s].size());
    st.nulls_own_pilot = std::find(sc.nulling[s].begin(), sc.nulling[s].end(), own) != sc.nulling[s].end();
    st.other_power = total_power - sc.power(s, k);
    st.other_group_power = total_power - own_group_power;
  }
  for (int u = 0; u < k_count; ++u) {
    if (u == k || sc.group[u] != own) continue;
    std::vector<double> p(s_count);
    bool any = false;
    for (int s = 0; s < s_count; ++s) {
      p[s] = sc.power(s, u);
      any = any || p[s] > 0.0;
    }
    if (any) t.copilot_power.push_back(std::move(p));
  }
  return t;
}

// ---------------------------------------------------------------------------

ErgodicRates ergodic_rate_mc(const ChannelSampler& sampler, PrecoderKind kind, double rho_d, long samples,
                             std::uint64_t seed) {
  std::vector<Running> per_user;
  Running sum;
  for (long n = 0; n < samples; ++n) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(n), 0);
    const MatrixXcd h = sampler(rng);
    const MatrixXcd v = kind == PrecoderKind::zf ? zf_precoder_full(h) : cbf_precoder(h);
    const MatrixXd gain = (h.adjoint() * v).cwiseAbs2();  // (k, k') = |h_k^H v_k'|^2
    if (per_user.empty()) per_user.resize(h.cols());
    double total = 0.0;
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
      const double interference = gain.row(k).sum() - gain(k, k);
      const double r = std::log2(1.0 + rho_d * gain(k, k) / (rho_d * interference + 1.0));
      per_user[k].add(r);
      total += r;
    }
    sum.add(total);
  }
  ErgodicRates out;
  out.per_user.resize(static_cast<Eigen::Index>(per_user.size()));
  out.per_user_stderr.resize(out.per_user.size());
  for (std::size_t k = 0; k < per_user.size(); ++k) {
    out.per_user(k) = per_user[k].mean;
    out.per_user_stderr(k) = per_user[k].stderr_();
  }
  out.sum_rate = sum.mean;
  out.sum_rate_stderr = sum.stderr_();
  return out;
}

ChannelSampler covariance_sampler(const std::vector<MatrixXcd>& covariances) {
  std::vector<MatrixXcd> roots;
  for (const auto& r : covariances) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(0.5 * (r + r.adjoint()));
    const VectorXd sq = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    roots.push_back(eig.eigenvectors() * sq.cast<std::complex<double>>().asDiagonal());
  }
  return [roots = std::move(roots)](Rng& rng) {
    const auto m = roots.front().rows();
    MatrixXcd h(m, static_cast<Eigen::Index>(roots.size()));
    for (std::size_t k = 0; k < roots.size(); ++k) h.col(k) = roots[k] * complex_normal_vector(rng, m, 1.0);
    return h;
  };
}

RateReport summarize(const std::vector<double>& rates, double floor) {
  if (rates.empty()) throw DomainError("cannot summarize an empty rate set");
  RateReport r;
  r.geometric_floor = floor;
  r.sorted = rates;
  std::sort(r.sorted.begin(), r.sorted.end());
  if (r.sorted.front() < 0.0) throw DomainError("rates must be nonnegative");
  double sum = 0.0, log_sum = 0.0;
  for (double v : r.sorted) {
    sum += v;
    log_sum += std::log(std::max(v, floor));
  }
  const double n = static_cast<double>(r.sorted.size());
  r.arithmetic_mean = sum / n;
  r.geometric_mean = std::exp(log_sum / n);
  return r;
}

}  // namespace sectorwave
