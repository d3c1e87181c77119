#include "sectorwave/rates.hpp"
#include "sectorwave/validate.hpp"

#include <doctest.h>

#include <cmath>

using namespace sectorwave;

TEST_CASE("activation probability") {
  CHECK(q_prob(1, 0.1) == 0.1);
  CHECK(q_prob(6, 0.1) == doctest::Approx(0.468559).epsilon(1e-12));
  CHECK(q_prob(0, 0.1) == 0.0);
}

TEST_CASE("closed-form multiplexing gain") {
  CHECK(mg_closed_form(1, 1, 0.1, 25) == doctest::Approx(1.0 - std::pow(0.9, 25)).epsilon(1e-14));
  CHECK(mg_closed_form(1, 1, 0.1, 25) == doctest::Approx(0.92820).epsilon(1e-5));
  CHECK(mg_closed_form(1, 1, 1.0 - 1e-15, 25) == doctest::Approx(1.0));

  int best_k = 0;
  double best = 0.0;
  for (int k = 1; k <= 30; ++k) {
    const double v = mg_closed_form(1, k, 0.1, 25);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  CHECK(best_k == 13);
  CHECK(best == doctest::Approx(6.649).epsilon(2e-4));
}

TEST_CASE("Monte-Carlo multiplexing gain") {
  MgScenario sc;
  const MgEstimate e = mg_monte_carlo(sc, 20000, 11);
  const double closed = mg_closed_form(1, 1, 0.1, 25);
  CHECK(std::abs(e.per_dim - closed) < 3.0 * e.per_dim_stderr);
  CHECK(e.raw == doctest::Approx(e.per_dim * sc.pilot_dims));
  CHECK_FALSE(e.few_slots);
  CHECK(mg_monte_carlo(sc, 50, 1).few_slots);

  MgScenario collide;
  collide.users_per_dim = 2;
  collide.connectivity.p = 1.0 - 1e-12;
  const MgEstimate c = mg_monte_carlo(collide, 200, 3);
  CHECK(c.raw == 0.0);
}

TEST_CASE("Omega") {
  CHECK(omega(5, 5) == doctest::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-12));
  CHECK(omega(6, 5) == doctest::Approx(1.329340).epsilon(1e-6));
  const int big = 10000;
  CHECK(std::abs(omega(big + 3, 3) / std::sqrt(big + 0.5) - 1.0) < 1e-4);
  CHECK_THROWS_AS(omega(3, 4), DomainError);
}

namespace {

SinrTerms single_user(double eta, double lambda, int g, int ks, double rho) {
  SinrTerms t;
  t.beams = g;
  t.rho_d = rho;
  SectorTerm st;
  st.power = eta;
  st.mmse_gain = lambda;
  st.error_var = 0.0;
  st.nulling_dims = ks;
  st.nulls_own_pilot = true;
  t.sectors.push_back(st);
  return t;
}

}  // namespace

TEST_CASE("closed-form SINR") {
  const SinrTerms t = single_user(0.25, 1.3, 8, 3, 10.0);
  const SinrResult r = sinr_closed_form(t);
  CHECK(r.sinr == doctest::Approx(10.0 * 0.25 * 1.3 * (8 - 3 + 1)).epsilon(1e-12));
  CHECK(r.mean_signal == doctest::Approx(std::sqrt(10.0 * 0.25 * 1.3) * omega(8, 3)));

  const SinrResult zero = sinr_closed_form(single_user(0.25, 1.3, 8, 3, 0.0));
  CHECK(zero.sinr == 0.0);

  SinrTerms bad = t;
  bad.sectors[0].power = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sinr_closed_form(bad), NumericError);
}

TEST_CASE("asymptotic SINR") {
  const DownlinkScenario sc = oracle_scenario(2, 8, 2, 1);
  const SinrTerms base = sinr_terms(sc, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {1, 4, 16, 64}) {
    const double ratio = sinr_closed_form(scale_terms(base, n)).sinr / sinr_asymptotic(base);
    CHECK(std::abs(ratio - 1.0) <= std::abs(prev - 1.0) + 1e-12);
    prev = ratio;
  }
  CHECK(std::abs(prev - 1.0) < 0.02);

  // Interference-free signal ratio Omega^2 / (g - K_s) approaches 1.
  const SinrTerms clean = single_user(1.0, 1.0, 8, 2, 1.0);
  const SinrTerms scaled = scale_terms(clean, 256);
  const double ratio = sinr_closed_form(scaled).mean_signal * sinr_closed_form(scaled).mean_signal /
                       (scaled.sectors[0].power * (scaled.beams - scaled.sectors[0].nulling_dims));
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("rate bounds") {
  SinrResult r;
  r.mean_signal = 1.0;
  r.second_moment = 1.0;
  r.interference_noise = 1.0;
  CHECK(rate_bound_statistics(r) == doctest::Approx(1.0));

  const SinrResult s = sinr_closed_form(sinr_terms(oracle_scenario(2, 8, 2, 3, true), 0));
  CHECK(rate_bound_statistics(s) <= rate_bound_caire(s));
  CHECK(rate_bound_caire(s) == doctest::Approx(std::log2(1.0 + s.sinr)));
  CHECK(rate_bound_caire(s, 10.0) < rate_bound_caire(s));
  CHECK_THROWS_AS(rate_bound_caire(s, 1.0), DomainError);

  SinrResult silent;
  silent.interference_noise = 1.0;
  CHECK(rate_bound_caire(silent, 10.0) == 0.0);

  SinrResult negative = r;
  negative.second_moment = 0.5;
  CHECK_THROWS_AS(rate_bound_statistics(negative), NumericError);
}

TEST_CASE("ergodic rate by simulation") {
  VectorXcd h = VectorXcd::Zero(4);
  h(0) = {1.2, 0.0};
  h(2) = {0.0, -0.5};
  const double c = h.squaredNorm();
  const ChannelSampler fixed = [h](Rng&) { return MatrixXcd(h); };
  const ErgodicRates one = ergodic_rate_mc(fixed, PrecoderKind::zf, 10.0, 10, 1);
  CHECK(one.per_user(0) == doctest::Approx(std::log2(1.0 + 10.0 * c)));

  MatrixXcd ortho = MatrixXcd::Zero(4, 2);
  ortho(0, 0) = 1.0;
  ortho(1, 1) = 1.0;
  const ChannelSampler two = [ortho](Rng&) { return ortho; };
  const ErgodicRates r2 = ergodic_rate_mc(two, PrecoderKind::zf, 4.0, 10, 1);
  CHECK(r2.per_user(0) == doctest::Approx(std::log2(1.0 + 4.0 / 2.0)));
  CHECK(r2.sum_rate == doctest::Approx(2.0 * std::log2(3.0)));
}

TEST_CASE("rate summary") {
  const RateReport r = summarize({4.0, 1.0});
  CHECK(r.arithmetic_mean == doctest::Approx(2.5));
  CHECK(r.geometric_mean == doctest::Approx(2.0));
  CHECK(r.sorted == std::vector<double>{1.0, 4.0});
  CHECK(r.cdf_level(0) == 0.5);
  CHECK(r.cdf_level(1) == 1.0);

  const RateReport same = summarize({3.0, 3.0, 3.0});
  CHECK(same.arithmetic_mean == doctest::Approx(same.geometric_mean));

  const RateReport zeros = summarize({0.0, 1.0}, 1e-6);
  CHECK(zeros.geometric_mean == doctest::Approx(1e-3));

  CHECK_THROWS_AS(summarize({}), DomainError);
}
