// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.
// Exit status is 1 when any criterion fails.

#include "sectorwave/harness.hpp"
#include "sectorwave/rates.hpp"
#include "sectorwave/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

using namespace sectorwave;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

void detail(const std::string& s) { std::cout << "  " << s << '\n'; }

void verdict(bool ok, const std::string& name, const std::string& summary) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << summary << std::endl;
  if (!ok) ++failures;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

void mg_formula() {
  const double p = 0.1;
  const int S = 25;
  int bw = 0, bk = 0;
  double best = 0.0, best_orth = 0.0;
  for (int w = 1; w <= 6; ++w) {
    best_orth = std::max(best_orth, mg_closed_form(w, 1, p, S));
    for (int k = 1; k <= 30; ++k) {
      const double v = mg_closed_form(w, k, p, S);
      if (v > best) {
        best = v;
        bw = w;
        bk = k;
      }
    }
  }
  detail("closed-form max " + fmt(best) + " at (" + std::to_string(bw) + ", " + std::to_string(bk) +
         "); best K = 1 value " + fmt(best_orth) + ", ratio " + fmt(best / best_orth));
  bool ok = bw == 1 && bk == 13 && std::abs(best - 6.649) < 0.001 && best > 6.0 * best_orth;

  // Monte Carlo at 1e5 slots on a spread of grid points.
  const long slots = 100000;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (auto [w, k] : {std::pair{1, 1}, {1, 13}, {6, 1}, {3, 9}, {2, 20}, {6, 3}, {4, 6}}) {
    MgScenario sc;
    sc.width = w;
    sc.users_per_dim = k;
    const MgEstimate e = mg_monte_carlo(sc, slots, 1);
    const double closed = mg_closed_form(w, k, p, S);
    const double se = std::max(e.per_dim_stderr, 1.0 / (sc.pilot_dims * static_cast<double>(slots)));
    const double z = std::abs(e.per_dim - closed) / se;
    worst = std::max(worst, z);
    detail("(" + std::to_string(w) + ", " + std::to_string(k) + ") closed " + fmt(closed) + ", MC " +
           fmt(e.per_dim) + " +- " + fmt(e.per_dim_stderr, 3) + " (" + fmt(z, 3) + " SE)");
  }
  const double elapsed = seconds_since(t0);
  detail("MC runtime " + fmt(elapsed, 3) + " s single-threaded");
  ok = ok && worst <= 3.0 && elapsed < 120.0;
  verdict(ok, "mg-formula", "argmax (" + std::to_string(bw) + ", " + std::to_string(bk) + ") = " + fmt(best) +
                                ", " + fmt(best / best_orth, 4) + "x over K = 1, worst MC deviation " +
                                fmt(worst, 3) + " SE");
}

void activation() {
  const double q1 = q_prob(1, 0.1), q6 = q_prob(6, 0.1);
  const double tol = 1e-12;
  const bool ok = q1 == 0.1 && std::abs(q6 - 0.468559) < tol && std::abs(25 * q1 - 2.5) < tol &&
                  std::abs(25 * q6 - 11.713975) < tol;
  verdict(ok, "activation-probability", "q(1) = " + fmt(q1, 17) + ", q(6) = " + fmt(q6, 17) + ", S q = " +
                                            fmt(25 * q1, 10) + " and " + fmt(25 * q6, 10));
}

struct Argmax {
  int w = 0, K = 0;
  double value = 0.0;
};

Argmax argmax(const std::vector<PointResult>& pts, bool geometric) {
  Argmax a;
  for (const auto& p : pts) {
    const double v = geometric ? p.report.geometric_mean : p.report.arithmetic_mean;
    if (v > a.value) a = {p.w, p.K, v};
  }
  return a;
}

double best_orthogonal(const std::vector<PointResult>& pts, bool geometric) {
  double b = 0.0;
  for (const auto& p : pts)
    if (p.K == 1) b = std::max(b, geometric ? p.report.geometric_mean : p.report.arithmetic_mean);
  return b;
}

SweepGrid full_grid(const ScenarioConfig& cfg) {
  SweepGrid g;
  for (int w = 1; w <= cfg.user_antennas; ++w) g.widths.push_back(w);
  for (int k = 1; k <= cfg.total_users / cfg.pilot_dims; ++k) g.users_per_dim.push_back(k);
  return g;
}

void rate_optimum() {
  ScenarioConfig cfg = desk_config();
  cfg.slots = 10000;
  const auto t0 = Clock::now();
  const auto pts = run_experiment(cfg, full_grid(cfg));
  const double elapsed = seconds_since(t0);

  bool ok = elapsed < 600.0;
  std::string summary;
  for (bool geo : {false, true}) {
    const Argmax a = argmax(pts, geo);
    const double orth = best_orthogonal(pts, geo);
    const char* name = geo ? "geometric" : "arithmetic";
    detail(std::string(name) + " mean: max " + fmt(a.value) + " at (" + std::to_string(a.w) + ", " +
           std::to_string(a.K) + "), best K = 1 " + fmt(orth) + ", ratio " + fmt(a.value / orth, 4));
    ok = ok && a.w == 1 && std::abs(a.K - 10) <= 3 && a.value >= 2.5 * orth;
    summary += std::string(geo ? ", geo " : "arith ") + "(" + std::to_string(a.w) + ", " + std::to_string(a.K) +
               ") " + fmt(a.value / orth, 3) + "x";
  }

  const PointResult& narrow = best_for_width(pts, 1);
  const PointResult& wide = best_for_width(pts, 6);
  int violations = 0;
  for (std::size_t i = 0; i < narrow.report.sorted.size(); ++i)
    if (narrow.report.sorted[i] < wide.report.sorted[i]) ++violations;
  detail("CDF: w = 1 at K = " + std::to_string(narrow.K) + " vs w = 6 at K = " + std::to_string(wide.K) + ", " +
         std::to_string(violations) + " quantiles where w = 6 is ahead");
  detail("runtime " + fmt(elapsed, 4) + " s for " + std::to_string(pts.size()) + " grid points x " +
         std::to_string(cfg.slots) + " slots");
  ok = ok && violations == 0;
  verdict(ok, "rate-optimum", summary + ", CDF violations " + std::to_string(violations));

  // Same sweep at the array size of the reference study, for context only.
  ScenarioConfig big = paper_scale_config();
  big.slots = 1000;
  const auto bp = run_experiment(big, full_grid(big));
  for (bool geo : {false, true}) {
    const Argmax a = argmax(bp, geo);
    detail(std::string("info M = 1000, S = 25, 1000 slots, ") + (geo ? "geometric" : "arithmetic") + ": max at (" +
           std::to_string(a.w) + ", " + std::to_string(a.K) + "), ratio " +
           fmt(a.value / best_orthogonal(bp, geo), 4));
  }
}

void term_oracles() {
  const long samples = 100000;
  double worst = 0.0, worst_chi = 0.0, worst_leak = 0.0;
  std::string where;
  bool ok = true;
  for (int S : {1, 2, 4})
    for (int g : {4, 8, 16})
      for (int tau : {1, 2, 4}) {
        const DownlinkScenario sc = oracle_scenario(S, g, tau, 1);
        const SinrResult cf = sinr_closed_form(sinr_terms(sc, 0));
        const TermEstimates mc = monte_carlo_terms(sc, 0, samples, 1);
        const double e1 = rel(mc.mean_signal, cf.mean_signal);
        const double e2 = rel(mc.second_moment, cf.second_moment);
        const double e3 = rel(mc.interference_noise, cf.interference_noise);
        const double chi = std::abs(mc.chi_mean_ratio - 1.0);
        const double e = std::max({e1, e2, e3});
        detail("S = " + std::to_string(S) + ", g = " + std::to_string(g) + ", tau = " + std::to_string(tau) +
               ": E[D] " + fmt(e1, 3) + ", E|D|^2 " + fmt(e2, 3) + ", sigma_z^2 " + fmt(e3, 3) + ", chi " +
               fmt(chi, 3));
        if (e > worst) {
          worst = e;
          where = "(" + std::to_string(S) + ", " + std::to_string(g) + ", " + std::to_string(tau) + ")";
        }
        worst_chi = std::max(worst_chi, chi);
        worst_leak = std::max(worst_leak, mc.nulled_residual);
        ok = ok && e < 0.02 && chi < 0.01 && mc.nulled_residual < 1e-18;
      }
  verdict(ok, "sinr-term-oracles", "worst relative error " + fmt(worst, 3) + " at " + where + ", chi " +
                                       fmt(worst_chi, 3) + ", nulled leakage " + fmt(worst_leak, 3));
}

void asymptotic() {
  const SinrTerms base = sinr_terms(oracle_scenario(2, 8, 2, 1), 0);
  double ratio = 0.0;
  for (int n : {1, 4, 16, 64}) {
    ratio = sinr_closed_form(scale_terms(base, n)).sinr / sinr_asymptotic(base);
    detail("n = " + std::to_string(n) + ": SINR / asymptote " + fmt(ratio));
  }
  verdict(std::abs(ratio - 1.0) < 0.02, "asymptotic-consistency", "ratio at n = 64 is " + fmt(ratio));
}

void zf() {
  const ZfInvariants z = zf_invariants(4, 16, 4, 500, 1);
  const bool ok = z.nulling_residual < 1e-9 && z.power_error < 1e-12 && z.rescale_error < 1e-10;
  verdict(ok, "zf-invariants", "nulling residual " + fmt(z.nulling_residual, 3) + ", power deviation " +
                                   fmt(z.power_error, 3) + ", rescaling " + fmt(z.rescale_error, 3));
}

void detection() {
  const DetectionReport d = detect_resolvable(figure1_presence(), assign_pilots_in_order(1, 2));
  Indicator expect = Indicator::Zero(4, 2);
  expect(0, 0) = 1;
  expect(2, 1) = 1;
  const bool fig = d.resolvable == expect && d.served == 2 && d.serving_count == std::vector<int>{1, 1};
  const DetectionAgreement a = detection_agreement(25, 40, 5, 2, 64, 1, 100.0, 40, 1);
  detail("estimator vs genie at rho_p = 100, g = 40, K = 2, Q = 64: " + std::to_string(a.agree) + " / " +
         std::to_string(a.pairs));
  verdict(fig && a.fraction() >= 0.99, "detection",
          std::string("Fig. 1 pattern ") + (fig ? "reproduced" : "wrong") + ", agreement " + fmt(a.fraction()));
}

void flat_covariance() {
  FlatcmpConfig cfg;
  const auto rows = run_flatcmp(cfg);
  double worst = 0.0, worst_cbf = 0.0;
  for (double snr : cfg.snr_db) {
    double v[2][2] = {};  // [zf|cbf][flat|circulant]
    for (const auto& r : rows) {
      if (r.snr_db != snr || r.user_id != 0 || r.model == "original") continue;
      v[r.precoder == "cbf"][r.model == "circulant"] = r.sum_rate;
    }
    const double gz = rel(v[0][0], v[0][1]), gc = rel(v[1][0], v[1][1]);
    detail(fmt(snr, 3) + " dB: ZF gap " + fmt(gz, 3) + ", CBF gap " + fmt(gc, 3));
    worst = std::max(worst, gz);
    worst_cbf = std::max(worst_cbf, gc);
  }
  verdict(worst < 0.05, "flat-covariance",
          "worst ZF gap " + fmt(worst, 3) + " (CBF gap, reported only: " + fmt(worst_cbf, 3) + ")");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  mg_formula();
  activation();
  rate_optimum();
  term_oracles();
  asymptotic();
  zf();
  detection();
  flat_covariance();
  std::cout << failures << " criteria failed, total " << fmt(seconds_since(t0), 4) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
