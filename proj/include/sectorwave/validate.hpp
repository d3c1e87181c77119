#pragma once

#include "sectorwave/rates.hpp"
#include "sectorwave/training.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sectorwave {

struct ValidationReport {
  std::string suite;
  std::vector<std::string> lines;  // one "ok ..." or "FAIL ..." line per check
  bool passed = true;

  void check(bool ok, const std::string& what);
};

/// Suites: parseval, detection, zf, mmse, omega, sinr-oracle, mg-oracle,
/// flat-covariance. `samples` = 0 keeps each suite's default effort.
/// Throws ConfigError for an unknown suite.
ValidationReport run_validation(const std::string& suite, std::uint64_t seed = 1, long samples = 0);

const std::vector<std::string>& validation_suites();

// Building blocks shared with the acceptance tests.

/// Multi-sector scenario with `pilot_dims` groups of two users each, so
/// K_s = tau everywhere. Every sector serves one user per group. With
/// `partial_nulling` (and S > 1, tau > 1) the last sector leaves group 0 out
/// of its nulling set, which exercises the unnulled leakage term.
DownlinkScenario oracle_scenario(int sectors, int beams, int pilot_dims, std::uint64_t seed,
                                 bool partial_nulling = false);

/// Presence pattern of the Fig. 1 example: one pilot dimension, two users,
/// four sectors; user 0 is seen by sectors 0 and 1, user 1 by sectors 1 and 2.
Indicator figure1_presence();

struct DetectionAgreement {
  long pairs = 0;
  long agree = 0;
  double fraction() const { return pairs ? static_cast<double>(agree) / pairs : 0.0; }
};

/// Estimator-based versus genie presence over `slots` connectivity draws.
DetectionAgreement detection_agreement(int sectors, int beams, int pilot_dims, int users_per_dim, int blocks,
                                       int width, double rho_p, long slots, std::uint64_t seed);

struct ZfInvariants {
  double nulling_residual = 0.0;   // max |g_hat_j^H v_k| / (|g_hat_j| |v_k|), j != k
  double power_error = 0.0;        // |sum ||v||^2 - 1|
  double rescale_error = 0.0;      // max relative change of |g_hat^H v| under estimate rescaling
  int dropped = 0;
};

/// Sector ZF over random resolvable patterns.
ZfInvariants zf_invariants(int sectors, int beams, int pilot_dims, int trials, std::uint64_t seed);

}  // namespace sectorwave
