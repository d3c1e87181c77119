#pragma once

#include "sectorwave/channel.hpp"
#include "sectorwave/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>

namespace sectorwave {

enum class DetectionMode { genie, estimator };
enum class ChannelMode { connectivity, physical, virtual_sampled, covariance_file };

/// Every model parameter of an experiment. Keys accepted by the config
/// parser are listed next to each field.
struct ScenarioConfig {
  int bs_antennas = 200;        // M
  int user_antennas = 6;        // M_tilde
  int sectors = 10;             // S
  int pilot_dims = 5;           // tau
  int blocks = 16;              // Q
  int total_users = 100;        // K_tot
  int users_per_dim = 10;       // K
  int width = 1;                // w
  double p = 0.1;               // p
  double lambda_low = 0.5;      // lambda_L
  double lambda_high = 1.5;     // lambda_H
  double threshold = 0.0;       // gamma; 0 selects lambda_L / (2 M_tilde)
  double rho_p = 10.0;          // rho_p
  double rho_d = 10.0;          // rho_d
  double coherence = std::numeric_limits<double>::infinity();  // T_d
  double block_length = 200.0;  // T_block, for the pilot-overhead discount
  long slots = 10000;           // n_slots
  std::uint64_t seed = 1;       // seed
  DetectionMode detection = DetectionMode::genie;         // detection_mode
  ChannelMode channel = ChannelMode::connectivity;        // channel_mode
  std::string covariance_file;                            // covariance_file
  bool redraw_per_slot = false;                           // redraw_per_slot

  int beams() const { return bs_antennas / sectors; }
  int scheduled() const { return pilot_dims * users_per_dim; }
  ConnectivityParams connectivity() const { return {p, lambda_low, lambda_high}; }
  double presence_threshold() const;

  /// Throws ConfigError on violated invariants: S | M, K tau <= K_tot,
  /// tau <= g, Q >= K, 1 <= w <= M_tilde, 0 < gamma < lambda_L / M_tilde.
  void validate() const;
};

/// Desk-scale defaults (M = 200, S = 10, g = 20, K_tot = 100).
ScenarioConfig desk_config();

/// M = 1000, S = 25, g = 40, K_tot = 100.
ScenarioConfig paper_scale_config();

/// Apply one key = value setting. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Key-value text: one `key = value` per line, `#` starts a comment.
ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = desk_config());

/// Throws IoError if the file cannot be opened.
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = desk_config());

void write_config(std::ostream& out, const ScenarioConfig& cfg);

/// Seed precedence: flag, then SECTORWAVE_SEED, then the config value.
std::uint64_t resolve_seed(const ScenarioConfig& cfg, std::optional<std::uint64_t> flag);

std::string to_string(DetectionMode mode);
std::string to_string(ChannelMode mode);

}  // namespace sectorwave
