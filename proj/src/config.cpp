#include "sectorwave/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sectorwave {

double ScenarioConfig::presence_threshold() const {
  return threshold > 0.0 ? threshold : default_presence_threshold(connectivity(), user_antennas);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (bs_antennas < 1 || sectors < 1 || user_antennas < 1) fail("M, M_tilde and S must be positive");
  if (bs_antennas % sectors != 0) {
    fail("S = " + std::to_string(sectors) + " does not divide M = " + std::to_string(bs_antennas));
  }
  if (pilot_dims < 1 || users_per_dim < 1 || total_users < 1) fail("tau, K and K_tot must be positive");
  if (scheduled() > total_users) {
    fail("K tau = " + std::to_string(scheduled()) + " exceeds K_tot = " + std::to_string(total_users));
  }
  if (pilot_dims > beams()) fail("tau must not exceed the beams per sector g");
  if (blocks < users_per_dim) {
    throw UnsupportedConfig("Q = " + std::to_string(blocks) + " < K = " + std::to_string(users_per_dim) +
                            " needs ON-OFF codes, which are not supported");
  }
  if (width < 1 || width > user_antennas) fail("beam width w must lie in [1, M_tilde]");
  connectivity().validate();
  if (threshold < 0.0 || threshold >= lambda_low / user_antennas) {
    fail("presence threshold gamma must lie in (0, lambda_L / M_tilde)");
  }
  if (!(rho_p > 0.0) || !(rho_d > 0.0)) fail("rho_p and rho_d must be positive");
  if (!(coherence > 1.0)) fail("T_d must exceed 1");
  if (!(block_length > pilot_dims)) fail("T_block must exceed tau");
  if (slots < 1) fail("n_slots must be positive");
  if (channel == ChannelMode::covariance_file && covariance_file.empty()) {
    fail("channel_mode = covariance-file needs covariance_file");
  }
}

ScenarioConfig desk_config() { return ScenarioConfig{}; }

ScenarioConfig paper_scale_config() {
  ScenarioConfig c;
  c.bs_antennas = 1000;
  c.sectors = 25;
  c.total_users = 100;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "infinity") return std::numeric_limits<double>::infinity();
  return parse_number<double>(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}

}  // namespace

void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& value) {
  if (key == "M") c.bs_antennas = parse_number<int>(key, value);
  else if (key == "M_tilde") c.user_antennas = parse_number<int>(key, value);
  else if (key == "S") c.sectors = parse_number<int>(key, value);
  else if (key == "tau") c.pilot_dims = parse_number<int>(key, value);
  else if (key == "Q") c.blocks = parse_number<int>(key, value);
  else if (key == "K_tot") c.total_users = parse_number<int>(key, value);
  else if (key == "K") c.users_per_dim = parse_number<int>(key, value);
  else if (key == "w") c.width = parse_number<int>(key, value);
  else if (key == "p") c.p = parse_real(key, value);
  else if (key == "lambda_L") c.lambda_low = parse_real(key, value);
  else if (key == "lambda_H") c.lambda_high = parse_real(key, value);
  else if (key == "gamma") c.threshold = parse_real(key, value);
  else if (key == "rho_p") c.rho_p = parse_real(key, value);
  else if (key == "rho_d") c.rho_d = parse_real(key, value);
  else if (key == "T_d") c.coherence = parse_real(key, value);
  else if (key == "T_block") c.block_length = parse_real(key, value);
  else if (key == "n_slots") c.slots = parse_number<long>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "detection_mode") {
    if (value == "genie") c.detection = DetectionMode::genie;
    else if (value == "estimator") c.detection = DetectionMode::estimator;
    else throw ConfigError("detection_mode must be genie or estimator");
  } else if (key == "channel_mode") {
    if (value == "connectivity") c.channel = ChannelMode::connectivity;
    else if (value == "physical") c.channel = ChannelMode::physical;
    else if (value == "virtual") c.channel = ChannelMode::virtual_sampled;
    else if (value == "covariance-file") c.channel = ChannelMode::covariance_file;
    else throw ConfigError("channel_mode must be connectivity, physical, virtual or covariance-file");
  } else if (key == "covariance_file") c.covariance_file = value;
  else if (key == "redraw_per_slot") c.redraw_per_slot = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

ScenarioConfig parse_config(std::istream& in, ScenarioConfig c) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

std::string to_string(DetectionMode mode) { return mode == DetectionMode::genie ? "genie" : "estimator"; }

std::string to_string(ChannelMode mode) {
  switch (mode) {
    case ChannelMode::connectivity: return "connectivity";
    case ChannelMode::physical: return "physical";
    case ChannelMode::virtual_sampled: return "virtual";
    case ChannelMode::covariance_file: return "covariance-file";
  }
  return "?";
}

void write_config(std::ostream& out, const ScenarioConfig& c) {
  out << std::setprecision(17);
  out << "M = " << c.bs_antennas << "\nM_tilde = " << c.user_antennas << "\nS = " << c.sectors
      << "\ntau = " << c.pilot_dims << "\nQ = " << c.blocks << "\nK_tot = " << c.total_users
      << "\nK = " << c.users_per_dim << "\nw = " << c.width << "\np = " << c.p << "\nlambda_L = " << c.lambda_low
      << "\nlambda_H = " << c.lambda_high << "\ngamma = " << c.threshold << "\nrho_p = " << c.rho_p
      << "\nrho_d = " << c.rho_d << "\nT_d = " << c.coherence << "\nT_block = " << c.block_length
      << "\nn_slots = " << c.slots << "\nseed = " << c.seed << "\ndetection_mode = " << to_string(c.detection)
      << "\nchannel_mode = " << to_string(c.channel) << '\n';
  if (!c.covariance_file.empty()) out << "covariance_file = " << c.covariance_file << '\n';
  out << "redraw_per_slot = " << (c.redraw_per_slot ? "true" : "false") << '\n';
}

std::uint64_t resolve_seed(const ScenarioConfig& cfg, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SECTORWAVE_SEED"); env && *env) {
    return parse_number<std::uint64_t>("SECTORWAVE_SEED", env);
  }
  return cfg.seed;
}

}  // namespace sectorwave
