#pragma once

#include "sectorwave/common.hpp"

#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

namespace sectorwave {

struct MgRow {
  int w = 0, K = 0;
  double mg_closed = 0.0, mg_mc = 0.0, mg_mc_stderr = 0.0;
};

struct RateRow {
  int w = 0, K = 0, user_id = 0;
  double rate_bps_hz = 0.0;
};

struct CdfRow {
  int w = 0, K = 0;
  double quantile = 0.0, rate = 0.0;
};

struct FlatcmpRow {
  double snr_db = 0.0;
  std::string model, precoder;
  double sum_rate = 0.0;
  int user_id = 0;
  double user_rate = 0.0;
};

/// Long-format sweep output: one row per (w, K, metric).
struct MetricRow {
  int w = 0, K = 0;
  std::string metric;
  double value = 0.0;
};

// Writers emit the header row and print reals with 17 significant digits,
// so reading a file back reproduces every value exactly.
void write_mg_csv(std::ostream& out, const std::vector<MgRow>& rows);
void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows);
void write_cdf_csv(std::ostream& out, const std::vector<CdfRow>& rows);
void write_flatcmp_csv(std::ostream& out, const std::vector<FlatcmpRow>& rows);
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);

// Readers check the header and throw ConfigError on a schema mismatch.
std::vector<MgRow> read_mg_csv(std::istream& in);
std::vector<RateRow> read_rates_csv(std::istream& in);
std::vector<CdfRow> read_cdf_csv(std::istream& in);
std::vector<FlatcmpRow> read_flatcmp_csv(std::istream& in);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

/// Open `path` for writing, or throw IoError naming it.
std::ofstream open_output(const std::string& path);

}  // namespace sectorwave
