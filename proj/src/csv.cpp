#include "sectorwave/csv.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sectorwave {

namespace {

constexpr const char* kMgHeader = "w,K,mg_closed,mg_mc,mg_mc_stderr";
constexpr const char* kRatesHeader = "w,K,user_id,rate_bps_hz";
constexpr const char* kCdfHeader = "w,K,quantile,rate";
constexpr const char* kFlatcmpHeader = "snr_db,model,precoder,sum_rate,user_id,user_rate";
constexpr const char* kMetricsHeader = "w,K,metric,value";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads the header, then hands each data row (already split) to `row`.
template <typename F>
void read_rows(std::istream& in, const char* header, std::size_t fields, F row) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV: expected header " + std::string(header));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ConfigError("CSV header '" + line + "' does not match '" + header + "'");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != fields) throw ConfigError("CSV line " + std::to_string(lineno) + ": wrong field count");
    try {
      row(f);
    } catch (const std::logic_error&) {
      throw ConfigError("CSV line " + std::to_string(lineno) + ": unparsable value");
    }
  }
}

double real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

int integer(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace

void write_mg_csv(std::ostream& out, const std::vector<MgRow>& rows) {
  out << kMgHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.w << ',' << r.K << ',' << r.mg_closed << ',' << r.mg_mc << ',' << r.mg_mc_stderr << '\n';
}

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << kRatesHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.w << ',' << r.K << ',' << r.user_id << ',' << r.rate_bps_hz << '\n';
}

void write_cdf_csv(std::ostream& out, const std::vector<CdfRow>& rows) {
  out << kCdfHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.w << ',' << r.K << ',' << r.quantile << ',' << r.rate << '\n';
}

void write_flatcmp_csv(std::ostream& out, const std::vector<FlatcmpRow>& rows) {
  out << kFlatcmpHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.snr_db << ',' << r.model << ',' << r.precoder << ',' << r.sum_rate << ',' << r.user_id << ','
        << r.user_rate << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << kMetricsHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.w << ',' << r.K << ',' << r.metric << ',' << r.value << '\n';
}

std::vector<MgRow> read_mg_csv(std::istream& in) {
  std::vector<MgRow> rows;
  read_rows(in, kMgHeader, 5, [&](const auto& f) {
    rows.push_back({integer(f[0]), integer(f[1]), real(f[2]), real(f[3]), real(f[4])});
  });
  return rows;
}

std::vector<RateRow> read_rates_csv(std::istream& in) {
  std::vector<RateRow> rows;
  read_rows(in, kRatesHeader, 4,
            [&](const auto& f) { rows.push_back({integer(f[0]), integer(f[1]), integer(f[2]), real(f[3])}); });
  return rows;
}

std::vector<CdfRow> read_cdf_csv(std::istream& in) {
  std::vector<CdfRow> rows;
  read_rows(in, kCdfHeader, 4,
            [&](const auto& f) { rows.push_back({integer(f[0]), integer(f[1]), real(f[2]), real(f[3])}); });
  return rows;
}

std::vector<FlatcmpRow> read_flatcmp_csv(std::istream& in) {
  std::vector<FlatcmpRow> rows;
  read_rows(in, kFlatcmpHeader, 6, [&](const auto& f) {
    rows.push_back({real(f[0]), f[1], f[2], real(f[3]), integer(f[4]), real(f[5])});
  });
  return rows;
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::vector<MetricRow> rows;
  read_rows(in, kMetricsHeader, 4,
            [&](const auto& f) { rows.push_back({integer(f[0]), integer(f[1]), f[2], real(f[3])}); });
  return rows;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

}  // namespace sectorwave
