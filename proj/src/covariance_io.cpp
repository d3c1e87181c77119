#include "sectorwave/covariance_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sectorwave {

namespace {

bool is_binary(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}

std::vector<double> read_values(const std::string& path) {
  std::vector<double> values;
  if (is_binary(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open covariance file " + path);
    static_assert(std::endian::native == std::endian::little, "binary covariance format is little-endian");
    double v = 0.0;
    while (in.read(reinterpret_cast<char*>(&v), sizeof v)) values.push_back(v);
    if (!in.eof()) throw IoError("read error in " + path);
    return values;
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open covariance file " + path);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw IoError("malformed number '" + token + "' in " + path);
    }
  }
  return values;
}

}  // namespace

std::vector<MatrixXcd> read_covariances(const std::string& path, int bs_antennas) {
  const std::vector<double> values = read_values(path);
  const std::size_t per = 2ULL * bs_antennas * bs_antennas;
  if (values.empty() || values.size() % per != 0) {
    throw IoError(path + ": entry count " + std::to_string(values.size()) + " is not a multiple of 2*M*M = " +
                  std::to_string(per));
  }
  std::vector<MatrixXcd> out;
  for (std::size_t base = 0; base < values.size(); base += per) {
    MatrixXcd r(bs_antennas, bs_antennas);
    std::size_t idx = base;
    for (int i = 0; i < bs_antennas; ++i) {
      for (int j = 0; j < bs_antennas; ++j, idx += 2) r(i, j) = {values[idx], values[idx + 1]};
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_covariances(const std::string& path, const std::vector<MatrixXcd>& matrices) {
  if (is_binary(path)) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write covariance file " + path);
    for (const auto& r : matrices) {
      for (int i = 0; i < r.rows(); ++i) {
        for (int j = 0; j < r.cols(); ++j) {
          const double pair[2] = {r(i, j).real(), r(i, j).imag()};
          out.write(reinterpret_cast<const char*>(pair), sizeof pair);
        }
      }
    }
    if (!out) throw IoError("write error in " + path);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write covariance file " + path);
  out << std::setprecision(17);
  for (const auto& r : matrices) {
    for (int i = 0; i < r.rows(); ++i) {
      for (int j = 0; j < r.cols(); ++j) out << (j ? " " : "") << r(i, j).real() << ' ' << r(i, j).imag();
      out << '\n';
    }
  }
  if (!out) throw IoError("write error in " + path);
}

}  // namespace sectorwave
