#pragma once

#include "sectorwave/common.hpp"

#include <string>
#include <vector>

namespace sectorwave {

// Covariance files hold one or more M x M complex matrices back to back,
// row-major, each entry a (re, im) pair.
//   text   : whitespace-separated decimal numbers, "re im re im ..."
//   binary : files ending in ".bin", little-endian float64 pairs
// The matrix count is inferred from the entry count.

std::vector<MatrixXcd> read_covariances(const std::string& path, int bs_antennas);

void write_covariances(const std::string& path, const std::vector<MatrixXcd>& matrices);

}  // namespace sectorwave
