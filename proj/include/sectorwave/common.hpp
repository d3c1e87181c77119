#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sectorwave {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Error hierarchy. The CLI maps these onto exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct UnsupportedConfig : ConfigError {
  using ConfigError::ConfigError;
};
struct DomainError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct InfeasibleNulling : Error {
  using Error::Error;
};

using Rng = std::mt19937_64;

constexpr double kPi = 3.14159265358979323846;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream id for the (seed, slot, user) triple. Every random quantity in a
/// slot is drawn from a stream derived this way, so slots and users can be
/// evaluated in any order and still reproduce bit-for-bit.
inline std::uint64_t stream_id(std::uint64_t seed, std::uint64_t slot, std::uint64_t user) {
  return splitmix64(splitmix64(splitmix64(seed) ^ slot) ^ (user + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t slot, std::uint64_t user) {
  return Rng(stream_id(seed, slot, user));
}

/// Draw from CN(0, variance): real and imaginary parts independent, each
/// with variance/2.
template <typename Real = double>
std::complex<Real> complex_normal(Rng& rng, Real variance = Real(1)) {
  std::normal_distribution<Real> n;
  const Real scale = std::sqrt(variance / Real(2));
  const Real re = n(rng);
  const Real im = n(rng);
  return {scale * re, scale * im};
}

template <typename Real = double>
CVector<Real> complex_normal_vector(Rng& rng, Eigen::Index n, Real variance = Real(1)) {
  CVector<Real> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal<Real>(rng, variance);
  return v;
}

}  // namespace sectorwave
