#include "sectorwave/precoding.hpp"

#include <doctest.h>

#include <vector>

using namespace sectorwave;

TEST_CASE("sector ZF, single resolvable user") {
  Rng rng = make_stream(1, 0, 0);
  std::vector<VectorXcd> est = {complex_normal_vector(rng, 8), complex_normal_vector(rng, 8)};
  const std::vector<int> res = {1};
  const std::vector<int> count = {0, 2};
  const SectorPrecoder v = zf_precoder(est, res, 3, count);
  const VectorXcd expect = est[1] / est[1].norm() / std::sqrt(6.0);
  CHECK((v.columns.col(1) - expect).norm() < 1e-14);
  CHECK(v.columns.col(0).norm() == 0.0);
  CHECK(v.dropped.empty());
}

TEST_CASE("sector ZF, orthogonal estimates cost nothing") {
  std::vector<VectorXcd> est = {VectorXcd::Zero(4), VectorXcd::Zero(4)};
  est[0](0) = {2.0, 1.0};
  est[1](3) = {0.0, -3.0};
  const std::vector<int> res = {0, 1};
  const std::vector<int> count = {1, 1};
  const SectorPrecoder v = zf_precoder(est, res, 2, count);
  for (int k = 0; k < 2; ++k) {
    const double c = std::abs(est[k].dot(v.columns.col(k)));
    CHECK(c == doctest::Approx(est[k].norm() * v.columns.col(k).norm()));
  }
}

TEST_CASE("sector ZF against an SVD null-space oracle") {
  Rng rng = make_stream(2, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<VectorXcd> est = {complex_normal_vector(rng, 4), complex_normal_vector(rng, 4)};
    const std::vector<int> res = {0, 1};
    const std::vector<int> count = {1, 1};
    const SectorPrecoder v = zf_precoder(est, res, 2, count);
    const VectorXcd v1 = v.columns.col(0) / v.columns.col(0).norm();
    CHECK(std::abs(est[1].dot(v1)) < 1e-12 * est[1].norm());

    Eigen::JacobiSVD<MatrixXcd> svd(MatrixXcd(est[1].adjoint()), Eigen::ComputeFullV);
    const MatrixXcd null = svd.matrixV().rightCols(3);
    const double best = (null.adjoint() * est[0]).norm();
    CHECK(std::abs(est[0].dot(v1)) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("sector ZF errors and degenerate users") {
  std::vector<VectorXcd> est(3, VectorXcd::Ones(2));
  const std::vector<int> all = {0, 1, 2};
  const std::vector<int> count = {1, 1, 1};
  CHECK_THROWS_AS(zf_precoder(est, all, 3, count), InfeasibleNulling);

  std::vector<VectorXcd> same = {VectorXcd::Ones(3), 2.0 * VectorXcd::Ones(3)};
  const std::vector<int> two = {0, 1};
  const SectorPrecoder v = zf_precoder(same, two, 2, count);
  CHECK(v.dropped.size() == 2);
}

TEST_CASE("full-array ZF and CBF") {
  Rng rng = make_stream(3, 0, 0);
  const VectorXcd h = complex_normal_vector(rng, 6);
  const MatrixXcd one = h;
  CHECK((cbf_precoder(one).col(0) - h / h.norm()).norm() < 1e-14);
  CHECK((zf_precoder_full(one).col(0) - h / h.norm()).norm() < 1e-14);

  MatrixXcd twins(6, 2);
  twins << h, h;
  const MatrixXcd v = cbf_precoder(twins);
  const MatrixXcd c = twins.adjoint() * v;  // c(k, u) = h_k^H v_u
  CHECK(std::abs(c(0, 0)) == doctest::Approx(std::abs(c(1, 1))));
  CHECK(std::abs(c(0, 1)) == doctest::Approx(std::abs(c(1, 0))));
  CHECK(std::abs(c(0, 1)) == doctest::Approx(std::abs(c(0, 0))));

  MatrixXcd h3(6, 3);
  for (int k = 0; k < 3; ++k) h3.col(k) = complex_normal_vector(rng, 6);
  const MatrixXcd z = zf_precoder_full(h3);
  const MatrixXcd cz = h3.adjoint() * z;
  for (int k = 0; k < 3; ++k)
    for (int u = 0; u < 3; ++u)
      if (k != u) CHECK(std::abs(cz(k, u)) < 1e-12);
  CHECK(z.squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("downlink signal model") {
  Rng rng = make_stream(4, 0, 0);
  MatrixXcd gs(8, 2);
  for (int k = 0; k < 2; ++k) gs.col(k) = complex_normal_vector(rng, 8);
  const std::vector<MatrixXcd> g = {gs};

  std::vector<VectorXcd> est = {gs.col(0), gs.col(1)};
  const std::vector<int> res = {0, 1};
  const std::vector<int> count = {1, 1};
  const std::vector<MatrixXcd> v = {zf_precoder(est, res, 2, count).columns};
  const VectorXcd data = VectorXcd::Ones(2);

  Rng a = make_stream(5, 0, 0);
  Rng b = a;
  const VectorXcd r = downlink_receive(g, v, 0.0, data, a);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(r(k) - complex_normal(b, 1.0)) < 1e-15);

  const double rho = 10.0;
  const MatrixXcd c = stream_coupling(g, v);
  CHECK(rho * std::norm(c(0, 1)) < 1e-18 * rho);
  CHECK(rho * std::norm(c(1, 0)) < 1e-18 * rho);

  // Single user, single sector, perfect CSI: matched filter.
  const std::vector<MatrixXcd> g1 = {MatrixXcd(gs.col(0))};
  std::vector<VectorXcd> e1 = {gs.col(0)};
  const std::vector<int> r1 = {0};
  const std::vector<int> n1 = {1};
  const std::vector<MatrixXcd> v1 = {zf_precoder(e1, r1, 1, n1).columns};
  const MatrixXcd c1 = stream_coupling(g1, v1);
  CHECK(rho * std::norm(c1(0, 0)) == doctest::Approx(rho * gs.col(0).squaredNorm()));
}
