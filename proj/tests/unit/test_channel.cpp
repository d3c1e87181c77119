#include "sectorwave/channel.hpp"

#include <doctest.h>

using namespace sectorwave;

TEST_CASE("sector basis splits the DFT into equal blocks") {
  SectorBasis<double> b(1000, 25);
  CHECK(b.beams_per_sector() == 40);
  CHECK(b.block(24).cols() == 40);

  SectorBasis<double> small(8, 2);
  const MatrixXcd cross = small.block(0).adjoint() * small.block(1);
  CHECK(cross.rows() == 4);
  CHECK(cross.cwiseAbs().maxCoeff() < 1e-14);

  SectorBasis<double> single(6, 6);
  for (int s = 0; s < 6; ++s) CHECK(std::abs((single.block(s).adjoint() * single.block(s))(0, 0) - 1.0) < 1e-14);

  CHECK_THROWS_AS(SectorBasis<double>(10, 3), ConfigError);
  ArrayGeometry geo;
  geo.bs_antennas = 100;
  geo.sectors = 7;
  CHECK_THROWS_AS(geo.validate(), ConfigError);
}

TEST_CASE("sector projection") {
  SectorBasis<double> b(32, 4);
  const VectorXcd h = b.matrix().col(2 * 8);  // first column of sector 2
  for (int s = 0; s < 4; ++s) {
    const VectorXcd g = b.project(h, s);
    if (s == 2) {
      CHECK(std::abs(g(0) - 1.0) < 1e-12);
      CHECK(g.tail(7).norm() < 1e-12);
    } else {
      CHECK(g.norm() < 1e-12);
    }
  }

  Rng rng = make_stream(3, 0, 0);
  const VectorXcd r = complex_normal_vector(rng, 32);
  double total = 0.0;
  for (int s = 0; s < 4; ++s) total += b.project(r, s).squaredNorm();
  CHECK(std::abs(total - r.squaredNorm()) < 1e-10 * r.squaredNorm());

  // On-grid AoA i/M lands in sector floor(i/g).
  PathSet ps;
  ps.paths.push_back({{1.0, 0.0}, 0.0, 13.0 / 32.0, 0.0});
  const VectorXcd h2 = physical_channel(ps, 32, BeamMask::eigen(4, 0).beam(), 0.0);
  VectorXd energy(4);
  for (int s = 0; s < 4; ++s) energy(s) = b.project(h2, s).squaredNorm();
  Eigen::Index arg;
  energy.maxCoeff(&arg);
  CHECK(arg == 1);
  CHECK(energy(1) / energy.sum() > 1.0 - 1e-10);
}

TEST_CASE("physical channel") {
  const int m = 16, mt = 4;
  const double aod = 0.25, aoa = -0.125;
  PathSet one;
  one.paths.push_back({{0.7, -0.2}, 1e-9, aoa, aod});
  const VectorXcd b = steering_vector<double>(mt, aod) / std::sqrt(double(mt));
  const VectorXcd h = physical_channel(one, m, b, 0.0);
  const VectorXcd expect = std::complex<double>(0.7, -0.2) * std::sqrt(double(mt)) * steering_vector<double>(m, aoa);
  CHECK((h - expect).norm() < 1e-12);

  CHECK(physical_channel(PathSet{}, m, b, 1e6).norm() == 0.0);

  // A second path whose AoD is orthogonal to the beam adds nothing.
  PathSet two = one;
  two.paths.push_back({{2.0, 1.0}, 0.0, 0.3, aod + 0.25});
  CHECK((physical_channel(two, m, b, 0.0) - h).norm() < 1e-12);

  PathSet bad;
  bad.paths.push_back({{1.0, 0.0}, -1.0, 0.0, 0.0});
  CHECK_THROWS_AS(physical_channel(bad, m, b, 0.0), DomainError);
}

TEST_CASE("virtual channel") {
  VirtualChannel v(16, 4, 2, 1e8);
  v.at(5, 2, 1) = {1.0, 0.5};
  // Eigen beam on AoD bin 1 misses the only coefficient at bin 2.
  CHECK(virtual_channel_vector(v, BeamMask::eigen(4, 1).beam(), 3e6).norm() < 1e-12);

  // Omni beam: a~^H(m/M~) b = sqrt(M~)/sqrt(M~) for every bin.
  const VectorXcd h = virtual_channel_vector(v, BeamMask::omni(4).beam(), 0.0);
  const VectorXcd expect = std::complex<double>(1.0, 0.5) * steering_vector<double>(16, 5.0 / 16.0);
  CHECK((h - expect).norm() < 1e-12);

  Rng rng = make_stream(9, 0, 0);
  const VirtualChannel r = VirtualChannel::random_sparse(32, 6, 3, 1e8, 12, rng);
  CHECK(r.sparsity(0.0) == 12);
  for (int m = 0; m < 6; ++m) CHECK(r.aoa_support(BeamMask::eigen(6, m).beam()) <= r.aoa_support(BeamMask::omni(6).beam()));
}

TEST_CASE("connectivity model") {
  ConnectivityParams params;
  Rng rng = make_stream(1, 0, 0);
  const ConnectivityMap map = sample_connectivity(params, 100, 1000, 10, rng);
  long on = 0;
  bool in_range = true;
  for (int s = 0; s < 100; ++s)
    for (int k = 0; k < 1000; ++k)
      for (int m = 0; m < 10; ++m) {
        const double gval = map.gain(s, k, m);
        if (gval > 0.0) {
          ++on;
          in_range = in_range && gval >= params.lambda_low && gval <= params.lambda_high;
        }
      }
  const double mean = on / 1e6;
  CHECK(mean >= 0.099);
  CHECK(mean <= 0.101);
  CHECK(in_range);

  for (double p : {0.0, 1.0}) {
    ConnectivityParams bad;
    bad.p = p;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("effective gain") {
  ConnectivityMap map(1, 1, 6);
  BeamMask none = BeamMask::eigen(6, 0);
  CHECK(effective_gain(map, none, 0, 0) == 0.0);

  map.set(0, 0, 3, 0.8);
  CHECK(effective_gain(map, BeamMask::eigen(6, 3), 0, 0) == doctest::Approx(0.8));

  map.set(0, 0, 3, 0.6);
  BeamMask two = BeamMask::eigen(6, 3);
  two.active[4] = 1;
  CHECK(effective_gain(map, two, 0, 0) == doctest::Approx(0.3));

  // Presence under any admissible threshold equals "some active direction connected".
  ConnectivityParams params;
  const double thr = default_presence_threshold(params, 6);
  Rng rng = make_stream(4, 0, 0);
  for (int t = 0; t < 200; ++t) {
    const ConnectivityMap mm = sample_connectivity(params, 1, 1, 6, rng);
    const BeamMask mask = BeamMask::random(6, 1 + t % 6, rng);
    bool any = false;
    for (int m = 0; m < 6; ++m) any = any || (mask.active[m] && mm.connected(0, 0, m));
    CHECK((effective_gain(mm, mask, 0, 0) >= thr) == any);
  }
}

TEST_CASE("beam masks") {
  Rng rng = make_stream(2, 0, 0);
  for (int w = 1; w <= 6; ++w) {
    const BeamMask m = BeamMask::random(6, w, rng);
    CHECK(m.width() == w);
    CHECK(std::abs(m.beam().norm() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(BeamMask::random(6, 7, rng), ConfigError);
}

TEST_CASE("sector channel draws") {
  Rng rng = make_stream(5, 0, 0);
  CHECK(sample_sector_channel(0.0, 40, rng).norm() == 0.0);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += sample_sector_channel(1.0, 40, rng).squaredNorm() / 40.0;
  CHECK(std::abs(acc / n - 1.0) < 0.01);
  CHECK_THROWS_AS(sample_sector_channel(-1.0, 4, rng), DomainError);
}

TEST_CASE("circulant approximation") {
  const int m = 12;
  VectorXd spec(m);
  for (int i = 0; i < m; ++i) spec(i) = (i * 7) % 5 + 0.5;
  const MatrixXcd r = covariance_from_spectrum(spec);
  const CirculantApproximation fixed = circulant_approximation(r);
  CHECK((fixed.covariance - r).norm() < 1e-9 * r.norm());
  CHECK((fixed.spectrum - spec).norm() < 1e-9);

  const MatrixXcd eye = MatrixXcd::Identity(m, m);
  CHECK((circulant_approximation(eye).covariance - eye).norm() < 1e-12);

  Rng rng = make_stream(6, 0, 0);
  MatrixXcd a(m, 5);
  for (int c = 0; c < 5; ++c) a.col(c) = complex_normal_vector(rng, m);
  const MatrixXcd psd = a * a.adjoint();
  const double tr = psd.trace().real();
  CHECK(std::abs(circulant_approximation(psd).covariance.trace().real() - tr) < 1e-9 * tr);

  MatrixXcd skew = psd;
  skew(0, 1) += 1.0;
  CHECK_THROWS_AS(circulant_approximation(skew), DomainError);
}

TEST_CASE("piecewise-flat spectrum") {
  VectorXd flat = VectorXd::Constant(8, 2.5);
  CHECK((piecewise_flat(flat, 4) - flat).norm() == 0.0);
  VectorXd s(4);
  s << 4, 0, 0, 0;
  VectorXd expect(4);
  expect << 2, 2, 0, 0;
  CHECK((piecewise_flat(s, 2) - expect).norm() < 1e-15);
  VectorXd gains = sector_gains(s, 2);
  CHECK(gains(0) == doctest::Approx(2.0));
  CHECK(gains(1) == 0.0);
}
