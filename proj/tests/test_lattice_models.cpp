#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "z2edge/lattice_models.hpp"

using namespace z2edge;

namespace {

ModelSpec spec_on(LatticeGeometry g, double m, double lr = 0.0, double w = 0.0,
                  std::uint64_t seed = 1) {
  ModelSpec s;
  s.mass = m;
  s.lambda_r = lr;
  s.disorder = w;
  s.seed = seed;
  s.geometry = g;
  return s;
}

}  // namespace

TEST_CASE("geometry indexing and minimal-image distances") {
  const LatticeGeometry g = LatticeGeometry::cylinder(6, 4);
  CHECK(g.dimension() == 96);
  const Site s = g.site_of(g.flat_index(5, 2, 3));
  CHECK(s.x1 == 5);
  CHECK(s.x2 == 2);
  CHECK(g.distance(Site{0, 0}, Site{5, 0}) == doctest::Approx(1.0));
  CHECK(g.distance(Site{0, 0}, Site{0, 3}) == doctest::Approx(3.0));
  CHECK(boundary_from_string(to_string(Boundary::open)) == Boundary::open);
  CHECK_THROWS_AS(boundary_from_string("twisted"), InvalidArgument);
}

TEST_CASE("clean torus spectrum is the union of closed-form Bloch bands") {
  const int l = 6;
  const HermitianOperator h = build_bulk_hamiltonian(spec_on(LatticeGeometry::torus(l, l), 1.3));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  std::vector<double> expected;
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < l; ++b) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> s(
          oracle::qwz(1.3, 2 * oracle::pi * a / l, 2 * oracle::pi * b / l));
      for (int spin = 0; spin < 2; ++spin) {
        expected.push_back(s.eigenvalues()(0));
        expected.push_back(s.eigenvalues()(1));
      }
    }
  }
  std::sort(expected.begin(), expected.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    worst = std::max(worst, std::abs(expected[i] - solver.eigenvalues()(Index(i))));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("time reversal is odd and commutes with every model variant") {
  for (const auto& g : {LatticeGeometry::torus(6, 6), LatticeGeometry::cylinder(6, 6)}) {
    const AntiUnitary tau = build_time_reversal(g);
    CHECK(tau.is_odd());
    for (double lr : {0.0, 0.3}) {
      for (double w : {0.0, 0.5}) {
        const HermitianOperator h = assemble_hamiltonian(spec_on(g, 1.0, lr, w, 4));
        const TrsCheck t = verify_trs(h.matrix(), tau);
        CHECK(t.pass);
        CHECK(t.residual < 1e-10);
      }
    }
  }
}

TEST_CASE("builders enforce their boundary conditions") {
  CHECK_THROWS_AS(build_bulk_hamiltonian(spec_on(LatticeGeometry::cylinder(4, 4), 1.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(build_half_space_hamiltonian(spec_on(LatticeGeometry::torus(4, 4), 1.0)),
                  InvalidArgument);
}

TEST_CASE("disorder is seeded, bounded and reproducible") {
  const ModelSpec s = spec_on(LatticeGeometry::torus(8, 8), 1.0, 0.0, 0.5, 42);
  const auto a = disorder_potential(s);
  const auto b = disorder_potential(s);
  CHECK(a == b);
  CHECK(a.size() == 64);
  for (double v : a) CHECK(std::abs(v) <= 0.5);
  ModelSpec other = s;
  other.seed = 43;
  CHECK(disorder_potential(other) != a);
}

TEST_CASE("nearest-neighbour model is finite range") {
  const ModelSpec s = spec_on(LatticeGeometry::torus(6, 6), 1.0, 0.3);
  const LocalityCertificate c =
      verify_locality(build_bulk_hamiltonian(s).matrix(), s.geometry);
  CHECK(c.finite_range);
  CHECK(c.range == doctest::Approx(1.0));
}

TEST_CASE("spectral gap around mu") {
  RealVector e(4);
  e << -2.0, -1.0, 1.5, 3.0;
  const auto gap = spectral_gap(e, 0.0);
  REQUIRE(gap);
  CHECK(gap->lower == -1.0);
  CHECK(gap->upper == 1.5);
  CHECK_FALSE(spectral_gap(e, 1.5));

  const HermitianOperator h =
      build_bulk_hamiltonian(spec_on(LatticeGeometry::torus(8, 8), 1.0));
  const auto bulk = spectral_gap(h, 0.0);
  REQUIRE(bulk);
  CHECK(bulk->upper >= oracle::bloch_half_gap(1.0) - 1e-9);
}

TEST_CASE("position operator reports coordinates per flat index") {
  const LatticeGeometry g = LatticeGeometry::torus(3, 2);
  const RealVector x1 = position_operator(g, 1);
  const RealVector x2 = position_operator(g, 2);
  CHECK(x1(g.flat_index(2, 1, 3)) == 2.0);
  CHECK(x2(g.flat_index(2, 1, 3)) == 1.0);
}
